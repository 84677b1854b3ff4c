# Copyright 2020 Peter Bencze
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import logging
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from hsfomo.load_case import LoadCase, PointLoad
from hsfomo.mesh import Mesh, build_mesh

logger = logging.getLogger(__name__)

# (x, y, direction, magnitude)
LoadSpec = Tuple[float, float, int, float]


class Problem:
    """Compliance minimization problem: a mesh, load cases sharing their supports, and a volume bound."""

    def __init__(self, name: str, mesh: Mesh, loadcases: Sequence[LoadCase], volume_bound: float) -> None:
        """
        Creates a new problem instance.

        :param name: the problem name
        :param mesh: the mesh
        :param loadcases: the load cases
        :param volume_bound: the bound on the mean strong phase fraction in [0, 1]
        """

        if not loadcases:
            raise ValueError('Problem must have at least one load case')

        if not 0.0 <= volume_bound <= 1.0:
            raise ValueError(f'Volume bound must lie in [0, 1], got {volume_bound}')

        self._name = name
        self._mesh = mesh
        self._loadcases = list(loadcases)
        self._volume_bound = float(volume_bound)

    @classmethod
    def cantilever(cls, nx: int = 30, ny: int = 30, volume_bound: float = 0.2) -> 'Problem':
        """
        Creates the cantilever benchmark: a unit square clamped at every node of its left edge and loaded downwards at
        the bottom-right corner.

        :param nx: the number of elements along x, defaults to 30
        :param ny: the number of elements along y, defaults to 30
        :param volume_bound: the volume bound, defaults to 0.2
        :return: the problem
        """

        return cls.from_supports('cantilever', build_mesh(nx, ny, 1.0, 1.0), [[(1.0, 0.0, 1, -1.0)]], volume_bound,
                                 clamped_edges=['left'])

    @classmethod
    def multiload(cls, nx: int = 40, ny: int = 20, volume_bound: float = 0.2) -> 'Problem':
        """
        Creates the two load case benchmark on a 2 x 1 domain pinned at its four corners. The first load case pulls
        the top edge midpoint downwards, the second one pushes the bottom edge midpoint upwards.

        :param nx: the number of elements along x, defaults to 40
        :param ny: the number of elements along y, defaults to 20
        :param volume_bound: the volume bound, defaults to 0.2
        :return: the problem
        """

        corners = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
        loads = [[(1.0, 1.0, 1, -1.0)], [(1.0, 0.0, 1, 1.0)]]
        return cls.from_supports('multiload', build_mesh(nx, ny, 2.0, 1.0), loads, volume_bound,
                                 pinned_points=corners)

    @classmethod
    def from_supports(cls, name: str, mesh: Mesh, loads: Sequence[Sequence[LoadSpec]], volume_bound: float,
                      clamped_edges: Iterable[str] = (), pinned_points: Iterable[Tuple[float, float]] = ()
                      ) -> 'Problem':
        """
        Creates a problem from supports and loads located by coordinates. Points are snapped to the nearest node.

        :param name: the problem name
        :param mesh: the mesh
        :param loads: one list of (x, y, direction, magnitude) per load case
        :param volume_bound: the volume bound
        :param clamped_edges: the edges whose nodes are fixed in both directions, defaults to none
        :param pinned_points: the points whose nearest nodes are fixed in both directions, defaults to none
        :return: the problem
        """

        nodes: List[int] = []
        for edge in clamped_edges:
            nodes.extend(mesh.edge_nodes(edge).tolist())

        for x, y in pinned_points:
            nodes.append(mesh.nearest_node(x, y))

        fixed_dofs = sorted({2 * node + direction for node in nodes for direction in (0, 1)})
        loadcases = []
        for case in loads:
            point_loads = [PointLoad(mesh.nearest_node(x, y), direction, magnitude)
                           for x, y, direction, magnitude in case]
            loadcases.append(LoadCase(fixed_dofs, point_loads))

        problem = cls(name, mesh, loadcases, volume_bound)
        logger.debug('Created %s', problem)
        return problem

    @property
    def name(self) -> str:
        """
        Returns the problem name.

        :return: the problem name
        """

        return self._name

    @property
    def mesh(self) -> Mesh:
        """
        Returns the mesh.

        :return: the mesh
        """

        return self._mesh

    @property
    def loadcases(self) -> List[LoadCase]:
        """
        Returns the load cases.

        :return: the load cases
        """

        return self._loadcases

    @property
    def volume_bound(self) -> float:
        """
        Returns the bound on the mean volume.

        :return: the bound on the mean volume
        """

        return self._volume_bound

    @property
    def domain_area(self) -> float:
        """
        Returns the domain area.

        :return: the domain area
        """

        return self._mesh.width * self._mesh.height

    @property
    def fixed_dofs(self) -> np.ndarray:
        """
        Returns the fixed degrees of freedom.

        :return: the fixed degrees of freedom
        """

        return self._loadcases[0].fixed_dofs

    def __str__(self) -> str:
        """
        Returns the string representation of the problem.

        :return: the string representation of the problem
        """

        return f'Problem(name={self._name}, mesh={self._mesh}, loadcases={len(self._loadcases)}, ' \
               f'volume_bound={self._volume_bound:g})'
