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

from typing import Iterable, List, NamedTuple

import numpy as np


class PointLoad(NamedTuple):
    node: int
    direction: int
    magnitude: float


class LoadCase:
    """Homogeneous Dirichlet constraints together with nodal point loads."""

    def __init__(self, fixed_dofs: Iterable[int], point_loads: Iterable[PointLoad]) -> None:
        """
        Creates a new load case instance.

        :param fixed_dofs: the constrained degrees of freedom
        :param point_loads: the nodal loads
        """

        self._fixed_dofs = np.unique(np.asarray(list(fixed_dofs), dtype=np.int64))
        self._point_loads = [PointLoad(int(node), int(direction), float(magnitude))
                             for node, direction, magnitude in point_loads]

        if self._fixed_dofs.size == 0:
            raise ValueError('Load case must fix at least one degree of freedom')

        if any(load.direction not in (0, 1) for load in self._point_loads):
            raise ValueError('Load direction must be 0 (x) or 1 (y)')

        if not any(load.magnitude != 0.0 for load in self._point_loads):
            raise ValueError('Load case must carry a nonzero load')

    @property
    def fixed_dofs(self) -> np.ndarray:
        """
        Returns the sorted constrained degrees of freedom.

        :return: the constrained degrees of freedom
        """

        return self._fixed_dofs

    @property
    def point_loads(self) -> List[PointLoad]:
        """
        Returns the nodal loads.

        :return: the nodal loads
        """

        return self._point_loads

    def load_vector(self, dof_count: int) -> np.ndarray:
        """
        Assembles the global load vector.

        :param dof_count: the number of degrees of freedom of the mesh
        :return: the load vector
        """

        f = np.zeros(dof_count)
        for load in self._point_loads:
            f[2 * load.node + load.direction] += load.magnitude

        return f

    def __str__(self) -> str:
        """
        Returns the string representation of the load case.

        :return: the string representation of the load case
        """

        return f'LoadCase(fixed_dofs={self._fixed_dofs.size}, point_loads={self._point_loads})'
