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

import numpy as np

# Lattice offsets of the corner nodes followed by the midside nodes, counterclockwise from the bottom-left corner
_NODE_OFFSETS = ((0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1))
_EDGES = ('left', 'right', 'bottom', 'top')


class Mesh:
    """
    Rectangular grid of eight-node serendipity elements.

    Elements are numbered row by row from the bottom-left corner, e = ey * nx + ex. Nodes are numbered row by row over
    the (2 nx + 1) x (2 ny + 1) lattice of corner and midside positions, skipping the element centres. Node n owns the
    degrees of freedom 2 n (x) and 2 n + 1 (y).
    """

    def __init__(self, nx: int, ny: int, width: float, height: float) -> None:
        """
        Creates a new mesh instance.

        :param nx: the number of elements along x
        :param ny: the number of elements along y
        :param width: the domain width
        :param height: the domain height
        """

        if nx < 1 or ny < 1:
            raise ValueError(f'Element counts must be at least 1, got nx={nx} and ny={ny}')

        if not (width > 0 and height > 0):
            raise ValueError(f'Domain size must be positive, got width={width} and height={height}')

        self._nx = int(nx)
        self._ny = int(ny)
        self._width = float(width)
        self._height = float(height)

        i, j = np.meshgrid(np.arange(2 * nx + 1), np.arange(2 * ny + 1))
        keep = ~((i % 2 == 1) & (j % 2 == 1))
        self._lattice = np.full(i.shape, -1, dtype=np.int64)
        self._lattice[keep] = np.arange(np.count_nonzero(keep))
        self._coordinates = np.column_stack([i[keep] * (0.5 * self.element_width),
                                             j[keep] * (0.5 * self.element_height)])

        ex, ey = (a.ravel() for a in np.meshgrid(np.arange(nx), np.arange(ny)))
        self._connectivity = np.stack([self._lattice[2 * ey + dj, 2 * ex + di] for di, dj in _NODE_OFFSETS], axis=1)
        self._element_dofs = np.stack([2 * self._connectivity, 2 * self._connectivity + 1], axis=2).reshape(-1, 16)
        self._centroids = np.column_stack([(ex + 0.5) * self.element_width, (ey + 0.5) * self.element_height])

    @property
    def nx(self) -> int:
        """
        Returns the number of elements along the x axis.

        :return: the number of elements along the x axis
        """

        return self._nx

    @property
    def ny(self) -> int:
        """
        Returns the number of elements along the y axis.

        :return: the number of elements along the y axis
        """

        return self._ny

    @property
    def width(self) -> float:
        """
        Returns the domain width.

        :return: the domain width
        """

        return self._width

    @property
    def height(self) -> float:
        """
        Returns the domain height.

        :return: the domain height
        """

        return self._height

    @property
    def element_width(self) -> float:
        """
        Returns the element width.

        :return: the element width
        """

        return self._width / self._nx

    @property
    def element_height(self) -> float:
        """
        Returns the element height.

        :return: the element height
        """

        return self._height / self._ny

    @property
    def element_area(self) -> float:
        """
        Returns the element area.

        :return: the element area
        """

        return self.element_width * self.element_height

    @property
    def element_count(self) -> int:
        """
        Returns the number of elements.

        :return: the number of elements
        """

        return self._nx * self._ny

    @property
    def node_count(self) -> int:
        """
        Returns the number of nodes.

        :return: the number of nodes
        """

        return self._coordinates.shape[0]

    @property
    def dof_count(self) -> int:
        """
        Returns the number of degrees of freedom.

        :return: the number of degrees of freedom
        """

        return 2 * self.node_count

    @property
    def coordinates(self) -> np.ndarray:
        """
        Returns the node coordinates.

        :return: an array of shape (node_count, 2)
        """

        return self._coordinates

    @property
    def connectivity(self) -> np.ndarray:
        """
        Returns the element nodes, four corners followed by four midsides.

        :return: an array of shape (element_count, 8)
        """

        return self._connectivity

    @property
    def element_dofs(self) -> np.ndarray:
        """
        Returns the element degrees of freedom ordered (x, y) node by node.

        :return: an array of shape (element_count, 16)
        """

        return self._element_dofs

    @property
    def centroids(self) -> np.ndarray:
        """
        Returns the element centroids.

        :return: an array of shape (element_count, 2)
        """

        return self._centroids

    def nearest_node(self, x: float, y: float) -> int:
        """
        Returns the node closest to a point.

        :param x: the x coordinate
        :param y: the y coordinate
        :return: the node index
        """

        return int(np.argmin(np.hypot(self._coordinates[:, 0] - x, self._coordinates[:, 1] - y)))

    def edge_nodes(self, edge: str) -> np.ndarray:
        """
        Returns every node of a domain edge, midside nodes included.

        :param edge: one of left, right, bottom or top
        :return: the node indices
        """

        if edge == 'left':
            row = self._lattice[:, 0]
        elif edge == 'right':
            row = self._lattice[:, -1]
        elif edge == 'bottom':
            row = self._lattice[0, :]
        elif edge == 'top':
            row = self._lattice[-1, :]
        else:
            raise ValueError(f'Unknown edge {edge}, expected one of {", ".join(_EDGES)}')

        return row.copy()

    def element_at(self, ex: int, ey: int) -> int:
        return ey * self._nx + ex

    def __str__(self) -> str:
        """
        Returns the string representation of the mesh.

        :return: the string representation of the mesh
        """

        return f'Mesh(nx={self._nx}, ny={self._ny}, width={self._width:g}, height={self._height:g})'


def build_mesh(nx: int, ny: int, width: float, height: float) -> Mesh:
    """
    Builds a rectangular mesh of eight-node serendipity elements.

    :param nx: the number of elements along x
    :param ny: the number of elements along y
    :param width: the domain width
    :param height: the domain height
    :return: the mesh
    """

    return Mesh(nx, ny, width, height)
