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

from typing import Optional

import numpy as np

from hsfomo.tensor_core import base_matrices, rotation_matrix


class DesignField:
    """Elementwise constant stiffness tensors together with their strong phase volume fractions."""

    def __init__(self, tensors: np.ndarray, volumes: np.ndarray, bases: Optional[np.ndarray] = None,
                 angles: Optional[np.ndarray] = None) -> None:
        """
        Creates a new design field instance.

        :param tensors: the Kelvin–Mandel matrices, shape (n, 3, 3)
        :param volumes: the volume fractions in [0, 1], shape (n,)
        :param bases: the orthotropic base coefficients, shape (n, 4), defaults to None
        :param angles: the orientation angles, shape (n,), defaults to None
        """

        self._tensors = np.array(tensors, dtype=float)
        self._volumes = np.array(volumes, dtype=float)
        n = self._volumes.shape[0]

        if self._tensors.shape != (n, 3, 3):
            raise ValueError(f'Expected {n} tensors of shape (3, 3), got array of shape {self._tensors.shape}')

        if np.any(self._volumes < 0.0) or np.any(self._volumes > 1.0):
            raise ValueError('Volume fractions must lie in [0, 1]')

        if (bases is None) != (angles is None):
            raise ValueError('Bases and angles must be given together')

        self._bases = None if bases is None else np.array(bases, dtype=float).reshape(n, 4)
        self._angles = None if angles is None else np.array(angles, dtype=float).reshape(n)

    @classmethod
    def from_orthotropic(cls, bases: np.ndarray, angles: np.ndarray, volumes: np.ndarray) -> 'DesignField':
        """
        Creates a design field from orthotropic bases and orientations.

        :param bases: the base coefficients (E1111, E1122, E2222, E1212), shape (n, 4)
        :param angles: the orientation angles, shape (n,)
        :param volumes: the volume fractions, shape (n,)
        :return: the design field
        """

        angles = np.asarray(angles, dtype=float) % np.pi
        r = rotation_matrix(angles)
        tensors = r @ base_matrices(bases) @ np.swapaxes(r, -1, -2)
        return cls(tensors, volumes, bases, angles)

    @classmethod
    def uniform(cls, tensor: np.ndarray, volume: float, element_count: int) -> 'DesignField':
        """
        Creates a design field with the same tensor in every element.

        :param tensor: the Kelvin–Mandel matrix
        :param volume: the volume fraction
        :param element_count: the number of elements
        :return: the design field
        """

        tensors = np.broadcast_to(np.asarray(tensor, dtype=float), (element_count, 3, 3))
        return cls(tensors, np.full(element_count, float(volume)))

    @property
    def tensors(self) -> np.ndarray:
        """
        Returns the Kelvin–Mandel matrices of the elements.

        :return: the Kelvin–Mandel matrices of the elements
        """

        return self._tensors

    @property
    def volumes(self) -> np.ndarray:
        """
        Returns the strong phase fractions of the elements.

        :return: the strong phase fractions of the elements
        """

        return self._volumes

    @property
    def bases(self) -> Optional[np.ndarray]:
        """
        Returns the orthotropic base coefficients of the elements.

        :return: the orthotropic base coefficients of the elements
        """

        return self._bases

    @property
    def angles(self) -> Optional[np.ndarray]:
        """
        Returns the orientation angles of the elements.

        :return: the orientation angles of the elements
        """

        return self._angles

    @property
    def mean_volume(self) -> float:
        """
        Returns the average strong phase fraction over equisized elements.

        :return: the mean volume fraction
        """

        return float(np.mean(self._volumes))

    def __len__(self) -> int:
        return self._volumes.shape[0]

    def __str__(self) -> str:
        """
        Returns the string representation of the design field.

        :return: the string representation of the design field
        """

        return f'DesignField(elements={len(self)}, mean_volume={self.mean_volume:.6f}, ' \
               f'orthotropic={self._bases is not None})'
