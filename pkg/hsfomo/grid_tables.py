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

"""
Precomputed material grids of orthotropic base tensors.

A grid point is a base (E1111, E1122, E2222, E1212) with E1111, E2222 and E1212 on equidistant axes between the
weak and the strong phase and E1122 on equidistant values of the interval allowed by the block Loewner bounds.
Every point carries the inverse weights (a11, 2 a12, a22, 1 / M33) of its Kelvin–Mandel inverse, so that
<P, M^-1> is a dot product with the components (P11, P12, P22, P33), and its estimated volume.
"""

import hashlib
import logging
import math
import os
from typing import Optional, Tuple

import appdirs
import numpy as np
from tqdm import tqdm

from hsfomo.errors import EmptyGridError
from hsfomo.hs_bounds import VolumeEstimatorKind, estimator_volumes
from hsfomo.search_configuration import SearchConfiguration
from hsfomo.sgp_configuration import SgpConfiguration
from hsfomo.tensor_core import PhasePair, rotation_matrix

logger = logging.getLogger(__name__)

_VOLUME_CHUNK = 16384


class GridTables:
    """Admissible grid points with their inverse weights, estimated volumes and the sampled rotations."""

    def __init__(self, points: np.ndarray, lattice: np.ndarray, shape: Tuple[int, int, int, int],
                 volumes: np.ndarray, angles: np.ndarray) -> None:
        """
        Creates a new grid table instance.

        :param points: the base coefficients, shape (n, 4)
        :param lattice: the lattice indices (E1111, E2222, E1212, E1122) of the points, shape (n, 4)
        :param shape: the lattice shape
        :param volumes: the estimated volumes, shape (n,)
        :param angles: the sampled orientations, shape (n_angles,)
        """

        if points.shape[0] == 0:
            raise EmptyGridError()

        self._points = points
        self._lattice = lattice
        self._shape = shape
        self._volumes = volumes
        self._angles = angles

        self._index = np.full(shape, -1, dtype=np.int64)
        self._index[tuple(lattice.T)] = np.arange(points.shape[0])

        det = points[:, 0] * points[:, 2] - points[:, 1] ** 2
        self._weights = np.column_stack([points[:, 2] / det, -2.0 * points[:, 1] / det, points[:, 0] / det,
                                         0.5 / points[:, 3]])
        self._rotations = rotation_matrix(angles)

    @property
    def points(self) -> np.ndarray:
        """
        Returns the base coefficients of the grid points.

        :return: the base coefficients of the grid points
        """

        return self._points

    @property
    def lattice(self) -> np.ndarray:
        """
        Returns the lattice indices of the grid points.

        :return: the lattice indices of the grid points
        """

        return self._lattice

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        """
        Returns the lattice shape.

        :return: the lattice shape
        """

        return self._shape

    @property
    def index(self) -> np.ndarray:
        """
        Returns the dense map from lattice indices to point indices, -1 where the lattice point is inadmissible.

        :return: an integer array of the lattice shape
        """

        return self._index

    @property
    def weights(self) -> np.ndarray:
        """
        Returns the inverse base components of the grid points.

        :return: the inverse base components of the grid points
        """

        return self._weights

    @property
    def volumes(self) -> np.ndarray:
        """
        Returns the estimated volumes of the grid points.

        :return: the estimated volumes of the grid points
        """

        return self._volumes

    @property
    def angles(self) -> np.ndarray:
        """
        Returns the sampled orientation angles.

        :return: the sampled orientation angles
        """

        return self._angles

    @property
    def rotations(self) -> np.ndarray:
        """
        Returns the rotation matrices of the sampled angles.

        :return: the rotation matrices of the sampled angles
        """

        return self._rotations

    def __len__(self) -> int:
        return self._points.shape[0]

    def __str__(self) -> str:
        """
        Returns the string representation of the grid tables.

        :return: the string representation of the grid tables
        """

        return f'GridTables(points={len(self)}, shape={self._shape}, angles={self._angles.size})'


def grid_points(pair: PhasePair, diag_grid: int, offdiag_grid: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Enumerates the base tensors between the phases on the material lattice.

    :param pair: the phase pair
    :param diag_grid: the number of values of E1111, E2222 and E1212
    :param offdiag_grid: the number of values of E1122
    :return: the base coefficients of shape (n, 4) and their lattice indices of shape (n, 4)
    """

    weak, strong = pair.weak, pair.strong
    a_lo, a_hi = weak.kappa + weak.mu, strong.kappa + strong.mu
    b_lo, b_hi = weak.kappa - weak.mu, strong.kappa - strong.mu
    diagonal = np.linspace(a_lo, a_hi, diag_grid)
    shear = np.linspace(weak.mu, strong.mu, diag_grid)

    i, j = (x.ravel() for x in np.meshgrid(np.arange(diag_grid), np.arange(diag_grid), indexing='ij'))
    a, c = diagonal[i], diagonal[j]
    lower_radius = np.sqrt(np.clip((a - a_lo) * (c - a_lo), 0.0, None))
    upper_radius = np.sqrt(np.clip((a_hi - a) * (a_hi - c), 0.0, None))
    lo = np.maximum(b_lo - lower_radius, b_hi - upper_radius)
    hi = np.minimum(b_lo + lower_radius, b_hi + upper_radius)
    # Tiny negative widths stem from rounding at the lattice corners.
    tol = 1e-12 * a_hi
    valid = hi >= lo - tol
    hi = np.maximum(hi, lo)
    i, j, lo, hi = (x[valid] for x in (i, j, lo, hi))

    fractions = np.linspace(0.0, 1.0, offdiag_grid)
    ii = np.repeat(i, diag_grid * offdiag_grid)
    jj = np.repeat(j, diag_grid * offdiag_grid)
    kk = np.tile(np.repeat(np.arange(diag_grid), offdiag_grid), i.size)
    ll = np.tile(np.arange(offdiag_grid), i.size * diag_grid)
    b = np.repeat(lo, diag_grid * offdiag_grid) + np.repeat(hi - lo, diag_grid * offdiag_grid) * fractions[ll]

    points = np.column_stack([diagonal[ii], b, diagonal[jj], shear[kk]])
    return points, np.column_stack([ii, jj, kk, ll])


def cache_key(pair: PhasePair, cfg: SgpConfiguration, estimator: VolumeEstimatorKind,
              search_cfg: SearchConfiguration) -> str:
    """
    Returns the SHA-1 key of a material grid.

    :param pair: the phase pair
    :param cfg: the SGP configuration
    :param estimator: the volume estimator
    :param search_cfg: the worst-case volume search configuration
    :return: the hexadecimal key
    """

    text = f'{pair.weak.kappa!r}:{pair.weak.mu!r}:{pair.strong.kappa!r}:{pair.strong.mu!r}:' \
           f'{cfg.diag_grid}:{cfg.offdiag_grid}:{estimator.value}'
    if estimator is VolumeEstimatorKind.HASHIN_SHTRIKMAN:
        text += ':' + search_cfg.cache_key()

    return hashlib.sha1(text.encode('utf-8')).hexdigest()


def _cache_path(key: str, cfg: SgpConfiguration) -> str:
    directory = cfg.cache_dir or appdirs.user_cache_dir('hsfomo')
    return os.path.join(directory, f'grid-{key}.npz')


def _load_cached(path: str) -> Optional[np.ndarray]:
    if not os.path.isfile(path):
        return None

    try:
        with np.load(path) as data:
            return data['volumes']
    except (OSError, KeyError, ValueError) as error:
        logger.warning('Ignoring unreadable grid cache %s: %s', path, error)
        return None


def _store_cached(path: str, volumes: np.ndarray) -> None:
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        np.savez_compressed(path, volumes=volumes)
        logger.info('Stored material grid volumes in %s', path)
    except OSError as error:
        logger.warning('Could not write grid cache %s: %s', path, error)


def _compute_volumes(points: np.ndarray, pair: PhasePair, estimator: VolumeEstimatorKind,
                     search_cfg: SearchConfiguration, show_progress: bool) -> np.ndarray:
    volumes = np.empty(points.shape[0])
    chunks = range(0, points.shape[0], _VOLUME_CHUNK)
    for start in tqdm(chunks, desc=f'{estimator.value} volumes', unit='chunk', disable=not show_progress):
        stop = start + _VOLUME_CHUNK
        volumes[start:stop] = estimator_volumes(estimator, points[start:stop], pair, search_cfg)

    return volumes


def build_grid(pair: PhasePair, cfg: Optional[SgpConfiguration] = None,
               estimator: VolumeEstimatorKind = VolumeEstimatorKind.HASHIN_SHTRIKMAN,
               search_cfg: Optional[SearchConfiguration] = None) -> GridTables:
    """
    Builds the material grid of the phase pair and precomputes the estimated volume of every point.

    :param pair: the phase pair
    :param cfg: the SGP configuration, defaults to SgpConfiguration()
    :param estimator: the volume estimator, defaults to the Hashin–Shtrikman worst-case volume
    :param search_cfg: the worst-case volume search configuration, defaults to SearchConfiguration()
    :return: the grid tables
    :raise EmptyGridError: if no lattice point is admissible
    """

    cfg = cfg or SgpConfiguration()
    search_cfg = search_cfg or SearchConfiguration()

    points, lattice = grid_points(pair, cfg.diag_grid, cfg.offdiag_grid)
    if points.shape[0] == 0:
        raise EmptyGridError()

    key = cache_key(pair, cfg, estimator, search_cfg)
    path = _cache_path(key, cfg)
    volumes = _load_cached(path) if cfg.use_cache else None
    if volumes is not None and volumes.shape != (points.shape[0],):
        logger.warning('Ignoring grid cache %s with %d entries, expected %d', path, volumes.size, points.shape[0])
        volumes = None

    if volumes is None:
        logger.info('Computing %s volumes of %d grid points', estimator.value, points.shape[0])
        volumes = _compute_volumes(points, pair, estimator, search_cfg, cfg.show_progress)
        if cfg.use_cache:
            _store_cached(path, volumes)
    else:
        logger.info('Loaded material grid volumes from %s', path)

    angles = np.linspace(0.0, 0.5 * math.pi, cfg.angle_samples, endpoint=False)
    shape = (cfg.diag_grid, cfg.diag_grid, cfg.diag_grid, cfg.offdiag_grid)
    return GridTables(points, lattice, shape, volumes, angles)
