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

from typing import Optional, Tuple


class SgpConfiguration:
    """Specifies settings of the sequential global programming solver and its material grid."""

    def __init__(
            self,
            angle_samples: int = 721,
            diag_grid: int = 41,
            offdiag_grid: int = 41,
            merit_rel_tol: float = 1e-7,
            stall_iters: int = 5,
            volume_tol: float = 1e-6,
            max_iters: int = 300,
            lambda_bracket: Optional[Tuple[float, float]] = None,
            lambda_expansions: int = 6,
            coarse_stride: int = 8,
            mid_stride: int = 2,
            mid_radius: int = 4,
            fine_radius: int = 1,
            keep: int = 4,
            angle_stride: int = 8,
            exhaustive_limit: int = 250000,
            use_cache: bool = True,
            cache_dir: Optional[str] = None,
            show_progress: bool = False
    ) -> None:
        """
        Creates a new SGP configuration instance.

        :param angle_samples: the number of equidistant orientations in [0, pi/2), defaults to 721
        :param diag_grid: the number of grid values of E1111, E2222 and E1212, defaults to 41
        :param offdiag_grid: the number of grid values of E1122 within its admissible interval, defaults to 41
        :param merit_rel_tol: the relative merit change below which the solver stops, defaults to 1e-7
        :param stall_iters: the number of iterations without merit improvement after which the solver stops,
            defaults to 5
        :param volume_tol: the accepted deviation of the mean volume from its bound, defaults to 1e-6
        :param max_iters: the maximum number of iterations, defaults to 300
        :param lambda_bracket: the initial multiplier bracket, defaults to (0, 10 Tr E+) (optional)
        :param lambda_expansions: the number of tenfold bracket expansions, defaults to 6
        :param coarse_stride: the grid stride of the coarse search level, defaults to 8
        :param mid_stride: the grid stride of the middle search level, defaults to 2
        :param mid_radius: the neighbourhood radius of the middle level in strides, defaults to 4
        :param fine_radius: the neighbourhood radius of the full resolution level, defaults to 1
        :param keep: the number of hull vertices refined per level, defaults to 4
        :param angle_stride: the orientation stride of the coarse and middle levels, defaults to 8
        :param exhaustive_limit: the largest number of point-angle pairs searched exhaustively, defaults to 250000
        :param use_cache: toggles the material grid cache, defaults to True
        :param cache_dir: the cache directory, defaults to the user cache directory (optional)
        :param show_progress: toggles progress bars, defaults to False
        """

        for name, value in (('Angle sample', angle_samples), ('Diagonal grid', diag_grid),
                            ('Off-diagonal grid', offdiag_grid)):
            if value < 3:
                raise ValueError(f'{name} count must be at least 3, got {value}')

        for name, value in (('Merit tolerance', merit_rel_tol), ('Volume tolerance', volume_tol)):
            if not value > 0:
                raise ValueError(f'{name} must be positive, got {value}')

        for name, value in (('Stall iteration count', stall_iters), ('Iteration limit', max_iters),
                            ('Coarse stride', coarse_stride), ('Middle stride', mid_stride), ('Keep count', keep),
                            ('Angle stride', angle_stride)):
            if value < 1:
                raise ValueError(f'{name} must be at least 1, got {value}')

        if lambda_bracket is not None and not 0.0 <= lambda_bracket[0] < lambda_bracket[1]:
            raise ValueError(f'Multiplier bracket must satisfy 0 <= low < high, got {lambda_bracket}')

        self._angle_samples = int(angle_samples)
        self._diag_grid = int(diag_grid)
        self._offdiag_grid = int(offdiag_grid)
        self._merit_rel_tol = float(merit_rel_tol)
        self._stall_iters = int(stall_iters)
        self._volume_tol = float(volume_tol)
        self._max_iters = int(max_iters)
        self._lambda_bracket = None if lambda_bracket is None else (float(lambda_bracket[0]),
                                                                    float(lambda_bracket[1]))
        self._lambda_expansions = int(lambda_expansions)
        self._coarse_stride = int(coarse_stride)
        self._mid_stride = int(mid_stride)
        self._mid_radius = int(mid_radius)
        self._fine_radius = int(fine_radius)
        self._keep = int(keep)
        self._angle_stride = int(angle_stride)
        self._exhaustive_limit = int(exhaustive_limit)
        self._use_cache = bool(use_cache)
        self._cache_dir = cache_dir
        self._show_progress = bool(show_progress)

    @property
    def angle_samples(self) -> int:
        """
        Returns the number of sampled angles.

        :return: the number of sampled angles
        """

        return self._angle_samples

    @property
    def diag_grid(self) -> int:
        """
        Returns the number of grid points per diagonal axis.

        :return: the number of grid points per diagonal axis
        """

        return self._diag_grid

    @property
    def offdiag_grid(self) -> int:
        """
        Returns the number of grid points on the off-diagonal axis.

        :return: the number of grid points on the off-diagonal axis
        """

        return self._offdiag_grid

    @property
    def merit_rel_tol(self) -> float:
        """
        Returns the relative merit change tolerance.

        :return: the relative merit change tolerance
        """

        return self._merit_rel_tol

    @property
    def stall_iters(self) -> int:
        """
        Returns the number of iterations without progress before stopping.

        :return: the number of iterations without progress before stopping
        """

        return self._stall_iters

    @property
    def volume_tol(self) -> float:
        """
        Returns the tolerance on the mean volume residual.

        :return: the tolerance on the mean volume residual
        """

        return self._volume_tol

    @property
    def max_iters(self) -> int:
        """
        Returns the maximum number of iterations.

        :return: the maximum number of iterations
        """

        return self._max_iters

    @property
    def lambda_bracket(self) -> Optional[Tuple[float, float]]:
        """
        Returns the initial multiplier bracket.
        None means (0, 10 Tr E+) of the phase pair in use.

        :return: the initial multiplier bracket or None
        """

        return self._lambda_bracket

    @property
    def lambda_expansions(self) -> int:
        """
        Returns the maximum number of multiplier bracket expansions.

        :return: the maximum number of multiplier bracket expansions
        """

        return self._lambda_expansions

    @property
    def coarse_stride(self) -> int:
        """
        Returns the lattice stride of the coarse search level.

        :return: the lattice stride of the coarse search level
        """

        return self._coarse_stride

    @property
    def mid_stride(self) -> int:
        """
        Returns the lattice stride of the middle search level.

        :return: the lattice stride of the middle search level
        """

        return self._mid_stride

    @property
    def mid_radius(self) -> int:
        """
        Returns the neighbourhood radius of the middle search level.

        :return: the neighbourhood radius of the middle search level
        """

        return self._mid_radius

    @property
    def fine_radius(self) -> int:
        """
        Returns the neighbourhood radius of the fine search level.

        :return: the neighbourhood radius of the fine search level
        """

        return self._fine_radius

    @property
    def keep(self) -> int:
        """
        Returns the number of candidates kept per level.

        :return: the number of candidates kept per level
        """

        return self._keep

    @property
    def angle_stride(self) -> int:
        """
        Returns the angle stride of the coarse search level.

        :return: the angle stride of the coarse search level
        """

        return self._angle_stride

    @property
    def exhaustive_limit(self) -> int:
        """
        Returns the largest number of point-angle pairs that the element search evaluates exhaustively.
        Larger grids are searched hierarchically.

        :return: the exhaustive search limit
        """

        return self._exhaustive_limit

    @property
    def use_cache(self) -> bool:
        """
        Returns a value indicating whether material grids are cached on disk.

        :return: True if material grids are cached on disk, False otherwise
        """

        return self._use_cache

    @property
    def cache_dir(self) -> Optional[str]:
        """
        Returns the cache directory.

        :return: the cache directory
        """

        return self._cache_dir

    @property
    def show_progress(self) -> bool:
        """
        Returns a value indicating whether progress bars are shown.

        :return: True if progress bars are shown, False otherwise
        """

        return self._show_progress

    def __str__(self) -> str:
        """
        Returns the string representation of the SGP configuration.

        :return: the string representation of the SGP configuration
        """

        return f'SgpConfiguration(angle_samples={self._angle_samples}, diag_grid={self._diag_grid}, ' \
               f'offdiag_grid={self._offdiag_grid}, merit_rel_tol={self._merit_rel_tol}, ' \
               f'stall_iters={self._stall_iters}, volume_tol={self._volume_tol}, max_iters={self._max_iters}, ' \
               f'lambda_bracket={self._lambda_bracket}, exhaustive_limit={self._exhaustive_limit})'
