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


class AmConfiguration:
    """Specifies settings of the laminate-based alternating minimization."""

    def __init__(
            self,
            density_change_tol: float = 1e-5,
            compliance_rel_tol: float = 1e-8,
            max_iters: int = 50000,
            volume_tol: float = 1e-8,
            bisection_iters: int = 60,
            lambda_expansions: int = 6,
            show_progress: bool = False
    ) -> None:
        """
        Creates a new alternating minimization configuration instance.

        :param density_change_tol: the maximum volume change below which the solver may stop, defaults to 1e-5
        :param compliance_rel_tol: the relative compliance change below which the solver may stop, defaults to 1e-8
        :param max_iters: the maximum number of iterations, defaults to 50000
        :param volume_tol: the accepted deviation of the mean volume from its bound, defaults to 1e-8
        :param bisection_iters: the number of bisection steps of the local volume update, defaults to 60
        :param lambda_expansions: the number of tenfold multiplier bracket expansions, defaults to 6
        :param show_progress: toggles the progress bar, defaults to False
        """

        for name, value in (('Density change tolerance', density_change_tol),
                            ('Compliance tolerance', compliance_rel_tol), ('Volume tolerance', volume_tol)):
            if not value > 0:
                raise ValueError(f'{name} must be positive, got {value}')

        for name, value in (('Iteration limit', max_iters), ('Bisection step count', bisection_iters)):
            if value < 1:
                raise ValueError(f'{name} must be at least 1, got {value}')

        self._density_change_tol = float(density_change_tol)
        self._compliance_rel_tol = float(compliance_rel_tol)
        self._max_iters = int(max_iters)
        self._volume_tol = float(volume_tol)
        self._bisection_iters = int(bisection_iters)
        self._lambda_expansions = int(lambda_expansions)
        self._show_progress = bool(show_progress)

    @property
    def density_change_tol(self) -> float:
        """
        Returns the tolerance on the maximum volume change.

        :return: the tolerance on the maximum volume change
        """

        return self._density_change_tol

    @property
    def compliance_rel_tol(self) -> float:
        """
        Returns the relative compliance change tolerance.

        :return: the relative compliance change tolerance
        """

        return self._compliance_rel_tol

    @property
    def max_iters(self) -> int:
        """
        Returns the maximum number of iterations.

        :return: the maximum number of iterations
        """

        return self._max_iters

    @property
    def volume_tol(self) -> float:
        """
        Returns the tolerance on the mean volume residual.

        :return: the tolerance on the mean volume residual
        """

        return self._volume_tol

    @property
    def bisection_iters(self) -> int:
        """
        Returns the number of bisection steps on the optimality condition of the local volume update.

        :return: the number of bisection steps
        """

        return self._bisection_iters

    @property
    def lambda_expansions(self) -> int:
        """
        Returns the maximum number of multiplier bracket expansions.

        :return: the maximum number of multiplier bracket expansions
        """

        return self._lambda_expansions

    @property
    def show_progress(self) -> bool:
        """
        Returns a value indicating whether a progress bar is shown.

        :return: True if a progress bar is shown, False otherwise
        """

        return self._show_progress

    def __str__(self) -> str:
        """
        Returns the string representation of the alternating minimization configuration.

        :return: the string representation of the alternating minimization configuration
        """

        return f'AmConfiguration(density_change_tol={self._density_change_tol}, ' \
               f'compliance_rel_tol={self._compliance_rel_tol}, max_iters={self._max_iters}, ' \
               f'volume_tol={self._volume_tol}, bisection_iters={self._bisection_iters})'
