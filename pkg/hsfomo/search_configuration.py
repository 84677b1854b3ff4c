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


class SearchConfiguration:
    """Specifies the one-dimensional search used for the worst-case volume over the trace invariant."""

    def __init__(self, coarse_samples: int = 256, golden_tol: float = 1e-10, brackets_max: int = 4) -> None:
        """
        Creates a new search configuration instance.

        :param coarse_samples: the number of equidistant samples of t in [0, 1], defaults to 256
        :param golden_tol: the bracket width at which golden-section refinement stops, defaults to 1e-10
        :param brackets_max: the maximum number of local maxima refined, defaults to 4
        """

        if coarse_samples < 3:
            raise ValueError(f'Coarse sample count must be at least 3, got {coarse_samples}')

        if not golden_tol > 0:
            raise ValueError(f'Golden-section tolerance must be positive, got {golden_tol}')

        if brackets_max < 1:
            raise ValueError(f'Bracket count must be at least 1, got {brackets_max}')

        self._coarse_samples = int(coarse_samples)
        self._golden_tol = float(golden_tol)
        self._brackets_max = int(brackets_max)

    @property
    def coarse_samples(self) -> int:
        """
        Returns the number of coarse samples.

        :return: the number of coarse samples
        """

        return self._coarse_samples

    @property
    def golden_tol(self) -> float:
        """
        Returns the golden-section tolerance.

        :return: the golden-section tolerance
        """

        return self._golden_tol

    @property
    def brackets_max(self) -> int:
        """
        Returns the maximum number of refined brackets.

        :return: the maximum number of refined brackets
        """

        return self._brackets_max

    def cache_key(self) -> str:
        """
        Returns a stable textual key of the settings.

        :return: the key
        """

        return f'{self._coarse_samples}:{self._golden_tol!r}:{self._brackets_max}'

    def __str__(self) -> str:
        """
        Returns the string representation of the search configuration.

        :return: the string representation of the search configuration
        """

        return f'SearchConfiguration(coarse_samples={self._coarse_samples}, golden_tol={self._golden_tol}, ' \
               f'brackets_max={self._brackets_max})'
