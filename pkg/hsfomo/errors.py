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

from typing import List, Tuple


class HsfomoError(Exception):
    """Base class for hsfomo related errors."""

    def __init__(self, message: str) -> None:
        """
        Creates a new instance of this class.

        :param message: the error message
        """

        self._message = message
        super().__init__(self._message)

    @property
    def message(self) -> str:
        """
        Returns the error message.

        :return: the error message
        """

        return self._message

    def __str__(self) -> str:
        """
        Returns the string representation of the error.

        :return: the string representation of the error
        """

        return self._message


class DomainError(HsfomoError):
    """Error that is raised when a scalar argument is outside its admissible interval."""

    def __init__(self, name: str, value: float, interval: Tuple[float, float], left_open: bool = False,
                 right_open: bool = False) -> None:
        """
        Creates a new instance of this class.

        :param name: the argument name
        :param value: the offending value
        :param interval: the admissible interval
        :param left_open: excludes the left end point of the interval, defaults to False
        :param right_open: excludes the right end point of the interval, defaults to False
        """

        opening = '(' if left_open else '['
        closing = ')' if right_open else ']'
        super().__init__(f'{name}={value} is outside {opening}{interval[0]}, {interval[1]}{closing}')


class NormalizationError(HsfomoError):
    """Error that is raised when a strain does not have Frobenius norm sqrt(2)/2."""

    def __init__(self, norm: float) -> None:
        """
        Creates a new instance of this class.

        :param norm: the Frobenius norm of the strain
        """

        super().__init__(f'Strain norm {norm:.12g} differs from sqrt(2)/2')


class InadmissibleTensorError(HsfomoError):
    """Error that is raised when a tensor violates the Loewner bounds of the phase pair."""

    def __init__(self) -> None:
        """Creates a new instance of this class."""

        super().__init__('Tensor violates the Loewner bounds E- <= E <= E+')


class DiscriminantError(HsfomoError):
    """Error that is raised when the activating volume quadratic has a negative discriminant."""

    def __init__(self, value: float) -> None:
        """
        Creates a new instance of this class.

        :param value: the most negative discriminant
        """

        super().__init__(f'Negative discriminant {value:.3e} in activating volume')


class BranchConflictError(HsfomoError):
    """Error that is raised when the trace and the deviator branches are active at once."""

    def __init__(self) -> None:
        """Creates a new instance of this class."""

        super().__init__('Trace and deviator branches are both active')


class SingularStiffnessError(HsfomoError):
    """Error that is raised when the reduced stiffness matrix cannot be factorized."""

    def __init__(self) -> None:
        """Creates a new instance of this class."""

        super().__init__('Stiffness matrix is singular, check the Dirichlet constraints')


class SolverBreakdownError(HsfomoError):
    """Error that is raised when a linear solve does not meet its residual tolerance."""

    def __init__(self, residual: float) -> None:
        """
        Creates a new instance of this class.

        :param residual: the relative residual
        """

        super().__init__(f'Linear solve residual {residual:.3e} exceeds tolerance')


class EmptyGridError(HsfomoError):
    """Error that is raised when the material grid has no admissible point."""

    def __init__(self) -> None:
        """Creates a new instance of this class."""

        super().__init__('Material grid contains no admissible point')


class DualBracketError(HsfomoError):
    """Error that is raised when the volume multiplier bracket cannot be expanded to a sign change."""

    def __init__(self, upper: float) -> None:
        """
        Creates a new instance of this class.

        :param upper: the last upper bracket value tried
        """

        super().__init__(f'Volume multiplier bracket failed up to {upper:.6g}')


class SingularLaminateError(HsfomoError):
    """Error that is raised when the laminate matrix B is singular."""

    def __init__(self) -> None:
        """Creates a new instance of this class."""

        super().__init__('Laminate matrix B is singular')


class ConfigurationError(HsfomoError):
    """Error that is raised when a run configuration violates one or more constraints."""

    def __init__(self, errors: List[str]) -> None:
        """
        Creates a new instance of this class.

        :param errors: the list of violated constraints, one entry per field
        """

        self._errors = errors
        super().__init__('Invalid configuration: ' + '; '.join(errors))

    @property
    def errors(self) -> List[str]:
        """
        Returns the list of violated constraints.

        :return: the list of violated constraints
        """

        return self._errors


class ConfigurationParseError(HsfomoError):
    """Error that is raised when a configuration file cannot be parsed."""

    def __init__(self, path: str, reason: str) -> None:
        """
        Creates a new instance of this class.

        :param path: the configuration file path
        :param reason: the parser message
        """

        super().__init__(f'Could not parse configuration {path}: {reason}')


class BundleError(HsfomoError):
    """Error that is raised when a result bundle cannot be read."""

    def __init__(self, path: str, reason: str) -> None:
        """
        Creates a new instance of this class.

        :param path: the bundle path
        :param reason: the reason of the failure
        """

        super().__init__(f'Could not read result bundle {path}: {reason}')
