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
Sampled geometry of the admissible sets.

The zeroth-order set A0, the Voigt set A1(v) and the Hashin-Shtrikman set A2(v) are described by their upper support
values <E eps, eps> <= f(eps) over normalized strains. The product space sweep stacks the A1 and A2 envelopes over a
sequence of volume fractions, and the laminate cloud samples tensors that touch the A2 boundary.
"""

import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hsfomo.errors import DomainError, InadmissibleTensorError
from hsfomo.hs_bounds import NORMALIZED_STRAIN_NORM, hs_energies
from hsfomo.laminate_am import laminate_tensors
from hsfomo.tensor_core import PhasePair, energy, is_admissible, loewner_leq, strain_invariants

logger = logging.getLogger(__name__)


class SetLabel(Enum):
    """Admissible set, from the loosest to the tightest."""

    A0 = 'A0'
    A1 = 'A1'
    A2 = 'A2'


def _check_unit_interval(v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise DomainError('v', v, (0, 1))


def _check_count(name: str, n: int) -> None:
    if n < 1:
        raise ValueError(f'{name} must be at least 1, got {n}')


class StrainSample:
    """Kelvin–Mandel strains with Frobenius norm sqrt(2)/2."""

    def __init__(self, strains: np.ndarray, seed: Optional[int] = None) -> None:
        """
        Creates a new strain sample instance.

        :param strains: the normalized strains, shape (n, 3)
        :param seed: the seed the strains were drawn with, defaults to None
        :raise ValueError: if a strain is not normalized
        """

        strains = np.array(strains, dtype=float, ndmin=2)
        norms = np.linalg.norm(strains, axis=1)
        if np.any(np.abs(norms - NORMALIZED_STRAIN_NORM) > 1e-12):
            raise ValueError('Strain sample contains strains with Frobenius norm other than sqrt(2)/2')

        self._strains = strains
        self._strains.setflags(write=False)
        self._seed = seed

    @property
    def strains(self) -> np.ndarray:
        """
        Returns the sampled strains.

        :return: the sampled strains
        """

        return self._strains

    @property
    def seed(self) -> Optional[int]:
        """
        Returns the sampling seed.

        :return: the sampling seed
        """

        return self._seed

    @property
    def invariants(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns the invariants (t, s) of every strain, which satisfy t^2 + s^2 = 1.

        :return: the trace and the deviator invariants
        """

        return strain_invariants(self._strains)

    def __len__(self) -> int:
        return self._strains.shape[0]

    def __str__(self) -> str:
        return f'StrainSample(size={len(self)}, seed={self._seed})'


class EnvelopeSurface:
    """Upper support values of an admissible set over a strain sample."""

    def __init__(self, label: SetLabel, v: float, strains: StrainSample, values: np.ndarray) -> None:
        self._label = label
        self._v = v
        self._strains = strains
        self._values = np.asarray(values, dtype=float)

    @property
    def label(self) -> SetLabel:
        """
        Returns the set label.

        :return: the set label
        """

        return self._label

    @property
    def v(self) -> float:
        """
        Returns the strong phase fraction.

        :return: the strong phase fraction
        """

        return self._v

    @property
    def strains(self) -> StrainSample:
        """
        Returns the sampled strains.

        :return: the sampled strains
        """

        return self._strains

    @property
    def values(self) -> np.ndarray:
        """
        Returns the bound f(eps) on <E eps, eps> for every sampled strain.

        :return: the support values, shape (n,)
        """

        return self._values

    def projection(self) -> np.ndarray:
        """
        Returns the envelope in the coordinates of the diagonal Kelvin–Mandel entries.

        A diagonal tensor diag(M11, M22, M33) is feasible for a strain if M11 e1^2 + M22 e2^2 + M33 e3^2 does not
        exceed the support value, so every row describes one bounding half space.

        :return: the columns e1^2, e2^2, e3^2, t, s and the support value, shape (n, 6)
        """

        e = self._strains.strains
        t, s = self._strains.invariants
        return np.column_stack([e ** 2, t, s, self._values])

    def __str__(self) -> str:
        return f'EnvelopeSurface(label={self._label.value}, v={self._v}, size={self._values.size})'


class ProductLayer:
    """Voigt and Hashin-Shtrikman envelopes at one volume fraction of the product space (v, E)."""

    def __init__(self, v: float, voigt: EnvelopeSurface, hs: EnvelopeSurface) -> None:
        self._v = v
        self._voigt = voigt
        self._hs = hs

    @property
    def v(self) -> float:
        """
        Returns the strong phase fraction.

        :return: the strong phase fraction
        """

        return self._v

    @property
    def voigt(self) -> EnvelopeSurface:
        """
        Returns the Voigt envelope.

        :return: the Voigt envelope
        """

        return self._voigt

    @property
    def hs(self) -> EnvelopeSurface:
        """
        Returns the Hashin–Shtrikman envelope.

        :return: the Hashin–Shtrikman envelope
        """

        return self._hs

    @property
    def gap(self) -> np.ndarray:
        """
        Returns the energy correction q by which the Hashin-Shtrikman envelope lies inside the Voigt envelope.

        :return: the per-strain differences, shape (n,)
        """

        return self._voigt.values - self._hs.values

    def __str__(self) -> str:
        return f'ProductLayer(v={self._v}, max_gap={float(np.max(self.gap)):.6g})'


class LaminateCloud:
    """Laminates built at random stresses for one volume fraction."""

    def __init__(self, tensors: np.ndarray, stresses: np.ndarray, volume: float) -> None:
        self._tensors = tensors
        self._stresses = stresses
        self._volume = volume

    @property
    def tensors(self) -> np.ndarray:
        """
        Returns the laminate tensors.

        :return: the laminate tensors
        """

        return self._tensors

    @property
    def stresses(self) -> np.ndarray:
        """
        Returns the stresses the laminates are built for.

        :return: the stresses the laminates are built for
        """

        return self._stresses

    @property
    def volume(self) -> float:
        """
        Returns the strong phase fraction of the laminates.

        :return: the strong phase fraction of the laminates
        """

        return self._volume

    def contact_strains(self) -> np.ndarray:
        """
        Returns the normalized strains E^-1 sigma at which the laminates touch the Hashin-Shtrikman boundary.

        :return: the strains, shape (n, 3)
        """

        strains = np.linalg.solve(self._tensors, self._stresses[..., None])[..., 0]
        return strains * (NORMALIZED_STRAIN_NORM / np.linalg.norm(strains, axis=1))[:, None]

    def __len__(self) -> int:
        return self._tensors.shape[0]

    def __str__(self) -> str:
        return f'LaminateCloud(size={len(self)}, volume={self._volume})'


def sample_strains(n: int, seed: Optional[int] = None) -> StrainSample:
    """
    Draws strains uniformly distributed on the Kelvin–Mandel sphere of radius sqrt(2)/2.

    :param n: the number of strains
    :param seed: the random seed, defaults to None
    :return: the strain sample
    :raise ValueError: if n is less than 1
    """

    _check_count('Strain count', n)

    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return StrainSample(directions * NORMALIZED_STRAIN_NORM, seed)


def envelope(label: SetLabel, v: float, strains: StrainSample, pair: PhasePair) -> EnvelopeSurface:
    """
    Evaluates the upper support values of an admissible set.

    :param label: the admissible set
    :param v: the strong phase fraction in [0, 1], ignored for A0
    :param strains: the strain sample
    :param pair: the phase pair
    :return: the envelope surface
    :raise DomainError: if v is outside [0, 1]
    """

    _check_unit_interval(v)

    e = strains.strains
    if label is SetLabel.A0:
        values = energy(pair.strong_tensor, e)
    elif label is SetLabel.A1:
        values = energy(pair.voigt_tensor(v), e)
    else:
        t, s = strains.invariants
        values = hs_energies(t, s, v, pair)

    return EnvelopeSurface(label, v, strains, np.atleast_1d(values))


def product_space_sweep(v_samples: Sequence[float], strains: StrainSample, pair: PhasePair) -> List[ProductLayer]:
    """
    Stacks the Voigt and the Hashin-Shtrikman envelopes over volume fractions.

    :param v_samples: the volume fractions in [0, 1]
    :param strains: the strain sample
    :param pair: the phase pair
    :return: one layer per volume fraction, in the given order
    :raise DomainError: if a volume fraction is outside [0, 1]
    """

    layers = [ProductLayer(v, envelope(SetLabel.A1, v, strains, pair), envelope(SetLabel.A2, v, strains, pair))
              for v in map(float, v_samples)]
    logger.debug('Swept %d product space layers over %d strains', len(layers), len(strains))
    return layers


def laminate_cloud(n: int, v: float, pair: PhasePair, seed: Optional[int] = None) -> LaminateCloud:
    """
    Builds the laminates attaining the complementary energy bound at random unit stresses.

    :param n: the number of stresses
    :param v: the strong phase fraction in (0, 1)
    :param pair: the phase pair
    :param seed: the random seed, defaults to None
    :return: the laminate cloud
    :raise ValueError: if n is less than 1
    :raise DomainError: if v is outside (0, 1)
    """

    _check_count('Stress count', n)
    if not 0.0 < v < 1.0:
        raise DomainError('v', v, (0, 1), left_open=True, right_open=True)

    rng = np.random.default_rng(seed)
    stresses = rng.standard_normal((n, 3))
    stresses /= np.linalg.norm(stresses, axis=1)[:, None]

    tensors = laminate_tensors(stresses, np.full(n, v), pair)
    logger.info('Built laminate cloud (size=%d, volume=%s)', n, v)
    return LaminateCloud(tensors, stresses, v)


def is_hs_feasible(m: np.ndarray, v: float, strains: StrainSample, pair: PhasePair, tol: float = 1e-9) -> bool:
    """
    Checks E in A2(v) against the sampled strains.

    :param m: the Kelvin–Mandel matrix
    :param v: the strong phase fraction in [0, 1]
    :param strains: the strain sample
    :param pair: the phase pair
    :param tol: the tolerance relative to the strong phase energy, defaults to 1e-9
    :return: True if E is admissible and satisfies the energy bound at every sampled strain
    :raise DomainError: if v is outside [0, 1]
    """

    _check_unit_interval(v)

    if not is_admissible(m, pair):
        return False

    t, s = strains.invariants
    excess = energy(m, strains.strains) - hs_energies(t, s, v, pair)
    return bool(np.all(excess <= tol * energy(pair.strong_tensor, strains.strains)))


def is_voigt_feasible(m: np.ndarray, v: float, pair: PhasePair, tol: float = 1e-9) -> bool:
    """
    Checks E- <= E <= E^V(v) in the Loewner order.

    :param m: the Kelvin–Mandel matrix
    :param v: the strong phase fraction in [0, 1]
    :param pair: the phase pair
    :param tol: the absolute eigenvalue tolerance, defaults to 1e-9
    :return: True if E lies in A1(v)
    :raise DomainError: if v is outside [0, 1]
    """

    _check_unit_interval(v)
    return bool(loewner_leq(pair.weak_tensor, m, tol) and loewner_leq(m, pair.voigt_tensor(v), tol))


def voigt_decomposition(m: np.ndarray, v: float, pair: PhasePair) -> np.ndarray:
    """
    Writes a Voigt-feasible point as (v, E) = (1 - v) (0, E-) + v (1, E1) with (1, E1) Hashin-Shtrikman feasible.

    :param m: the Kelvin–Mandel matrix in A1(v)
    :param v: the strong phase fraction in [0, 1]
    :param pair: the phase pair
    :return: the tensor E1 = E- + (E - E-) / v, or E- if v is 0
    :raise InadmissibleTensorError: if E is not in A1(v)
    """

    if not is_voigt_feasible(m, v, pair):
        raise InadmissibleTensorError()

    if v == 0.0:
        return pair.weak_tensor.copy()

    weak = pair.weak_tensor
    return weak + (np.asarray(m, dtype=float) - weak) / v


def contact_gap(m: np.ndarray, v: float, strain: np.ndarray, pair: PhasePair) -> float:
    """
    Returns the relative distance (f_hs - <E eps, eps>) / f_hs to the Hashin-Shtrikman boundary along a strain.

    :param m: the Kelvin–Mandel matrix
    :param v: the strong phase fraction in [0, 1]
    :param strain: the Kelvin–Mandel strain, any nonzero scale
    :param pair: the phase pair
    :return: the relative gap, zero on the boundary
    :raise DomainError: if v is outside [0, 1]
    """

    _check_unit_interval(v)

    t, s = strain_invariants(strain)
    bound = hs_energies(t, s, v, pair)
    return float((bound - energy(m, strain)) / bound)


def nonconvexity_fraction(cloud: LaminateCloud, strains: StrainSample, pair: PhasePair, n_pairs: int = 1000,
                          seed: Optional[int] = None) -> float:
    """
    Estimates how often chords of the product space set leave it.

    Every chord joins a random cloud point (v, E) with a random pure phase point, (0, E-) or (1, E+), and is
    evaluated at a uniformly drawn interior parameter.

    :param cloud: the laminate cloud
    :param strains: the strain sample for the feasibility check
    :param pair: the phase pair
    :param n_pairs: the number of chords, defaults to 1000
    :param seed: the random seed, defaults to None
    :return: the fraction of chord points outside A2
    :raise ValueError: if n_pairs is less than 1
    """

    _check_count('Chord count', n_pairs)

    rng = np.random.default_rng(seed)
    indices = rng.integers(0, len(cloud), n_pairs)
    strong = rng.random(n_pairs) < 0.5
    thetas = rng.uniform(0.0, 1.0, n_pairs)

    infeasible = 0
    for index, to_strong, theta in zip(indices, strong, thetas):
        end_v, end_m = (1.0, pair.strong_tensor) if to_strong else (0.0, pair.weak_tensor)
        v = (1.0 - theta) * cloud.volume + theta * end_v
        m = (1.0 - theta) * cloud.tensors[index] + theta * end_m
        if not is_hs_feasible(m, v, strains, pair):
            infeasible += 1

    fraction = infeasible / n_pairs
    logger.info('Chords outside the feasible set: %d of %d', infeasible, n_pairs)
    return fraction
