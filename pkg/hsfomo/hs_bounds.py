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
Energy bounds of two-phase composites and the volume estimators derived from them.

Strains are normalized to the Frobenius norm sqrt(2)/2, so their invariants satisfy t^2 + s^2 = 1. The scalar
functions validate their arguments and raise; the plural functions are vectorized and trust their inputs.
"""

import logging
import math
from enum import Enum, IntEnum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from hsfomo.errors import BranchConflictError, DiscriminantError, DomainError, InadmissibleTensorError, \
    NormalizationError
from hsfomo.search_configuration import SearchConfiguration
from hsfomo.tensor_core import J_MATRIX, K_MATRIX, OrthoTensor, PhasePair, base_matrices, energy, is_admissible, \
    strain_invariants

logger = logging.getLogger(__name__)

NORMALIZED_STRAIN_NORM = math.sqrt(2.0) / 2.0
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

_BISECTION_STEPS = 100
_CHUNK_SIZE = 2048

ArrayLike = Union[float, np.ndarray]


class HsBranch(IntEnum):
    """Active formula of the energy correction."""

    B1 = 1
    B2 = 2
    B3 = 3


class VolumeEstimatorKind(Enum):
    """Volume estimator of a material model, from the weakest to the tightest."""

    ZERO_ORDER = 'zo'
    VOIGT = 'voigt'
    HASHIN_SHTRIKMAN = 'hs'


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(name, value, (0, 1))


def _check_normalized(e: np.ndarray) -> None:
    norm = float(np.linalg.norm(e))
    if abs(norm - NORMALIZED_STRAIN_NORM) > 1e-10:
        raise NormalizationError(norm)


def _check_admissible(m: np.ndarray, pair: PhasePair) -> None:
    if not is_admissible(m, pair):
        raise InadmissibleTensorError()


def _unwrap(values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(values) == 0 else values


def q_values(t: ArrayLike, s: ArrayLike, v: ArrayLike, pair: PhasePair) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluates the energy correction q and its active branch, vectorized.

    :param t: the trace invariants
    :param s: the deviator invariants
    :param v: the strong phase volume fractions
    :param pair: the phase pair
    :return: the correction values and the branch codes 1, 2 or 3
    :raise BranchConflictError: if both the trace and the deviator branch conditions hold
    """

    t, s, v = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float), np.asarray(v, dtype=float))
    dk, dm = pair.dkappa, pair.dmu
    k_sum = pair.strong.kappa + pair.strong.mu

    trace_active = v * t * dk > (k_sum - dk * v) * s
    deviator_active = v * dm * s > (k_sum - dm * v) * t
    if np.any(trace_active & deviator_active):
        raise BranchConflictError()

    q1 = v * (1.0 - v) * (dk * t - dm * s) ** 2 / (k_sum - (dk + dm) * v)
    q2 = (1.0 - v) * (v * t ** 2 * dk ** 2 / (k_sum - dk * v) - s ** 2 * dm)
    q3 = (1.0 - v) * (v * s ** 2 * dm ** 2 / (k_sum - dm * v) - t ** 2 * dk)

    values = np.where(trace_active, q2, np.where(deviator_active, q3, q1))
    branches = np.where(trace_active, HsBranch.B2.value, np.where(deviator_active, HsBranch.B3.value,
                                                                  HsBranch.B1.value))
    return values, branches


def q_correction(t: float, v: float, pair: PhasePair) -> Tuple[float, HsBranch]:
    """
    Returns the correction of the Voigt energy for a normalized strain with trace invariant t.

    :param t: the trace invariant in [0, 1]
    :param v: the strong phase volume fraction in [0, 1]
    :param pair: the phase pair
    :return: the correction value and the active branch
    :raise DomainError: if t or v is outside [0, 1]
    """

    _check_unit_interval('t', t)
    _check_unit_interval('v', v)

    values, branches = q_values(t, math.sqrt(max(0.0, 1.0 - t * t)), v, pair)
    return float(values), HsBranch(int(branches))


def hs_energies(t: ArrayLike, s: ArrayLike, v: ArrayLike, pair: PhasePair) -> ArrayLike:
    """
    Evaluates the energy envelope kappa_V t^2 + mu_V s^2 - q, vectorized.

    The envelope is 2-homogeneous in the strain, so the invariants need not be normalized.

    :param t: the trace invariants
    :param s: the deviator invariants
    :param v: the strong phase volume fractions
    :param pair: the phase pair
    :return: the envelope values
    """

    t, s, v = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float), np.asarray(v, dtype=float))
    kappa = pair.weak.kappa + v * pair.dkappa
    mu = pair.weak.mu + v * pair.dmu
    q, _ = q_values(t, s, v, pair)
    return _unwrap(kappa * t ** 2 + mu * s ** 2 - q)


def f_hs(e: np.ndarray, v: float, pair: PhasePair) -> float:
    """
    Returns the upper bound on the energy of a composite with strong phase fraction v for a normalized strain.

    :param e: the Kelvin–Mandel strain with Frobenius norm sqrt(2)/2
    :param v: the strong phase volume fraction in [0, 1]
    :param pair: the phase pair
    :return: the energy bound
    :raise NormalizationError: if the strain is not normalized
    :raise DomainError: if v is outside [0, 1]
    """

    e = np.asarray(e, dtype=float)
    _check_normalized(e)
    _check_unit_interval('v', v)

    if v == 0.0:
        return energy(pair.weak_tensor, e)

    if v == 1.0:
        return energy(pair.strong_tensor, e)

    t, s = strain_invariants(e)
    q, _ = q_correction(min(t, 1.0), v, pair)
    return energy(pair.voigt_tensor(v), e) - q


def _bisect_volumes(target: np.ndarray, t: np.ndarray, s: np.ndarray, pair: PhasePair) -> np.ndarray:
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = hs_energies(t, s, mid, pair) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    return 0.5 * (lo + hi)


def _interior_volumes(target: np.ndarray, t: np.ndarray, s: np.ndarray, pair: PhasePair) -> np.ndarray:
    k_minus, mu_minus = pair.weak.kappa, pair.weak.mu
    k_plus, mu_plus = pair.strong.kappa, pair.strong.mu
    dk, dm = pair.dkappa, pair.dmu
    k_sum = k_plus + mu_plus
    ts = t + s
    scale = np.maximum(k_plus * t ** 2 + mu_plus * s ** 2, 1e-300)

    v12 = k_sum * s / (dk * ts)
    v13 = k_sum * t / (dm * ts)
    seam = np.clip(np.minimum(v12, v13), 0.0, 1.0)
    first = target <= hs_energies(t, s, seam, pair)

    # Branch 1: the smaller root of the quadratic obtained by clearing the denominator
    a = k_minus * t ** 2 + mu_minus * s ** 2
    b = dk * t ** 2 + dm * s ** 2
    g = (dk * t - dm * s) ** 2
    qa = -dk * dm * ts ** 2
    qb = b * k_sum - (dk + dm) * (a - target) - g
    qc = (a - target) * k_sum
    disc = qb ** 2 - 4.0 * qa * qc
    clamp_tol = 1e-9 * np.maximum(1.0, qb ** 2)
    bad = first & (disc < -clamp_tol)
    if np.any(bad):
        raise DiscriminantError(float(np.min(disc[bad])))

    root = np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(divide='ignore', invalid='ignore'):
        v1 = np.where(qb > 0.0, -2.0 * qc / (qb + root), (qb - root) / (2.0 * np.abs(qa)))

        den2 = target - mu_plus * (s ** 2 - t ** 2)
        den3 = target + k_plus * (s ** 2 - t ** 2)
        v2 = k_sum / dk * (1.0 - t ** 2 * (k_minus + mu_plus) / den2)
        v3 = k_sum / dm * (1.0 - s ** 2 * (k_plus + mu_minus) / den3)

    use_trace = v12 < v13
    volumes = np.where(first, v1, np.where(use_trace, v2, v3))
    fragile = ~np.isfinite(volumes)
    fragile |= first & (volumes > seam + 1e-12)
    fragile |= ~first & (volumes < seam - 1e-12)
    fragile |= ~first & use_trace & (np.abs(den2) < 1e-12 * scale)
    fragile |= ~first & ~use_trace & (np.abs(den3) < 1e-12 * scale)

    if np.any(fragile):
        logger.debug('Bisection fallback for %d activating volumes', int(np.count_nonzero(fragile)))
        volumes = volumes.copy()
        volumes[fragile] = _bisect_volumes(target[fragile], t[fragile], s[fragile], pair)

    return np.clip(volumes, 0.0, 1.0)


def activating_volumes(target: ArrayLike, t: ArrayLike, pair: PhasePair) -> ArrayLike:
    """
    Solves f_hs(t; v) = target for v, vectorized over normalized strains given by their trace invariant.

    :param target: the energies to activate
    :param t: the trace invariants in [0, 1]
    :param pair: the phase pair
    :return: the activating volumes in [0, 1]
    :raise DiscriminantError: if a quadratic branch has a clearly negative discriminant
    """

    target, t = np.broadcast_arrays(np.asarray(target, dtype=float), np.asarray(t, dtype=float))
    shape = target.shape
    target = target.ravel()
    t = np.clip(t.ravel(), 0.0, 1.0)
    s = np.sqrt(np.maximum(1.0 - t * t, 0.0))

    lowest = target <= pair.weak.kappa * t ** 2 + pair.weak.mu * s ** 2
    highest = target >= pair.strong.kappa * t ** 2 + pair.strong.mu * s ** 2
    volumes = np.where(highest, 1.0, 0.0)
    inner = ~(lowest | highest)
    if np.any(inner):
        volumes[inner] = _interior_volumes(target[inner], t[inner], s[inner], pair)

    return _unwrap(volumes.reshape(shape))


def activating_volume(e: np.ndarray, m: np.ndarray, pair: PhasePair) -> float:
    """
    Returns the smallest strong phase fraction whose energy bound is reached by the tensor for the given strain.

    :param e: the Kelvin–Mandel strain with Frobenius norm sqrt(2)/2
    :param m: the Kelvin–Mandel matrix of the tensor
    :param pair: the phase pair
    :return: the activating volume in [0, 1]
    :raise NormalizationError: if the strain is not normalized
    :raise InadmissibleTensorError: if the tensor is not between the phases
    """

    e = np.asarray(e, dtype=float)
    _check_normalized(e)
    _check_admissible(m, pair)

    t, _ = strain_invariants(e)
    return float(activating_volumes(energy(m, e), t, pair))


def emax_energies(t: ArrayLike, a: ArrayLike, b: ArrayLike, c: ArrayLike, g: ArrayLike) -> ArrayLike:
    """
    Returns the largest energy of an orthotropic base over normalized strains with trace invariant t, vectorized.

    :param t: the trace invariants in [0, 1]
    :param a: the base coefficients E1111
    :param b: the base coefficients E1122
    :param c: the base coefficients E2222
    :param g: the base coefficients E1212
    :return: the maximal energies
    """

    t, a, b, c, g = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (t, a, b, c, g)))
    xi = a - 2.0 * b + c - 4.0 * g
    diff = a - c
    with np.errstate(divide='ignore', invalid='ignore'):
        threshold = np.abs(xi) / np.sqrt(xi ** 2 + diff ** 2)
        stationary = t ** 2 * (a + 2.0 * b + c) / 4.0 + g * (1.0 - t ** 2) - t ** 2 * diff ** 2 / (4.0 * xi)

    boundary = (a - 2.0 * b + c) / 4.0 + b * t ** 2 + 0.5 * np.abs(diff) * t * np.sqrt(np.maximum(1.0 - t ** 2, 0.0))
    interior = (xi < 0.0) & (t <= threshold)
    return _unwrap(np.where(interior, stationary, boundary))


def emax_energy(t: float, base: OrthoTensor) -> float:
    """
    Returns the largest energy of the base tensor over normalized strains with trace invariant t.

    :param t: the trace invariant in [0, 1]
    :param base: the orthotropic tensor, whose angle is ignored
    :return: the maximal energy
    :raise DomainError: if t is outside [0, 1]
    """

    _check_unit_interval('t', t)
    return float(emax_energies(t, *base.coefficients))


def golden_section_max(f: Callable[[np.ndarray], np.ndarray], lo: ArrayLike, hi: ArrayLike,
                       tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray]:
    """
    Maximizes a vectorized function on a batch of brackets by golden-section search.

    :param f: a function mapping an array of abscissas to values of the same shape
    :param lo: the lower bracket ends
    :param hi: the upper bracket ends
    :param tol: the final bracket width, defaults to 1e-10
    :return: the maximizers and the maximal values
    """

    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    iterations = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INVPHI)))

    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        left = fc >= fd
        lo, hi = np.where(left, lo, c), np.where(left, d, hi)
        x = np.where(left, hi - INVPHI * (hi - lo), lo + INVPHI * (hi - lo))
        fx = f(x)
        c, d = np.where(left, x, d), np.where(left, c, x)
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)

    return np.where(fc >= fd, c, d), np.maximum(fc, fd)


def _worst_case_chunk(bases: np.ndarray, pair: PhasePair, cfg: SearchConfiguration) -> np.ndarray:
    a, b, c, g = (bases[:, k:k + 1] for k in range(4))

    def volumes(t: np.ndarray) -> np.ndarray:
        return np.asarray(activating_volumes(emax_energies(t, a, b, c, g), t, pair))

    grid = np.linspace(0.0, 1.0, cfg.coarse_samples)
    coarse = volumes(grid[None, :])
    padded = np.pad(coarse, ((0, 0), (1, 1)), constant_values=-np.inf)
    peaks = (coarse >= padded[:, :-2]) & (coarse >= padded[:, 2:])
    scores = np.where(peaks, coarse, -np.inf)
    order = np.argsort(-scores, axis=1, kind='stable')[:, :cfg.brackets_max]

    step = grid[1] - grid[0]
    lo = np.clip(grid[order] - step, 0.0, 1.0)
    hi = np.clip(grid[order] + step, 0.0, 1.0)
    _, refined = golden_section_max(volumes, lo, hi, cfg.golden_tol)
    return np.maximum(coarse.max(axis=1), refined.max(axis=1))


def worst_case_volumes(bases: np.ndarray, pair: PhasePair, cfg: Optional[SearchConfiguration] = None) -> np.ndarray:
    """
    Returns the supremum of the activating volume over the trace invariant for rows of base coefficients.

    :param bases: an array of shape (n, 4) with columns (E1111, E1122, E2222, E1212)
    :param pair: the phase pair
    :param cfg: the search configuration, defaults to SearchConfiguration()
    :return: the worst-case volumes of shape (n,)
    """

    cfg = cfg or SearchConfiguration()
    bases = np.atleast_2d(np.asarray(bases, dtype=float))
    result = np.empty(bases.shape[0])
    for start in range(0, bases.shape[0], _CHUNK_SIZE):
        stop = start + _CHUNK_SIZE
        result[start:stop] = _worst_case_chunk(bases[start:stop], pair, cfg)

    return result


def worst_case_volume(base: OrthoTensor, pair: PhasePair, cfg: Optional[SearchConfiguration] = None) -> float:
    """
    Returns the smallest strong phase fraction for which the base tensor satisfies the energy bound for all strains.

    :param base: the orthotropic tensor, whose angle is ignored
    :param pair: the phase pair
    :param cfg: the search configuration, defaults to SearchConfiguration()
    :return: the worst-case volume in [0, 1]
    :raise InadmissibleTensorError: if the tensor is not between the phases
    """

    _check_admissible(base.base_matrix(), pair)
    return float(worst_case_volumes(np.array([base.coefficients]), pair, cfg)[0])


def _inverse_sqrt_contrast(pair: PhasePair) -> np.ndarray:
    return J_MATRIX / math.sqrt(2.0 * pair.dkappa) + K_MATRIX / math.sqrt(2.0 * pair.dmu)


def voigt_min_volumes(tensors: np.ndarray, pair: PhasePair) -> np.ndarray:
    """
    Returns the smallest v with E <= E- + v (E+ - E-) for a batch of Kelvin–Mandel matrices.

    :param tensors: an array of shape (n, 3, 3)
    :param pair: the phase pair
    :return: the volumes of shape (n,) clipped to [0, 1]
    """

    scale = _inverse_sqrt_contrast(pair)
    scaled = scale @ (np.asarray(tensors, dtype=float) - pair.weak_tensor) @ scale
    scaled = 0.5 * (scaled + np.swapaxes(scaled, -1, -2))
    return np.clip(np.linalg.eigvalsh(scaled)[..., -1], 0.0, 1.0)


def voigt_min_volume(m: np.ndarray, pair: PhasePair) -> float:
    """
    Returns the smallest strong phase fraction whose arithmetic mixture dominates the tensor.

    :param m: the Kelvin–Mandel matrix
    :param pair: the phase pair
    :return: the volume in [0, 1]
    :raise InadmissibleTensorError: if the tensor is not between the phases
    """

    _check_admissible(m, pair)
    return float(voigt_min_volumes(np.asarray(m, dtype=float)[None], pair)[0])


def zo_volumes(tensors: np.ndarray, pair: PhasePair) -> np.ndarray:
    """
    Returns the trace ratio (Tr E - Tr E-) / (Tr E+ - Tr E-) for a batch of Kelvin–Mandel matrices.

    :param tensors: an array of shape (n, 3, 3)
    :param pair: the phase pair
    :return: the volumes of shape (n,) clipped to [0, 1]
    """

    weak = np.trace(pair.weak_tensor)
    strong = np.trace(pair.strong_tensor)
    traces = np.trace(np.asarray(tensors, dtype=float), axis1=-2, axis2=-1)
    return np.clip((traces - weak) / (strong - weak), 0.0, 1.0)


def zo_volume(m: np.ndarray, pair: PhasePair) -> float:
    """
    Returns the trace-based volume estimate of the tensor.

    :param m: the Kelvin–Mandel matrix
    :param pair: the phase pair
    :return: the volume in [0, 1]
    :raise InadmissibleTensorError: if the tensor is not between the phases
    """

    _check_admissible(m, pair)
    return float(zo_volumes(np.asarray(m, dtype=float)[None], pair)[0])


def estimator_volumes(kind: VolumeEstimatorKind, bases: np.ndarray, pair: PhasePair,
                      cfg: Optional[SearchConfiguration] = None) -> np.ndarray:
    """
    Evaluates a volume estimator on rows of base coefficients.

    :param kind: the estimator
    :param bases: an array of shape (n, 4) with columns (E1111, E1122, E2222, E1212)
    :param pair: the phase pair
    :param cfg: the search configuration of the worst-case volume, defaults to SearchConfiguration()
    :return: the volumes of shape (n,)
    """

    if kind is VolumeEstimatorKind.HASHIN_SHTRIKMAN:
        return worst_case_volumes(bases, pair, cfg)

    matrices = base_matrices(np.atleast_2d(bases))
    if kind is VolumeEstimatorKind.VOIGT:
        return voigt_min_volumes(matrices, pair)

    return zo_volumes(matrices, pair)
