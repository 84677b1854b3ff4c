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
Alternating minimization with sequential laminates for a single load case.

The complementary energy bound f_c(sigma; v) of composites with strong phase fraction v has an explicit form with
three branches. For stresses with sum s+ = |sigma1 + sigma2| and difference s- = |sigma1 - sigma2| of the principal
values, the branch is

* C2 (rank-2, trace dominated) if v mu+ dkappa s+ >= d2(v) s-,
* C3 (rank-2, deviator dominated) if v kappa+ dmu s- >= d3(v) s+,
* C1 (rank-1) otherwise.

The bound is convex and nonincreasing in v, so the local volume update is a bisection on its derivative. Every
bound value is attained by a laminate of the weak phase in the strong phase whose lamination directions are the
principal stress directions.
"""

import logging
from enum import IntEnum
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from hsfomo.am_configuration import AmConfiguration
from hsfomo.design_field import DesignField
from hsfomo.errors import DomainError, SingularLaminateError
from hsfomo.fem2d import StateSolution, element_fields, solve_state
from hsfomo.hs_bounds import ArrayLike
from hsfomo.problem import Problem
from hsfomo.sgp_solver import bisect_multiplier
from hsfomo.tensor_core import SQRT2, PhasePair, complementary_energy, rotation_matrix, to_matrix

logger = logging.getLogger(__name__)

_SINGULAR_RATIO = 1e-14
_DEGENERATE_TOL = 1e-12

LogRecord = Dict[str, float]


class FcBranch(IntEnum):
    """Active formula of the complementary energy bound."""

    C1 = 1
    C2 = 2
    C3 = 3


class LaminateParams:
    """Rank, lamination directions and layer weights of a sequential laminate."""

    def __init__(self, rank: int, directions: np.ndarray, weights: np.ndarray) -> None:
        """
        Creates a new laminate parameter instance.

        :param rank: the laminate rank, 1 or 2
        :param directions: the unit lamination directions, shape (rank, 2)
        :param weights: the layer weights summing to 1, shape (rank,)
        """

        if rank not in (1, 2):
            raise ValueError(f'Laminate rank must be 1 or 2, got {rank}')

        self._rank = rank
        self._directions = np.asarray(directions, dtype=float).reshape(rank, 2)
        self._weights = np.asarray(weights, dtype=float).reshape(rank)

    @property
    def rank(self) -> int:
        """
        Returns the laminate rank.

        :return: the laminate rank
        """

        return self._rank

    @property
    def directions(self) -> np.ndarray:
        """
        Returns the lamination directions.

        :return: the lamination directions
        """

        return self._directions

    @property
    def weights(self) -> np.ndarray:
        """
        Returns the relative layer weights.

        :return: the relative layer weights
        """

        return self._weights

    def __str__(self) -> str:
        """
        Returns the string representation of the laminate parameters.

        :return: the string representation of the laminate parameters
        """

        return f'LaminateParams(rank={self._rank}, directions={self._directions.tolist()}, ' \
               f'weights={self._weights.tolist()})'


class AmResult:
    """Outcome of the alternating minimization."""

    def __init__(self, design: DesignField, compliances: np.ndarray, log: List[LogRecord], lam: float,
                 converged: bool, status: str) -> None:
        self._design = design
        self._compliances = compliances
        self._log = log
        self._lam = lam
        self._converged = converged
        self._status = status

    @property
    def design(self) -> DesignField:
        """
        Returns the final design.

        :return: the final design
        """

        return self._design

    @property
    def compliances(self) -> np.ndarray:
        """
        Returns the compliance of every load case.

        :return: the compliance of every load case
        """

        return self._compliances

    @property
    def total_compliance(self) -> float:
        """
        Returns the sum of the load case compliances.

        :return: the sum of the load case compliances
        """

        return float(np.sum(self._compliances))

    @property
    def log(self) -> List[LogRecord]:
        """
        Returns one record per iteration with the keys iteration, compliance, lambda, volume and
        max_density_change.

        :return: the iteration log
        """

        return self._log

    @property
    def lam(self) -> float:
        """
        Returns the volume multiplier.

        :return: the volume multiplier
        """

        return self._lam

    @property
    def converged(self) -> bool:
        """
        Returns a value indicating whether the loop met its stopping criteria.

        :return: True if the loop met its stopping criteria, False otherwise
        """

        return self._converged

    @property
    def status(self) -> str:
        """
        Returns the termination status.

        :return: the termination status
        """

        return self._status

    @property
    def iterations(self) -> int:
        """
        Returns the number of iterations.

        :return: the number of iterations
        """

        return len(self._log)

    def __str__(self) -> str:
        """
        Returns the string representation of the result.

        :return: the string representation of the result
        """

        return f'AmResult(compliance={self.total_compliance:.6f}, lambda={self._lam:.6g}, ' \
               f'iterations={self.iterations}, status={self._status})'


def _check_volume(v: float) -> None:
    if not 0.0 < v <= 1.0:
        raise DomainError('v', v, (0, 1), left_open=True)


def _stress_invariants(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # signed sum and nonnegative difference of the principal stresses
    plus = s[..., 0] + s[..., 1]
    minus = np.sqrt((s[..., 0] - s[..., 1]) ** 2 + 2.0 * s[..., 2] ** 2)
    return plus, minus


def _denominators(v: np.ndarray, pair: PhasePair) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    km, qm = pair.weak.kappa, pair.weak.mu
    kp, qp = pair.strong.kappa, pair.strong.mu
    d1 = (1.0 - v) * km * qm * (kp + qp) + v * kp * qp * (km + qm)
    d2 = km * (kp + qp) + v * qp * pair.dkappa
    d3 = qm * (kp + qp) + v * kp * pair.dmu
    return d1, d2, d3


def _complementary(plus: np.ndarray, minus: np.ndarray, kappa: float, mu: float) -> np.ndarray:
    return plus ** 2 / (4.0 * kappa) + minus ** 2 / (4.0 * mu)


def _branches(plus: np.ndarray, minus: np.ndarray, v: np.ndarray, pair: PhasePair) -> np.ndarray:
    _, d2, d3 = _denominators(v, pair)
    s_plus = np.abs(plus)
    trace = v * pair.strong.mu * pair.dkappa * s_plus >= d2 * minus
    deviator = v * pair.strong.kappa * pair.dmu * minus >= d3 * s_plus
    return np.where(trace, FcBranch.C2.value, np.where(deviator, FcBranch.C3.value, FcBranch.C1.value))


def fc_values(s: np.ndarray, v: ArrayLike, pair: PhasePair) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluates the complementary energy bound and its active branch, vectorized. At v = 0 the bound is the
    complementary energy of the weak phase.

    :param s: Kelvin–Mandel stresses of shape (..., 3)
    :param v: the strong phase fractions in [0, 1]
    :param pair: the phase pair
    :return: the bound values and the branch codes 1, 2 or 3
    """

    plus, minus = _stress_invariants(np.asarray(s, dtype=float))
    plus, minus, v = np.broadcast_arrays(plus, minus, np.asarray(v, dtype=float))
    km, qm = pair.weak.kappa, pair.weak.mu
    kp, qp = pair.strong.kappa, pair.strong.mu
    dk, dm = pair.dkappa, pair.dmu
    d1, d2, d3 = _denominators(v, pair)

    weak = _complementary(plus, minus, km, qm)
    strong = _complementary(plus, minus, kp, qp)
    a = km * kp * dm * minus + qm * qp * dk * np.abs(plus)

    f1 = (1.0 - v) * weak + v * strong - v * (1.0 - v) * a ** 2 / (4.0 * km * kp * qm * qp * d1)
    f2 = strong + (1.0 - v) * dk * (kp + qp) * plus ** 2 / (4.0 * kp * d2)
    f3 = strong + (1.0 - v) * dm * (kp + qp) * minus ** 2 / (4.0 * qp * d3)

    branches = _branches(plus, minus, v, pair)
    values = np.where(branches == FcBranch.C2.value, f2, np.where(branches == FcBranch.C3.value, f3, f1))
    return values, branches


def fc_derivatives(s: np.ndarray, v: ArrayLike, pair: PhasePair) -> np.ndarray:
    """
    Evaluates the derivative of the complementary energy bound in v on its active branch, vectorized. At v = 0 the
    right derivative is returned.

    :param s: Kelvin–Mandel stresses of shape (..., 3)
    :param v: the strong phase fractions in [0, 1]
    :param pair: the phase pair
    :return: the derivatives
    """

    plus, minus = _stress_invariants(np.asarray(s, dtype=float))
    plus, minus, v = np.broadcast_arrays(plus, minus, np.asarray(v, dtype=float))
    km, qm = pair.weak.kappa, pair.weak.mu
    kp, qp = pair.strong.kappa, pair.strong.mu
    dk, dm = pair.dkappa, pair.dmu
    d1, d2, d3 = _denominators(v, pair)
    d1_slope = kp * qp * (km + qm) - km * qm * (kp + qp)

    weak = _complementary(plus, minus, km, qm)
    strong = _complementary(plus, minus, kp, qp)
    a = km * kp * dm * minus + qm * qp * dk * np.abs(plus)

    ratio_slope = ((1.0 - 2.0 * v) * d1 - v * (1.0 - v) * d1_slope) / d1 ** 2
    g1 = strong - weak - a ** 2 / (4.0 * km * kp * qm * qp) * ratio_slope
    g2 = -dk * (kp + qp) * plus ** 2 / (4.0 * kp) * (d2 + (1.0 - v) * qp * dk) / d2 ** 2
    g3 = -dm * (kp + qp) * minus ** 2 / (4.0 * qp) * (d3 + (1.0 - v) * kp * dm) / d3 ** 2

    branches = _branches(plus, minus, v, pair)
    return np.where(branches == FcBranch.C2.value, g2, np.where(branches == FcBranch.C3.value, g3, g1))


def f_c_hs(s: np.ndarray, v: float, pair: PhasePair) -> Tuple[float, FcBranch]:
    """
    Returns the lower bound on the complementary energy of a composite with strong phase fraction v.

    :param s: the Kelvin–Mandel stress
    :param v: the strong phase fraction in (0, 1]
    :param pair: the phase pair
    :return: the bound value and the active branch
    :raise DomainError: if v is outside (0, 1]
    """

    _check_volume(v)
    values, branches = fc_values(s, v, pair)
    return float(values), FcBranch(int(branches))


def f_c_derivative(s: np.ndarray, v: float, pair: PhasePair) -> float:
    """
    Returns the derivative of the complementary energy bound in v.

    :param s: the Kelvin–Mandel stress
    :param v: the strong phase fraction in (0, 1]
    :param pair: the phase pair
    :return: the derivative
    :raise DomainError: if v is outside (0, 1]
    """

    _check_volume(v)
    return float(fc_derivatives(s, v, pair))


def local_volume_updates(s: np.ndarray, lam: float, pair: PhasePair, iterations: int = 60) -> np.ndarray:
    """
    Minimizes v -> f_c(sigma; v) + lam v over [0, 1] for every stress, vectorized.

    :param s: Kelvin–Mandel stresses of shape (n, 3)
    :param lam: the volume price
    :param pair: the phase pair
    :param iterations: the number of bisection steps, defaults to 60
    :return: the minimizers, shape (n,)
    """

    s = np.asarray(s, dtype=float)
    count = s.shape[:-1]
    lo, hi = np.zeros(count), np.ones(count)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        rising = fc_derivatives(s, mid, pair) + lam > 0.0
        lo, hi = np.where(rising, lo, mid), np.where(rising, mid, hi)

    v = 0.5 * (lo + hi)
    v = np.where(fc_derivatives(s, np.zeros(count), pair) + lam >= 0.0, 0.0, v)
    return np.where(fc_derivatives(s, np.ones(count), pair) + lam <= 0.0, 1.0, v)


def local_volume_update(s: np.ndarray, lam: float, pair: PhasePair, cfg: Optional[AmConfiguration] = None) -> float:
    """
    Minimizes the convex map v -> f_c(sigma; v) + lam v over [0, 1].

    :param s: the Kelvin–Mandel stress
    :param lam: the nonnegative volume price
    :param pair: the phase pair
    :param cfg: the alternating minimization configuration, defaults to AmConfiguration()
    :return: the minimizer
    """

    if lam < 0.0:
        raise ValueError(f'Volume price must be nonnegative, got {lam}')

    cfg = cfg or AmConfiguration()
    return float(local_volume_updates(np.asarray(s, dtype=float)[None], lam, pair, cfg.bisection_iters)[0])


def gc_value(e: np.ndarray, pair: PhasePair) -> float:
    """
    Returns the maximum over lamination directions of the quadratic form of fc_tensor at a strain.

    :param e: the Kelvin–Mandel strain
    :param pair: the phase pair
    :return: 4 kappa+ mu+ / (kappa+ + mu+) max(eps1^2, eps2^2)
    """

    kp, qp = pair.strong.kappa, pair.strong.mu
    eigenvalues = np.linalg.eigvalsh(to_matrix(np.asarray(e, dtype=float)))
    return float(4.0 * kp * qp / (kp + qp) * np.max(eigenvalues ** 2))


def _fc_matrices(e: np.ndarray, pair: PhasePair) -> np.ndarray:
    kp, qp = pair.strong.kappa, pair.strong.mu
    e1, e2 = e[..., 0], e[..., 1]
    zero = np.zeros_like(e1)
    # maps a Kelvin–Mandel vector x to the matrix-vector product X e
    traction = np.stack([np.stack([e1, zero, e2 / SQRT2], axis=-1),
                         np.stack([zero, e2, e1 / SQRT2], axis=-1)], axis=-2)
    normal = np.stack([e1 ** 2, e2 ** 2, SQRT2 * e1 * e2], axis=-1)

    strong = pair.strong_tensor
    projected = traction @ strong
    weighted = normal @ strong
    return strong - np.swapaxes(projected, -1, -2) @ projected / qp \
        + (1.0 / qp - 1.0 / (kp + qp)) * weighted[..., :, None] * weighted[..., None, :]


def fc_tensor(e: np.ndarray, pair: PhasePair) -> np.ndarray:
    """
    Returns the Kelvin–Mandel matrix of the lamination tensor F^c(e) of the strong phase, whose quadratic form is
    <E+ eps, eps> - |(E+ eps) e|^2 / mu+ + (1 / mu+ - 1 / (kappa+ + mu+)) <(E+ eps) e, e>^2.

    :param e: the unit lamination direction
    :param pair: the phase pair
    :return: the Kelvin–Mandel matrix
    :raise ValueError: if the direction does not have unit norm
    """

    e = np.asarray(e, dtype=float)
    norm = float(np.linalg.norm(e))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f'Lamination direction must have unit norm, got {norm}')

    return _fc_matrices(e, pair)


def _principal_directions(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    theta = 0.5 * np.arctan2(SQRT2 * s[..., 2], s[..., 0] - s[..., 1])
    first = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    second = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return theta, first, second


def _first_weights(s: np.ndarray, v: np.ndarray, pair: PhasePair) -> Tuple[np.ndarray, np.ndarray]:
    plus, minus = _stress_invariants(s)
    _, d2, d3 = _denominators(v, pair)
    branches = _branches(plus, minus, v, pair)
    scale = _DEGENERATE_TOL * np.linalg.norm(s, axis=-1)

    trace = (branches == FcBranch.C2.value) & (np.abs(plus) > scale)
    deviator = (branches == FcBranch.C3.value) & (minus > scale)
    degenerate = (branches != FcBranch.C1.value) & ~trace & ~deviator
    if np.any(degenerate):
        logger.warning('Falling back to simple laminates for %d degenerate stresses', int(np.count_nonzero(degenerate)))

    with np.errstate(divide='ignore', invalid='ignore'):
        m_trace = 0.5 - d2 * minus / (2.0 * v * pair.strong.mu * pair.dkappa * plus)
        m_deviator = 0.5 - d3 * plus / (2.0 * v * pair.strong.kappa * pair.dmu * minus)

    weights = np.where(trace, m_trace, np.where(deviator, m_deviator, 1.0))
    return np.clip(weights, 0.0, 1.0), np.where(trace | deviator, 2, 1)


def _laminate_matrices(directions: np.ndarray, weights: np.ndarray, v: np.ndarray, pair: PhasePair) -> np.ndarray:
    fc = _fc_matrices(directions, pair)
    b = pair.r_tensor + v[..., None, None] * np.einsum('...j,...jab->...ab', weights, fc)
    eigenvalues = np.linalg.eigvalsh(b)
    if np.any(eigenvalues[..., 0] <= _SINGULAR_RATIO * eigenvalues[..., -1]):
        raise SingularLaminateError()

    compliance = np.linalg.inv(pair.strong_tensor) + (1.0 - v)[..., None, None] * np.linalg.inv(b)
    return np.linalg.inv(compliance)


def _laminates(s: np.ndarray, v: np.ndarray, pair: PhasePair
               ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    theta, first, second = _principal_directions(s)
    interior = (v > 0.0) & (v < 1.0)
    safe_v = np.where(interior, v, 0.5)
    m1, ranks = _first_weights(s, safe_v, pair)
    weights = np.stack([m1, 1.0 - m1], axis=-1)

    # the weights go to the principal directions in either order, the lower complementary energy wins
    forward = np.stack([first, second], axis=-2)
    backward = np.stack([second, first], axis=-2)
    forward_tensors = _laminate_matrices(forward, weights, safe_v, pair)
    backward_tensors = _laminate_matrices(backward, weights, safe_v, pair)
    swap = complementary_energy(backward_tensors, s) < complementary_energy(forward_tensors, s)

    tensors = np.where(swap[..., None, None], backward_tensors, forward_tensors)
    tensors = np.where((v <= 0.0)[..., None, None], pair.weak_tensor, tensors)
    tensors = np.where((v >= 1.0)[..., None, None], pair.strong_tensor, tensors)
    directions = np.where(swap[..., None, None], backward, forward)
    return tensors, theta, directions, weights, ranks


def laminate_tensors(stresses: np.ndarray, volumes: np.ndarray, pair: PhasePair) -> np.ndarray:
    """
    Returns the laminates attaining the complementary energy bound at every stress, vectorized.

    :param stresses: Kelvin–Mandel stresses of shape (n, 3)
    :param volumes: the strong phase fractions in [0, 1], shape (n,)
    :param pair: the phase pair
    :return: the Kelvin–Mandel matrices, shape (n, 3, 3)
    :raise SingularLaminateError: if a laminate matrix B is singular
    """

    tensors, _, _, _, _ = _laminates(np.asarray(stresses, dtype=float), np.asarray(volumes, dtype=float), pair)
    return tensors


def laminate_params(s: np.ndarray, v: float, pair: PhasePair) -> LaminateParams:
    """
    Returns the laminate that attains the complementary energy bound at a stress.

    :param s: the Kelvin–Mandel stress
    :param v: the strong phase fraction in (0, 1]
    :param pair: the phase pair
    :return: the laminate parameters
    :raise DomainError: if v is outside (0, 1]
    """

    _check_volume(v)
    _, _, directions, weights, ranks = _laminates(np.asarray(s, dtype=float)[None], np.array([v]), pair)
    rank = int(ranks[0])
    return LaminateParams(rank, directions[0, :rank], weights[0, :rank])


def laminate_update(s: np.ndarray, v: float, pair: PhasePair) -> np.ndarray:
    """
    Returns the laminate tensor E = ((E+)^-1 + (1 - v) B^-1)^-1 with B = R + v sum_j m_j F^c(e_j) and
    R = ((E-)^-1 - (E+)^-1)^-1, whose complementary energy at the stress equals the bound.

    :param s: the Kelvin–Mandel stress
    :param v: the strong phase fraction in [0, 1]
    :param pair: the phase pair
    :return: the Kelvin–Mandel matrix
    :raise DomainError: if v is outside [0, 1]
    :raise SingularLaminateError: if the laminate matrix B is singular
    """

    if not 0.0 <= v <= 1.0:
        raise DomainError('v', v, (0, 1))

    return laminate_tensors(np.asarray(s, dtype=float)[None], np.array([float(v)]), pair)[0]


def _laminate_design(stresses: np.ndarray, volumes: np.ndarray, pair: PhasePair) -> DesignField:
    tensors, theta, _, _, _ = _laminates(stresses, volumes, pair)
    # laminates along the principal directions are orthotropic in the principal frame
    r = rotation_matrix(theta)
    base = np.swapaxes(r, -1, -2) @ tensors @ r
    bases = np.column_stack([base[:, 0, 0], base[:, 0, 1], base[:, 1, 1], 0.5 * base[:, 2, 2]])
    return DesignField(tensors, volumes, bases, theta % np.pi)


def _volume_step(stresses: np.ndarray, problem: Problem, pair: PhasePair, cfg: AmConfiguration,
                 bracket: Tuple[float, float]) -> Tuple[float, np.ndarray]:
    area = problem.domain_area

    def updates(lam: float) -> np.ndarray:
        return local_volume_updates(stresses, lam / area, pair, cfg.bisection_iters)

    def mean_volume(lam: float) -> float:
        return float(np.mean(updates(lam)))

    _, lam, _ = bisect_multiplier(mean_volume, problem.volume_bound, cfg.volume_tol, bracket, cfg.lambda_expansions)
    return lam, updates(lam)


def am_solve(problem: Problem, pair: PhasePair, cfg: Optional[AmConfiguration] = None) -> AmResult:
    """
    Alternates between equilibrium solves and the explicit laminate update, starting from the strong phase.

    :param problem: a problem with a single load case
    :param pair: the phase pair
    :param cfg: the alternating minimization configuration, defaults to AmConfiguration()
    :return: the result
    :raise ValueError: if the problem has more than one load case
    """

    if len(problem.loadcases) != 1:
        raise ValueError(f'Alternating minimization needs a single load case, got {len(problem.loadcases)}')

    cfg = cfg or AmConfiguration()
    mesh, loadcases = problem.mesh, problem.loadcases
    load_norm = float(np.sum(loadcases[0].load_vector(mesh.dof_count) ** 2))
    bracket = (0.0, 10.0 * pair.strong.kappa * load_norm / max(problem.volume_bound, 1e-3))
    logger.info('Solving %s by alternating minimization with %s', problem, pair)

    design = DesignField.uniform(pair.strong_tensor, 1.0, mesh.element_count)
    state: StateSolution = solve_state(mesh, design, loadcases)
    previous = state.total_compliance
    lam = 0.0
    log: List[LogRecord] = []
    status = 'max_iterations'

    iterations = tqdm(range(1, cfg.max_iters + 1), desc='AM', unit='it', disable=not cfg.show_progress)
    for iteration in iterations:
        _, stresses = element_fields(mesh, design, state)
        lam, volumes = _volume_step(stresses[0], problem, pair, cfg, bracket)
        change = float(np.max(np.abs(volumes - design.volumes)))
        design = _laminate_design(stresses[0], volumes, pair)
        state = solve_state(mesh, design, loadcases)

        compliance = state.total_compliance
        relative = abs(compliance - previous) / abs(previous)
        log.append({'iteration': iteration, 'compliance': compliance, 'lambda': lam,
                    'volume': design.mean_volume, 'max_density_change': change})
        logger.debug('AM iteration %d: compliance %.8f, lambda %.6f, density change %.3e', iteration, compliance,
                     lam, change)

        if change < cfg.density_change_tol and relative < cfg.compliance_rel_tol:
            status = 'converged'
            break

        previous = compliance

    if status == 'max_iterations':
        logger.warning('AM stopped after %d iterations without meeting the stopping criteria', cfg.max_iters)
    else:
        logger.info('AM converged after %d iterations with compliance %.6f', len(log), state.total_compliance)

    return AmResult(design, state.compliances.copy(), log, lam, status == 'converged', status)
