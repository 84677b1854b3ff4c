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
Sequential global programming for compliance minimization over admissible material sets.

Each iteration linearizes the compliances in the inverse element tensors around the current design, which gives
the separable model sum_e <P_e, E_e^-1> with P_e = sum_j E_e (-G_e^j) E_e. The volume constraint enters through a
multiplier, so every element solves min <P_e, E^-1> + (lambda / nel) v(E) over the material grid. The element
answers depend on lambda only through the lower convex hull of (volume, model value) over the grid, hence the hull
vertices are computed once per iteration and the multiplier is bisected on them.
"""

import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from hsfomo.design_field import DesignField
from hsfomo.errors import DualBracketError
from hsfomo.fem2d import StateSolution, compliance_sensitivities, solve_state
from hsfomo.grid_tables import GridTables, build_grid
from hsfomo.hs_bounds import VolumeEstimatorKind
from hsfomo.problem import Problem
from hsfomo.search_configuration import SearchConfiguration
from hsfomo.sgp_configuration import SgpConfiguration
from hsfomo.tensor_core import OrthoTensor, PhasePair, iso_matrix

logger = logging.getLogger(__name__)

_MULTIPLIER_STEPS = 200
_VOLUME_STEPS = 60
_SINGULAR_TOL = 1e-9

LogRecord = Dict[str, float]


class CandidateSet(NamedTuple):
    """Lower convex hull vertices of one element, ordered by increasing volume and decreasing model value."""

    volumes: np.ndarray
    values: np.ndarray
    points: np.ndarray
    angles: np.ndarray


class SgpIterate:
    """One accepted design of the outer loop with its compliances and merit."""

    def __init__(self, design: DesignField, compliances: np.ndarray, lam: float, merit: float, volume: float,
                 iteration: int) -> None:
        self._design = design
        self._compliances = compliances
        self._lam = lam
        self._merit = merit
        self._volume = volume
        self._iteration = iteration

    @property
    def design(self) -> DesignField:
        """
        Returns the design.

        :return: the design
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
    def lam(self) -> float:
        """
        Returns the volume multiplier.

        :return: the volume multiplier
        """

        return self._lam

    @property
    def merit(self) -> float:
        """
        Returns the merit sum_j c_j + lambda (mean v - V).

        :return: the merit
        """

        return self._merit

    @property
    def volume(self) -> float:
        """
        Returns the mean estimated volume.

        :return: the mean estimated volume
        """

        return self._volume

    @property
    def iteration(self) -> int:
        """
        Returns the iteration index.

        :return: the iteration index
        """

        return self._iteration

    @property
    def total_compliance(self) -> float:
        """
        Returns the sum of the load case compliances.

        :return: the sum of the load case compliances
        """

        return float(np.sum(self._compliances))

    def __str__(self) -> str:
        """
        Returns the string representation of the iterate.

        :return: the string representation of the iterate
        """

        return f'SgpIterate(iteration={self._iteration}, compliance={self.total_compliance:.6f}, ' \
               f'lam={self._lam:.6f}, volume={self._volume:.6f})'


class SgpResult:
    """Outcome of an outer loop: the best iterate, the iteration log and the termination status."""

    def __init__(self, iterate: SgpIterate, log: List[LogRecord], converged: bool, status: str,
                 volume_residual: float = 0.0) -> None:
        self._iterate = iterate
        self._log = log
        self._converged = converged
        self._status = status
        self._volume_residual = volume_residual

    @property
    def iterate(self) -> SgpIterate:
        """
        Returns the returned iterate.

        :return: the returned iterate
        """

        return self._iterate

    @property
    def log(self) -> List[LogRecord]:
        """
        Returns the iteration log.

        :return: the iteration log
        """

        return self._log

    @property
    def converged(self) -> bool:
        """
        Returns a value indicating whether the loop stopped on its merit criteria.

        :return: True if converged or stalled, False if the iteration limit was reached
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
    def volume_residual(self) -> float:
        """
        Returns the mean volume of the returned iterate minus the volume bound. On coarse grids it can exceed the
        volume tolerance when no switching of element answers closes the gap.

        :return: the volume residual
        """

        return self._volume_residual

    def __str__(self) -> str:
        """
        Returns the string representation of the result.

        :return: the string representation of the result
        """

        return f'SgpResult(status={self._status}, iterations={len(self._log)}, iterate={self._iterate})'


def rotated_components(p: np.ndarray, rotations: np.ndarray) -> np.ndarray:
    """
    Returns the components (P11, P12, P22, P33) of R^T P R for every sampled rotation.

    :param p: the symmetric 3x3 matrix
    :param rotations: the Kelvin–Mandel rotations, shape (n_angles, 3, 3)
    :return: an array of shape (n_angles, 4)
    """

    rotated = np.swapaxes(rotations, -1, -2) @ p @ rotations
    return np.stack([rotated[:, 0, 0], rotated[:, 0, 1], rotated[:, 1, 1], rotated[:, 2, 2]], axis=1)


def _evaluate(points: np.ndarray, angles: np.ndarray, components: np.ndarray,
              tables: GridTables) -> Tuple[np.ndarray, np.ndarray]:
    values = tables.weights[points] @ components[angles].T
    best = np.argmin(values, axis=1)
    return values[np.arange(points.size), best], angles[best]


def lower_hull(volumes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Returns the vertices of the lower convex hull of (volume, value) points that minimize value + lambda volume for
    some lambda >= 0.

    :param volumes: the volumes
    :param values: the model values
    :return: the vertex indices ordered by increasing volume
    """

    order = np.lexsort((values, volumes))
    sorted_values = values[order]
    previous_min = np.concatenate([[np.inf], np.minimum.accumulate(sorted_values)[:-1]])
    front = order[sorted_values < previous_min]

    hull: List[int] = []
    for k in front:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (volumes[a] - volumes[o]) * (values[k] - values[o]) - \
                    (values[a] - values[o]) * (volumes[k] - volumes[o])
            if cross > 0.0:
                break
            hull.pop()
        hull.append(int(k))

    return np.array(hull, dtype=np.int64)


def _axis_values(size: int, stride: int) -> np.ndarray:
    return np.unique(np.append(np.arange(0, size, stride), size - 1))


def _strided_points(tables: GridTables, stride: int) -> np.ndarray:
    axes = [_axis_values(size, stride) for size in tables.shape]
    points = tables.index[np.ix_(*axes)].ravel()
    return points[points >= 0]


def _neighbourhood(tables: GridTables, centres: np.ndarray, stride: int, radius: int) -> np.ndarray:
    steps = np.arange(-radius, radius + 1) * stride
    offsets = np.stack(np.meshgrid(steps, steps, steps, steps, indexing='ij'), axis=-1).reshape(-1, 4)
    upper = np.array(tables.shape) - 1
    lattice = np.clip(tables.lattice[centres][:, None, :] + offsets[None, :, :], 0, upper).reshape(-1, 4)
    points = tables.index[tuple(lattice.T)]
    return np.unique(points[points >= 0])


def _candidate_set(volumes: np.ndarray, values: np.ndarray, points: np.ndarray, angles: np.ndarray
                   ) -> CandidateSet:
    hull = lower_hull(volumes, values)
    return CandidateSet(volumes[hull], values[hull], points[hull], angles[hull])


def _select_window(candidates: CandidateSet, lam: Optional[float], keep: int) -> np.ndarray:
    count = candidates.points.size
    if lam is None:
        picks = np.unique(np.round(np.linspace(0, count - 1, min(keep, count))).astype(np.int64))
        return candidates.points[picks]

    best = int(np.argmin(candidates.values + lam * candidates.volumes))
    start = min(max(best - keep // 2, 0), max(count - keep, 0))
    return candidates.points[start:start + keep]


def element_candidates(p: np.ndarray, tables: GridTables, cfg: SgpConfiguration, lam_hint: Optional[float] = None,
                       element_count: int = 1) -> CandidateSet:
    """
    Searches the material grid for one element and returns the lower convex hull of the evaluated points.

    The search is exhaustive if the number of point-angle pairs does not exceed the configured limit. Otherwise it
    refines the hull vertices closest to the multiplier hint on successively finer lattice neighbourhoods.

    :param p: the model matrix sum_j E (-G^j) E of the element
    :param tables: the material grid
    :param cfg: the SGP configuration
    :param lam_hint: the multiplier of the previous iteration (optional)
    :param element_count: the number of elements sharing the volume constraint, defaults to 1
    :return: the candidate set
    """

    components = rotated_components(p, tables.rotations)
    all_angles = np.arange(tables.angles.size)
    if len(tables) * all_angles.size <= cfg.exhaustive_limit:
        points = np.arange(len(tables))
        values, angles = _evaluate(points, all_angles, components, tables)
        return _candidate_set(tables.volumes[points], values, points, angles)

    hint = None if lam_hint is None else lam_hint / element_count
    strided_angles = all_angles[::cfg.angle_stride]
    levels = [(cfg.mid_stride, cfg.mid_radius, strided_angles), (1, cfg.fine_radius, all_angles)]

    points = _strided_points(tables, cfg.coarse_stride)
    values, angles = _evaluate(points, strided_angles, components, tables)
    for stride, radius, level_angles in levels:
        candidates = _candidate_set(tables.volumes[points], values, points, angles)
        centres = _select_window(candidates, hint, cfg.keep)
        refined = _neighbourhood(tables, centres, stride, radius)
        refined_values, refined_angles = _evaluate(refined, level_angles, components, tables)
        points = np.concatenate([points, refined])
        values = np.concatenate([values, refined_values])
        angles = np.concatenate([angles, refined_angles])

    return _candidate_set(tables.volumes[points], values, points, angles)


def model_matrices(tensors: np.ndarray, sensitivities: np.ndarray) -> np.ndarray:
    """
    Returns the separable model matrices P_e = sum_j E_e (-G_e^j) E_e.

    :param tensors: the expansion point tensors, shape (nel, 3, 3)
    :param sensitivities: the compliance sensitivities, shape (loadcases, nel, 3, 3)
    :return: an array of shape (nel, 3, 3)
    """

    return np.einsum('eab,jebc,ecd->ead', tensors, -sensitivities, tensors)


def local_subproblem(g_list: Sequence[np.ndarray], e_bar: np.ndarray, lam: float, tables: GridTables,
                     cfg: SgpConfiguration, element_count: int = 1) -> Tuple[OrthoTensor, float]:
    """
    Solves the separable subproblem of one element.

    :param g_list: the compliance sensitivities of the element, one per load case
    :param e_bar: the expansion point of the element
    :param lam: the volume multiplier
    :param tables: the material grid
    :param cfg: the SGP configuration
    :param element_count: the number of elements sharing the volume constraint, defaults to 1
    :return: the minimizing grid tensor and its estimated volume
    """

    p = sum(e_bar @ -np.asarray(g) @ e_bar for g in g_list)
    candidates = element_candidates(p, tables, cfg, lam, element_count)
    best = int(np.argmin(candidates.values + (lam / element_count) * candidates.volumes))
    point = int(candidates.points[best])
    return OrthoTensor(*tables.points[point], tables.angles[candidates.angles[best]]), float(tables.volumes[point])


def _default_bracket(pair: PhasePair) -> Tuple[float, float]:
    return 0.0, 10.0 * float(np.trace(pair.strong_tensor))


def bisect_multiplier(mean_volume: Callable[[float], float], volume_bound: float, tol: float,
                       bracket: Tuple[float, float], expansions: int) -> Tuple[float, float, bool]:
    lo, hi = bracket
    if mean_volume(lo) - volume_bound <= tol:
        return lo, lo, True

    residual = mean_volume(hi) - volume_bound
    expansion = 0
    while residual > tol and expansion < expansions:
        lo, hi = hi, 10.0 * hi
        residual = mean_volume(hi) - volume_bound
        expansion += 1
        logger.debug('Expanded multiplier bracket to [%g, %g]', lo, hi)

    if residual > tol:
        raise DualBracketError(hi)

    if abs(residual) <= tol:
        return hi, hi, True

    for _ in range(_MULTIPLIER_STEPS):
        mid = 0.5 * (lo + hi)
        residual = mean_volume(mid) - volume_bound
        if abs(residual) <= tol:
            return mid, mid, True

        if residual > 0.0:
            lo = mid
        else:
            hi = mid

        if hi - lo <= 1e-15 * hi:
            break

    return lo, hi, False


def _pack(candidates: Sequence[CandidateSet]) -> Tuple[np.ndarray, np.ndarray]:
    width = max(c.volumes.size for c in candidates)
    volumes = np.zeros((len(candidates), width))
    values = np.full((len(candidates), width), np.inf)
    for e, c in enumerate(candidates):
        volumes[e, :c.volumes.size] = c.volumes
        values[e, :c.values.size] = c.values

    return volumes, values


def dual_bisection(candidates: Sequence[CandidateSet], volume_bound: float, cfg: SgpConfiguration,
                   bracket: Tuple[float, float], tables: GridTables) -> Tuple[float, DesignField]:
    """
    Bisects the volume multiplier until the mean estimated volume of the element answers meets the bound.

    The element answers are piecewise constant in the multiplier. If the bound falls into a jump, elements are
    switched from the answer above the jump to the one below it in the order of their model decrease per volume.

    :param candidates: the candidate sets of all elements
    :param volume_bound: the bound on the mean volume
    :param cfg: the SGP configuration
    :param bracket: the initial multiplier bracket
    :param tables: the material grid
    :return: the multiplier and the design
    :raise DualBracketError: if the bracket cannot be expanded to a sign change
    """

    count = len(candidates)
    volumes, values = _pack(candidates)
    rows = np.arange(count)

    def select(lam: float) -> np.ndarray:
        return np.argmin(values + (lam / count) * volumes, axis=1)

    def mean_volume(lam: float) -> float:
        return float(np.mean(volumes[rows, select(lam)]))

    lo, hi, hit = bisect_multiplier(mean_volume, volume_bound, cfg.volume_tol, bracket, cfg.lambda_expansions)
    chosen = select(hi)
    if not hit:
        above = select(lo)
        gain = volumes[rows, above] - volumes[rows, chosen]
        loss = values[rows, above] - values[rows, chosen]
        switchable = np.flatnonzero(gain > 0.0)
        budget = (volume_bound + cfg.volume_tol) * count - volumes[rows, chosen].sum()
        for e in switchable[np.argsort(loss[switchable] / gain[switchable], kind='stable')]:
            if gain[e] <= budget:
                chosen[e] = above[e]
                budget -= gain[e]

        residual = float(np.mean(volumes[rows, chosen])) - volume_bound
        if abs(residual) > cfg.volume_tol:
            logger.warning('Volume residual %.3e remains after switching at multiplier %.6g', residual, hi)

    points = np.array([c.points[k] for c, k in zip(candidates, chosen)])
    angles = tables.angles[np.array([c.angles[k] for c, k in zip(candidates, chosen)])]
    design = DesignField.from_orthotropic(tables.points[points], angles, tables.volumes[points])
    return hi, design


def _safeguard(tensors: np.ndarray, pair: PhasePair) -> np.ndarray:
    smallest = np.linalg.eigvalsh(tensors)[:, 0]
    singular = smallest < _SINGULAR_TOL
    if np.any(singular):
        logger.warning('Projected %d nearly singular expansion points', int(np.count_nonzero(singular)))
        tensors = tensors.copy()
        tensors[singular] = pair.weak_tensor + 1e-6 * (pair.strong_tensor - pair.weak_tensor)

    return tensors


def _outer_loop(problem: Problem, initial: DesignField, update: Callable[[DesignField, StateSolution,
                                                                            Optional[float]],
                                                                   Tuple[float, DesignField]],
                cfg: SgpConfiguration, label: str) -> SgpResult:
    mesh, loadcases = problem.mesh, problem.loadcases
    design, state = initial, solve_state(mesh, initial, loadcases)
    lam: Optional[float] = None
    log: List[LogRecord] = []
    best: Optional[SgpIterate] = None
    previous_merit: Optional[float] = None
    stalled = 0
    status = 'max_iterations'

    iterations = tqdm(range(1, cfg.max_iters + 1), desc=label, unit='it', disable=not cfg.show_progress)
    for iteration in iterations:
        lam, design = update(design, state, lam)
        state = solve_state(mesh, design, loadcases)
        volume = design.mean_volume
        merit = state.total_compliance + lam * (volume - problem.volume_bound)
        iterate = SgpIterate(design, state.compliances.copy(), lam, merit, volume, iteration)
        log.append({'iteration': iteration, 'compliance': state.total_compliance, 'lambda': lam,
                    'volume_residual': volume - problem.volume_bound, 'merit': merit})
        logger.info('%s iteration %d: compliance %.6f, lambda %.6f, volume %.8f, merit %.8f', label, iteration,
                    state.total_compliance, lam, volume, merit)

        if best is None or merit < best.merit - cfg.merit_rel_tol * abs(best.merit):
            best, stalled = iterate, 0
        else:
            stalled += 1

        if previous_merit is not None and abs(merit - previous_merit) < cfg.merit_rel_tol * abs(previous_merit):
            status = 'converged'
            break

        if stalled >= cfg.stall_iters:
            status = 'stalled'
            break

        previous_merit = merit

    if status == 'max_iterations':
        logger.warning('%s stopped after %d iterations without meeting the merit criteria', label, cfg.max_iters)

    final = iterate if status == 'converged' else best
    residual = final.volume - problem.volume_bound
    if abs(residual) > cfg.volume_tol:
        logger.warning('%s returns a design with volume residual %.3e', label, residual)

    return SgpResult(final, log, status != 'max_iterations', status, residual)


def sgp_solve(problem: Problem, pair: PhasePair,
              model: VolumeEstimatorKind = VolumeEstimatorKind.HASHIN_SHTRIKMAN, cfg: Optional[SgpConfiguration] = None,
              search_cfg: Optional[SearchConfiguration] = None, tables: Optional[GridTables] = None) -> SgpResult:
    """
    Minimizes the total compliance over orthotropic tensors of the material grid subject to the mean estimated volume
    bound.

    :param problem: the problem
    :param pair: the phase pair
    :param model: the volume estimator, defaults to the Hashin–Shtrikman worst-case volume
    :param cfg: the SGP configuration, defaults to SgpConfiguration()
    :param search_cfg: the worst-case volume search configuration, defaults to SearchConfiguration()
    :param tables: a prebuilt material grid of the estimator (optional)
    :return: the result
    """

    cfg = cfg or SgpConfiguration()
    if tables is None:
        tables = build_grid(pair, cfg, model, search_cfg)
    count = problem.mesh.element_count
    bracket = cfg.lambda_bracket or _default_bracket(pair)
    logger.info('Solving %s with the %s estimator on %s', problem, model.value, tables)

    def update(design: DesignField, state: StateSolution, lam: Optional[float]) -> Tuple[float, DesignField]:
        p = model_matrices(_safeguard(design.tensors, pair), compliance_sensitivities(problem.mesh, state))
        elements = tqdm(range(count), desc='elements', unit='el', leave=False, disable=not cfg.show_progress)
        candidates = [element_candidates(p[e], tables, cfg, lam, count) for e in elements]
        return dual_bisection(candidates, problem.volume_bound, cfg, bracket, tables)

    initial = DesignField.uniform(pair.voigt_tensor(problem.volume_bound), problem.volume_bound, count)
    return _outer_loop(problem, initial, update, cfg, f'SGP-{model.value}')


def voigt_volume_updates(a: np.ndarray, b: np.ndarray, lam: float, pair: PhasePair) -> np.ndarray:
    """
    Minimizes a / kappa(v) + b / mu(v) + lam v over [0, 1] for the moduli of the arithmetic phase mixture.

    :param a: the bulk model coefficients, nonnegative
    :param b: the shear model coefficients, nonnegative
    :param lam: the volume price
    :param pair: the phase pair
    :return: the minimizers
    """

    weak, dk, dm = pair.weak, pair.dkappa, pair.dmu

    def slope(v: np.ndarray) -> np.ndarray:
        return lam - a * dk / (weak.kappa + v * dk) ** 2 - b * dm / (weak.mu + v * dm) ** 2

    lo, hi = np.zeros_like(a), np.ones_like(a)
    for _ in range(_VOLUME_STEPS):
        mid = 0.5 * (lo + hi)
        rising = slope(mid) > 0.0
        lo, hi = np.where(rising, lo, mid), np.where(rising, mid, hi)

    v = 0.5 * (lo + hi)
    v = np.where(slope(np.ones_like(a)) <= 0.0, 1.0, v)
    return np.where(slope(np.zeros_like(a)) >= 0.0, 0.0, v)


def voigt_design(volumes: np.ndarray, pair: PhasePair) -> DesignField:
    """
    Returns the isotropic design of arithmetic phase mixtures.

    :param volumes: the strong phase fractions
    :param pair: the phase pair
    :return: the design field with isotropic bases
    """

    kappa = pair.weak.kappa + volumes * pair.dkappa
    mu = pair.weak.mu + volumes * pair.dmu
    bases = np.column_stack([kappa + mu, kappa - mu, kappa + mu, mu])
    return DesignField(iso_matrix(kappa, mu), volumes, bases, np.zeros_like(volumes))


def solve_voigt_reduced(problem: Problem, pair: PhasePair, cfg: Optional[SgpConfiguration] = None) -> SgpResult:
    """
    Minimizes the total compliance over arithmetic phase mixtures, which is the variable-thickness sheet form of the
    Voigt-bounded problem. The element model a / kappa(v) + b / mu(v) is convex in v, so the fixed point is global.

    :param problem: the problem
    :param pair: the phase pair
    :param cfg: the SGP configuration, defaults to SgpConfiguration()
    :return: the result
    """

    cfg = cfg or SgpConfiguration()
    count = problem.mesh.element_count
    bracket = cfg.lambda_bracket or _default_bracket(pair)

    def update(design: DesignField, state: StateSolution, lam: Optional[float]) -> Tuple[float, DesignField]:
        p = model_matrices(design.tensors, compliance_sensitivities(problem.mesh, state))
        a = 0.25 * (p[:, 0, 0] + 2.0 * p[:, 0, 1] + p[:, 1, 1])
        b = 0.5 * (np.trace(p, axis1=1, axis2=2) - 2.0 * a)
        a, b = np.clip(a, 0.0, None), np.clip(b, 0.0, None)

        def mean_volume(price: float) -> float:
            return float(np.mean(voigt_volume_updates(a, b, price / count, pair)))

        lo, hi, _ = bisect_multiplier(mean_volume, problem.volume_bound, cfg.volume_tol, bracket,
                                       cfg.lambda_expansions)
        multiplier = 0.5 * (lo + hi)
        return multiplier, voigt_design(voigt_volume_updates(a, b, multiplier / count, pair), pair)

    initial = voigt_design(np.full(count, problem.volume_bound), pair)
    return _outer_loop(problem, initial, update, cfg, 'SGP-voigt-reduced')
