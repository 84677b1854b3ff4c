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

import numpy as np
import pytest
from pytest_mock import MockerFixture

from hsfomo.design_field import DesignField
from hsfomo.errors import DualBracketError
from hsfomo.fem2d import compliance_sensitivities, solve_state
from hsfomo.grid_tables import build_grid
from hsfomo.hs_bounds import VolumeEstimatorKind, worst_case_volumes
from hsfomo.problem import Problem
from hsfomo.sgp_configuration import SgpConfiguration
from hsfomo.setgeom import is_hs_feasible, sample_strains
from hsfomo.sgp_solver import SgpIterate, SgpResult, _outer_loop, dual_bisection, element_candidates, \
    local_subproblem, lower_hull, model_matrices, rotated_components, sgp_solve, solve_voigt_reduced, voigt_design, \
    voigt_volume_updates
from tests.factories import BENCHMARK_PAIR

PAIR = BENCHMARK_PAIR
STRONG_BASE = [PAIR.strong.kappa + PAIR.strong.mu, PAIR.strong.kappa - PAIR.strong.mu,
               PAIR.strong.kappa + PAIR.strong.mu, PAIR.strong.mu]
WEAK_BASE = [PAIR.weak.kappa + PAIR.weak.mu, PAIR.weak.kappa - PAIR.weak.mu, PAIR.weak.kappa + PAIR.weak.mu,
             PAIR.weak.mu]


def small_configuration(**kwargs) -> SgpConfiguration:
    settings = {'angle_samples': 31, 'diag_grid': 9, 'offdiag_grid': 9, 'use_cache': False}
    settings.update(kwargs)
    return SgpConfiguration(**settings)


@pytest.fixture(scope='module')
def tables():
    return build_grid(PAIR, small_configuration(), VolumeEstimatorKind.VOIGT)


@pytest.fixture(scope='module')
def hs_result() -> SgpResult:
    problem = Problem.cantilever(6, 6, volume_bound=0.3)
    return sgp_solve(problem, PAIR, VolumeEstimatorKind.HASHIN_SHTRIKMAN, small_configuration(max_iters=30))


def random_model_matrix(rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((3, 2))
    return x @ x.T + 0.1 * np.eye(3)


def exhaustive_objective(p: np.ndarray, tables, lam: float) -> float:
    components = rotated_components(p, tables.rotations)
    values = tables.weights @ components.T
    return float(np.min(values.min(axis=1) + lam * tables.volumes))


def test_lower_hull_should_return_convex_pareto_vertices() -> None:
    volumes = np.array([0.0, 0.5, 1.0, 0.5, 0.25])
    values = np.array([10.0, 4.0, 3.0, 6.0, 8.0])

    assert lower_hull(volumes, values).tolist() == [0, 1, 2]


def test_lower_hull_should_keep_smallest_value_when_volumes_tie() -> None:
    volumes = np.array([0.2, 0.2, 0.6])
    values = np.array([5.0, 4.0, 1.0])

    assert lower_hull(volumes, values).tolist() == [1, 2]


def test_lower_hull_should_drop_dominated_points() -> None:
    volumes = np.array([0.0, 0.4, 0.8])
    values = np.array([1.0, 2.0, 3.0])

    assert lower_hull(volumes, values).tolist() == [0]


def test_rotated_components_should_return_components_when_rotation_is_identity() -> None:
    p = random_model_matrix(np.random.default_rng(1))

    components = rotated_components(p, np.eye(3)[None])

    np.testing.assert_allclose(components[0], [p[0, 0], p[0, 1], p[1, 1], p[2, 2]])


def test_model_matrices_should_sum_load_case_contributions() -> None:
    rng = np.random.default_rng(2)
    tensors = np.array([PAIR.voigt_tensor(v) for v in (0.2, 0.7)])
    sensitivities = -np.array([[random_model_matrix(rng) for _ in range(2)] for _ in range(3)])

    p = model_matrices(tensors, sensitivities)

    for e in range(2):
        expected = sum(tensors[e] @ -sensitivities[j, e] @ tensors[e] for j in range(3))
        np.testing.assert_allclose(p[e], expected, rtol=1e-12)


def test_local_subproblem_should_return_strong_phase_when_multiplier_zero(tables) -> None:
    rng = np.random.default_rng(3)
    x = rng.standard_normal(3)

    tensor, volume = local_subproblem([-np.outer(x, x)], PAIR.voigt_tensor(0.5), 0.0, tables, small_configuration())

    np.testing.assert_allclose(tensor.coefficients, STRONG_BASE, rtol=1e-12)
    assert volume == pytest.approx(1.0, abs=1e-12)


def test_local_subproblem_should_return_weak_phase_when_multiplier_huge(tables) -> None:
    rng = np.random.default_rng(4)
    x = rng.standard_normal(3)

    tensor, volume = local_subproblem([-np.outer(x, x)], PAIR.voigt_tensor(0.5), 1e12, tables,
                                      small_configuration())

    np.testing.assert_allclose(tensor.coefficients, WEAK_BASE, rtol=1e-12)
    assert volume == pytest.approx(0.0, abs=1e-12)


def test_element_candidates_should_match_exhaustive_search_when_grid_small(tables) -> None:
    rng = np.random.default_rng(5)
    cfg = small_configuration()
    for _ in range(5):
        p = random_model_matrix(rng)
        candidates = element_candidates(p, tables, cfg)

        assert np.all(np.diff(candidates.volumes) > 0.0)
        assert np.all(np.diff(candidates.values) < 0.0)
        for lam in (0.0, 0.1, 1.0, 10.0, 100.0, 1e4):
            best = float(np.min(candidates.values + lam * candidates.volumes))

            assert best == pytest.approx(exhaustive_objective(p, tables, lam), rel=1e-12)


def test_element_candidates_should_bound_hierarchical_search_by_exhaustive_search(tables) -> None:
    rng = np.random.default_rng(6)
    cfg = small_configuration(exhaustive_limit=0, coarse_stride=4, mid_stride=2, mid_radius=2, keep=3,
                              angle_stride=5)
    strong = tables.index[-1, -1, -1, 0]
    weak = tables.index[0, 0, 0, 0]
    for hint in (None, 1.0):
        p = random_model_matrix(rng)
        candidates = element_candidates(p, tables, cfg, hint)
        components = rotated_components(p, tables.rotations)
        for lam in (0.0, 1.0, 10.0, 1e3):
            best = float(np.min(candidates.values + lam * candidates.volumes))
            corners = min(float(tables.weights[strong] @ components[0]) + lam * tables.volumes[strong],
                          float(tables.weights[weak] @ components[0]) + lam * tables.volumes[weak])

            assert best >= exhaustive_objective(p, tables, lam) * (1.0 - 1e-12)
            assert best <= corners * (1.0 + 1e-12)


def test_dual_bisection_should_select_strong_phase_when_bound_is_one(tables) -> None:
    rng = np.random.default_rng(7)
    cfg = small_configuration()
    candidates = [element_candidates(random_model_matrix(rng), tables, cfg) for _ in range(4)]

    lam, design = dual_bisection(candidates, 1.0, cfg, (0.0, 10.0), tables)

    assert lam == 0.0
    np.testing.assert_allclose(design.volumes, 1.0, atol=1e-12)


def test_dual_bisection_should_select_weak_phase_when_bound_is_zero(tables) -> None:
    rng = np.random.default_rng(8)
    cfg = small_configuration()
    candidates = [element_candidates(random_model_matrix(rng), tables, cfg) for _ in range(4)]

    lam, design = dual_bisection(candidates, 0.0, cfg, (0.0, 10.0), tables)

    assert lam > 0.0
    assert design.mean_volume <= cfg.volume_tol


def test_dual_bisection_should_meet_intermediate_bound(tables) -> None:
    rng = np.random.default_rng(9)
    cfg = small_configuration()
    candidates = [element_candidates(random_model_matrix(rng), tables, cfg) for _ in range(12)]

    _, design = dual_bisection(candidates, 0.4, cfg, (0.0, 10.0), tables)

    assert design.mean_volume <= 0.4 + cfg.volume_tol
    assert len(design) == 12
    assert design.bases is not None


def test_dual_bisection_should_raise_dual_bracket_error_when_bracket_cannot_expand(tables) -> None:
    rng = np.random.default_rng(10)
    cfg = small_configuration(lambda_expansions=0)
    candidates = [element_candidates(random_model_matrix(rng), tables, cfg) for _ in range(2)]

    with pytest.raises(DualBracketError) as exc_info:
        dual_bisection(candidates, 0.0, cfg, (0.0, 1e-9), tables)

    assert str(exc_info.value) == 'Volume multiplier bracket failed up to 1e-09'


def test_voigt_volume_updates_should_handle_boundary_cases() -> None:
    a = np.array([1.0, 0.3, 0.5])
    b = np.array([1.0, 0.1, 0.2])

    assert voigt_volume_updates(a, b, 0.0, PAIR).tolist() == [1.0, 1.0, 1.0]
    assert voigt_volume_updates(a, b, 1e12, PAIR).tolist() == [0.0, 0.0, 0.0]
    assert voigt_volume_updates(np.zeros(2), np.zeros(2), 1.0, PAIR).tolist() == [0.0, 0.0]


def test_voigt_volume_updates_should_minimize_model_on_volume_grid() -> None:
    a = np.array([0.3, 1.0, 0.01])
    b = np.array([0.2, 0.05, 0.4])
    lam = 2.0
    grid = np.linspace(0.0, 1.0, 2001)[:, None]

    def model(v):
        return a / (PAIR.weak.kappa + v * PAIR.dkappa) + b / (PAIR.weak.mu + v * PAIR.dmu) + lam * v

    v_star = voigt_volume_updates(a, b, lam, PAIR)

    assert np.all(model(v_star) <= model(grid).min(axis=0) + 1e-12)


def test_voigt_design_should_build_isotropic_mixtures() -> None:
    design = voigt_design(np.array([0.0, 0.5, 1.0]), PAIR)

    np.testing.assert_allclose(design.tensors[0], PAIR.weak_tensor, atol=1e-15)
    np.testing.assert_allclose(design.tensors[1], PAIR.voigt_tensor(0.5), rtol=1e-12)
    np.testing.assert_allclose(design.tensors[2], PAIR.strong_tensor, rtol=1e-12)
    assert design.angles.tolist() == [0.0, 0.0, 0.0]


def test_solve_voigt_reduced_should_keep_strong_phase_when_bound_is_one() -> None:
    problem = Problem.cantilever(6, 6, volume_bound=1.0)
    strong = DesignField.uniform(PAIR.strong_tensor, 1.0, problem.mesh.element_count)

    result = solve_voigt_reduced(problem, PAIR, small_configuration())

    assert result.converged
    assert result.iterate.lam == 0.0
    assert result.iterate.total_compliance == pytest.approx(
        solve_state(problem.mesh, strong, problem.loadcases).total_compliance, rel=1e-10)


def test_solve_voigt_reduced_should_improve_uniform_mixture() -> None:
    problem = Problem.cantilever(8, 8, volume_bound=0.3)
    uniform = voigt_design(np.full(problem.mesh.element_count, 0.3), PAIR)
    cfg = small_configuration(max_iters=60)

    result = solve_voigt_reduced(problem, PAIR, cfg)

    assert result.iterate.total_compliance < solve_state(problem.mesh, uniform, problem.loadcases).total_compliance
    assert abs(result.iterate.volume - 0.3) <= cfg.volume_tol
    assert result.volume_residual == pytest.approx(result.iterate.volume - 0.3, abs=1e-15)
    assert result.status in ('converged', 'stalled', 'max_iterations')
    assert set(result.log[0]) == {'iteration', 'compliance', 'lambda', 'volume_residual', 'merit'}


def test_solve_voigt_reduced_should_find_stationary_design() -> None:
    problem = Problem.cantilever(6, 6, volume_bound=0.4)
    result = solve_voigt_reduced(problem, PAIR, small_configuration(max_iters=200))
    design = result.iterate.design
    state = solve_state(problem.mesh, design, problem.loadcases)
    p = model_matrices(design.tensors, compliance_sensitivities(problem.mesh, state))
    a = 0.25 * (p[:, 0, 0] + 2.0 * p[:, 0, 1] + p[:, 1, 1])
    b = 0.5 * (np.trace(p, axis1=1, axis2=2) - 2.0 * a)
    count = problem.mesh.element_count

    updated = voigt_volume_updates(a, b, result.iterate.lam / count, PAIR)

    assert result.converged
    assert np.max(np.abs(updated - design.volumes)) < 5e-2


def test_sgp_solve_should_use_given_tables(tables, mocker: MockerFixture) -> None:
    mocker.patch('hsfomo.sgp_solver.build_grid', side_effect=AssertionError('grid rebuilt'))
    problem = Problem.cantilever(4, 4, volume_bound=0.3)
    cfg = small_configuration(max_iters=8)

    result = sgp_solve(problem, PAIR, VolumeEstimatorKind.VOIGT, cfg, tables=tables)

    assert 1 <= len(result.log) <= 8
    assert -1.0 / 16 - cfg.volume_tol <= result.volume_residual <= cfg.volume_tol
    assert result.volume_residual == pytest.approx(result.iterate.volume - 0.3, abs=1e-15)
    assert result.iterate.total_compliance > 0.0
    assert [record['iteration'] for record in result.log] == list(range(1, len(result.log) + 1))


def test_sgp_solve_should_report_iteration_limit_when_single_iteration_is_allowed(tables) -> None:
    problem = Problem.cantilever(4, 4, volume_bound=0.3)

    result = sgp_solve(problem, PAIR, VolumeEstimatorKind.VOIGT, small_configuration(max_iters=1), tables=tables)

    assert result.status == 'max_iterations'
    assert not result.converged
    assert len(result.log) == 1
    assert result.iterate.merit == result.log[0]['merit']


def test_outer_loop_should_return_best_iterate_when_iteration_limit_is_reached() -> None:
    problem = Problem.cantilever(4, 4, volume_bound=0.3)
    count = problem.mesh.element_count
    volumes = iter([0.2, 0.6, 0.3, 0.4])

    def update(design, state, lam):
        return 0.0, voigt_design(np.full(count, next(volumes)), PAIR)

    result = _outer_loop(problem, voigt_design(np.full(count, 0.3), PAIR), update,
                         small_configuration(max_iters=4, stall_iters=10), 'test')

    assert result.status == 'max_iterations'
    assert not result.converged
    assert len(result.log) == 4
    assert result.iterate.iteration == 2
    assert result.iterate.merit == min(record['merit'] for record in result.log)
    assert result.volume_residual == pytest.approx(0.3, abs=1e-12)


def test_sgp_solve_should_return_hs_feasible_elements_when_estimator_is_hs(hs_result: SgpResult) -> None:
    strains = sample_strains(500, seed=13)
    design = hs_result.iterate.design

    for tensor, volume in zip(design.tensors, design.volumes):
        assert is_hs_feasible(tensor, float(np.clip(volume, 0.0, 1.0)), strains, PAIR)


def test_sgp_solve_should_store_worst_case_volumes_of_final_bases(hs_result: SgpResult) -> None:
    design = hs_result.iterate.design

    np.testing.assert_allclose(worst_case_volumes(design.bases, PAIR), design.volumes, rtol=0.0, atol=1e-8)


def test_sgp_solve_should_bound_volume_residual_when_estimator_is_hs(hs_result: SgpResult) -> None:
    tol = small_configuration().volume_tol

    assert -1.0 / 36 - tol <= hs_result.volume_residual <= tol
    assert hs_result.volume_residual == pytest.approx(hs_result.iterate.volume - 0.3, abs=1e-15)


def test_dual_bisection_should_bracket_bound_by_nearby_multipliers(tables) -> None:
    rng = np.random.default_rng(11)
    cfg = small_configuration()
    candidates = [element_candidates(random_model_matrix(rng), tables, cfg) for _ in range(12)]

    def mean_volume(lam: float) -> float:
        return float(np.mean([c.volumes[np.argmin(c.values + (lam / 12) * c.volumes)] for c in candidates]))

    lam, _ = dual_bisection(candidates, 0.4, cfg, (0.0, 10.0), tables)

    assert lam > 0.0
    assert mean_volume(lam * (1.0 - 1e-3)) >= 0.4 - cfg.volume_tol
    assert mean_volume(lam * (1.0 + 1e-3)) <= 0.4 + cfg.volume_tol


def test_compliance_should_be_convex_in_voigt_volumes() -> None:
    problem = Problem.cantilever(6, 6, volume_bound=0.3)
    rng = np.random.default_rng(12)
    fields = []
    for _ in range(2):
        v = rng.uniform(0.05, 0.55, problem.mesh.element_count)
        fields.append(np.clip(v * 0.3 / np.mean(v), 0.0, 1.0))

    def compliance(volumes: np.ndarray) -> float:
        return solve_state(problem.mesh, voigt_design(volumes, PAIR), problem.loadcases).total_compliance

    midpoint = compliance(0.5 * (fields[0] + fields[1]))

    assert midpoint <= 0.5 * (compliance(fields[0]) + compliance(fields[1])) + 1e-8



def test_str_should_return_string_representation_of_iterate_and_result() -> None:
    design = DesignField.uniform(PAIR.strong_tensor, 1.0, 2)
    iterate = SgpIterate(design, np.array([1.5, 2.0]), 3.25, 3.5, 0.2, 4)
    result = SgpResult(iterate, [], True, 'converged')

    assert str(iterate) == 'SgpIterate(iteration=4, compliance=3.500000, lam=3.250000, volume=0.200000)'
    assert str(result) == 'SgpResult(status=converged, iterations=0, iterate=' + str(iterate) + ')'
