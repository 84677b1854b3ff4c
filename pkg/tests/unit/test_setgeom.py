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

import math

import numpy as np
import pytest

from hsfomo.errors import DomainError, InadmissibleTensorError
from hsfomo.setgeom import EnvelopeSurface, LaminateCloud, ProductLayer, SetLabel, StrainSample, contact_gap, \
    envelope, is_hs_feasible, is_voigt_feasible, laminate_cloud, nonconvexity_fraction, product_space_sweep, \
    sample_strains, voigt_decomposition
from hsfomo.tensor_core import energy, is_admissible
from tests.factories import BENCHMARK_PAIR, EXTREME_CONTRAST_PAIR, random_admissible_tensor

STRAINS = sample_strains(750, seed=7)
SMALL_STRAINS = sample_strains(200, seed=11)


@pytest.fixture(scope='module')
def cloud() -> LaminateCloud:
    return laminate_cloud(60, 0.5, BENCHMARK_PAIR, seed=3)


def test_sample_strains_should_return_normalized_strains() -> None:
    norms = np.linalg.norm(STRAINS.strains, axis=1)

    assert len(STRAINS) == 750
    assert np.allclose(norms, math.sqrt(2.0) / 2.0, rtol=0.0, atol=1e-12)


def test_sample_strains_should_return_unit_invariants() -> None:
    t, s = STRAINS.invariants

    assert np.allclose(t ** 2 + s ** 2, 1.0, rtol=0.0, atol=1e-12)


def test_sample_strains_should_be_reproducible_when_seed_is_given() -> None:
    first = sample_strains(1, seed=42)
    second = sample_strains(1, seed=42)

    assert np.array_equal(first.strains, second.strains)
    assert first.strains.shape == (1, 3)


def test_sample_strains_should_raise_error_when_count_is_not_positive() -> None:
    with pytest.raises(ValueError) as exc_info:
        sample_strains(0)

    assert str(exc_info.value) == 'Strain count must be at least 1, got 0'


def test_strain_sample_should_raise_error_when_strain_is_not_normalized() -> None:
    with pytest.raises(ValueError) as exc_info:
        StrainSample(np.array([[1.0, 0.0, 0.0]]))

    assert str(exc_info.value) == 'Strain sample contains strains with Frobenius norm other than sqrt(2)/2'


def test_strain_sample_should_not_freeze_caller_array() -> None:
    strains = np.array([[math.sqrt(2.0) / 2.0, 0.0, 0.0]])

    StrainSample(strains)
    strains[0, 0] = 0.0

    assert strains[0, 0] == 0.0


@pytest.mark.parametrize('v', [0.0, 0.25, 0.5, 0.9, 1.0])
def test_envelope_should_satisfy_hierarchy_when_volume_is_in_unit_interval(v: float) -> None:
    a0 = envelope(SetLabel.A0, v, STRAINS, EXTREME_CONTRAST_PAIR).values
    a1 = envelope(SetLabel.A1, v, STRAINS, EXTREME_CONTRAST_PAIR).values
    a2 = envelope(SetLabel.A2, v, STRAINS, EXTREME_CONTRAST_PAIR).values

    assert np.all(a2 <= a1 + 1e-12)
    assert np.all(a1 <= a0 + 1e-12)


def test_envelope_should_separate_sets_strictly_when_volume_is_interior() -> None:
    a0 = envelope(SetLabel.A0, 0.5, STRAINS, EXTREME_CONTRAST_PAIR).values
    a1 = envelope(SetLabel.A1, 0.5, STRAINS, EXTREME_CONTRAST_PAIR).values
    a2 = envelope(SetLabel.A2, 0.5, STRAINS, EXTREME_CONTRAST_PAIR).values

    assert np.all(a1 < a0)
    assert np.count_nonzero(a1 - a2 > 1e-8) > 0.9 * len(STRAINS)


def test_envelope_should_collapse_to_weak_phase_when_volume_is_zero() -> None:
    expected = energy(EXTREME_CONTRAST_PAIR.weak_tensor, STRAINS.strains)

    assert np.allclose(envelope(SetLabel.A1, 0.0, STRAINS, EXTREME_CONTRAST_PAIR).values, expected,
                       rtol=1e-12, atol=1e-24)
    assert np.allclose(envelope(SetLabel.A2, 0.0, STRAINS, EXTREME_CONTRAST_PAIR).values, expected,
                       rtol=1e-12, atol=1e-24)


def test_envelope_should_coincide_for_all_sets_when_volume_is_one() -> None:
    expected = energy(EXTREME_CONTRAST_PAIR.strong_tensor, STRAINS.strains)

    for label in SetLabel:
        assert np.allclose(envelope(label, 1.0, STRAINS, EXTREME_CONTRAST_PAIR).values, expected, rtol=1e-12, atol=0.0)


def test_envelope_should_raise_error_when_volume_is_outside_unit_interval() -> None:
    with pytest.raises(DomainError) as exc_info:
        envelope(SetLabel.A2, 1.2, STRAINS, EXTREME_CONTRAST_PAIR)

    assert str(exc_info.value) == 'v=1.2 is outside [0, 1]'


def test_projection_should_return_half_space_coefficients() -> None:
    surface = envelope(SetLabel.A1, 0.5, STRAINS, EXTREME_CONTRAST_PAIR)
    projection = surface.projection()
    diagonal = np.diag([0.3, 0.2, 0.1])

    assert projection.shape == (750, 6)
    assert np.allclose(projection[:, :3] @ np.diag(diagonal), energy(diagonal, STRAINS.strains))
    assert np.allclose(projection[:, 3] ** 2 + projection[:, 4] ** 2, 1.0)
    assert np.array_equal(projection[:, 5], surface.values)


def test_str_should_return_string_representation() -> None:
    surface = envelope(SetLabel.A2, 0.5, sample_strains(3, seed=1), EXTREME_CONTRAST_PAIR)

    assert str(surface) == 'EnvelopeSurface(label=A2, v=0.5, size=3)'
    assert str(sample_strains(3, seed=1)) == 'StrainSample(size=3, seed=1)'


def test_product_space_sweep_should_return_layers_in_given_order() -> None:
    layers = product_space_sweep([0.0, 0.5, 1.0], SMALL_STRAINS, EXTREME_CONTRAST_PAIR)

    assert [layer.v for layer in layers] == [0.0, 0.5, 1.0]
    assert all(isinstance(layer, ProductLayer) for layer in layers)
    assert all(isinstance(layer.hs, EnvelopeSurface) for layer in layers)


def test_product_space_sweep_should_collapse_to_weak_phase_when_volume_is_zero() -> None:
    layer = product_space_sweep([0.0], SMALL_STRAINS, EXTREME_CONTRAST_PAIR)[0]

    assert np.allclose(layer.gap, 0.0, rtol=0.0, atol=1e-24)
    assert np.allclose(layer.voigt.values, energy(EXTREME_CONTRAST_PAIR.weak_tensor, SMALL_STRAINS.strains), rtol=1e-12)


def test_product_space_sweep_should_keep_hs_layer_inside_voigt_layer() -> None:
    layers = product_space_sweep(np.linspace(0.0, 1.0, 11), SMALL_STRAINS, EXTREME_CONTRAST_PAIR)

    for layer in layers:
        assert np.all(layer.gap >= -1e-12)


def test_product_space_sweep_should_raise_error_when_volume_is_outside_unit_interval() -> None:
    with pytest.raises(DomainError) as exc_info:
        product_space_sweep([0.5, -0.1], SMALL_STRAINS, EXTREME_CONTRAST_PAIR)

    assert str(exc_info.value) == 'v=-0.1 is outside [0, 1]'


@pytest.mark.parametrize('pair', [EXTREME_CONTRAST_PAIR, BENCHMARK_PAIR])
@pytest.mark.parametrize('v', [0.1, 0.5, 0.8])
def test_is_hs_feasible_should_reject_voigt_mixture_when_volume_is_interior(pair, v: float) -> None:
    assert not is_hs_feasible(pair.voigt_tensor(v), v, SMALL_STRAINS, pair)
    assert is_voigt_feasible(pair.voigt_tensor(v), v, pair)


@pytest.mark.parametrize('v', [0.0, 1.0])
def test_is_hs_feasible_should_accept_voigt_mixture_when_volume_is_end_point(v: float) -> None:
    assert is_hs_feasible(BENCHMARK_PAIR.voigt_tensor(v), v, SMALL_STRAINS, BENCHMARK_PAIR)


def test_is_hs_feasible_should_reject_inadmissible_tensor() -> None:
    assert not is_hs_feasible(0.5 * BENCHMARK_PAIR.weak_tensor, 0.5, SMALL_STRAINS, BENCHMARK_PAIR)


def test_is_voigt_feasible_should_reject_strong_phase_when_volume_is_interior() -> None:
    assert not is_voigt_feasible(BENCHMARK_PAIR.strong_tensor, 0.5, BENCHMARK_PAIR)


def test_voigt_decomposition_should_recover_strong_end_point() -> None:
    rng = np.random.default_rng(5)
    weak = BENCHMARK_PAIR.weak_tensor

    for v in (0.2, 0.5, 0.9):
        upper = random_admissible_tensor(rng, BENCHMARK_PAIR)
        m = weak + v * (upper - weak)

        end_point = voigt_decomposition(m, v, BENCHMARK_PAIR)

        assert np.allclose(end_point, upper, atol=1e-12)
        assert np.allclose((1.0 - v) * weak + v * end_point, m, atol=1e-12)
        assert is_hs_feasible(end_point, 1.0, SMALL_STRAINS, BENCHMARK_PAIR)


def test_voigt_decomposition_should_return_weak_phase_when_volume_is_zero() -> None:
    end_point = voigt_decomposition(BENCHMARK_PAIR.weak_tensor, 0.0, BENCHMARK_PAIR)

    assert np.array_equal(end_point, BENCHMARK_PAIR.weak_tensor)


def test_voigt_decomposition_should_raise_error_when_tensor_is_not_voigt_feasible() -> None:
    with pytest.raises(InadmissibleTensorError):
        voigt_decomposition(BENCHMARK_PAIR.strong_tensor, 0.5, BENCHMARK_PAIR)


def test_laminate_cloud_should_return_admissible_tensors(cloud: LaminateCloud) -> None:
    assert len(cloud) == 60
    assert cloud.volume == 0.5
    assert np.allclose(np.linalg.norm(cloud.stresses, axis=1), 1.0)
    assert np.all(is_admissible(cloud.tensors, BENCHMARK_PAIR))


def test_laminate_cloud_should_return_hs_feasible_tensors(cloud: LaminateCloud) -> None:
    for m in cloud.tensors:
        assert is_hs_feasible(m, 0.5, STRAINS, BENCHMARK_PAIR)
        assert is_voigt_feasible(m, 0.5, BENCHMARK_PAIR)


def test_laminate_cloud_should_touch_hs_boundary_at_contact_strains(cloud: LaminateCloud) -> None:
    for m, strain in zip(cloud.tensors, cloud.contact_strains()):
        assert abs(contact_gap(m, 0.5, strain, BENCHMARK_PAIR)) < 1e-6


def test_laminate_cloud_should_be_reproducible_when_seed_is_given() -> None:
    first = laminate_cloud(5, 0.3, BENCHMARK_PAIR, seed=9)
    second = laminate_cloud(5, 0.3, BENCHMARK_PAIR, seed=9)

    assert np.array_equal(first.tensors, second.tensors)
    assert str(first) == 'LaminateCloud(size=5, volume=0.3)'


@pytest.mark.parametrize('v', [0.0, 1.0, 1.3])
def test_laminate_cloud_should_raise_error_when_volume_is_not_interior(v: float) -> None:
    with pytest.raises(DomainError) as exc_info:
        laminate_cloud(5, v, BENCHMARK_PAIR)

    assert str(exc_info.value) == f'v={v} is outside (0, 1)'


def test_contact_gap_should_be_zero_for_pure_phase_at_end_points() -> None:
    strain = SMALL_STRAINS.strains[0]

    assert contact_gap(BENCHMARK_PAIR.strong_tensor, 1.0, strain, BENCHMARK_PAIR) == pytest.approx(0.0, abs=1e-12)
    assert contact_gap(BENCHMARK_PAIR.weak_tensor, 0.0, strain, BENCHMARK_PAIR) == pytest.approx(0.0, abs=1e-12)


def test_nonconvexity_fraction_should_return_reproducible_fraction(cloud: LaminateCloud) -> None:
    first = nonconvexity_fraction(cloud, SMALL_STRAINS, BENCHMARK_PAIR, n_pairs=40, seed=2)
    second = nonconvexity_fraction(cloud, SMALL_STRAINS, BENCHMARK_PAIR, n_pairs=40, seed=2)

    assert 0.0 <= first <= 1.0
    assert first == second


def test_nonconvexity_fraction_should_raise_error_when_chord_count_is_not_positive(cloud: LaminateCloud) -> None:
    with pytest.raises(ValueError) as exc_info:
        nonconvexity_fraction(cloud, SMALL_STRAINS, BENCHMARK_PAIR, n_pairs=0)

    assert str(exc_info.value) == 'Chord count must be at least 1, got 0'
