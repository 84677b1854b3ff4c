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

import csv
import json
import math

import numpy as np
import pytest

from hsfomo.export import FIELD_COLUMNS, TABLE_COLUMNS, export_fields, export_log, export_rosettes, export_sets, \
    export_table, rosette_values, table_rows
from hsfomo.setgeom import SetLabel, envelope, laminate_cloud, product_space_sweep, sample_strains
from hsfomo.tensor_core import OrthoTensor, iso_matrix, rotate
from tests.factories import BENCHMARK_PAIR, make_result_bundle


def read_rows(path) -> list:
    with open(path, newline='') as file:
        return list(csv.reader(file))


def test_rosette_values_should_be_constant_when_tensor_is_isotropic() -> None:
    values = rosette_values(iso_matrix(0.5, 0.3)[None], 36)

    assert values.shape == (1, 36)
    assert np.allclose(values, values[0, 0], rtol=1e-13)


def test_rosette_values_should_have_period_pi_and_mirror_symmetry_when_tensor_is_orthotropic() -> None:
    phi = 0.3
    tensor = rotate(OrthoTensor(1.0, 0.2, 0.4, 0.1, phi))
    n = 360

    values = rosette_values(tensor[None], n)[0]

    assert np.allclose(values, np.roll(values, -n // 2), rtol=1e-12)
    assert not np.allclose(values, values[0])
    for delta in (0.1, 0.4, 1.0):
        left = rosette_values_at(tensor, phi - delta)
        right = rosette_values_at(tensor, phi + delta)
        assert left == pytest.approx(right, rel=1e-12)
        left = rosette_values_at(tensor, phi + 0.5 * math.pi - delta)
        right = rosette_values_at(tensor, phi + 0.5 * math.pi + delta)
        assert left == pytest.approx(right, rel=1e-12)


def rosette_values_at(tensor: np.ndarray, angle: float) -> float:
    c, s = math.cos(angle), math.sin(angle)
    strain = np.array([c * c, s * s, math.sqrt(2.0) * c * s])
    return float(strain @ tensor @ strain)


def test_rosette_values_should_raise_error_when_angle_count_is_not_positive() -> None:
    with pytest.raises(ValueError) as exc_info:
        rosette_values(iso_matrix(0.5, 0.3)[None], 0)

    assert str(exc_info.value) == 'Angle count must be at least 1, got 0'


def test_export_rosettes_should_write_row_per_element_and_angle(tmp_path) -> None:
    bundle = make_result_bundle()
    path = export_rosettes(bundle, 8, str(tmp_path / 'rosettes.csv'))

    rows = read_rows(path)

    assert rows[0] == ['element', 'angle', 'energy']
    assert len(rows) == 1 + 2 * 8
    assert [int(row[0]) for row in rows[1:]] == [0] * 8 + [1] * 8
    assert float(rows[1][2]) == pytest.approx(0.7)


def test_export_rosettes_should_write_constant_rows_when_bases_are_isotropic(tmp_path) -> None:
    kappa, mu = 0.4, 0.25
    bases = np.tile([kappa + mu, kappa - mu, kappa + mu, mu], (2, 1))
    path = export_rosettes(make_result_bundle(model='voigt', bases=bases), 12, str(tmp_path / 'rosettes.csv'))

    energies = np.array([float(row[2]) for row in read_rows(path)[1:]])

    assert np.allclose(energies, kappa + mu, rtol=1e-12)


def test_table_rows_should_order_models_within_contrast() -> None:
    bundles = [make_result_bundle('hs-fomo', 40.787), make_result_bundle('zo', 18.827),
               make_result_bundle('voigt', 38.675)]

    rows = table_rows(bundles)

    assert [row['model'] for row in rows] == ['zo', 'voigt', 'hs-fomo']
    assert [row['compliance'] for row in rows] == [18.827, 38.675, 40.787]


def test_table_rows_should_group_by_discretization_and_contrast() -> None:
    bundles = [make_result_bundle('voigt', 39.7, 1e-3), make_result_bundle('zo', 14.7, 1e-2, nx=4, ny=2),
               make_result_bundle('voigt', 38.6, 1e-2)]

    rows = table_rows(bundles)

    assert [(row['discretization'], row['contrast']) for row in rows] == [('2x1', 1e-2), ('2x1', 1e-3),
                                                                          ('4x2', 1e-2)]


def test_table_rows_should_raise_error_when_bundle_list_is_empty() -> None:
    with pytest.raises(ValueError) as exc_info:
        table_rows([])

    assert str(exc_info.value) == 'Comparison table needs at least one result bundle'


def test_export_table_should_write_header_and_rows(tmp_path) -> None:
    bundles = [make_result_bundle('voigt', 38.675), make_result_bundle('zo', 18.827)]
    path = export_table(bundles, str(tmp_path / 'table.csv'))

    rows = read_rows(path)

    assert rows[0] == TABLE_COLUMNS
    assert rows[1] == ['cantilever', '2x1', '0.01', 'zo', '18.827', '0.5', 'converged']
    assert rows[2][3] == 'voigt'


def test_export_fields_should_write_csv_and_json_mirror(tmp_path) -> None:
    bundle = make_result_bundle()
    path = export_fields(bundle, str(tmp_path / 'fields.csv'))

    rows = read_rows(path)
    with open(str(tmp_path / 'fields.json')) as file:
        mirror = json.load(file)

    assert rows[0] == FIELD_COLUMNS
    assert len(rows) == 3
    assert [float(value) for value in rows[1][1:3]] == [0.25, 0.5]
    assert [float(value) for value in rows[2][1:3]] == [0.75, 0.5]
    assert mirror['columns'] == FIELD_COLUMNS
    assert mirror['elements'][1]['x'] == 0.75
    assert mirror['elements'][1]['e1212'] == 0.25


def test_export_log_should_put_iteration_first(tmp_path) -> None:
    path = export_log(make_result_bundle(), str(tmp_path / 'log.csv'))

    rows = read_rows(path)

    assert rows[0] == ['iteration', 'compliance', 'lambda']
    assert rows[1] == ['1', '40.0', '0.5']


def test_export_sets_should_write_all_tables(tmp_path) -> None:
    strains = sample_strains(5, seed=1)
    surfaces = [envelope(label, 0.5, strains, BENCHMARK_PAIR) for label in SetLabel]
    layers = product_space_sweep([0.0, 1.0], strains, BENCHMARK_PAIR)
    cloud = laminate_cloud(3, 0.5, BENCHMARK_PAIR, seed=1)

    paths = export_sets(surfaces, layers, cloud, {'nonconvexity_fraction': 0.5}, str(tmp_path / 'sets'))

    envelopes, product_layers, cloud_rows = (read_rows(path) for path in paths[:3])
    with open(paths[3]) as file:
        summary = json.load(file)

    assert envelopes[0] == ['set', 'v', 'e1_sq', 'e2_sq', 'e3_sq', 't', 's', 'value']
    assert len(envelopes) == 1 + 3 * 5
    assert {row[0] for row in envelopes[1:]} == {'A0', 'A1', 'A2'}
    assert len(product_layers) == 1 + 2 * 5
    assert len(cloud_rows) == 1 + 3
    assert summary == {'nonconvexity_fraction': 0.5}
