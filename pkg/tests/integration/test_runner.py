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

import json
import os

import numpy as np
import pytest

from hsfomo.export import rosette_values
from hsfomo.result_bundle import BUNDLE_FILE, ResultBundle
from hsfomo.run_configuration import RunConfiguration
from hsfomo.runner import run, sample_sets

SMALL_SGP = {'angle_samples': 31, 'diag_grid': 9, 'offdiag_grid': 9, 'use_cache': False}


def small_config(output: str, model: str, **sections) -> RunConfiguration:
    document = {
        'problem': {'name': 'cantilever', 'volume_bound': 0.3},
        'mesh': {'nx': 4, 'ny': 4},
        'model': {'name': model},
        'output': {'directory': output},
    }
    document.update(sections)
    return RunConfiguration(document)


def test_run_should_persist_bundle_fields_log_and_rosettes(tmp_path) -> None:
    config = small_config(str(tmp_path), 'voigt', sgp={'max_iters': 30})

    bundle = run(config)

    assert ResultBundle.load(os.path.join(str(tmp_path), BUNDLE_FILE)) == bundle
    assert os.path.isfile(os.path.join(str(tmp_path), 'fields.csv'))
    assert os.path.isfile(os.path.join(str(tmp_path), 'fields.json'))
    assert os.path.isfile(os.path.join(str(tmp_path), 'log.csv'))
    with open(os.path.join(str(tmp_path), 'rosettes.csv')) as file:
        assert len(file.readlines()) == 1 + 16 * 72
    assert bundle.metadata['problem'] == 'cantilever'
    assert bundle.metadata['model'] == 'voigt'
    assert bundle.metadata['mesh'] == {'nx': 4, 'ny': 4, 'width': 1.0, 'height': 1.0}
    assert bundle.metadata['iterations'] == len(bundle.log)
    assert bundle.metadata['volume_residual'] == pytest.approx(float(np.mean(bundle.volumes)) - 0.3, abs=1e-12)
    assert len(bundle.volumes) == 16
    assert bundle.total_compliance > 0.0


def test_run_should_produce_circular_rosettes_when_model_is_voigt(tmp_path) -> None:
    bundle = run(small_config(str(tmp_path), 'voigt', sgp={'max_iters': 30}))

    values = rosette_values(bundle.design().tensors, 24)

    assert np.allclose(values, values[:, :1], rtol=1e-10)


def test_run_should_write_identical_bundles_when_config_is_identical(tmp_path) -> None:
    run(small_config(str(tmp_path / 'first'), 'voigt', sgp={'max_iters': 10}))
    run(small_config(str(tmp_path / 'second'), 'voigt', sgp={'max_iters': 10}))

    with open(str(tmp_path / 'first' / BUNDLE_FILE), 'rb') as first, \
            open(str(tmp_path / 'second' / BUNDLE_FILE), 'rb') as second:
        assert first.read() == second.read()


def test_run_should_use_material_grid_when_model_is_zero_order(tmp_path) -> None:
    sgp = dict(SMALL_SGP, max_iters=5)

    bundle = run(small_config(str(tmp_path), 'zo', sgp=sgp))

    assert bundle.metadata['model'] == 'zo'
    assert 1 <= bundle.metadata['iterations'] <= 5
    assert np.mean(bundle.volumes) <= 0.3 + 1e-6


def test_run_should_dispatch_to_alternating_minimization_when_model_is_laminate(tmp_path) -> None:
    bundle = run(small_config(str(tmp_path), 'laminate-am', am={'max_iters': 5}))

    assert bundle.metadata['model'] == 'laminate-am'
    assert 1 <= bundle.metadata['iterations'] <= 5
    assert bundle.metadata['status'] in ('converged', 'max_iterations')
    assert np.mean(bundle.volumes) == pytest.approx(0.3, abs=1e-5)


def test_sample_sets_should_write_set_tables_and_summary(tmp_path) -> None:
    config = RunConfiguration({
        'output': {'directory': str(tmp_path)},
        'sets': {'strains': 40, 'layer_strains': 20, 'layers': 3, 'cloud_size': 8, 'chords': 10, 'volumes': [0.5]},
    })

    paths = sample_sets(config)

    assert [os.path.basename(path) for path in paths] == ['envelopes.csv', 'product_layers.csv',
                                                          'laminate_cloud.csv', 'sets_summary.json']
    assert all(os.path.dirname(path) == os.path.join(str(tmp_path), 'sets') for path in paths)
    with open(paths[3]) as file:
        summary = json.load(file)
    assert summary['hs_inside_voigt']
    assert not summary['voigt_mixture_hs_feasible']
    assert summary['cloud_hs_feasible_fraction'] == 1.0
    assert summary['max_contact_gap'] < 1e-6
    assert 0.0 <= summary['nonconvexity_fraction'] <= 1.0
