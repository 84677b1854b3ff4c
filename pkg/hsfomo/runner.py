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

import logging
import os
import time
from typing import List, Tuple

import numpy as np

from hsfomo import __version__
from hsfomo.design_field import DesignField
from hsfomo.export import export_fields, export_log, export_rosettes, export_sets
from hsfomo.laminate_am import am_solve
from hsfomo.result_bundle import ResultBundle
from hsfomo.run_configuration import ModelKind, RunConfiguration
from hsfomo.setgeom import SetLabel, contact_gap, envelope, is_hs_feasible, laminate_cloud, nonconvexity_fraction, \
    product_space_sweep, sample_strains
from hsfomo.sgp_solver import sgp_solve, solve_voigt_reduced
from hsfomo.tensor_core import orthotropic_frame

logger = logging.getLogger(__name__)


def _orthotropic_fields(design: DesignField) -> Tuple[np.ndarray, np.ndarray]:
    if design.bases is not None:
        return design.bases, design.angles

    frames = [orthotropic_frame(tensor) for tensor in design.tensors]
    return np.array([frame.coefficients for frame in frames]), np.array([frame.phi for frame in frames])


def run(config: RunConfiguration) -> ResultBundle:
    """
    Solves the configured problem with the configured model and persists the result bundle, the element fields, the
    iteration log and the energy rosettes in the output directory.

    :param config: the run configuration
    :return: the result bundle
    """

    problem = config.build_problem()
    pair = config.phase_pair()
    model = config.model
    logger.info('Running %s', config)

    started = time.perf_counter()
    if model is ModelKind.LAMINATE_AM:
        result = am_solve(problem, pair, config.am)
        design, compliances, lam = result.design, result.compliances, result.lam
    else:
        if model is ModelKind.VOIGT and config.reduced_voigt:
            result = solve_voigt_reduced(problem, pair, config.sgp)
        else:
            result = sgp_solve(problem, pair, model.estimator, config.sgp, config.search)
        design, compliances, lam = result.iterate.design, result.iterate.compliances, result.iterate.lam

    logger.info('Finished %s in %.1f s with status %s', model.value, time.perf_counter() - started, result.status)

    bases, angles = _orthotropic_fields(design)
    mesh = problem.mesh
    metadata = {
        'problem': problem.name,
        'model': model.value,
        'contrast': config.contrast,
        'mesh': {'nx': mesh.nx, 'ny': mesh.ny, 'width': mesh.width, 'height': mesh.height},
        'volume_bound': problem.volume_bound,
        'volume_residual': float(design.mean_volume - problem.volume_bound),
        'status': result.status,
        'converged': bool(result.converged),
        'iterations': len(result.log),
        'version': __version__,
    }
    bundle = ResultBundle(design.volumes, bases, angles, compliances, lam, result.log, metadata)

    bundle.save(config.output_dir)
    export_fields(bundle, os.path.join(config.output_dir, 'fields.csv'))
    export_log(bundle, os.path.join(config.output_dir, 'log.csv'))
    export_rosettes(bundle, config.rosette_angles, os.path.join(config.output_dir, 'rosettes.csv'))
    return bundle


def sample_sets(config: RunConfiguration) -> List[str]:
    """
    Samples the admissible set geometry of the configured phase pair and writes it into the sets subdirectory of the
    output directory.

    :param config: the run configuration
    :return: the written paths
    """

    pair = config.phase_pair()
    sets = config.sets
    seed = sets['seed']

    strains = sample_strains(sets['strains'], seed)
    surfaces = [envelope(label, float(v), strains, pair) for v in sets['volumes'] for label in SetLabel]

    layer_strains = sample_strains(sets['layer_strains'], seed + 1)
    layers = product_space_sweep(np.linspace(0.0, 1.0, sets['layers']), layer_strains, pair)

    v = float(sets['cloud_volume'])
    cloud = laminate_cloud(sets['cloud_size'], v, pair, seed + 2)
    feasible = [is_hs_feasible(tensor, v, strains, pair) for tensor in cloud.tensors]
    gaps = [abs(contact_gap(tensor, v, strain, pair)) for tensor, strain in zip(cloud.tensors,
                                                                                 cloud.contact_strains())]

    summary = {
        'contrast': config.contrast,
        'cloud_volume': v,
        'cloud_hs_feasible_fraction': float(np.mean(feasible)),
        'max_contact_gap': float(np.max(gaps)),
        'hs_inside_voigt': bool(all(np.all(layer.gap >= -1e-12) for layer in layers)),
        'voigt_mixture_hs_feasible': is_hs_feasible(pair.voigt_tensor(v), v, strains, pair),
        'nonconvexity_fraction': nonconvexity_fraction(cloud, layer_strains, pair, sets['chords'], seed + 3),
    }
    logger.info('Set geometry summary: %s', summary)
    return export_sets(surfaces, layers, cloud, summary, os.path.join(config.output_dir, 'sets'))
