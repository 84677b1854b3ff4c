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
Run files.

A run file is a TOML document with the sections below. Every key is optional; missing keys take the documented
defaults.

    [problem]   name = "cantilever" | "multiload" | "custom" (cantilever), volume_bound (0.2), seed (0)
    [mesh]      nx, ny (preset values: 30 x 30 for the cantilever, 40 x 20 for the multiload problem),
                width, height (1.0 x 1.0, only used by custom problems)
    [material]  young (1.0), poisson (0.3), contrast (1e-2)
    [model]     name = "zo" | "voigt" | "hs-fomo" | "laminate-am" (hs-fomo),
                reduced_voigt (true, solves the Voigt model as a variable-thickness sheet)
    [sgp]       keyword arguments of SgpConfiguration
    [am]        keyword arguments of AmConfiguration
    [search]    keyword arguments of SearchConfiguration
    [output]    directory ("results"), rosette_angles (72)
    [sets]      strains (750), layer_strains (250), volumes ([0.5]), layers (11), cloud_size (5000),
                cloud_volume (0.5), chords (1000), seed (0)
    [custom]    clamped_edges (subset of left, right, bottom, top), pinned_points ([[x, y], ...]),
                loads ([[[x, y, direction, magnitude], ...], ...], one list per load case)
"""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import toml
from cerberus import Validator

from hsfomo.am_configuration import AmConfiguration
from hsfomo.errors import ConfigurationError, ConfigurationParseError
from hsfomo.hs_bounds import VolumeEstimatorKind
from hsfomo.mesh import build_mesh
from hsfomo.problem import Problem
from hsfomo.search_configuration import SearchConfiguration
from hsfomo.sgp_configuration import SgpConfiguration
from hsfomo.tensor_core import PhasePair

logger = logging.getLogger(__name__)

_PRESET_MESHES = {'cantilever': (30, 30), 'multiload': (40, 20)}


class ModelKind(Enum):
    """Material model of a run."""

    ZERO_ORDER = 'zo'
    VOIGT = 'voigt'
    HS_FOMO = 'hs-fomo'
    LAMINATE_AM = 'laminate-am'

    @property
    def estimator(self) -> Optional[VolumeEstimatorKind]:
        """
        Returns the volume estimator of the grid-based models.

        :return: the volume estimator, or None for the laminate model
        """

        return {
            ModelKind.ZERO_ORDER: VolumeEstimatorKind.ZERO_ORDER,
            ModelKind.VOIGT: VolumeEstimatorKind.VOIGT,
            ModelKind.HS_FOMO: VolumeEstimatorKind.HASHIN_SHTRIKMAN,
        }.get(self)


def _positive(field: str, value: float, error) -> None:
    if not value > 0:
        error(field, 'must be positive')


def _open_unit_interval(field: str, value: float, error) -> None:
    if not 0.0 < value < 1.0:
        error(field, 'must lie in (0, 1)')


def _integer(minimum: int, **rules: Any) -> Dict[str, Any]:
    return {'type': 'integer', 'min': minimum, **rules}


def _number(**rules: Any) -> Dict[str, Any]:
    return {'type': 'number', **rules}


def _section(schema: Dict[str, Any]) -> Dict[str, Any]:
    return {'type': 'dict', 'default': {}, 'schema': schema}


_SGP_SCHEMA = {
    'angle_samples': _integer(3),
    'diag_grid': _integer(3),
    'offdiag_grid': _integer(3),
    'merit_rel_tol': _number(check_with=_positive),
    'stall_iters': _integer(1),
    'volume_tol': _number(check_with=_positive),
    'max_iters': _integer(1),
    'lambda_bracket': {'type': 'list', 'minlength': 2, 'maxlength': 2, 'schema': _number(min=0)},
    'lambda_expansions': _integer(0),
    'coarse_stride': _integer(1),
    'mid_stride': _integer(1),
    'mid_radius': _integer(0),
    'fine_radius': _integer(0),
    'keep': _integer(1),
    'angle_stride': _integer(1),
    'exhaustive_limit': _integer(0),
    'use_cache': {'type': 'boolean'},
    'cache_dir': {'type': 'string'},
    'show_progress': {'type': 'boolean'},
}

_AM_SCHEMA = {
    'density_change_tol': _number(check_with=_positive),
    'compliance_rel_tol': _number(check_with=_positive),
    'max_iters': _integer(1),
    'volume_tol': _number(check_with=_positive),
    'bisection_iters': _integer(1),
    'lambda_expansions': _integer(0),
    'show_progress': {'type': 'boolean'},
}

_SEARCH_SCHEMA = {
    'coarse_samples': _integer(2),
    'golden_tol': _number(check_with=_positive),
    'brackets_max': _integer(1),
}

SCHEMA = {
    'problem': _section({
        'name': {'type': 'string', 'allowed': ['cantilever', 'multiload', 'custom'], 'default': 'cantilever'},
        'volume_bound': _number(min=0.0, max=1.0, default=0.2),
        'seed': _integer(0, default=0),
    }),
    'mesh': _section({
        'nx': _integer(1, nullable=True, default=None),
        'ny': _integer(1, nullable=True, default=None),
        'width': _number(check_with=_positive, default=1.0),
        'height': _number(check_with=_positive, default=1.0),
    }),
    'material': _section({
        'young': _number(check_with=_positive, default=1.0),
        'poisson': _number(min=-0.999, max=0.499, default=0.3),
        'contrast': _number(check_with=_open_unit_interval, default=1e-2),
    }),
    'model': _section({
        'name': {'type': 'string', 'allowed': [kind.value for kind in ModelKind], 'default': 'hs-fomo'},
        'reduced_voigt': {'type': 'boolean', 'default': True},
    }),
    'sgp': _section(_SGP_SCHEMA),
    'am': _section(_AM_SCHEMA),
    'search': _section(_SEARCH_SCHEMA),
    'output': _section({
        'directory': {'type': 'string', 'default': 'results'},
        'rosette_angles': _integer(1, default=72),
    }),
    'sets': _section({
        'strains': _integer(1, default=750),
        'layer_strains': _integer(1, default=250),
        'volumes': {'type': 'list', 'minlength': 1, 'schema': _number(min=0.0, max=1.0), 'default': [0.5]},
        'layers': _integer(2, default=11),
        'cloud_size': _integer(1, default=5000),
        'cloud_volume': _number(check_with=_open_unit_interval, default=0.5),
        'chords': _integer(1, default=1000),
        'seed': _integer(0, default=0),
    }),
    'custom': _section({
        'clamped_edges': {'type': 'list', 'schema': {'type': 'string', 'allowed': ['left', 'right', 'bottom', 'top']},
                          'default': []},
        'pinned_points': {'type': 'list', 'schema': {'type': 'list', 'minlength': 2, 'maxlength': 2,
                                                     'schema': _number()}, 'default': []},
        'loads': {'type': 'list', 'default': [],
                  'schema': {'type': 'list', 'minlength': 1,
                             'schema': {'type': 'list', 'minlength': 4, 'maxlength': 4, 'schema': _number()}}},
    }),
}


def _flatten(errors: Dict[str, Any], prefix: str = '') -> List[str]:
    messages = []
    for field, entries in errors.items():
        path = f'{prefix}{field}'
        for entry in entries:
            if isinstance(entry, dict):
                messages.extend(_flatten(entry, f'{path}.'))
            else:
                messages.append(f'{path}: {entry}')

    return sorted(messages)


def _options(section: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in section.items() if value is not None}


class RunConfiguration:
    """Validated contents of a run file."""

    def __init__(self, document: Dict[str, Any]) -> None:
        """
        Creates a new run configuration instance.

        :param document: the parsed run file
        :raise ConfigurationError: if the document violates the schema or the cross-section constraints
        """

        document = {key: ({} if value is None else value) for key, value in dict(document).items()}
        for section in SCHEMA:
            document.setdefault(section, {})

        validator = Validator(SCHEMA)
        if not validator.validate(document):
            raise ConfigurationError(_flatten(validator.errors))

        self._document = validator.document
        errors = self._cross_check()

        try:
            sgp = dict(self._document['sgp'])
            if 'lambda_bracket' in sgp:
                sgp['lambda_bracket'] = tuple(sgp['lambda_bracket'])
            self._sgp = SgpConfiguration(**_options(sgp))
        except ValueError as error:
            errors.append(f'sgp: {error}')

        try:
            self._am = AmConfiguration(**_options(self._document['am']))
        except ValueError as error:
            errors.append(f'am: {error}')

        try:
            self._search = SearchConfiguration(**_options(self._document['search']))
        except ValueError as error:
            errors.append(f'search: {error}')

        if errors:
            raise ConfigurationError(errors)

    def _cross_check(self) -> List[str]:
        errors = []
        name = self.problem_name
        custom = self._document['custom']

        if name == 'custom':
            if not (custom['clamped_edges'] or custom['pinned_points']) or not custom['loads']:
                errors.append('custom: custom problems must define supports and loads')

            if self._document['mesh']['nx'] is None or self._document['mesh']['ny'] is None:
                errors.append('mesh: custom problems must define nx and ny')

        if self.model is ModelKind.LAMINATE_AM:
            load_count = 2 if name == 'multiload' else len(custom['loads']) if name == 'custom' else 1
            if load_count > 1:
                errors.append(f'model.name: laminate-am requires a single load case, got {load_count}')

        return errors

    @property
    def document(self) -> Dict[str, Any]:
        """
        Returns the normalized document with every default filled in.

        :return: the normalized document
        """

        return self._document

    @property
    def problem_name(self) -> str:
        """
        Returns the problem name.

        :return: the problem name
        """

        return self._document['problem']['name']

    @property
    def volume_bound(self) -> float:
        """
        Returns the bound on the mean volume.

        :return: the bound on the mean volume
        """

        return float(self._document['problem']['volume_bound'])

    @property
    def seed(self) -> int:
        """
        Returns the random seed.

        :return: the random seed
        """

        return self._document['problem']['seed']

    @property
    def mesh_size(self) -> Tuple[int, int]:
        """
        Returns the element counts, taking the preset values for missing entries.

        :return: the pair (nx, ny)
        """

        mesh = self._document['mesh']
        preset = _PRESET_MESHES.get(self.problem_name, (None, None))
        nx = mesh['nx'] if mesh['nx'] is not None else preset[0]
        ny = mesh['ny'] if mesh['ny'] is not None else preset[1]
        return nx, ny

    @property
    def young(self) -> float:
        """
        Returns the Young's modulus of the strong phase.

        :return: the Young's modulus of the strong phase
        """

        return float(self._document['material']['young'])

    @property
    def poisson(self) -> float:
        """
        Returns the Poisson ratio of both phases.

        :return: the Poisson ratio of both phases
        """

        return float(self._document['material']['poisson'])

    @property
    def contrast(self) -> float:
        """
        Returns the weak to strong phase stiffness ratio.

        :return: the weak to strong phase stiffness ratio
        """

        return float(self._document['material']['contrast'])

    @property
    def model(self) -> ModelKind:
        """
        Returns the material model.

        :return: the material model
        """

        return ModelKind(self._document['model']['name'])

    @property
    def reduced_voigt(self) -> bool:
        """
        Returns a value indicating whether Voigt runs use the reduced solver.

        :return: True if Voigt runs use the reduced solver, False otherwise
        """

        return self._document['model']['reduced_voigt']

    @property
    def sgp(self) -> SgpConfiguration:
        """
        Returns the SGP configuration.

        :return: the SGP configuration
        """

        return self._sgp

    @property
    def am(self) -> AmConfiguration:
        """
        Returns the AM configuration.

        :return: the AM configuration
        """

        return self._am

    @property
    def search(self) -> SearchConfiguration:
        """
        Returns the worst-case volume search configuration.

        :return: the worst-case volume search configuration
        """

        return self._search

    @property
    def output_dir(self) -> str:
        """
        Returns the output directory.

        :return: the output directory
        """

        return self._document['output']['directory']

    @property
    def rosette_angles(self) -> int:
        """
        Returns the number of rosette angles.

        :return: the number of rosette angles
        """

        return self._document['output']['rosette_angles']

    @property
    def sets(self) -> Dict[str, Any]:
        """
        Returns the set sampling options.

        :return: the set sampling options
        """

        return self._document['sets']

    def phase_pair(self) -> PhasePair:
        """
        Returns the phase pair of the material section.

        :return: the phase pair
        """

        return PhasePair.from_contrast(self.young, self.poisson, self.contrast)

    def build_problem(self) -> Problem:
        """
        Creates the problem of the run from its preset or from the custom section.

        :return: the problem
        """

        nx, ny = self.mesh_size
        if self.problem_name == 'cantilever':
            return Problem.cantilever(nx, ny, self.volume_bound)

        if self.problem_name == 'multiload':
            return Problem.multiload(nx, ny, self.volume_bound)

        mesh = self._document['mesh']
        custom = self._document['custom']
        loads = [[(float(x), float(y), int(direction), float(magnitude)) for x, y, direction, magnitude in case]
                 for case in custom['loads']]
        return Problem.from_supports('custom', build_mesh(nx, ny, float(mesh['width']), float(mesh['height'])),
                                     loads, self.volume_bound, clamped_edges=custom['clamped_edges'],
                                     pinned_points=[(float(x), float(y)) for x, y in custom['pinned_points']])

    def __str__(self) -> str:
        """
        Returns the string representation of the run configuration.

        :return: the string representation of the run configuration
        """

        nx, ny = self.mesh_size
        return f'RunConfiguration(problem={self.problem_name}, model={self.model.value}, mesh={nx}x{ny}, ' \
               f'contrast={self.contrast:g}, volume_bound={self.volume_bound:g})'


def parse_config(path: str) -> RunConfiguration:
    """
    Reads and validates a run file.

    :param path: the path of the TOML run file
    :return: the run configuration
    :raise ConfigurationParseError: if the file cannot be read or is not valid TOML
    :raise ConfigurationError: if the document violates the schema
    """

    try:
        document = toml.load(path)
    except toml.TomlDecodeError as error:
        raise ConfigurationParseError(path, str(error)) from error
    except OSError as error:
        raise ConfigurationParseError(path, error.strerror or str(error)) from error

    config = RunConfiguration(document)
    logger.info('Loaded %s from %s', config, path)
    return config
