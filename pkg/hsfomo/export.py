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
Tabular exports of result bundles and set geometry samples. Every table is a CSV file with a header row.
"""

import csv
import json
import logging
import math
import os
from typing import Any, Dict, List, Sequence

import numpy as np

from hsfomo.mesh import build_mesh
from hsfomo.result_bundle import ResultBundle
from hsfomo.setgeom import EnvelopeSurface, LaminateCloud, ProductLayer
from hsfomo.tensor_core import energy

logger = logging.getLogger(__name__)

_MODEL_ORDER = {'zo': 0, 'voigt': 1, 'hs-fomo': 2, 'laminate-am': 3}

TABLE_COLUMNS = ['problem', 'discretization', 'contrast', 'model', 'compliance', 'lambda', 'status']
FIELD_COLUMNS = ['element', 'x', 'y', 'volume', 'e1111', 'e1122', 'e2222', 'e1212', 'angle']


def _write_rows(path: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file)
        writer.writerow(header)
        writer.writerows(rows)

    logger.info('Wrote %d rows to %s', len(rows), path)


def _float(value: float) -> str:
    return repr(float(value))


def rosette_values(tensors: np.ndarray, n_angles: int) -> np.ndarray:
    """
    Evaluates the directional energies <E n x n, n x n> for unit directions n at n_angles angles in [0, 2 pi).

    :param tensors: the Kelvin–Mandel matrices, shape (n, 3, 3)
    :param n_angles: the number of angles
    :return: the energies, shape (n, n_angles)
    :raise ValueError: if n_angles is less than 1
    """

    if n_angles < 1:
        raise ValueError(f'Angle count must be at least 1, got {n_angles}')

    angles = 2.0 * math.pi * np.arange(n_angles) / n_angles
    c, s = np.cos(angles), np.sin(angles)
    strains = np.column_stack([c * c, s * s, math.sqrt(2.0) * c * s])
    return energy(np.asarray(tensors, dtype=float)[:, None], strains[None])


def export_rosettes(bundle: ResultBundle, n_angles: int, path: str) -> str:
    """
    Writes the directional energy rosette of every element as rows (element, angle, energy).

    :param bundle: the result bundle
    :param n_angles: the number of angles per element
    :param path: the output CSV file
    :return: the output path
    """

    values = rosette_values(bundle.design().tensors, n_angles)
    angles = 2.0 * math.pi * np.arange(n_angles) / n_angles
    rows = [(element, _float(angles[k]), _float(values[element, k]))
            for element in range(values.shape[0]) for k in range(n_angles)]
    _write_rows(path, ['element', 'angle', 'energy'], rows)
    return path


def table_rows(bundles: Sequence[ResultBundle]) -> List[Dict[str, Any]]:
    """
    Returns the comparison table rows, grouped by problem, discretization and contrast and ordered by model.

    :param bundles: the result bundles
    :return: the rows as dictionaries keyed by TABLE_COLUMNS
    :raise ValueError: if no bundle is given
    """

    if not bundles:
        raise ValueError('Comparison table needs at least one result bundle')

    rows = []
    for bundle in bundles:
        metadata = bundle.metadata
        mesh = metadata['mesh']
        rows.append({
            'problem': metadata['problem'],
            'discretization': f'{mesh["nx"]}x{mesh["ny"]}',
            'contrast': float(metadata['contrast']),
            'model': metadata['model'],
            'compliance': bundle.total_compliance,
            'lambda': bundle.lam,
            'status': metadata['status'],
            '_elements': mesh['nx'] * mesh['ny'],
        })

    rows.sort(key=lambda row: (row['problem'], row['_elements'], -row['contrast'],
                               _MODEL_ORDER.get(row['model'], len(_MODEL_ORDER)), row['compliance']))
    for row in rows:
        del row['_elements']

    return rows


def export_table(bundles: Sequence[ResultBundle], path: str) -> str:
    """
    Writes the compliance comparison table of several runs.

    :param bundles: the result bundles
    :param path: the output CSV file
    :return: the output path
    :raise ValueError: if no bundle is given
    """

    rows = table_rows(bundles)
    _write_rows(path, TABLE_COLUMNS, [[row['problem'], row['discretization'], f'{row["contrast"]:g}', row['model'],
                                      f'{row["compliance"]:.3f}', f'{row["lambda"]:.6g}', row['status']]
                                     for row in rows])
    return path


def export_fields(bundle: ResultBundle, path: str) -> str:
    """
    Writes one row per element with its centroid, volume fraction, base coefficients and angle, together with a JSON
    mirror next to the CSV file.

    :param bundle: the result bundle
    :param path: the output CSV file
    :return: the output path
    """

    mesh_info = bundle.metadata['mesh']
    mesh = build_mesh(mesh_info['nx'], mesh_info['ny'], mesh_info['width'], mesh_info['height'])
    centroids = mesh.centroids
    records = []
    for element in range(len(bundle.volumes)):
        record = dict(zip(FIELD_COLUMNS, [element, float(centroids[element, 0]), float(centroids[element, 1]),
                                          float(bundle.volumes[element]), *map(float, bundle.bases[element]),
                                          float(bundle.angles[element])]))
        records.append(record)

    _write_rows(path, FIELD_COLUMNS, [[record['element'], *map(_float, list(record.values())[1:])]
                                      for record in records])

    mirror = os.path.splitext(path)[0] + '.json'
    with open(mirror, 'w', encoding='utf-8') as file:
        json.dump({'columns': FIELD_COLUMNS, 'elements': records}, file, sort_keys=True, indent=2)
        file.write('\n')

    return path


def export_log(bundle: ResultBundle, path: str) -> str:
    """
    Writes the iteration log, one row per iteration.

    :param bundle: the result bundle
    :param path: the output CSV file
    :return: the output path
    """

    keys = sorted({key for record in bundle.log for key in record} - {'iteration'})
    header = ['iteration', *keys]
    rows = [[record.get(key, '') for key in header] for record in bundle.log]
    _write_rows(path, header, rows)
    return path


def export_sets(surfaces: Sequence[EnvelopeSurface], layers: Sequence[ProductLayer], cloud: LaminateCloud,
                summary: Dict[str, Any], directory: str) -> List[str]:
    """
    Writes the set geometry samples: the envelopes, the product space layers, the laminate cloud and a JSON summary.

    :param surfaces: the envelope surfaces
    :param layers: the product space layers
    :param cloud: the laminate cloud
    :param summary: the scalar statistics
    :param directory: the output directory
    :return: the written paths
    """

    os.makedirs(directory, exist_ok=True)
    paths = [os.path.join(directory, name) for name in ('envelopes.csv', 'product_layers.csv',
                                                        'laminate_cloud.csv', 'sets_summary.json')]

    envelope_rows = [[surface.label.value, _float(surface.v), *map(_float, row)]
                     for surface in surfaces for row in surface.projection()]
    _write_rows(paths[0], ['set', 'v', 'e1_sq', 'e2_sq', 'e3_sq', 't', 's', 'value'], envelope_rows)

    layer_rows = []
    for layer in layers:
        t, s = layer.voigt.strains.invariants
        layer_rows.extend([_float(layer.v), _float(t[k]), _float(s[k]), _float(layer.voigt.values[k]),
                           _float(layer.hs.values[k])] for k in range(len(t)))
    _write_rows(paths[1], ['v', 't', 's', 'voigt', 'hs'], layer_rows)

    upper = np.triu_indices(3)
    cloud_rows = [[*map(_float, stress), *map(_float, tensor[upper])]
                  for stress, tensor in zip(cloud.stresses, cloud.tensors)]
    _write_rows(paths[2], ['s1', 's2', 's3', 'm11', 'm12', 'm13', 'm22', 'm23', 'm33'], cloud_rows)

    with open(paths[3], 'w', encoding='utf-8') as file:
        json.dump(summary, file, sort_keys=True, indent=2)
        file.write('\n')

    return paths
