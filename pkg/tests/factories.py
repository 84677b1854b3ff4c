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
from typing import Optional

import numpy as np

from hsfomo.result_bundle import ResultBundle
from hsfomo.tensor_core import J_MATRIX, K_MATRIX, OrthoTensor, PhasePair

EXTREME_CONTRAST_PAIR = PhasePair.from_contrast(1.0, 0.3, 1e-9)
BENCHMARK_PAIR = PhasePair.from_contrast(1.0, 0.3, 1e-2)


def contrast_sqrt(pair: PhasePair) -> np.ndarray:
    return math.sqrt(2.0 * pair.dkappa) * J_MATRIX + math.sqrt(2.0 * pair.dmu) * K_MATRIX


def random_unit_strain(rng: np.random.Generator) -> np.ndarray:
    e = rng.standard_normal(3)
    return e * (math.sqrt(2.0) / 2.0) / np.linalg.norm(e)


def random_stress(rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(3)


def random_admissible_tensor(rng: np.random.Generator, pair: PhasePair) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    x = q @ np.diag(rng.uniform(0.0, 1.0, 3)) @ q.T
    root = contrast_sqrt(pair)
    return pair.weak_tensor + root @ x @ root


def random_admissible_base(rng: np.random.Generator, pair: PhasePair) -> OrthoTensor:
    angle = rng.uniform(0.0, math.pi)
    c, s = math.cos(angle), math.sin(angle)
    q = np.array([[c, -s], [s, c]])
    x = np.zeros((3, 3))
    x[:2, :2] = q @ np.diag(rng.uniform(0.0, 1.0, 2)) @ q.T
    x[2, 2] = rng.uniform(0.0, 1.0)
    root = contrast_sqrt(pair)
    m = pair.weak_tensor + root @ x @ root
    return OrthoTensor(m[0, 0], m[0, 1], m[1, 1], 0.5 * m[2, 2], rng.uniform(0.0, math.pi))


def make_result_bundle(model: str = 'hs-fomo', compliance: float = 40.0, contrast: float = 1e-2, nx: int = 2,
                       ny: int = 1, bases: Optional[np.ndarray] = None, status: str = 'converged') -> ResultBundle:
    n = nx * ny
    if bases is None:
        bases = np.tile([0.7, 0.2, 0.7, 0.25], (n, 1))
    metadata = {
        'problem': 'cantilever',
        'model': model,
        'contrast': contrast,
        'mesh': {'nx': nx, 'ny': ny, 'width': 1.0, 'height': 1.0},
        'volume_bound': 0.2,
        'status': status,
        'converged': status != 'max_iterations',
        'iterations': 1,
        'version': '1.0.0',
    }
    log = [{'iteration': 1, 'compliance': compliance, 'lambda': 0.5}]
    return ResultBundle(np.full(n, 0.2), bases, np.zeros(n), [compliance], 0.5, log, metadata)
