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
import logging
import os
from typing import Any, Dict, List, Union

import numpy as np

from hsfomo.design_field import DesignField
from hsfomo.errors import BundleError

logger = logging.getLogger(__name__)

BUNDLE_FILE = 'bundle.json'

_METADATA_KEYS = ('problem', 'model', 'contrast', 'mesh', 'volume_bound', 'status', 'converged', 'iterations',
                  'version')


def _plain(value: Union[float, int, np.number]) -> Union[float, int]:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)

    if isinstance(value, (int, np.integer)):
        return int(value)

    return float(value)


class ResultBundle:
    """Persisted outcome of a run: the design, the compliances, the multiplier, the log and the run metadata."""

    def __init__(self, volumes: np.ndarray, bases: np.ndarray, angles: np.ndarray, compliances: np.ndarray, lam: float,
                 log: List[Dict[str, float]], metadata: Dict[str, Any]) -> None:
        """
        Creates a new result bundle instance.

        :param volumes: the strong phase fractions, shape (n,)
        :param bases: the orthotropic base coefficients (E1111, E1122, E2222, E1212), shape (n, 4)
        :param angles: the orientation angles, shape (n,)
        :param compliances: the compliance of every load case
        :param lam: the volume multiplier
        :param log: the iteration log
        :param metadata: the run metadata
        :raise ValueError: if the field lengths differ or a metadata entry is missing
        """

        self._volumes = np.array(volumes, dtype=float).reshape(-1)
        n = self._volumes.shape[0]
        self._bases = np.array(bases, dtype=float).reshape(n, 4)
        self._angles = np.array(angles, dtype=float).reshape(-1)
        if self._angles.shape[0] != n:
            raise ValueError(f'Expected {n} angles, got {self._angles.shape[0]}')

        missing = [key for key in _METADATA_KEYS if key not in metadata]
        if missing:
            raise ValueError(f'Result bundle metadata misses {", ".join(missing)}')

        mesh = metadata['mesh']
        if mesh['nx'] * mesh['ny'] != n:
            raise ValueError(f'Field length {n} does not match the {mesh["nx"]}x{mesh["ny"]} mesh')

        self._compliances = np.array(compliances, dtype=float).reshape(-1)
        self._lam = float(lam)
        self._log = [{key: _plain(value) for key, value in record.items()} for record in log]
        self._metadata = dict(metadata)

    @property
    def volumes(self) -> np.ndarray:
        """
        Returns the strong phase fractions.

        :return: the strong phase fractions
        """

        return self._volumes

    @property
    def bases(self) -> np.ndarray:
        """
        Returns the orthotropic base coefficients.

        :return: the orthotropic base coefficients
        """

        return self._bases

    @property
    def angles(self) -> np.ndarray:
        """
        Returns the orientation angles.

        :return: the orientation angles
        """

        return self._angles

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
    def lam(self) -> float:
        """
        Returns the volume multiplier.

        :return: the volume multiplier
        """

        return self._lam

    @property
    def log(self) -> List[Dict[str, float]]:
        """
        Returns the iteration log.

        :return: the iteration log
        """

        return self._log

    @property
    def metadata(self) -> Dict[str, Any]:
        """
        Returns the run metadata.

        :return: the run metadata
        """

        return self._metadata

    @property
    def converged(self) -> bool:
        """
        Returns a value indicating whether the run met its stopping criteria.

        :return: True if the run met its stopping criteria, False otherwise
        """

        return bool(self._metadata['converged'])

    def design(self) -> DesignField:
        """
        Rebuilds the design field from the stored bases and angles.

        :return: the design field
        """

        return DesignField.from_orthotropic(self._bases, self._angles, self._volumes)

    def to_dict(self) -> Dict[str, Any]:
        """
        Returns the JSON document of the bundle.

        :return: the document
        """

        return {
            'metadata': self._metadata,
            'volumes': self._volumes.tolist(),
            'bases': self._bases.tolist(),
            'angles': self._angles.tolist(),
            'compliances': self._compliances.tolist(),
            'lambda': self._lam,
            'log': self._log,
        }

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> 'ResultBundle':
        return cls(document['volumes'], document['bases'], document['angles'], document['compliances'],
                   document['lambda'], document['log'], document['metadata'])

    def save(self, directory: str) -> str:
        """
        Writes the bundle as sorted JSON into a directory, creating it if needed.

        :param directory: the output directory
        :return: the path of the written file
        """

        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, BUNDLE_FILE)
        with open(path, 'w', encoding='utf-8') as file:
            json.dump(self.to_dict(), file, sort_keys=True, indent=2)
            file.write('\n')

        logger.info('Saved result bundle to %s', path)
        return path

    @classmethod
    def load(cls, path: str) -> 'ResultBundle':
        """
        Reads a bundle written by save.

        :param path: the bundle file, or the directory holding it
        :return: the result bundle
        :raise BundleError: if the file cannot be read or lacks an entry
        """

        if os.path.isdir(path):
            path = os.path.join(path, BUNDLE_FILE)

        try:
            with open(path, encoding='utf-8') as file:
                document = json.load(file)
            return cls.from_dict(document)
        except OSError as error:
            raise BundleError(path, error.strerror or str(error)) from error
        except json.JSONDecodeError as error:
            raise BundleError(path, f'invalid JSON ({error.msg})') from error
        except KeyError as error:
            raise BundleError(path, f'missing entry {error.args[0]}') from error
        except (TypeError, ValueError) as error:
            raise BundleError(path, str(error)) from error

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResultBundle):
            return NotImplemented

        return self.to_dict() == other.to_dict()

    def __str__(self) -> str:
        """
        Returns the string representation of the result bundle.

        :return: the string representation of the result bundle
        """

        return f'ResultBundle(problem={self._metadata["problem"]}, model={self._metadata["model"]}, ' \
               f'compliance={self.total_compliance:.6f}, lambda={self._lam:.6g}, status={self._metadata["status"]})'
