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

from hsfomo.load_case import LoadCase, PointLoad


def test_constructor_should_sort_and_deduplicate_fixed_dofs() -> None:
    loadcase = LoadCase([5, 1, 5, 0], [PointLoad(3, 1, -1.0)])

    assert loadcase.fixed_dofs.tolist() == [0, 1, 5]


def test_constructor_should_raise_value_error_when_no_dof_fixed() -> None:
    with pytest.raises(ValueError) as exc_info:
        LoadCase([], [PointLoad(3, 1, -1.0)])

    assert str(exc_info.value) == 'Load case must fix at least one degree of freedom'


def test_constructor_should_raise_value_error_when_direction_invalid() -> None:
    with pytest.raises(ValueError) as exc_info:
        LoadCase([0], [PointLoad(3, 2, -1.0)])

    assert str(exc_info.value) == 'Load direction must be 0 (x) or 1 (y)'


def test_constructor_should_raise_value_error_when_load_vanishes() -> None:
    with pytest.raises(ValueError) as exc_info:
        LoadCase([0], [PointLoad(3, 1, 0.0)])

    assert str(exc_info.value) == 'Load case must carry a nonzero load'


def test_load_vector_should_accumulate_point_loads() -> None:
    loadcase = LoadCase([0], [PointLoad(2, 1, -1.0), PointLoad(2, 1, 0.5), (1, 0, 2.0)])

    np.testing.assert_array_equal(loadcase.load_vector(8), [0.0, 0.0, 2.0, 0.0, 0.0, -0.5, 0.0, 0.0])


def test_str_should_return_string_representation_of_load_case() -> None:
    loadcase = LoadCase([0, 1], [PointLoad(2, 1, -1.0)])

    assert str(loadcase) == 'LoadCase(fixed_dofs=2, point_loads=[PointLoad(node=2, direction=1, magnitude=-1.0)])'
