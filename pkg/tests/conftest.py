from fractions import Fraction

import pytest

from rellich.exact import ProblemParams


@pytest.fixture
def params_4_2():
    return ProblemParams(4, 2)


F = Fraction
