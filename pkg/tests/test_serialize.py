import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maglab.asymptotics import Case
from maglab.serialize import dumps, format_float


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    text = format_float(x)
    assert float(text) == x
    assert any(c in text for c in ".en")


def test_rendering():
    doc = {"b": 1, "a": [0.5, 2.0, np.float64(0.1)], "c": Case.CASE_ONE, "d": None, "e": True}
    text = dumps(doc)
    assert text == '{"b": 1, "a": [0.5, 2.0, 0.10000000000000001], "c": "CaseOne", "d": null, "e": true}'
    assert json.loads(text)["a"][1] == 2.0


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        format_float(math.inf)
