import json
import math

import numpy as np
import pytest

from magorlicz.limits import ScanRow
from magorlicz.report import csv_text, dumps, format_float


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 2.0 ** 60, -0.0, 5.0):
        assert float(format_float(x)) == x
    assert format_float(5.0) == "5.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(math.nan) == "null"


def test_dumps_is_valid_json():
    obj = {"a": [1, 2.5, None, True], "b": {"c": np.float64(0.2), "d": np.int64(3)},
           "e": "x\"y", "f": [], "g": {}, "h": (np.bool_(False),)}
    back = json.loads(dumps(obj))
    assert back == {"a": [1, 2.5, None, True], "b": {"c": 0.2, "d": 3}, "e": "x\"y",
                    "f": [], "g": {}, "h": [False]}


def test_dumps_rejects_unknown():
    with pytest.raises(TypeError):
        dumps({"a": object()})


def test_csv():
    text = csv_text([ScanRow(0.2, 8.0, 1.6, 1e-8), {"s": 0.1, "I": 1.0, "s_times_I": 0.1,
                                                   "est_error": float("nan")}])
    lines = text.splitlines()
    assert lines[0] == "s,I,s_times_I,est_error"
    assert lines[1].split(",")[1] == "8"
    assert lines[2].endswith(",nan")
