import json
import math

import numpy as np
import pytest

from framelab import VectorSystem, evaluate
from framelab.io import SystemFormatError, dump_report, read_system, to_jsonable, write_system


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_round_trip_bit_exact(tmp_path, fmt):
    rng = np.random.default_rng(0)
    for i in range(100):
        d = int(rng.integers(1, 6))
        N = int(rng.integers(1, 10))
        vs = VectorSystem(rng.standard_normal((N, d)) * 10.0 ** rng.integers(-8, 8))
        path = tmp_path / f"s{i}.{fmt}"
        write_system(path, vs)
        back = read_system(path)
        assert back.vectors.tobytes() == vs.vectors.tobytes()
        a, b = evaluate(vs, 0.1), evaluate(back, 0.1)
        assert a.ratios == b.ratios


def test_csv_orthonormal_pair(tmp_path):
    p = tmp_path / "pair.csv"
    p.write_text("1,0\n0,1\n")
    vs = read_system(p, dim=2)
    np.testing.assert_array_equal(vs.vectors, np.eye(2))


def test_csv_row_length_error_names_row(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,0\n0,1,2\n")
    with pytest.raises(SystemFormatError) as info:
        read_system(p, dim=2)
    assert info.value.row == 2
    assert "row 2" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        '{"vectors": [[1, NaN]]}',
        '{"vectors": [[1, 1e999]]}',
        '{"vectors": [[1, 0], [1]]}',
        '{"dim": 2, "count": 3, "vectors": [[1, 0], [0, 1]]}',
        '{"vectors": []}',
        '[1, 2]',
        'not json',
        '{"vectors": [[1, "a"]]}',
    ],
)
def test_malformed_json(tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(SystemFormatError):
        read_system(p)


def test_csv_non_numeric(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,x\n")
    with pytest.raises(SystemFormatError):
        read_system(p)


def test_json_schema(tmp_path):
    p = tmp_path / "s.json"
    write_system(p, VectorSystem([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]))
    obj = json.loads(p.read_text())
    assert obj["dim"] == 2 and obj["count"] == 3 and obj["vectors"][2] == [5.0, 6.0]


def test_jsonable_infinity_and_nan():
    assert to_jsonable({"a": math.inf, "b": (1.0, -math.inf)}) == {"a": "inf", "b": [1.0, "-inf"]}
    with pytest.raises(ValueError):
        to_jsonable(float("nan"))
    text = dump_report({"r": evaluate(VectorSystem(np.eye(2)), 0.0)})
    assert '"inf"' in text and "Infinity" not in text
