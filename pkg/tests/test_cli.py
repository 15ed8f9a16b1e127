from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjortho import io
from bjortho.cli import main
from bjortho.cstar import AlgebraElement
from bjortho.errors import NonSquare, ParseError, ShapeMismatch
from bjortho.sampling import random_element, random_pair


def write(tmp_path, name, A):
    p = tmp_path / name
    io.write_element(p, A)
    return str(p)


def mat(M):
    return AlgebraElement.from_matrix(np.asarray(M, dtype=complex))


E11 = mat([[1, 0], [0, 0]])
E12 = mat([[0, 1], [0, 0]])
I2 = mat(np.eye(2))


# file format


def test_roundtrip_exact(rng):
    for shape in ((2,), (1, 3), (2, 2, 1)):
        for _ in range(10):
            A = random_element(shape, rng)
            B = io.loads(io.dumps(A))
            assert B.shape == A.shape
            assert all(np.array_equal(a, b) for a, b in zip(A.blocks, B.blocks))


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=3),
    st.floats(allow_nan=False, allow_infinity=False, width=64),
    st.integers(0, 2**32 - 1),
)
def test_roundtrip_property(sizes, extreme, seed):
    rng = np.random.default_rng(seed)
    blocks = [rng.standard_normal((n, n)) * 10.0 ** rng.integers(-300, 300) + 1j * rng.standard_normal((n, n)) for n in sizes]
    blocks[0][0, 0] = extreme
    A = AlgebraElement(sizes, blocks)
    B = io.loads(io.dumps(A))
    assert all(np.array_equal(a, b) for a, b in zip(A.blocks, B.blocks))


def test_matrix_form_and_errors():
    A = io.loads('{"matrix": [[[1, 0], [0, 2]], [[0, 0], 3]]}')
    assert A.shape.block_sizes == (2,)
    assert A.blocks[0][0, 1] == 2j and A.blocks[0][1, 1] == 3
    with pytest.raises(ParseError):
        io.loads("{not json")
    with pytest.raises(ParseError):
        io.loads('{"shape": [2]}')
    with pytest.raises(ParseError):
        io.loads('{"matrix": [[["a", 0]]]}')
    with pytest.raises(ShapeMismatch):
        io.loads('{"shape": [2], "blocks": [[[[1, 0]]]]}')
    with pytest.raises(NonSquare):
        io.loads('{"matrix": [[[1, 0], [1, 0]]]}')


def test_boundary_csv_layout():
    text = io.boundary_csv([0.0, 0.1], [1 + 0j, 0.5 - 0.25j])
    assert text.endswith("\n")
    rows = text.splitlines()
    assert rows[0] == "0,1,0"
    assert [float(v) for v in rows[1].split(",")] == [0.1, 0.5, -0.25]


# commands


def test_check_examples(tmp_path, capsys):
    a, b, i = write(tmp_path, "E11.json", E11), write(tmp_path, "E12.json", E12), write(tmp_path, "I2.json", I2)
    assert main(["check", a, b]) == 0
    assert capsys.readouterr().out.startswith("Orthogonal margin=")
    assert main(["check", i, i]) == 1
    assert capsys.readouterr().out.startswith("NotOrthogonal")
    assert main(["check", a, b, "--method", "minimize"]) == 0
    assert "lambda=" in capsys.readouterr().out


def test_check_both_agreement(tmp_path, capsys):
    rng = np.random.default_rng(7)
    for k in range(50):
        n = int(rng.integers(2, 4))
        A, B, _ = random_pair((n,), rng)
        fa, fb = write(tmp_path, f"a{k}.json", A), write(tmp_path, f"b{k}.json", B)
        code = main(["check", fa, fb, "--method", "both"])
        out = capsys.readouterr().out
        assert code in (0, 1, 2)
        assert out.splitlines()[-1] == "agreement=true"


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    ok = write(tmp_path, "ok.json", I2)
    big = write(tmp_path, "big.json", mat(np.eye(3)))
    assert main(["check", str(bad), ok]) == 3
    assert main(["check", ok, big]) == 4
    assert main(["check", ok, str(tmp_path / "missing.json")]) == 5
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 5
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 5
    capsys.readouterr()


def test_m0_and_smooth(tmp_path, capsys):
    f = write(tmp_path, "a.json", AlgebraElement((2, 2), [np.eye(2), 0.5 * np.eye(2)]))
    assert main(["m0", f]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("norm=1 norming_blocks=[0] dim=2")
    assert len(out) == 3
    assert main(["smooth", f]) == 0
    assert capsys.readouterr().out.strip() == "smooth=false"
    g = write(tmp_path, "b.json", AlgebraElement((2, 2), [[[0, 1], [0, 0]], np.zeros((2, 2))]))
    main(["smooth", g])
    assert capsys.readouterr().out.startswith("smooth=true block=0 vector=")
    z = write(tmp_path, "z.json", AlgebraElement.zeros((2,)))
    assert main(["smooth", z]) == 5


def test_numrange_outputs(tmp_path, capsys):
    f = write(tmp_path, "e12.json", E12)
    out = tmp_path / "w.csv"
    assert main(["numrange", f, "--samples", "64", "--out", str(out)]) == 0
    rows = np.array([[float(v) for v in r.split(",")] for r in out.read_text().splitlines()])
    assert rows.shape == (64, 3)
    assert np.allclose(np.hypot(rows[:, 1], rows[:, 2]), 0.5)
    g = write(tmp_path, "d.json", mat(np.diag([1.0, -1.0])))
    main(["numrange", g, "--samples", "32"])
    rows = np.array([[float(v) for v in r.split(",")] for r in capsys.readouterr().out.splitlines()])
    assert np.allclose(rows[:, 2], 0) and np.abs(rows[:, 1]).max() <= 1 + 1e-14
    x, y = np.array([3, 4]) / 5, np.array([5, 12]) / 13
    h = write(tmp_path, "r1.json", mat(np.outer(x, y)))
    main(["numrange", h, "--samples", "360"])
    pts = np.array([[float(v) for v in r.split(",")][1:] for r in capsys.readouterr().out.splitlines()])
    z = pts[:, 0] + 1j * pts[:, 1]
    # boundary of the ellipse with foci 0 and 63/65 and major axis 1
    assert np.allclose(np.abs(z) + np.abs(z - 63 / 65), 1.0, atol=1e-9)
    multi = write(tmp_path, "m.json", AlgebraElement((1, 1), [[[1]], [[2]]]))
    assert main(["numrange", multi]) == 4
    capsys.readouterr()


def test_verify_unimodular_sweep(capsys):
    assert main(["verify", "--suite", "lemma6.1", "--trials", "360", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "orthogonal_at=180" in out and out.rstrip().endswith("seed=1")
    assert "overall: PASS" in out


def test_verify_seed_env(monkeypatch, capsys):
    monkeypatch.setenv("BJ_SEED", "9")
    assert main(["verify", "--suite", "lemma3.1", "--trials", "20"]) == 0
    first = capsys.readouterr().out
    assert "seed=9" in first
    main(["verify", "--suite", "lemma3.1", "--trials", "20"])
    assert capsys.readouterr().out == first


def test_counterexample_commands(capsys):
    assert main(["counterexample", "gauge", "--pairs", "100", "--seed", "2"]) == 0
    assert "overall: PASS" in capsys.readouterr().out
    assert main(["counterexample", "abelian", "--pairs", "100"]) == 0
    capsys.readouterr()


def test_module_entry_point(tmp_path):
    a, b = write(tmp_path, "a.json", E11), write(tmp_path, "b.json", E12)
    res = subprocess.run([sys.executable, "-m", "bjortho", "check", a, b], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("Orthogonal")
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["shape"] == [2]
