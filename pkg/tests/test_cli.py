import json

import pytest

from scflow import lsa
from scflow.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_catalog_verify_rh3(capsys):
    assert main(["catalog", "verify", "rh3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "c2=-1.25" in out and "1/1 structure checks passed" in out


def test_catalog_verify_param(capsys):
    assert main(["catalog", "verify", "d4_lambda", "--param", "lam=0.5"]) == EXIT_OK
    assert main(["catalog", "verify", "d4_lambda", "--param", "lam"]) == EXIT_USAGE


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_catalog_verify_failure_exit(capsys):
    # the non-closed structure of d4_1 fails verification
    assert main(["catalog", "verify", "d4_1", "--no-sweep"]) == EXIT_FAIL


def test_flow_skew_fixed_point(tmp_path, capsys):
    path = write(tmp_path, "skew.json", {"family": "almost-abelian", "n": 2, "a": 0, "v": [0, 0], "a1": [[0, 1], [-1, 0]]})
    assert main(["flow", "run", "--family", "almost-abelian", "--input", path, "--output", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ConvergedToFixedPoint at t = 0" in out
    header = (tmp_path / "flow_almost-abelian.csv").read_text().splitlines()[0].split(",")
    assert header[:2] == ["t", "a"]
    assert header[-6:] == ["norm", "trP", "R", "jacobi_res", "closed_res", "soliton_res"]


def test_flow_normalized_converges(tmp_path, capsys):
    path = write(tmp_path, "n4.json", {"family": "catalog", "name": "n4"})
    code = main(["flow", "run", "--family", "catalog", "--input", path, "--normalize", "--t-end", "50",
                 "--output", str(tmp_path)])
    assert code == EXIT_OK
    assert "normalized limit reached" in capsys.readouterr().out


def test_flow_lsa_blowup_and_backward(tmp_path, capsys):
    path = write(tmp_path, "theta.json", {"family": "lsa", "name": "theta-ab(1,2)"})
    csv_path = tmp_path / "fwd.csv"
    assert main(["flow", "run", "--family", "lsa", "--input", path, "--t-end", "5", "--csv", str(csv_path)]) == EXIT_OK
    assert "Blowup" in capsys.readouterr().out
    assert main(["flow", "run", "--family", "lsa", "--input", path, "--backward", "--t-end", "0.01",
                 "--output", str(tmp_path)]) == EXIT_OK
    rows = (tmp_path / "flow_lsa.csv").read_text().splitlines()
    assert float(rows[-2].split(",")[0]) < 0


def test_flow_generic_and_determinism(tmp_path):
    path = write(tmp_path, "rh3.json", {"family": "generic", "dim": 4, "bracket_shorthand": "(0,0,12,0)",
                                        "omega": [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        assert main(["flow", "run", "--family", "generic", "--input", path, "--csv", str(target)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_flow_lsa_matrix_input(tmp_path):
    path = write(tmp_path, "l.json", {"family": "lsa", "L": lsa.quaternion_lsa().l.tolist()})
    assert main(["flow", "run", "--family", "lsa", "--input", path, "--t-end", "0.05", "--output", str(tmp_path)]) == EXIT_OK


def test_soliton_fit(tmp_path, capsys):
    good = write(tmp_path, "rh3.json", {"family": "catalog", "name": "rh3"})
    assert main(["soliton", "fit", "--input", good]) == EXIT_OK
    out = capsys.readouterr().out
    assert "certified: True" in out and "c2: -1.25" in out
    bad = write(tmp_path, "r40.json", {"family": "catalog", "name": "r4_0"})
    assert main(["soliton", "fit", "--input", bad]) == EXIT_FAIL
    aa_in = write(tmp_path, "aa.json", {"family": "almost-abelian", "matrix": [[1, 0, 0], [0, 0.5, 0], [0, 0, -0.5]]})
    assert main(["soliton", "fit", "--input", aa_in]) == EXIT_OK


def test_soliton_search(capsys):
    assert main(["soliton", "search", "--lsa", "quaternion-u2", "--pattern", "x111"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "c = q + r = 1.6727272727" in out and "shrinking" in out
    assert main(["soliton", "search", "--lsa", "nonsense", "--pattern", "x111"]) == EXIT_USAGE


def test_reproduce(tmp_path, capsys):
    assert main(["reproduce", "u2-soliton", "--output", str(tmp_path)]) == EXIT_OK
    code = main(["reproduce", "bf-exa", "--a0", "1", "--b0", "2", "--output", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == EXIT_FAIL  # the ancient check fails
    assert "[FAIL]" in out
    text = next(tmp_path.glob("*.csv")).read_text()
    assert "Blowup" in text and "trP_min" in text


@pytest.mark.parametrize("argv", [
    [],
    ["reproduce", "kodaira"],
    ["flow", "run", "--family", "lsa"],
    ["flow", "run", "--family", "weird", "--input", "x.json"],
    ["soliton", "fit", "--input", "/nonexistent.json"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_input_errors(tmp_path, capsys):
    cases = [
        ("mismatch.json", {"family": "lsa", "name": "quaternion-u2"}, "almost-abelian"),
        ("missing.json", {"family": "almost-abelian", "a": 0}, "almost-abelian"),
        ("notsp.json", {"family": "almost-abelian", "a": 0, "v": [0, 0], "a1": [[1, 0], [0, 1]]}, "almost-abelian"),
        ("badn.json", {"family": "almost-abelian", "n": 3, "a": 0, "v": [0, 0], "a1": [[0, 0], [0, 0]]}, "almost-abelian"),
        ("nobracket.json", {"family": "generic", "dim": 4}, "generic"),
        ("badshort.json", {"family": "generic", "bracket_shorthand": "(0,0,1x,0)"}, "generic"),
        ("nofamily.json", {"a": 1}, "generic"),
    ]
    for name, data, family in cases:
        path = write(tmp_path, name, data)
        assert main(["flow", "run", "--family", family, "--input", path, "--output", str(tmp_path)]) == EXIT_USAGE, name
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["soliton", "fit", "--input", str(broken)]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
