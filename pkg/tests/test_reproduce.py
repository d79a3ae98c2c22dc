import pytest

from scflow.reproduce import EXAMPLES, reproduce


@pytest.mark.parametrize("example", [e for e in EXAMPLES if e != "bf-exa"])
def test_pipelines_pass(example, tmp_path):
    rep = reproduce(example, outdir=tmp_path)
    assert rep.passed, rep.report()


def test_bf_exa_checks(tmp_path):
    rep = reproduce("bf-exa(1,2)", outdir=tmp_path)
    status = {c.name: c.passed for c in rep.checks}
    failed = [k for k, v in status.items() if not v]
    # every start also blows up backward, so only the ancient claim fails
    assert len(failed) == 1 and "ancient" in failed[0]
    csv_files = list(tmp_path.glob("*.csv"))
    assert csv_files
    text = csv_files[0].read_text()
    assert "terminal_event=Blowup" in text
    assert "trP_min" in text


def test_bf_exa_below_the_line(tmp_path):
    rep = reproduce("bf-exa", outdir=tmp_path, a0=1.0, b0=1.0)
    assert sum(not c.passed for c in rep.checks) == 1


def test_theta_limits():
    assert reproduce("theta-limits").passed


def test_report_lines():
    rep = reproduce("6latt-lattice-certificate")
    lines = rep.report().splitlines()
    assert lines[0] == "example 6latt-lattice-certificate: PASS"
    assert len(lines) == 1 + len(rep.checks)
    assert all(line.strip().startswith("[PASS]") for line in lines[1:])


def test_unknown_example():
    with pytest.raises(KeyError):
        reproduce("kodaira")
