import json
import os
import subprocess
from fractions import Fraction
from importlib import resources

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitquant.cli import ParseError, UnknownVariable, main, parse_poly
from orbitquant.exactnum import HPoly
from orbitquant.liealg import make_sl
from orbitquant.polyring import CPoly, monomials_up_to, render_cpoly

sl2, sl3 = make_sl(2), make_sl(3)
SCHEMA = json.loads(resources.files("orbitquant").joinpath(
    "schemas/oq-output.schema.json").read_text())
SPHERE = ["--algebra", "sl2", "--eigs", "1,-1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, SCHEMA)
    return code, data


# -- parser -------------------------------------------------------------------------


def test_parse_examples():
    f = parse_poly("xE*xF - 1/4*xH^2 + 2*h*xH", sl2)
    assert f == CPoly(3, {(1, 1, 0): HPoly.const(1), (0, 0, 2): HPoly.const(Fraction(-1, 4)),
                          (0, 0, 1): HPoly([0, 2])})
    assert parse_poly("-x1 + x3^2", sl2) == parse_poly("-xE + xH^2", sl2)
    assert parse_poly("3", sl2) == CPoly.const(3, 3)
    assert parse_poly("xE12*xE21 - xH1", sl3).degree() == 2


@pytest.mark.parametrize("text,line,col", [
    ("xE +", 1, 5),
    ("xE ** xF", 1, 5),
    ("2/0", 1, 3),
    ("xE\n  + @", 2, 5),
    ("xE^", 1, 4),
    ("xE xF", 1, 4),
])
def test_parse_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_poly(text, sl2)
    assert (info.value.line, info.value.column) == (line, col)
    assert "expected" in str(info.value)


def test_unknown_variable():
    with pytest.raises(UnknownVariable) as info:
        parse_poly("1 + xQ", sl2)
    assert info.value.name == "xQ"
    assert info.value.column == 5


coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=5).filter(bool)


@given(st.dictionaries(st.sampled_from(monomials_up_to(3, 3)),
                       st.lists(coeffs, min_size=1, max_size=2).map(HPoly), max_size=4))
def test_render_parse_round_trip(t):
    f = CPoly(3, t)
    assert parse_poly(render_cpoly(f, sl2.variables) or "0", sl2) == f


# -- exit codes ---------------------------------------------------------------------


def test_star_text_output(capsys):
    code, out, _ = run(capsys, "star", *SPHERE, "--deg", "4", "xE", "xF")
    assert code == 0
    assert out.strip() == "1 + 1/2*h*xH - 1/4*xH^2"


def test_domain_error_exit(capsys):
    code, _, err = run(capsys, "orbit", "--algebra", "sl3", "--eigs", "1:2,-1:1")
    assert code == 1
    assert "TraceNotZero" in err


def test_invalid_rank_exit(capsys):
    assert run(capsys, "algebra", "--algebra", "sl1")[0] == 1


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "star", *SPHERE, "xE +", "xF")
    assert code == 3
    assert "line 1, column 5" in err
    assert run(capsys, "star", *SPHERE, "xQ", "xF")[0] == 3


def test_usage_errors_exit_three(capsys):
    assert run(capsys, "frobnicate")[0] == 3
    assert run(capsys, "star", *SPHERE, "--bogus")[0] == 3
    assert run(capsys, "star", *SPHERE, "xE")[0] == 3
    assert run(capsys, "eval", *SPHERE)[0] == 3
    assert run(capsys, "gb", "--algebra", "sl2", "--eigs", "1/0,0")[0] == 3
    assert run(capsys, "engine", *SPHERE, "--threads", "0")[0] == 3


def test_check_failure_exit(capsys):
    code, out, _ = run(capsys, "engine", "--algebra", "sl3", "--eigs", "1:2,-2:1")
    assert code == 2
    assert "independence" in out.lower() or "violation" in out.lower()


def test_shifted_lift_engine_is_sound(capsys):
    code, data = run_json(capsys, "engine", "--algebra", "sl3", "--eigs", "1:2,-2:1",
                          "--lift", "shifted")
    assert code == 0
    assert data["rank_by_degree"] == [0, 0, 9, 56]


def test_threads_env(capsys, monkeypatch):
    base = run(capsys, "engine", *SPHERE, "--deg", "3", "--format", "json")
    monkeypatch.setenv("OQ_THREADS", "3")
    assert run(capsys, "engine", *SPHERE, "--deg", "3", "--format", "json") == base
    monkeypatch.setenv("OQ_THREADS", "zero")
    assert run(capsys, "engine", *SPHERE)[0] == 3


def test_timings_go_to_stderr(capsys):
    code, out, err = run(capsys, "stdmon", *SPHERE, "--deg", "2", "--timings")
    assert code == 0
    assert "timing" in err and "timing" not in out


# -- json output --------------------------------------------------------------------


VERB_ARGS = [
    ("algebra", ["--algebra", "sl3"]),
    ("invariants", ["--algebra", "sl3"]),
    ("orbit", ["--algebra", "sl3", "--eigs", "1:2,-2:1"]),
    ("ideal", SPHERE),
    ("gb", SPHERE),
    ("stdmon", SPHERE + ["--deg", "3"]),
    ("lift", SPHERE),
    ("engine", SPHERE + ["--deg", "3"]),
    ("star", SPHERE + ["--deg", "2", "xE", "xF"]),
    ("star", SPHERE + ["--deg", "2", "--table", "--mode", "weyl"]),
    ("eval", SPHERE + ["--deg", "3", "--h0", "1/2", "xE", "xF"]),
    ("check", SPHERE + ["--deg", "2", "--trials", "5"]),
]


@pytest.mark.parametrize("verb,args", VERB_ARGS, ids=[f"{v}-{i}" for i, (v, _) in
                                                      enumerate(VERB_ARGS)])
def test_json_output_matches_schema(capsys, verb, args):
    code, data = run_json(capsys, verb, *args)
    assert code == 0
    assert data["verb"] == verb


def test_spec_file(capsys, tmp_path):
    p = tmp_path / "orbit.json"
    p.write_text(json.dumps({"algebra": "sl3",
                             "eigs": [{"value": "1", "mult": 2}, {"value": "-2", "mult": 1}]}))
    code, data = run_json(capsys, "ideal", "--spec", str(p))
    assert code == 0
    assert data["source"] == "minimal-polynomial"
    assert len(data["generators"]) == 9


def test_eval_reports_value(capsys):
    code, data = run_json(capsys, "eval", *SPHERE, "--deg", "4", "--h0", "2", "xE", "xF")
    assert code == 0
    assert data["result"] == "1 + xH - 1/4*xH^2"
    assert data["independent"] and data["consistent"]


def test_console_script():
    env = dict(os.environ, OQ_THREADS="1")
    proc = subprocess.run(["oq", "star", *SPHERE, "--deg", "4", "xF", "xE"],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1 - 1/2*h*xH - 1/4*xH^2"
