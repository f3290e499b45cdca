"""CLI surface: expression parsing, subcommands, exit codes, caching."""

import json

import pytest

from metab.cli import RunConfig, parse_ring_expr, run
from metab.errors import ParseError
from metab.grpring import ring_make


def test_parse_ring_expr():
    ctx = ring_make(2, 2)
    one, a1, a2 = ctx.one(), ctx.monomial(1, 0), ctx.monomial(0, 1)
    assert parse_ring_expr("(1-a2)*(a1-1)", ctx) == (one - a2) * (a1 - one)
    assert parse_ring_expr("a1^0", ctx) == one
    assert parse_ring_expr("a1^2", ctx) == one  # exponents wrap mod m
    assert parse_ring_expr("  1 + a1 * a2 ", ctx) == one + a1 * a2
    assert parse_ring_expr("-a1", ctx) == -a1
    assert parse_ring_expr("a2^-1", ctx) == a2
    assert parse_ring_expr("3", ring_make(5, 2)) == ring_make(5, 2).scalar(3)


def test_parse_errors_carry_offsets():
    ctx = ring_make(2, 2)
    with pytest.raises(ParseError) as err:
        parse_ring_expr("1+", ctx)
    assert err.value.offset == 2
    with pytest.raises(ParseError):
        parse_ring_expr("(1+a1", ctx)
    with pytest.raises(ParseError):
        parse_ring_expr("1 1", ctx)
    with pytest.raises(ParseError):
        parse_ring_expr("b1", ctx)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(command="ring", max_group=0)
    with pytest.raises(ValueError):
        RunConfig(command="ring", threads=0)


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cmd_ring(capsys):
    code, doc = run_json(capsys, ["ring", "2", "2", "(1-a2)*(a1-1)"])
    assert code == 0
    assert doc["augmentation"] == 0
    assert doc["coeffs"] == [[1, 1], [1, 1]]
    assert doc["unit"] is False


def test_cmd_ring_parse_error(capsys):
    assert run(["ring", "2", "2", "1+"]) == 3
    assert "offset 2" in capsys.readouterr().err


def test_cmd_ring_bad_modulus(capsys):
    assert run(["ring", "1", "2", "1"]) == 3


def test_cmd_classify(capsys):
    code, doc = run_json(capsys, ["classify", "2", "2", "0", "1"])
    assert code == 0
    assert doc["verdict"]["verdict"] == "inner"
    assert doc["verdict"]["inner_exponents"] == [1, 0]
    code, doc = run_json(capsys, ["classify", "2", "2", "0", "0"])
    assert doc["verdict"]["inner_exponents"] == [0, 0]


def test_cmd_classify_exhaustive(capsys):
    code, doc = run_json(capsys, ["classify", "2", "2", "--exhaustive"])
    assert code == 0
    assert len(doc["rows"]) == 256
    kinds = {row["verdict"] for row in doc["rows"]}
    assert kinds == {"inner", "automorphism"}  # R(2,2) dets are all units


def test_cmd_orbits_s3(capsys):
    code, doc = run_json(capsys, ["orbits", "S3"])
    assert code == 0
    assert len(doc["classes"]) == 3
    assert doc["orbits"] == [[0, 1, 2]]


def test_cmd_orbits_with_level(capsys):
    code, doc = run_json(capsys, ["orbits", "S3", "--level", "6"])
    assert code == 0
    assert doc["certificate"]["verdict"] is True
    assert doc["stabilizers"][0]["order"] == 48


def test_cmd_orbits_unknown_group(capsys):
    assert run(["orbits", "NoSuchGroup"]) == 3
    err = capsys.readouterr().err
    assert "S3" in err and "Heis27" in err  # catalog listed


def test_cmd_components_s3(capsys, tmp_path):
    csv_path = tmp_path / "s3.csv"
    code, doc = run_json(capsys, ["components", "S3", "--csv", str(csv_path)])
    assert code == 0
    assert doc["classes"] == 3
    assert len(doc["components"]) == 1
    comp = doc["components"][0]
    assert comp["degree"] == 3 and comp["invariants"]["genus"] == 0
    assert doc["certificate"]["wohlfahrt"] == 2
    assert doc["ia_descent_samples"] > 0
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == 2 and lines[0].startswith("group,")


def test_cmd_components_refuses_s4(capsys):
    assert run(["components", "S4"]) == 3
    assert "force" in capsys.readouterr().err
    code, doc = run_json(capsys, ["components", "S4", "--force"])
    assert code == 0
    assert doc["components"]


def test_cmd_certify(capsys):
    code, doc = run_json(capsys, ["certify", "Q8"])
    assert code == 0
    assert doc["e"] == 4 and doc["verdict"] is True and doc["gamma_e_contained"] is True


def test_cmd_catalog(capsys):
    code, doc = run_json(capsys, ["catalog"])
    assert code == 0
    names = [g["name"] for g in doc["groups"]]
    for required in ["S3", "D4", "D5", "D6", "Q8", "Heis27", "C7C3", "Z2xZ2", "Z8xZ8"]:
        assert required in names
    s3 = next(g for g in doc["groups"] if g["name"] == "S3")
    assert s3["metabelian"] is True and s3["order"] == 6


def test_budget_exit_code(capsys):
    assert run(["--max-group", "3", "orbits", "S3"]) == 2


def test_group_file_loading(capsys, tmp_path):
    path = tmp_path / "klein.json"
    path.write_text(
        json.dumps({"name": "klein", "degree": 4, "gen1": [[0, 1]], "gen2": [[2, 3]]})
    )
    code, doc = run_json(capsys, ["orbits", str(path)])
    assert code == 0
    assert len(doc["classes"]) == 6


def test_cache_hit_identical(capsys, tmp_path):
    argv = ["--cache-dir", str(tmp_path), "components", "D4"]
    code1, doc1 = run_json(capsys, argv)
    cached_files = list(tmp_path.glob("table-*.json"))
    assert code1 == 0 and cached_files
    code2, doc2 = run_json(capsys, argv)
    assert code2 == 0
    assert doc1 == doc2


def test_corrupt_cache_recovers(capsys, tmp_path):
    argv = ["--cache-dir", str(tmp_path), "orbits", "S3"]
    code1, doc1 = run_json(capsys, argv)
    for f in tmp_path.glob("table-*.json"):
        f.write_text("{not json")
    code2, doc2 = run_json(capsys, argv)
    assert code2 == 0
    assert doc1 == doc2


def test_byte_identical_reports(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["--out", str(out1), "components", "Q8"]) == 0
    assert run(["--out", str(out2), "components", "Q8"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
