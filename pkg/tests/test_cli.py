"""CLI integration: exit codes, JSON report schema, witness round-trips."""

import json

from falgebroid.cli import main
from falgebroid.exprparse import parse_expr, parse_presentation


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_fixture_pass(capsys):
    code, out, _ = run(["check", "--fixture", "SS2", "--law", "f-algebroid"], capsys)
    assert code == 0
    assert "overall: pass" in out


def test_check_prelie_com(capsys):
    code, out, _ = run(["check", "--fixture", "TR2", "--law", "prelie-com"], capsys)
    assert code == 0


def test_check_bad_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"bad": true}')
    code, _, err = run(["check", str(bad)], capsys)
    assert code == 2
    assert "unknown field" in err


def test_check_missing_input_exits_2(capsys):
    assert run(["check"], capsys)[0] == 2
    assert run(["check", "--fixture", "NOPE"], capsys)[0] == 2
    assert run(["check", "/nonexistent/file.json"], capsys)[0] == 2


def test_usage_error_exits_2(capsys):
    assert main(["check", "--fixture", "SS2", "--law", "bogus"]) == 2
    capsys.readouterr()


def test_check_failure_exits_1_with_json_witness(tmp_path, capsys):
    # non-symmetric product to force failures with witnesses
    doc = {
        "base_vars": ["u1"],
        "rank": 2,
        "product": [
            [["0", "1"], ["0", "0"]],
            [["0", "0"], ["0", "0"]],
        ],
    }
    f = tmp_path / "asym.json"
    f.write_text(json.dumps(doc))
    report_path = tmp_path / "report.json"
    code, out, _ = run(["check", str(f), "--json", str(report_path)], capsys)
    assert code == 1
    data = json.loads(report_path.read_text())
    assert data["overall"] == "fail"
    assert {"subject", "overall", "checks"} <= set(data)
    failures = [c for c in data["checks"] if not c["pass"]]
    assert failures
    for c in failures:
        assert {"law", "instance", "pass", "witness"} <= set(c)
        # every witness component round-trips through the parser
        for comp in c["witness"].split(", "):
            parse_expr(comp, ["u1"])


def test_dual_writes_verified_structure_file(tmp_path, capsys):
    out_path = tmp_path / "dual.json"
    code, out, _ = run(
        ["dual", "--fixture", "SS2", "--ev", "u1,u2", "--out", str(out_path)], capsys
    )
    assert code == 0
    dual = parse_presentation(out_path.read_text())
    assert dual.identity is not None
    code, _, _ = run(["check", str(out_path), "--law", "f-algebroid"], capsys)
    assert code == 0


def test_dual_at_identity_is_original(tmp_path, capsys):
    out_path = tmp_path / "dual.json"
    code, _, _ = run(
        ["dual", "--fixture", "SS2", "--ev", "1,1", "--out", str(out_path)], capsys
    )
    assert code == 0
    from falgebroid.algebroid import tensors_equal
    from falgebroid.constructions import load_fixture

    dual = parse_presentation(out_path.read_text())
    assert tensors_equal(dual.product, load_fixture("SS2").product)


def test_dual_pre_f_failure_exits_1(capsys):
    code, _, err = run(
        ["dual", "--fixture", "TR2", "--ev", "u1^2,u2", "--pre-f"], capsys
    )
    assert code == 1
    assert "not an eventual identity" in err


def test_dual_bad_ev_arity_exits_2(capsys):
    assert run(["dual", "--fixture", "SS2", "--ev", "u1"], capsys)[0] == 2


def nij_file(tmp_path):
    f = tmp_path / "N.json"
    f.write_text(json.dumps([["u1", "0"], ["0", "u2"]]))
    return f


def test_nijenhuis_deform_and_alias(tmp_path, capsys):
    N = nij_file(tmp_path)
    out_path = tmp_path / "deformed.json"
    code, _, _ = run(
        ["deform", "--fixture", "SS2", "--nijenhuis", str(N), "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    code, _, _ = run(["check", str(out_path), "--law", "f-algebroid"], capsys)
    assert code == 0
    code, _, _ = run(
        ["nijenhuis", "--fixture", "SS2", "--nijenhuis", str(N)], capsys
    )
    assert code == 0


def qu4_files(tmp_path, corrupt=False):
    r = 4
    prod = [
        [["1" if i + j == k else "0" for j in range(r)] for i in range(r)]
        for k in range(r)
    ]
    struct = tmp_path / "qu4.json"
    struct.write_text(
        json.dumps(
            {"base_vars": [], "rank": r, "product": prod, "identity": ["1", "0", "0", "0"]}
        )
    )
    D = [
        [[str(j) if i + j == k else "0" for j in range(r)] for i in range(r)]
        for k in range(r)
    ]
    if corrupt:
        D[0][1][1] = "1"
    mu = tmp_path / "mu1.json"
    mu.write_text(json.dumps({"D": D}))
    return struct, mu


def test_deform_mu1_path(tmp_path, capsys):
    struct, mu = qu4_files(tmp_path)
    code, out, _ = run(
        ["deform", str(struct), "--mu1", str(mu), "--order", "2"], capsys
    )
    assert code == 0
    assert "semiclassical" in out
    assert "obstruction-vanishes" in out


def test_deform_corrupted_mu1_exits_1(tmp_path, capsys):
    struct, mu = qu4_files(tmp_path, corrupt=True)
    code, out, _ = run(["deform", str(struct), "--mu1", str(mu)], capsys)
    assert code == 1
    assert "pre-lie-rule" in out


def test_deform_requires_an_input(capsys):
    assert run(["deform", "--fixture", "SS2"], capsys)[0] == 2


def test_hierarchy_commands(tmp_path, capsys):
    code, _, _ = run(["hierarchy", "--fixture", "SS2", "--alpha-max", "2"], capsys)
    assert code == 0
    code, out, _ = run(
        ["hierarchy", "--fixture", "SS2", "--flows", "u2,0;u1,0"], capsys
    )
    assert code == 1
    assert "u1*u1_x*u2_x" in out
    code, _, _ = run(["hierarchy", "--fixture", "SS1", "--alpha-max", "0"], capsys)
    assert code == 0
    # non-tangent presentation is an input error
    assert run(["hierarchy", "--fixture", "FM2", "--alpha-max", "1"], capsys)[0] == 2


def test_fixtures_listing(capsys):
    code, out, _ = run(["fixtures"], capsys)
    assert code == 0
    assert "SS<n>" in out and "FM2" in out


def test_thread_env_does_not_change_report(tmp_path, capsys, monkeypatch):
    report_a = tmp_path / "a.json"
    report_b = tmp_path / "b.json"
    run(["check", "--fixture", "SS2", "--json", str(report_a)], capsys)
    monkeypatch.setenv("FALG_THREADS", "4")
    run(["check", "--fixture", "SS2", "--json", str(report_b)], capsys)
    assert json.loads(report_a.read_text()) == json.loads(report_b.read_text())


def test_seed_flag_accepted(capsys):
    code, _, _ = run(["check", "--fixture", "SS1", "--seed", "42"], capsys)
    assert code == 0
