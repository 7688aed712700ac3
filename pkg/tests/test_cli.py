import json

import jsonschema
import pytest

from converse2 import converse_checks as cc
from converse2 import suite
from converse2.cli import main, read_config_file
from converse2.forms import BUNDLED, describe, list_forms, load_form
from converse2.report import REPORT_SCHEMA, build_report, strip_volatile

FAST = "characters,euler,dq,sq"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_forms(capsys):
    rows = list_forms()
    assert len(rows) >= 3
    for r in rows:
        assert describe(r["descriptor"]) == r["descriptor"]
    code, out, _ = run_cli(capsys, "list-forms", "--json")
    assert code == 0 and len(json.loads(out)) == len(rows)


def test_eisenstein_descriptor_round_trip():
    for name in ("eis15", "eis35"):
        canon = BUNDLED[name].summary.split("= ")[-1]
        assert describe(canon) == canon
        assert (load_form(canon, 200).a == load_form(name, 200).a).all()


def test_verify_delta_passes_and_validates(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, err = run_cli(capsys, "verify", "--form", "delta", "--primes", "5,7",
                           "--checks", "fe,euler,twist-identity,sq", "--out", str(out))
    assert code == 0, err
    report = json.loads(out.read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    s = report["summary"]
    assert s["total"] == len(report["records"]) == s["pass"] + s["fail"] + s["reported"] + s["error"]
    assert all(r["anchor"] for r in report["records"])
    for r in report["records"]:
        if r["residual"] is not None:
            assert float(r["residual"]) == float(format(float(r["residual"]), ".17g"))


def test_perturbed_fe_fails(capsys):
    code, out, _ = run_cli(capsys, "verify", "--form", "delta", "--perturb", "a2=+0.01", "--checks", "fe")
    assert code == 1
    report = json.loads(out)
    assert any(r["status"] == "fail" and r["name"].startswith("fe.y_independence") for r in report["records"])


def test_malformed_file_is_a_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# N=1 k=12\n1,1,0\n2,oops,0\n")
    code, _, err = run_cli(capsys, "verify", "--form", f"file:{bad}")
    assert code == 2 and "row 3" in err


def test_unknown_check_and_bad_flags(capsys):
    assert run_cli(capsys, "verify", "--checks", "nope")[0] == 2
    assert run_cli(capsys, "verify", "--perturb", "b2=1")[0] == 2
    assert run_cli(capsys, "verify", "--primes", "4")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_file_form(capsys, tmp_path, delta):
    from converse2.coefficients import save_coeffs

    path = tmp_path / "delta.csv"
    save_coeffs(delta.truncated(3000), path)
    code, out, err = run_cli(capsys, "verify", "--form", f"file:{path}", "--primes", "5", "--checks", "euler,sq")
    assert code == 0, err


def test_config_file_and_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "c.conf"
    cfg.write_text("# defaults\nform = delta\nprimes = 5\nchecks = nope\n")
    monkeypatch.setenv("CONVERSE2_CONFIG", str(cfg))
    assert run_cli(capsys, "verify")[0] == 2  # file value is used
    code, out, _ = run_cli(capsys, "verify", "--checks", "euler")
    assert code == 0
    assert json.loads(out)["config"]["primes"] == [5]
    cfg.write_text("colour = blue\n")
    assert run_cli(capsys, "verify")[0] == 2
    cfg.write_text("precision-bits = 120  # comment\n\nform=level11\n")
    assert read_config_file(cfg) == {"precision_bits": "120", "form": "level11"}


def test_determinism_and_jobs():
    cfg = suite.SuiteConfig(form="delta", primes=(5, 7), checks=tuple(FAST.split(",")))
    r1 = build_report(*suite.run_suite(cfg))
    r2 = build_report(*suite.run_suite(cfg))
    r3 = build_report(*suite.run_suite(suite.SuiteConfig(**{**cfg.__dict__, "jobs": 2})))
    assert strip_volatile(r1) == strip_volatile(r2)
    assert strip_volatile(r1)["records"] == strip_volatile(r3)["records"]


def test_truncation_errors_are_reported_per_check():
    cfg = suite.SuiteConfig(form="delta", primes=(7,), checks=("fe", "euler"), truncation=60)
    _, records = suite.run_suite(cfg)
    statuses = {r.name.split(".")[0]: r.status for r in records}
    assert statuses["fe"] == "error" and statuses["euler"] == "pass"


def test_euler_and_schema_subcommands(capsys):
    code, out, _ = run_cli(capsys, "euler", "--form", "delta", "--bound", "20", "--json")
    rows = json.loads(out)
    assert code == 0 and [r["p"] for r in rows] == [2, 3, 5, 7, 11, 13, 17, 19]
    code, out, _ = run_cli(capsys, "report-schema")
    jsonschema.Draft202012Validator.check_schema(json.loads(out))


CHECK_FUNCTIONS = {
    suite: [
        "orthogonality_defects", "gauss_sum", "verify_additive_fourier_identity", "check_multiplicativity",
        "euler_factor_inverse", "check_matrix_identity", "check_top_row_lemma", "estimate_phase",
        "estimate_root_number", "y_independence_sweep", "verify_twist_identity", "additive_twist_mellin",
        "additive_twist_value",
    ],
    cc: [
        "verify_dq_reflection", "verify_dq_reflection_exact", "verify_ramanujan_fe", "build_local_data",
        "compute_C_chi", "compute_S_q", "reconstruct_C_hat", "c_hat_from_S0", "verify_gamma_invariance",
        "fourier_gamma_defect", "find_nonvanishing_residue", "euler_inequivalence",
    ],
}


def test_every_check_reachable_from_cli(monkeypatch):
    called = set()
    for module, names in CHECK_FUNCTIONS.items():
        for name in names:
            original = getattr(module, name)

            def spy(*a, _orig=original, _name=name, **kw):
                called.add(_name)
                return _orig(*a, **kw)

            monkeypatch.setattr(module, name, spy)
    cfg = suite.SuiteConfig(form="delta", primes=(5,), checks=tuple(suite.CHECKS))
    _, records = suite.run_suite(cfg)
    expected = {n for names in CHECK_FUNCTIONS.values() for n in names}
    assert expected <= called, expected - called
    assert all(r.status == "pass" for r in records), [r for r in records if r.status != "pass"]
