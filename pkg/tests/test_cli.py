import json

import pytest

from fockvertex import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_names_every_suite(capsys):
    code, out, _ = run(["list"], capsys)
    assert code == 0
    for name in ("clifford", "dualpair", "iso-prop15", "thm237", "cor410"):
        assert name in out


def test_run_passing_suite_exit_zero(capsys):
    code, out, _ = run(["run", "--suite", "clifford", "--m", "2", "--cutoff", "6"], capsys)
    assert code == 0 and "PASS  clifford" in out


def test_root_of_unity_q_is_a_usage_error(capsys):
    code, _, err = run(["run", "--suite", "thm237", "--q", "1+0i"], capsys)
    assert code == 2 and "root of unity" in err


def test_bad_arguments_are_usage_errors(capsys):
    assert run(["run", "--suite", "nope"], capsys)[0] == 2
    assert run(["run", "--suite", "matrix", "--cutoff", "8", "--intermediate-cutoff", "6"], capsys)[0] == 2
    assert run(["run", "--suite", "matrix", "--q", "abc"], capsys)[0] == 2
    assert run(["run", "--bogus-flag"], capsys)[0] == 2


def test_failing_suite_exit_one(capsys, monkeypatch):
    from fockvertex import verify

    def broken(cfg):
        r = verify.SuiteReport("matrix", cfg.seed, {})
        r.add("forced", 1.0)
        return r

    monkeypatch.setitem(verify.SUITES, "matrix", ("forced failure", broken))
    assert run(["run", "--suite", "matrix"], capsys)[0] == 1


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("FOCKVERTEX_SUITE", "cocycle")
    monkeypatch.setenv("FOCKVERTEX_SEED", "7")
    code, out, _ = run(["run"], capsys)
    assert code == 0 and "cocycle" in out and "matrix" not in out


def test_report_is_deterministic_modulo_timestamp(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(["run", "--suite", "matrix,cor42", "--samples", "3", "--report", str(p)], capsys)[0] == 0
    docs = [json.loads(p.read_text()) for p in paths]
    for d in docs:
        d.pop("timestamp")
    assert docs[0] == docs[1]
    assert paths[0].read_text().count('"timestamp"') == 1
    row = docs[0]["cases"][0]
    assert set(row) >= {"suite", "case", "maxAbsError", "exact", "pass", "checks"}


def test_parallel_run_matches_serial():
    cfg = cli.make_config(cli._resolve(cli.build_parser().parse_args(
        ["run", "--suite", "matrix,cocycle", "--samples", "2"])))
    serial = cli.build_report(cli.run_suites(["matrix", "cocycle"], cfg, 1), cfg, "t")
    parallel = cli.build_report(cli.run_suites(["matrix", "cocycle"], cfg, 2), cfg, "t")
    assert serial == parallel
