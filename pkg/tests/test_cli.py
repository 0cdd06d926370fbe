import json
from pathlib import Path
import subprocess
import sys

import pytest

import golden
from fhsopt.cli import JobSpec, build_parser, job_from_namespace, main, run
from fhsopt.construct import FhsSet, FhsFormatError

JOBS = Path(__file__).resolve().parent.parent / "jobs"
EX1 = ["gen", "--class", "1", "--p", "3", "--m", "2", "--modulus", "2,1,1", "--k", "1",
       "--d", "3", "--reps", "0,a,2a"]


def _gen(tmp_path, argv, name="set.json"):
    out = tmp_path / name
    assert main(argv + ["-o", str(out)]) == 0
    return out


def test_gen_golden_k1_then_certify(tmp_path, gf9, capsys):
    out = _gen(tmp_path, EX1)
    fhs = FhsSet.loads(out.read_text())
    assert fhs.symbol_matrix().tolist() == golden.exps_to_codes(gf9, golden.K1_ROWS)
    rep = tmp_path / "rep.json"
    assert main(["certify", str(out), "-o", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["summary"]["strict_corr_optimal"] and data["summary"]["size_optimal"]
    assert "strict_corr_optimal=True" in capsys.readouterr().err
    assert main(["certify", str(out), "--mode", "spot", "--format", "csv",
                 "-o", str(tmp_path / "rep.csv")]) == 0
    assert (tmp_path / "rep.csv").read_text().startswith("L,M,bound6,bound7,met_by\n1,1,")


def test_certify_corrupted_exits_1(tmp_path, golden_k1):
    bad = tmp_path / "bad.json"
    bad.write_text(golden_k1.with_symbol(0, 0, golden_k1.symbols(1)[0]).dumps())
    assert main(["certify", str(bad), "-o", str(tmp_path / "r.json")]) == 1


def test_gen_stdout_csv(capsys):
    assert main(EX1 + ["--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and len(lines[0].split(",")) == 24


def test_gen_class2_and_class3(tmp_path):
    c2 = _gen(tmp_path, ["gen", "--class", "2", "--p", "5", "--m", "3", "--w", "1,a",
                         "--r", "2", "--d", "3", "--psi-j", "1"], "c2.json")
    s = FhsSet.loads(c2.read_text())
    assert (s.N, s.M, s.d_prime) == (62, 2, 25)
    c3 = _gen(tmp_path, ["gen", "--class", "3", "--p", "7", "--w", "1", "--r", "3",
                         "--f-d", "5"], "c3.json")
    assert FhsSet.loads(c3.read_text()).N == 16
    assert main(["certify", str(c2), "-o", str(tmp_path / "r2")]) == 0
    assert main(["certify", str(c3), "-o", str(tmp_path / "r3")]) == 0
    psiP = _gen(tmp_path, ["gen", "--class", "2", "--p", "5", "--m", "3", "--w", "1,a",
                           "--psi-P", "0,1"], "c2p.json")
    assert FhsSet.loads(psiP.read_text()).M == 1


def test_printed_dbf_rows_via_root(tmp_path):
    out = _gen(tmp_path, ["gen", "--class", "3", "--p", "7", "--top-modulus", "6,3,1",
                          "--allow-nonprimitive", "--theta", "x", "--unsafe", "--w", "1",
                          "--r", "3", "--f-d", "5"])
    assert FhsSet.loads(out.read_text()).symbol_matrix().tolist() == golden.DBF_ROWS


@pytest.mark.parametrize("argv,code", [
    (["gen", "--class", "2", "--p", "5", "--m", "3", "--modulus", "1,1,0,1", "--w", "1,x",
      "--r", "2", "--d", "3"], 3),
    (["gen", "--class", "3", "--p", "7", "--top-modulus", "6,3,1", "--w", "1", "--r", "3",
      "--f-d", "5"], 3),
    (["gen", "--class", "1", "--p", "3", "--m", "2", "--k", "1", "--d", "2"], 3),
    (["gen", "--class", "1", "--p", "4", "--m", "2", "--k", "1"], 2),
    (["gen", "--class", "1", "--p", "3", "--m", "2", "--modulus", "2,0,1", "--k", "1"], 2),
    (["gen", "--class", "1", "--p", "3", "--m", "2", "--modulus", "1,0,1", "--k", "1"], 3),
    (["gen", "--class", "2", "--p", "5", "--m", "3"], 2),
    (["gen", "--class", "4", "--p", "5"], 2),
    (["gen", "--class", "1", "--p", "3", "--m", "2", "--k", "1", "--reps", "0,q"], 2),
    (["check-dbf", "--kind", "trace_power", "--q", "7", "--n", "2", "--d", "4"], 3),
    (["check-dbf", "--kind", "helleseth_gong", "--q", "7"], 3),
    (["check-dbf", "--kind", "trace_power", "--q", "7"], 2),
    (["check-dbf", "--kind", "trace_power", "--q", "6", "--d", "1"], 2),
    (["certify", "/nonexistent/set.json"], 2),
    (["bogus"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_malformed_set_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["certify", str(bad)]) == 2
    csv = tmp_path / "bad.csv"
    csv.write_text("1,2\n3\n")
    assert main(["certify", str(csv)]) == 2


def test_check_dbf_outputs(capsys):
    assert main(["check-dbf", "--kind", "trace_power", "--q", "7", "--d", "5"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ok"] and data["d_form_degree"] == 5 and data["verified"]
    assert data["balanced_histogram"] == [7] * 7
    assert main(["check-dbf", "--kind", "trace_power", "--q", "3", "--d", "2", "--unsafe"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data == {"ok": False, "spec": {"kind": "trace_power", "d": 2}, "delta": 3,
                    "histogram": [1, 4, 4], "message": data["message"]}
    assert main(["check-dbf", "--kind", "lin_type", "--q", "3", "--n", "3", "--l", "1"]) == 0
    assert main(["check-dbf", "--kind", "trace_power", "--q", "7", "--d", "5", "--cap", "10"]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["verified"] is False
    spec = json.dumps({"kind": "composite", "inner": {"kind": "trace_power", "d": 5},
                       "post": {"kind": "frobenius", "j": 0}})
    assert main(["check-dbf", "--kind", "composite", "--q", "7", "--spec", spec]) == 0


def test_check_props(capsys):
    assert main(["check-props", "--p", "3", "--m", "2", "--modulus", "2,1,1", "--k", "1",
                 "--reps", "0,a,2a", "--d", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["A_u"]["ok"] and data["A_v"]["ok"]
    assert main(["check-props", "--p", "3", "--m", "4", "--modulus", "2,1,0,0,1", "--k", "2",
                 "--P", "2,1,1", "--reps", "0,a,a^11,2a,2a^11,a+a^11,a+2a^11,2a+a^11,2a+2a^11",
                 "--d", "7"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert not data["A_u"]["ok"] and data["A_v"]["ok"]
    assert main(["check-props", "--p", "3", "--m", "2"]) == 2


def test_export_round_trip(tmp_path, golden_k1):
    js = tmp_path / "s.json"
    js.write_text(golden_k1.dumps())
    csvp = tmp_path / "s.csv"
    assert main(["export", str(js), "-o", str(csvp)]) == 0
    back = tmp_path / "back.json"
    assert main(["export", str(csvp), "-o", str(back)]) == 0
    assert FhsSet.loads(back.read_text()) == golden_k1
    assert main(["certify", str(csvp), "-o", str(tmp_path / "r")]) == 0


def test_info(capsys):
    assert main(["info", "--p", "5", "--m", "3", "--modulus", "1,1,0,1",
                 "--allow-nonprimitive", "--k", "1", "--r", "2", "--d", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["root_order"] == 62 and not data["root_is_primitive"]
    assert data["T"] == 31 and data["class2"]["n_prime"] == 62
    assert data["class1"] == {"N": 5 * 124, "M": 25, "d_prime": 125, "n_prime": 124,
                              "k_divides_m": True}
    assert data["gcd_d_q_minus_1"] == 1
    assert main(["info", "--p", "5", "--m", "3", "--modulus", "1,1,0,1"]) == 3


def test_jobspec_round_trip(tmp_path):
    ns = build_parser().parse_args(EX1)
    job = job_from_namespace(ns)
    assert job.command == "gen" and "format" not in job.args and job.args["k"] == 1
    assert JobSpec.from_json(json.loads(job.dumps())) == job
    path = tmp_path / "job.json"
    assert main(EX1 + ["--save-job", str(path), "-o", str(tmp_path / "x.json")]) == 0
    saved = JobSpec.load(path)
    assert saved.args.pop("output") == str(tmp_path / "x.json") and saved == job
    with pytest.raises(FhsFormatError):
        JobSpec.from_json({"args": {}})
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    with pytest.raises(FhsFormatError):
        JobSpec.load(bad)
    assert main(["run", str(bad)]) == 2
    assert run(JobSpec("nope")) == 2
    assert run(JobSpec("gen", {"colour": 1})) == 2


@pytest.mark.parametrize("name,code", [
    ("class1_k1_gen", 0), ("class2_stated_gen", 3), ("class2_primitive_gen", 0),
    ("class3_stated_gen", 3), ("class3_printed_root_gen", 0), ("class3_primitive_gen", 0),
    ("class1_k2_stated_gen", 3), ("class1_k2_unsafe_gen", 0), ("check_dbf_invalid", 1)])
def test_shipped_jobs(name, code, tmp_path, capsys):
    job = JobSpec.load(JOBS / f"{name}.json")
    if job.command == "gen":
        job.args["output"] = str(tmp_path / "out.json")
    assert run(job) == code


def test_threads_flag(tmp_path, monkeypatch):
    out = _gen(tmp_path, EX1)
    assert main(["certify", str(out), "--threads", "4", "-o", str(tmp_path / "r")]) == 0


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fhsopt.cli", "info", "--p", "7"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["q"] == 7
