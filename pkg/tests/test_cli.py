import json

import pytest

from delaydist.cli import EXIT_DATA, EXIT_INPUT, EXIT_NETWORK, EXIT_OK, EXIT_USAGE, main
from delaydist.report import REPORT_SCHEMA, ReportDocument
from delaydist.trace import DelaySample, DelayTrace, TraceMetadata, write_trace_csv

jsonschema = pytest.importorskip("jsonschema")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, delays, size=100, kind="RTT"):
    samples = [DelaySample(i + 1, d, size) for i, d in enumerate(delays)]
    write_trace_csv(DelayTrace(TraceMetadata("src", "dst", kind, None, "test"), samples), path)
    return path


@pytest.fixture
def exp_csv(tmp_path, capsys):
    path = tmp_path / "exp.csv"
    assert run(capsys, "synth", "--family", "exp", "--dmin", 20000, "--scale", 5000,
               "--n", 10000, "--seed", 1, "-o", path)[0] == EXIT_OK
    return path


# --- synth ------------------------------------------------------------------------

def test_synth_repeatable(tmp_path, capsys, exp_csv):
    again = tmp_path / "again.csv"
    run(capsys, "synth", "--family", "exp", "--dmin", 20000, "--scale", 5000,
        "--n", 10000, "--seed", 1, "-o", again)
    assert again.read_bytes() == exp_csv.read_bytes()


def test_synth_to_stdout(capsys):
    code, out, _ = run(capsys, "synth", "--family", "tnorm", "--dmin", 1, "--scale", 1, "--n", 3)
    assert code == EXIT_OK and out.count("\n") == 8


def test_synth_rejects_zero_n(capsys):
    code, out, err = run(capsys, "synth", "--family", "exp", "--dmin", 1, "--scale", 1, "--n", 0)
    assert code == EXIT_USAGE and out == "" and "--n" in err


# --- fit ----------------------------------------------------------------------------

def test_fit_json_selects_exponential(capsys, exp_csv):
    code, out, _ = run(capsys, "fit", exp_csv, "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["fit"]["selected"] == "Exponential"
    assert [h["p"] for h in doc["headroom"]] == [0.9, 0.99]


def test_fit_text_table(capsys, exp_csv):
    code, out, _ = run(capsys, "fit", exp_csv)
    header, row = out.splitlines()[:2]
    assert header.split() == ["host", "W", "(bytes)", "K_nor", "K_exp", "selected"]
    fields = row.split()
    assert fields[1] == "100" and fields[-1] == "Exponential"
    assert len(fields[2]) == 4 and len(fields[3]) == 4  # K to two decimals


def test_fit_plot_tsv(tmp_path, capsys, exp_csv):
    tsv = tmp_path / "overlay.tsv"
    assert run(capsys, "fit", exp_csv, "--plot", tsv)[0] == EXIT_OK
    lines = tsv.read_text().splitlines()
    assert lines[0] == "delay_us\tF_emp\tF_nor\tF_exp"
    assert all(len(line.split("\t")) == 4 for line in lines)


def test_fit_constant_trace(tmp_path, capsys):
    code, out, err = run(capsys, "fit", write(tmp_path / "c.csv", [5000] * 12))
    assert code == EXIT_DATA and out == "" and "DegenerateScale" in err


def test_fit_schema_error_has_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("seq,delay_us,size_bytes,lost\n1,10,100,0\n2,oops,100,0\n")
    code, _, err = run(capsys, "fit", bad)
    assert code == EXIT_INPUT and "line 3" in err


def test_fit_missing_file(tmp_path, capsys):
    assert run(capsys, "fit", tmp_path / "nope.csv")[0] == EXIT_INPUT


def test_fit_owd_from_rtt(tmp_path, capsys):
    path = write(tmp_path / "r.csv", [20000 + 37 * (i % 11) ** 2 for i in range(30)])
    code, out, _ = run(capsys, "fit", path, "--owd-from-rtt", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["trace"]["delay_kind"] == "OWD"
    assert doc["summary"]["d_min_us"] == 10000
    owd = write(tmp_path / "o.csv", [1, 2] * 6, kind="OWD")
    assert run(capsys, "fit", owd, "--owd-from-rtt")[0] == EXIT_DATA


def test_fit_mixed_size_trace_reports_path(tmp_path, capsys):
    trace = tmp_path / "two.csv"
    samples = []
    for i in range(40):
        w = 100 if i % 2 == 0 else 1000
        fixed = 9000 + w * 10
        samples.append(DelaySample(i + 1, fixed + (i * 131) % 4000, w))
    write_trace_csv(DelayTrace(TraceMetadata(), samples), trace)
    doc = json.loads(run(capsys, "fit", trace, "--json")[1])
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["path_model"]["method"] == "two-point"
    assert doc["summary"]["size_bytes"] is None


# --- pathmodel ------------------------------------------------------------------------

def test_pathmodel_two_files(tmp_path, capsys):
    a = write(tmp_path / "a.csv", [12000, 10000, 11000], size=100)
    b = write(tmp_path / "b.csv", [19000, 21000], size=1000)
    code, out, _ = run(capsys, "pathmodel", a, b)
    assert code == EXIT_OK
    assert "9000.000 us (9.000 ms)" in out and "0.1 bytes/us" in out and "two-point" in out
    doc = json.loads(run(capsys, "pathmodel", a, b, "--json")[1])
    assert doc["path_model"]["d_min_us"] == pytest.approx(9000)
    assert doc["path_model"]["capacity_bytes_per_us"] == pytest.approx(0.1)


def test_pathmodel_equal_sizes(tmp_path, capsys):
    a = write(tmp_path / "a.csv", [12000], size=100)
    b = write(tmp_path / "b.csv", [13000], size=100)
    code, _, err = run(capsys, "pathmodel", a, b)
    assert code == EXIT_DATA and "EqualSizes" in err


def test_pathmodel_three_sizes(tmp_path, capsys):
    files = [write(tmp_path / f"{w}.csv", [9000 + 10 * w], size=w) for w in (100, 500, 1000)]
    code, out, _ = run(capsys, "pathmodel", *files)
    assert code == EXIT_OK and "regression over 3 sizes" in out


def test_pathmodel_needs_input(capsys):
    assert run(capsys, "pathmodel")[0] == EXIT_USAGE


# --- headroom -------------------------------------------------------------------------

def test_headroom_from_params(capsys):
    code, out, _ = run(capsys, "headroom", "--dmin", 9000, "--capacity", 0.1, "--lambda", 5e-4,
                       "--size", 1000, "--percentiles", "0.99,0,0.5", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert [r["p"] for r in doc["headroom"]] == [0, 0.5, 0.99]
    assert doc["headroom"][0]["delay_us"] == pytest.approx(19000)
    assert doc["headroom"][2]["delay_us"] - 19000 == pytest.approx(9210.34, abs=0.005)


def test_headroom_from_trace(capsys, exp_csv):
    code, out, _ = run(capsys, "headroom", exp_csv, "--percentiles", "0.9")
    assert code == EXIT_OK and "p90" in out
    assert run(capsys, "headroom", exp_csv, "--size", 1500)[0] == EXIT_DATA


def test_headroom_bad_percentile(capsys):
    assert run(capsys, "headroom", "--dmin", 1, "--capacity", 1, "--lambda", 1,
               "--size", 1, "--percentiles", "1.0")[0] == EXIT_USAGE


# --- probe ------------------------------------------------------------------------------

TRANSCRIPT = "PING h (10.0.0.9) 100(128) bytes of data.\n" + "".join(
    f"108 bytes from 10.0.0.9: icmp_seq={i} ttl=64 time={10 + i * 0.7:.1f} ms\n" for i in range(1, 11)
)


def test_probe_stub_json_is_deterministic(capsys, fake_ping, monkeypatch):
    monkeypatch.setattr("platform.system", lambda: "Linux")
    (fake_ping / "size_100.txt").write_text(TRANSCRIPT)
    code, first, _ = run(capsys, "probe", "h", "--json")
    _, second, _ = run(capsys, "probe", "h", "--json")
    assert code == EXIT_OK and first == second
    doc = json.loads(first)
    assert doc["summary"]["n_ok"] == 10 and doc["summary"]["d_min_us"] == 10700


def test_probe_default_count_is_ten(capsys, fake_ping, monkeypatch):
    monkeypatch.setattr("platform.system", lambda: "Linux")
    (fake_ping / "size_100.txt").write_text(TRANSCRIPT)
    run(capsys, "probe", "h")
    argv = (fake_ping / "argv.txt").read_text().splitlines()
    assert argv[argv.index("-c") + 1] == "10"


def test_probe_unresolvable_exit_code(capsys, fake_ping, monkeypatch):
    monkeypatch.setattr("platform.system", lambda: "Linux")
    (fake_ping / "stderr.txt").write_text("ping: unknown host nosuch\n")
    (fake_ping / "exit_code").write_text("2")
    assert run(capsys, "probe", "nosuch")[0] == EXIT_NETWORK


def test_probe_requires_host(capsys):
    code, out, _ = run(capsys, "probe")
    assert code == EXIT_USAGE and out == ""


# --- report document ---------------------------------------------------------------------

def test_report_round_trip(capsys, exp_csv):
    text = run(capsys, "fit", exp_csv, "--json")[1]
    doc = ReportDocument.from_json(text)
    assert doc.to_json() == text
    assert ReportDocument.from_dict(doc.to_dict()) == doc
