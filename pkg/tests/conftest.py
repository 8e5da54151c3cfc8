import os
import sys
import textwrap
import time
from contextlib import contextmanager
from pathlib import Path

import hypothesis
import pytest

hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

_ACCEPTANCE_LINES = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("DELAYDIST_LIVE") == "1":
        return
    skip = pytest.mark.skip(reason="live network test; set DELAYDIST_LIVE=1")
    for item in items:
        if "live" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Time a block and log one PASS/FAIL line for the acceptance summary."""

    @contextmanager
    def run(number, title, budget_s):
        start = time.perf_counter()
        status = "FAIL"
        note = ""
        try:
            yield
            elapsed = time.perf_counter() - start
            if elapsed >= budget_s:
                note = f" (over budget {budget_s} s)"
                raise AssertionError(f"criterion {number} took {elapsed:.2f} s, budget {budget_s} s")
            status = "PASS"
        except BaseException as exc:
            note = note or f" ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
            raise
        finally:
            elapsed = time.perf_counter() - start
            line = f"[{status}] criterion {number}: {title} [{elapsed:.2f} s]{note}"
            _ACCEPTANCE_LINES.append(line)
            print(line)

    return run


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fake_ping(tmp_path, monkeypatch):
    """A stand-in ping executable that replays canned transcripts.

    Writes ``size_<S>.txt`` (or ``default.txt``), ``stderr.txt`` and
    ``exit_code`` into the returned directory to control what it prints.
    """
    d = tmp_path / "fakeping"
    d.mkdir()
    script = d / "ping"
    script.write_text(textwrap.dedent(f"""\
        #!{sys.executable}
        import pathlib, sys
        d = pathlib.Path({str(d)!r})
        args = sys.argv[1:]
        (d / "argv.txt").write_text("\\n".join(args))
        size = args[args.index("-s") + 1] if "-s" in args else "56"
        out = d / f"size_{{size}}.txt"
        if not out.exists():
            out = d / "default.txt"
        if (d / "stderr.txt").exists():
            sys.stderr.write((d / "stderr.txt").read_text())
        if out.exists():
            sys.stdout.write(out.read_text())
        code = d / "exit_code"
        sys.exit(int(code.read_text()) if code.exists() else 0)
        """))
    script.chmod(0o755)
    monkeypatch.setenv("DELAYDIST_PING", str(script))
    return d
