"""Acceptance gate: one line per criterion, each at its stated tolerance."""

import subprocess
import sys

import pytest

from mazur66 import verify


@pytest.fixture(scope="module")
def results():
    return {r.id: r for r in verify.run_all(depth=5, seed=0)}


@pytest.mark.parametrize("cid", range(1, 10))
def test_criterion(results, cid):
    r = results[cid]
    print("\n" + r.line())
    assert r.passed, r.line()


def test_cli_verify_is_byte_deterministic():
    runs = [subprocess.run([sys.executable, "-m", "mazur66", "verify"], capture_output=True)
            for _ in range(2)]
    for r in runs:
        assert r.returncode == 0, r.stderr.decode()
    assert runs[0].stdout == runs[1].stdout
    print("\n[9] CLI verify report identical across two runs: PASS")
