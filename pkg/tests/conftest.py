from __future__ import annotations

from pathlib import Path

import pytest

from apscheck.cli import main as cli_main

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = REPO_ROOT / "scenarios"


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process, returning (exit_code, stdout, stderr)."""

    def run(*argv: str):
        code = cli_main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return run
