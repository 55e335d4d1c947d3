import pathlib
import subprocess
import sys

import pytest

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


@pytest.mark.parametrize("name", ["01_mode_propagator.py", "02_hermite_ladder.py", "04_decay_rates.py"])
def test_demo_runs(name):
    proc = subprocess.run([sys.executable, str(DEMOS / name)], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout
