import shutil
import subprocess
import sys

import pytest


def shocklayer_cmd() -> list:
    exe = shutil.which("shocklayer")
    if exe:
        return [exe]
    return [sys.executable, "-m", "shocklayer.cli"]


def run_cli(args, cwd=None):
    proc = subprocess.run(
        shocklayer_cmd() + args, capture_output=True, text=True, cwd=cwd, timeout=600
    )
    if proc.returncode not in (0, 2):  # 2 = converged-but-invalid cases are fine
        raise RuntimeError(
            f"shocklayer {' '.join(args)} failed ({proc.returncode}):\n{proc.stderr}"
        )
    return proc


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    """A small sweep covering every figure's selection needs."""
    out = tmp_path_factory.mktemp("sweep")
    run_cli(
        [
            "sweep",
            "--theta0", "pi/9,pi/6",
            "--alpha0", "pi/36,pi/18,pi/12",
            "--N", "5,6,7",
            "--grid", "512",
            "--out", str(out),
        ]
    )
    return out


@pytest.fixture(scope="session")
def trajectory_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("traj")
    for name, phi0 in (("t1", "-0.999pi"), ("t2", "-pi/2")):
        run_cli(
            [
                "trajectory",
                "--theta0", "pi/6",
                "--alpha0", "pi/36",
                "--N", "6",
                "--grid", "512",
                f"--phi0={phi0}",
                "--r0", "10",
                "--out", str(out / name),
            ]
        )
    return out
