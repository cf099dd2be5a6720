"""Readers for the shocklayer CLI's CSV/JSON run artifacts.

The plots package computes nothing beyond axis transforms: everything is
read from fields.csv / residual.csv / coefficients.csv / summary.json as
written by `shocklayer solve|sweep|trajectory`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Case", "MissingInputError", "load_cases", "load_trajectories", "read_columns"]


class MissingInputError(FileNotFoundError):
    """An expected run artifact is absent; the message names the command to make it."""


def read_columns(path: Path) -> dict:
    """Columns of one CSV file as float arrays keyed by header name."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(header):
        out[name] = np.array([float(row[j]) for row in data])
    return out


@dataclass(frozen=True)
class Case:
    """One solved configuration: its parameters and artifact directory."""

    theta0: float
    alpha0: float
    N: int
    directory: Path
    summary: dict

    def fields(self) -> dict:
        return read_columns(self.directory / "fields.csv")

    def residual(self) -> dict:
        return read_columns(self.directory / "residual.csv")

    @property
    def quasi_l1(self) -> float:
        return self.summary["metrics"]["quasi_l1"]


def load_cases(input_dir: Path) -> list[Case]:
    """Discover solved cases under input_dir via their summary.json manifests."""
    input_dir = Path(input_dir)
    cases = []
    for summary_path in sorted(input_dir.glob("**/summary.json")):
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
        cfg = summary.get("config")
        if cfg is None or "error" in summary:
            continue
        if not (summary_path.parent / "fields.csv").exists():
            continue
        cases.append(
            Case(cfg["theta0"], cfg["alpha0"], cfg["N"], summary_path.parent, summary)
        )
    if not cases:
        raise MissingInputError(
            f"no solved cases under {input_dir}; produce them with e.g.\n"
            "  shocklayer sweep --theta0 pi/6 "
            "--alpha0 pi/36,pi/24,pi/18,pi/12,pi/9,pi/6 --N 5,10 --out " + str(input_dir)
        )
    cases.sort(key=lambda c: (c.theta0, c.alpha0, c.N))
    return cases


def load_trajectories(input_dir: Path) -> list[dict]:
    """All trajectory.csv files under input_dir, as column dictionaries."""
    input_dir = Path(input_dir)
    paths = sorted(input_dir.glob("**/trajectory*.csv"))
    if not paths:
        raise MissingInputError(
            f"no trajectory CSV under {input_dir}; produce one with e.g.\n"
            "  shocklayer trajectory --theta0 pi/6 --alpha0 pi/36 "
            "--phi0=-0.999pi --r0 10 --out " + str(input_dir / "traj1")
        )
    return [read_columns(p) for p in paths]


def select(cases, theta0=None, alpha0=None, N=None, tol=1e-9):
    """Cases matching the given parameters (angles compared with tolerance)."""
    out = []
    for c in cases:
        if theta0 is not None and abs(c.theta0 - theta0) > tol:
            continue
        if alpha0 is not None and abs(c.alpha0 - alpha0) > tol:
            continue
        if N is not None and c.N != N:
            continue
        out.append(c)
    return out


def angle_label(value: float) -> str:
    """Readable 'pi/K' label when the angle is a simple fraction of pi."""
    if value == 0.0:
        return "0"
    ratio = math.pi / value
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) != 0:
        k = int(round(ratio))
        return f"-pi/{-k}" if k < 0 else f"pi/{k}"
    return f"{value:.4f}"
