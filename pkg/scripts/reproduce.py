#!/usr/bin/env python3
"""Run every shipped config through the CLI and print the headline numbers.

Usage: python scripts/reproduce.py [--out runs] [--threads N]
"""
import argparse
import contextlib
import io
import json
import sys
from pathlib import Path

from hydrodim.cli import main as cli

HERE = Path(__file__).resolve().parent.parent / "configs"

RUNS = [
    ("gaps", "gaps_hydrogen"),
    ("gaps", "gaps_powerlaw"),
    ("subseq", "subseq_hydrogen"),
    ("subseq", "subseq_powerlaw"),
    ("scan", "scan_hybrid"),
    ("scan", "scan_random"),
    ("dynamics", "dynamics_power"),
    ("dynamics", "dynamics_eigen"),
    ("verify", "verify"),
]


def headline(cmd: str, out: Path) -> str:
    if cmd == "subseq":
        s = json.loads((out / "subseq_summary_q0.5.json").read_text())
        return (f"D_I={s['regression_D_I']:.4f} D_L={s['regression_D_L']:.4f} "
                f"max d_L={s['checks']['ceiling']['max_d_L']:.4f}")
    if cmd == "scan":
        s = json.loads((out / "summary_q0.5.json").read_text())
        return f"d_I in [{s['d_min']:.4f}, {s['d_max']:.4f}] over the window"
    if cmd == "dynamics":
        s = json.loads((out / "dynamics_summary.json").read_text())
        return f"beta+={s['beta_plus_est']:.4f} gsb margin={s['gsb_margin']}"
    if cmd == "gaps":
        last = (out / "gaps.csv").read_text().splitlines()[-1]
        return f"last row {last}"
    n = sum(1 for _ in (out / "verify.jsonl").open())
    return f"{n} oracle reports"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    worst = 0
    for cmd, name in RUNS:
        out = args.out / name
        with contextlib.redirect_stdout(io.StringIO()):
            code = cli([cmd, "--config", str(HERE / f"{name}.ini"), "--out", str(out),
                        "--threads", str(args.threads)])
        worst = max(worst, code)
        print(f"{name:18s} exit={code} {headline(cmd, out) if code != 2 else ''}", flush=True)
    return worst


if __name__ == "__main__":
    sys.exit(main())
