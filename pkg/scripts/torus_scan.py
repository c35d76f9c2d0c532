"""Rank scans along the orbit of a moving circle on the torus.

Runs the p-adic scan for a few bigon configurations, compares against the
strip-area oracle, and writes one JSON file per configuration.

    python scripts/torus_scan.py --out scripts/out
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from floerfam.cli import ScanRequest, dml_scan
from floerfam.torus import irrational_bigon, rational_bigon


@dataclass
class BigonRun:
    name: str
    a1: Fraction = Fraction(1, 2)
    a2: Fraction = Fraction(1, 2)
    step: Fraction = Fraction(1, 3)
    irrational: bool = False
    p: int = 5
    p2: int = 7

    def config(self):
        if self.irrational:
            return irrational_bigon()
        return rational_bigon(self.a1, self.a2, self.step)


@dataclass
class ScanPlan:
    runs: list = field(default_factory=lambda: [
        BigonRun("third-turn"),
        BigonRun("quarter-turn", Fraction(1, 4), Fraction(3, 4), Fraction(1, 4)),
        BigonRun("two-fifths", Fraction(1, 2), Fraction(1, 2), Fraction(2, 5), p=7, p2=3),
        BigonRun("irrational", irrational=True),
    ])
    k_range: tuple = (-12, 12)
    N: int = 12


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="scripts/out")
    ap.add_argument("--k-range", default="-12..12")
    args = ap.parse_args()
    a, _, b = args.k_range.partition("..")
    plan = ScanPlan(k_range=(int(a), int(b)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for run in plan.runs:
        t0 = time.perf_counter()
        res = dml_scan(ScanRequest(run.config(), k_range=plan.k_range, p=run.p, N=plan.N,
                                   p2=run.p2))
        dt = time.perf_counter() - t0
        print(f"== {run.name} ({dt:.2f}s)")
        print(res.table())
        print(f"oracle match: {res.oracle_match}")
        doc = {"run": {k: str(v) for k, v in asdict(run).items()}, "result": res.to_json()}
        (out / f"scan_{run.name}.json").write_text(json.dumps(doc, indent=2, default=str))


if __name__ == "__main__":
    main()
