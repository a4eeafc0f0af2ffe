"""Run `certify` on every scene in scenes/ and tabulate the verdicts."""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from sprayforge.cli import execute, parse_scene

SCENES = Path(__file__).resolve().parent.parent / "scenes"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=None, help="override every scene seed")
    args = ap.parse_args()
    for path in sorted(SCENES.glob("*.json")):
        scene = parse_scene(path)
        if args.seed is not None:
            scene = replace(scene, seed=args.seed)
        report = execute(scene, "certify", timing=True)
        cert = report.result.get("certificate", {})
        rank = f"{cert.get('rank', '-')}/{cert.get('target_dim', '-')}"
        stage = report.failed_stage or ""
        print(f"{path.name:24s} {report.verdict:12s} rank {rank:5s} {report.timing['seconds']:7.3f}s {stage}")


if __name__ == "__main__":
    main()
