#!/usr/bin/env python3
"""Record the parity fixtures for the console tests.

Runs the command-line advisor on the fixture instances with the
index-parity winner script (even-indexed games won by the left
participant, odd by the right) and freezes the per-round
(recommendation, value) pairs. Run from the repository root after
changing advisor output or the fixture instances:

    python3 frontend/scripts/record_transcripts.py
"""

import io
import json
import sys
from pathlib import Path

from cupfix.cli import main
from cupfix.engine import advance_round, current_pairings
from cupfix.model import Leaf, parse_instance

ROOT = Path(__file__).resolve().parent.parent.parent
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"
SOURCES = {"e1": "instances/e1.json", "e8": "instances/e8.json"}


def winners_script(inst):
    tree = inst.tree
    rounds = []
    while not isinstance(tree, Leaf):
        games = current_pairings(tree)
        winners = {
            i: (g.player_a if i % 2 == 0 else g.player_b)
            for i, g in enumerate(games)
        }
        rounds.append([inst.name_of(w) for w in winners.values()])
        tree = advance_round(tree, winners)
    return rounds


def cli_transcript(path, script):
    stdin = io.StringIO("\n".join(",".join(r) for r in script) + "\n")
    out = io.StringIO()
    old_in, old_out = sys.stdin, sys.stdout
    sys.stdin, sys.stdout = stdin, out
    try:
        code = main(["advise", "-i", str(path)])
    finally:
        sys.stdin, sys.stdout = old_in, old_out
    if code != 0:
        raise SystemExit(f"advise failed:\n{out.getvalue()}")
    pairs, recommendation = [], None
    for line in out.getvalue().splitlines():
        if line.startswith("recommendation: "):
            recommendation = line[len("recommendation: "):]
        elif line.startswith("value "):
            pairs.append(
                {"recommendation": recommendation, "value": line[len("value "):]}
            )
    return pairs


def record() -> None:
    for name, source in SOURCES.items():
        path = ROOT / source
        inst = parse_instance(path.read_text())
        script = winners_script(inst)
        rounds = cli_transcript(path, script)
        (FIXTURES / f"{name}.instance.json").write_text(path.read_text())
        (FIXTURES / f"{name}.transcript.json").write_text(
            json.dumps(
                {"instance": f"{name}.instance.json", "winners": script, "rounds": rounds},
                indent=1,
            )
            + "\n"
        )
        print(f"{name}: {len(script)} rounds recorded")


if __name__ == "__main__":
    record()
