"""Play seeded rounds of the nowhere-density game, save the transcripts and
verify each by replay."""
import argparse
from pathlib import Path

from filterlab.cpgame import play_game, seeded_adversary, verify_transcript
from filterlab.partition import BlockPartition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--games", type=int, default=5)
    ap.add_argument("--rounds", type=int, default=10)
    ap.add_argument("--sizes", default="n+1")
    ap.add_argument("--out", type=Path, default=Path("transcripts"))
    a = ap.parse_args()
    a.out.mkdir(parents=True, exist_ok=True)
    P = BlockPartition.parse(a.sizes)
    for seed in range(a.games):
        T = play_game(seeded_adversary(seed), a.rounds, P, seed=seed)
        text = T.dumps()
        path = a.out / f"game-{seed}.json"
        path.write_text(text)
        blocks = [r["block"] for r in T.rounds]
        print(f"seed {seed}: blocks {blocks}  verify {verify_transcript(text).status.value}  -> {path}")


if __name__ == "__main__":
    main()
