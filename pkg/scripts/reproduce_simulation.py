"""Run the full pipeline end to end and render the report.

Run:
    python3 scripts/reproduce_simulation.py --out runs/demo

Without --dataset/--tweets this first generates a planted dataset whose
easy/difficult split the scorer can recover, then runs score, simulate, and
report through the command-line entry point. Point --dataset and --tweets at
real JSONL files to reproduce the analysis on actual annotations.
"""

import argparse
import sys
from pathlib import Path

from annodiff import cli
from annodiff.synth import SynthConfig, generate_records, write_jsonl


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dataset", help="annotations.jsonl (default: generate a planted one)")
    parser.add_argument("--tweets", help="tweets.jsonl (required with --dataset)")
    parser.add_argument("--out", default="runs/demo", help="output directory")
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    if bool(args.dataset) != bool(args.tweets):
        parser.error("--dataset and --tweets must be given together")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.dataset:
        dataset, tweets = args.dataset, args.tweets
    else:
        config = SynthConfig(
            n_workers=8, n_easy=40, n_difficult=20, difficult_label_noise=0.6, seed=args.seed
        )
        annotations, tweet_records = generate_records(config)
        dataset = str(out / "annotations.jsonl")
        tweets = str(out / "tweets.jsonl")
        write_jsonl(annotations, dataset)
        write_jsonl(tweet_records, tweets)
        print(f"generated planted dataset under {out}/")

    common = ["--dataset", dataset, "--tweets", tweets, "--out", str(out), "--seed", str(args.seed)]
    for step in (["score", *common], ["simulate", *common], ["report", "--out", str(out)]):
        print(f"\n$ annodiff {' '.join(step)}")
        code = cli.main(step)
        if code != 0:
            return code
    print(f"\nall outputs under {out}/ (report.md has the rendered summary)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
