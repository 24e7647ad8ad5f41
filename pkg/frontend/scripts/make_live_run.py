"""Build a fresh 20-campaign synthetic run for the live triage-flow test.

Usage: python3 scripts/make_live_run.py <data_dir>
Then serve it: phonecamp --data-dir <data_dir> serve --port 8800
"""

import sys
from pathlib import Path

from phonecamp.ingest import Thresholds
from phonecamp.pipeline import run_pipeline
from phonecamp.synth import CampaignSpec, SynthSpec, generate_corpus


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    base = Path(sys.argv[1])
    campaigns = [
        CampaignSpec(name=f"camp{i:02d}", phone_count=2, account_count=6,
                     post_count=30,
                     vocabulary=[f"c{i:02d}tok{j}" for j in range(8)],
                     suspension_fraction=0.3 if i % 2 else 0.0)
        for i in range(20)
    ]
    spec = SynthSpec(seed=2026, campaigns=campaigns)
    corpus_dir = base / "corpus"
    generate_corpus(spec, corpus_dir)
    run = run_pipeline([corpus_dir / "posts.jsonl"], None, Thresholds(),
                       base / "data",
                       snapshot_paths=[corpus_dir / "snapshots.jsonl"],
                       actors_path=corpus_dir / "engagement_actors.jsonl")
    print(f"run {run.run_id} with {run.stage_counts['campaigns']} campaigns "
          f"in {base / 'data'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
