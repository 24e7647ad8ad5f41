"""Record real API responses as JSON fixtures for the UI contract tests.

Builds a small synthetic corpus, runs the pipeline, and dumps the GET
payloads the UI consumes. Rerun after any API schema change.
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from phonecamp.api import create_app
from phonecamp.ingest import Thresholds
from phonecamp.pipeline import run_pipeline
from phonecamp.synth import CampaignSpec, SynthSpec, generate_corpus

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def build_run(base: Path) -> Path:
    spec = SynthSpec(seed=424, campaigns=[
        CampaignSpec(name="alpha", phone_count=2, account_count=6,
                     post_count=40,
                     vocabulary=[f"alphatok{i}" for i in range(8)],
                     suspension_fraction=0.4, cross_reference_rate=0.2),
        CampaignSpec(name="beta", phone_count=1, account_count=5,
                     post_count=30,
                     vocabulary=[f"betatok{i}" for i in range(8)],
                     start_platform="YT",
                     platform_mix={"YT": 0.6, "TW": 0.4}),
        CampaignSpec(name="gamma", phone_count=1, account_count=5,
                     post_count=20,
                     vocabulary=[f"gammatok{i}" for i in range(8)],
                     collusion_rate=0.5),
    ])
    corpus_dir = base / "corpus"
    generate_corpus(spec, corpus_dir)
    dnc = base / "dnc.txt"
    truth = json.loads((corpus_dir / "truth.json").read_text())
    dnc.write_text(sorted(truth["phones"])[0] + "\n")
    data_dir = base / "data"
    run_pipeline([corpus_dir / "posts.jsonl"], dnc, Thresholds(), data_dir,
                 snapshot_paths=[corpus_dir / "snapshots.jsonl"],
                 actors_path=corpus_dir / "engagement_actors.jsonl")
    return data_dir


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        data_dir = build_run(Path(tmp))
        client = TestClient(create_app(data_dir))

        listing = client.get("/campaigns").json()
        (FIXTURE_DIR / "campaigns.json").write_text(
            json.dumps(listing, indent=1, sort_keys=True))

        for i, campaign in enumerate(listing["campaigns"]):
            detail = client.get(
                f"/campaigns/{campaign['campaign_id']}").json()
            (FIXTURE_DIR / f"campaign_detail_{i}.json").write_text(
                json.dumps(detail, indent=1, sort_keys=True))

        missing = client.get("/campaigns/cnotreal")
        (FIXTURE_DIR / "campaign_404.json").write_text(json.dumps(
            {"status": missing.status_code, "body": missing.json()},
            indent=1, sort_keys=True))
    print(f"fixtures written to {FIXTURE_DIR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
