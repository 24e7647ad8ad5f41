import json

import pytest

from phonecamp.ingest import Thresholds
from phonecamp.pipeline import (PipelineError, append_label, build_report,
                                export_report, load_run, run_pipeline)
from phonecamp.labeler import ReviewLabel
from phonecamp.synth import (CampaignSpec, GroundTruth, SynthSpec,
                             evaluate_clustering, generate_corpus)


def two_campaign_spec(seed=99):
    vocab_a = [f"worda{i}" for i in range(8)]
    vocab_b = [f"wordb{i}" for i in range(8)]
    return SynthSpec(seed=seed, campaigns=[
        CampaignSpec(name="alpha", phone_count=2, account_count=6,
                     post_count=40, vocabulary=vocab_a,
                     suspension_fraction=0.5, cross_reference_rate=0.2),
        CampaignSpec(name="beta", phone_count=2, account_count=6,
                     post_count=40, vocabulary=vocab_b,
                     start_platform="YT",
                     platform_mix={"YT": 0.6, "TW": 0.4}),
    ], background_phoneless=10, background_benign_phone=4)


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("runbase")
    corpus_dir = base / "corpus"
    generate_corpus(two_campaign_spec(), corpus_dir)
    truth = GroundTruth.load(corpus_dir / "truth.json")
    dnc = base / "dnc.txt"
    # blacklist one planted phone so the campaign auto-flags
    dnc.write_text(sorted(truth.phones)[0] + "\n")
    data_dir = base / "data"
    run = run_pipeline([corpus_dir / "posts.jsonl"], dnc, Thresholds(),
                       data_dir,
                       snapshot_paths=[corpus_dir / "snapshots.jsonl"],
                       actors_path=corpus_dir / "engagement_actors.jsonl")
    return {"base": base, "corpus_dir": corpus_dir, "data_dir": data_dir,
            "run": run, "truth": truth}


class TestRunPipeline:
    def test_artifacts_written(self, run_dir):
        d = run_dir["data_dir"]
        for name in ("campaigns.json", "run.json", "store/posts.log",
                     "engagement_actors.json"):
            assert (d / name).exists(), name

    def test_recovers_planted_campaigns(self, run_dir):
        data = load_run(run_dir["data_dir"])
        truth = run_dir["truth"]
        predicted = {}
        for cid, campaign in data.store.campaigns.items():
            keys = {f"{p}|{i}" for p, i in campaign.post_ids
                    if f"{p}|{i}" in truth.posts}
            if keys:
                predicted[cid] = keys
        scores = evaluate_clustering(predicted, truth.posts)
        assert scores["f1"] == 1.0
        assert scores["ari"] == 1.0

    def test_dnc_campaign_flagged(self, run_dir):
        data = load_run(run_dir["data_dir"])
        flagged_phone = sorted(run_dir["truth"].phones)[0]
        for cid, campaign in data.store.campaigns.items():
            canonicals = {p.canonical for p in campaign.phones}
            if flagged_phone in canonicals:
                assert data.flags[cid]["auto_flag"]
                kinds = {r["kind"] for r in data.flags[cid]["reasons"]}
                assert "dnc_phone" in kinds

    def test_suspended_accounts_flag(self, run_dir):
        # alpha has suspension_fraction 0.5; its campaign must carry
        # suspended_account reasons after the snapshot is applied.
        data = load_run(run_dir["data_dir"])
        reasons = [r for f in data.flags.values() for r in f["reasons"]]
        assert any(r["kind"] == "suspended_account" for r in reasons)

    def test_origin_country_attributed(self, run_dir):
        data = load_run(run_dir["data_dir"])
        # planted phones are all NANP 1888 numbers
        assert all(c.origin_country == "US/CA"
                   for c in data.store.campaigns.values())

    def test_stage_counts(self, run_dir):
        run = run_dir["run"]
        # 2 planted campaigns plus 4 benign background phones that each
        # form their own singleton campaign
        assert run.stage_counts["campaigns"] == 6
        assert run.stage_counts["phone_clusters"] == 8
        assert set(run.stage_seconds) == {"ingest", "verified_filter",
                                          "profile_assign", "merge", "flag",
                                          "persist"}

    def test_run_id_stable_across_reruns(self, run_dir, tmp_path):
        run2 = run_pipeline(
            [run_dir["corpus_dir"] / "posts.jsonl"],
            run_dir["base"] / "dnc.txt", Thresholds(), tmp_path / "data2",
            snapshot_paths=[run_dir["corpus_dir"] / "snapshots.jsonl"],
            actors_path=run_dir["corpus_dir"] / "engagement_actors.jsonl")
        assert run2.run_id == run_dir["run"].run_id

    def test_run_id_changes_with_thresholds(self, run_dir, tmp_path):
        run2 = run_pipeline(
            [run_dir["corpus_dir"] / "posts.jsonl"], None,
            Thresholds(jaccard_merge=0.5), tmp_path / "data3")
        assert run2.run_id != run_dir["run"].run_id

    def test_missing_input_raises_staged_error(self, tmp_path):
        with pytest.raises(PipelineError) as exc:
            run_pipeline([tmp_path / "nope.jsonl"], None, Thresholds(),
                         tmp_path / "d")
        assert exc.value.stage == "ingest"


class TestLoadRun:
    def test_roundtrip(self, run_dir):
        data = load_run(run_dir["data_dir"])
        assert data.run_id == run_dir["run"].run_id
        assert len(data.store.campaigns) == 6
        assert len(data.corpus.posts) > 0

    def test_labels_replayed(self, run_dir):
        data = load_run(run_dir["data_dir"])
        cid = sorted(data.store.campaigns)[0]
        append_label(run_dir["data_dir"], ReviewLabel(
            campaign_id=cid, verdict="spam", topic="pharmacy",
            reviewer="tester", reviewed_at=123.0))
        reloaded = load_run(run_dir["data_dir"])
        campaign = reloaded.store.campaigns[cid]
        assert campaign.label == "spam"
        assert campaign.topic == "pharmacy"

    def test_missing_dir(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_run(tmp_path / "empty")


class TestReport:
    def test_report_shape(self, run_dir):
        data = load_run(run_dir["data_dir"])
        report = build_report(data)
        assert report["campaign_count"] == 6
        assert len(report["campaigns"]) == 6
        assert set(report["platform_post_totals"]) == \
            {"TW", "FB", "GP", "YT", "FL"}
        # beta's two phones are forced to debut on YT; the histogram covers
        # all 8 phones (4 planted, 4 benign background)
        hist = report["starting_platform_histogram"]
        assert hist["YT"] >= 2
        assert sum(hist.values()) == 8

    def test_savings_present_with_discrepancy_note(self, run_dir):
        data = load_run(run_dir["data_dir"])
        report = build_report(data)
        savings = report["savings"]
        assert savings is not None
        assert savings["seed_platform"] == "TW"
        assert any("lower bound" in n for n in savings["notes"])

    def test_export_deterministic(self, run_dir, tmp_path):
        data = load_run(run_dir["data_dir"])
        paths1 = export_report(data, tmp_path / "r1")
        paths2 = export_report(load_run(run_dir["data_dir"]), tmp_path / "r2")
        for p1, p2 in zip(paths1, paths2):
            assert p1.read_bytes() == p2.read_bytes()

    def test_csv_rows_match_json(self, run_dir, tmp_path):
        import csv
        data = load_run(run_dir["data_dir"])
        json_path, csv_path = export_report(data, tmp_path / "r3")
        report = json.loads(json_path.read_text())
        with open(csv_path) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == len(report["campaigns"])
        assert rows[0]["campaign_id"] == \
            report["campaigns"][0]["campaign_id"]
