"""End-to-end orchestration: ingest, cluster, flag, characterize, export.

A run is identified by a digest of its input files and configuration; reruns
on identical inputs produce identical artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field, replace
from decimal import Decimal
from pathlib import Path

from . import cluster as cl
from . import identity as ident
from . import labeler as lb
from . import metrics as mt
from .ingest import Corpus, Thresholds, ingest_file, snapshot_accounts
from .phone_core import infer_country, load_bundled_table
from .synth import load_engagement_actors


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage}: {cause}")


@dataclass
class PipelineRun:
    run_id: str
    thresholds: Thresholds
    input_digests: dict[str, str]
    stage_counts: dict[str, int] = field(default_factory=dict)
    stage_seconds: dict[str, float] = field(default_factory=dict)


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _campaign_origin(campaign: cl.Campaign, posts_by_key, table) -> str:
    votes: dict[str, int] = {}
    for phone in campaign.phones:
        langs: dict[str, int] = {}
        for key in campaign.post_ids:
            post = posts_by_key.get(key)
            if post and post.language and any(
                    p.canonical == phone.canonical for p in post.phones):
                langs[post.language] = langs.get(post.language, 0) + 1
        lang = max(langs, key=lambda k: (langs[k], k)) if langs else None
        country, provenance = infer_country(phone, lang, table)
        if provenance != "unknown":
            votes[country] = votes.get(country, 0) + 1
    if not votes:
        return "unknown"
    return max(sorted(votes), key=lambda c: votes[c])


def run_pipeline(input_paths: list[str | Path], dnc_path: str | Path | None,
                 thresholds: Thresholds, data_dir: str | Path,
                 snapshot_paths: list[str | Path] = (),
                 actors_path: str | Path | None = None) -> PipelineRun:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    table = load_bundled_table()

    digests = {}
    try:
        for p in list(input_paths) + list(snapshot_paths):
            digests[str(p)] = _digest(Path(p))
        if dnc_path:
            digests[str(dnc_path)] = _digest(Path(dnc_path))
    except OSError as exc:
        raise PipelineError("ingest", exc) from exc
    config_blob = json.dumps(asdict(thresholds), sort_keys=True)
    run_id = hashlib.sha256(
        (config_blob + json.dumps(digests, sort_keys=True)).encode()
    ).hexdigest()[:16]

    run = PipelineRun(run_id=run_id, thresholds=thresholds,
                      input_digests=digests)
    corpus = Corpus()

    def stage(name):
        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()
                return self

            def __exit__(self, exc_type, exc, tb):
                run.stage_seconds[name] = time.perf_counter() - self.t0
                if exc is not None and not isinstance(exc, PipelineError):
                    raise PipelineError(name, exc) from exc
        return _Timer()

    with stage("ingest"):
        for path in input_paths:
            ingest_file(corpus, path, table)
        for path in snapshot_paths:
            snapshot_accounts(corpus, path)
        run.stage_counts["posts"] = len(corpus.posts)
        run.stage_counts["accounts"] = len(corpus.accounts)

    with stage("verified_filter"):
        excluded = lb.filter_verified_phones(corpus)
        run.stage_counts["excluded_verified_phones"] = len(excluded)

    with stage("profile_assign"):
        by_phone = corpus.posts_by_phone()
        clusters = []
        for canonical in sorted(by_phone):
            if canonical in excluded:
                continue
            posts = by_phone[canonical]
            phone = posts[0].phones[
                [p.canonical for p in posts[0].phones].index(canonical)]
            profile = cl.build_token_profile(phone, posts, thresholds)
            clusters.append(cl.assign_posts_to_phone(profile, posts, thresholds))
        run.stage_counts["phone_clusters"] = len(clusters)

    with stage("merge"):
        campaigns = cl.merge_phone_clusters(clusters, thresholds)
        run.stage_counts["campaigns"] = len(campaigns)

    posts_by_key = {p.key: p for p in corpus.posts.values()}

    with stage("flag"):
        dnc = lb.DncList.from_file(dnc_path) if dnc_path else lb.DncList(frozenset())
        flags = {}
        for campaign in campaigns:
            campaign.origin_country = _campaign_origin(campaign, posts_by_key,
                                                       table)
            flags[campaign.campaign_id] = lb.flag_spam(campaign, dnc, corpus)
        run.stage_counts["auto_flagged"] = sum(
            1 for f in flags.values() if f["auto_flag"])

    with stage("persist"):
        actors = (load_engagement_actors(actors_path) if actors_path else None)
        records = []
        for campaign in campaigns:
            flag = flags[campaign.campaign_id]
            records.append({
                "campaign_id": campaign.campaign_id,
                "phones": [asdict(p) for p in campaign.phones],
                "post_ids": sorted(list(k) for k in campaign.post_ids),
                "user_ids": sorted(list(k) for k in campaign.user_ids),
                "label": campaign.label,
                "topic": campaign.topic,
                "origin_country": campaign.origin_country,
                "auto_flag": flag["auto_flag"],
                "flag_reasons": flag["reasons"],
                "eligible": lb.eligible_for_characterization(campaign,
                                                             thresholds),
            })
        (data_dir / "campaigns.json").write_text(
            json.dumps(records, sort_keys=True, indent=1))
        (data_dir / "run.json").write_text(json.dumps({
            "run_id": run.run_id,
            "thresholds": asdict(thresholds),
            "input_digests": digests,
            "stage_counts": run.stage_counts,
            "stage_seconds": run.stage_seconds,
        }, sort_keys=True, indent=1))
        store = Corpus(data_dir / "store")
        for post in sorted(corpus.posts.values(), key=lambda p: p.key):
            acct = corpus.accounts[(post.platform, post.user_id)]
            # Fresh copy without status history: the store replays history
            # itself and must not share mutable state with this corpus.
            store.add_post(post, replace(acct, status="unknown",
                                         status_checked_at=None,
                                         status_history=[]))
        for acct in sorted(corpus.accounts.values(), key=lambda a: a.key):
            for status, checked_at in acct.status_history:
                store.update_account_status(acct.platform, acct.user_id,
                                            status, checked_at)
        if actors is not None:
            (data_dir / "engagement_actors.json").write_text(json.dumps(
                [{"key": list(k), "actors": [list(a) for a in v]}
                 for k, v in sorted(actors.items())], sort_keys=True))
    return run


# -- loading a finished run --------------------------------------------------

@dataclass
class RunData:
    run_id: str
    thresholds: Thresholds
    corpus: Corpus
    store: lb.CampaignStore
    flags: dict[str, dict]
    eligible: dict[str, bool]
    data_dir: Path

    @property
    def posts_by_key(self):
        return {p.key: p for p in self.corpus.posts.values()}

    def engagement_actors(self):
        path = self.data_dir / "engagement_actors.json"
        if not path.exists():
            return None
        return {tuple(rec["key"]): [tuple(a) for a in rec["actors"]]
                for rec in json.loads(path.read_text())}


def load_run(data_dir: str | Path) -> RunData:
    data_dir = Path(data_dir)
    run_file = data_dir / "run.json"
    if not run_file.exists():
        raise FileNotFoundError(f"no pipeline run in {data_dir}")
    run_meta = json.loads(run_file.read_text())
    thresholds = Thresholds(**{k: v for k, v in run_meta["thresholds"].items()
                               if k in Thresholds.__dataclass_fields__})
    corpus = Corpus(data_dir / "store")
    store = lb.CampaignStore()
    flags, eligible = {}, {}
    from .phone_core import PhoneNumber
    for rec in json.loads((data_dir / "campaigns.json").read_text()):
        campaign = cl.Campaign(
            campaign_id=rec["campaign_id"],
            phones=[PhoneNumber(**p) for p in rec["phones"]],
            post_ids={tuple(k) for k in rec["post_ids"]},
            user_ids={tuple(k) for k in rec["user_ids"]},
            label=rec["label"], topic=rec["topic"],
            origin_country=rec["origin_country"])
        store.add(campaign)
        flags[campaign.campaign_id] = {"auto_flag": rec["auto_flag"],
                                       "reasons": rec["flag_reasons"]}
        eligible[campaign.campaign_id] = rec["eligible"]
    labels_path = data_dir / "labels.jsonl"
    if labels_path.exists():
        for line in labels_path.read_text().splitlines():
            if line.strip():
                store.apply_review_label(lb.ReviewLabel(**json.loads(line)))
    return RunData(run_id=run_meta["run_id"], thresholds=thresholds,
                   corpus=corpus, store=store, flags=flags, eligible=eligible,
                   data_dir=data_dir)


def append_label(data_dir: str | Path, label: lb.ReviewLabel):
    path = Path(data_dir) / "labels.jsonl"
    with open(path, "a") as f:
        f.write(json.dumps(asdict(label), sort_keys=True) + "\n")


# -- reporting ---------------------------------------------------------------

def build_report(data: RunData) -> dict:
    campaigns = sorted(data.store.campaigns.values(),
                       key=lambda c: c.campaign_id)
    posts_by_key = data.posts_by_key
    rows = []
    platform_counts_total = {p: 0 for p in mt.PLATFORM_ORDER}
    audience = {p: 0 for p in mt.PLATFORM_ORDER}
    start_histogram = {p: 0 for p in mt.PLATFORM_ORDER}
    for c in campaigns:
        posts = [posts_by_key[k] for k in sorted(c.post_ids)
                 if k in posts_by_key]
        per_platform = {p: 0 for p in mt.PLATFORM_ORDER}
        for p in posts:
            per_platform[p.platform] += 1
            platform_counts_total[p.platform] += 1
        for key in c.user_ids:
            acct = data.corpus.accounts.get(key)
            if acct is not None:
                audience[acct.platform] += acct.followers
        for canonical in sorted({ph.canonical for ph in c.phones}):
            phone_posts = [p for p in posts if any(
                x.canonical == canonical for x in p.phones)]
            if phone_posts:
                entry = mt.first_appearance_sequence(canonical, phone_posts)
                start_histogram[entry.starting_platform] += 1
        rows.append({
            "campaign_id": c.campaign_id,
            "label": c.label,
            "topic": c.topic or "unreviewed",
            "origin_country": c.origin_country or "unknown",
            "post_count": len(c.post_ids),
            "user_count": len(c.user_ids),
            "phone_count": len(c.phones),
            "auto_flag": data.flags[c.campaign_id]["auto_flag"],
            "eligible": data.eligible[c.campaign_id],
            **{f"posts_{p.lower()}": per_platform[p]
               for p in mt.PLATFORM_ORDER},
        })
    country_topic: dict[str, dict[str, int]] = {}
    for row in rows:
        bucket = country_topic.setdefault(row["origin_country"], {})
        bucket[row["topic"]] = bucket.get(row["topic"], 0) + 1
    savings = ident.estimate_cross_platform_savings(
        audience, data.thresholds, seed_platform="TW",
        reference_total=Decimal("8800000")) if any(audience.values()) else None
    return {
        "run_id": data.run_id,
        "campaign_count": len(campaigns),
        "campaigns": rows,
        "country_topic_table": country_topic,
        "platform_post_totals": platform_counts_total,
        "starting_platform_histogram": start_histogram,
        "savings": _savings_dict(savings) if savings else None,
    }


def _savings_dict(s: ident.SavingsEstimate) -> dict:
    return {"audience_counts": s.audience_counts,
            "seed_platform": s.seed_platform,
            "total_victims": s.total_victims,
            "cost_per_victim": str(s.cost_per_victim),
            "total_savings": str(s.total_savings),
            "lower_bound": s.lower_bound,
            "notes": s.notes}


def export_report(data: RunData, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = build_report(data)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report, sort_keys=True, indent=1))
    csv_path = out_dir / "report.csv"
    fieldnames = ["campaign_id", "label", "topic", "origin_country",
                  "post_count", "user_count", "phone_count", "auto_flag",
                  "eligible"] + [f"posts_{p.lower()}"
                                 for p in mt.PLATFORM_ORDER]
    with open(csv_path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in report["campaigns"]:
            writer.writerow({k: row[k] for k in fieldnames})
    return [json_path, csv_path]
