"""Command-line entry points for the full pipeline and its individual stages.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import cluster as cl
from . import metrics as mt
from .ingest import Corpus, IngestError, Thresholds, ingest_file, snapshot_accounts
from .identity import match_identities
from .labeler import CampaignStore, DncList, LabelError, ReviewLabel
from .phone_core import load_bundled_table
from .pipeline import (PipelineError, append_label, export_report, load_run,
                       run_pipeline)
from .synth import SynthError, SynthSpec, evaluate_clustering, generate_corpus, GroundTruth

click.UsageError.exit_code = 1


def _load_thresholds(config: str | None) -> Thresholds:
    if config:
        return Thresholds.from_file(config)
    return Thresholds()


def _data_error(exc: Exception):
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
@click.option("--config", type=click.Path(exists=True), default=None,
              help="Thresholds JSON file (all fields optional).")
@click.option("--data-dir", type=click.Path(), default="phonecamp_data",
              help="Directory for pipeline artifacts.")
@click.pass_context
def main(ctx, config, data_dir):
    """Phone-number spam campaign detection and triage toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["thresholds"] = _load_thresholds(config)
    ctx.obj["data_dir"] = Path(data_dir)


@main.command()
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.pass_context
def ingest(ctx, files):
    """Ingest JSON Lines post files into the corpus store."""
    table = load_bundled_table()
    corpus = Corpus(ctx.obj["data_dir"] / "store")
    try:
        for path in files:
            summary = ingest_file(corpus, path, table)
            click.echo(f"{path}: read={summary.read} kept={summary.kept} "
                       f"filtered_no_phone={summary.filtered_no_phone} "
                       f"duplicates={summary.duplicates} "
                       f"malformed={summary.malformed}")
    except IngestError as exc:
        _data_error(exc)


@main.command()
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.pass_context
def snapshot(ctx, files):
    """Apply account-status snapshot files."""
    corpus = Corpus(ctx.obj["data_dir"] / "store")
    try:
        for path in files:
            result = snapshot_accounts(corpus, path)
            click.echo(f"{path}: {result}")
    except IngestError as exc:
        _data_error(exc)


@main.command("run")
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--dnc", type=click.Path(exists=True), default=None)
@click.option("--snapshots", "-s", multiple=True,
              type=click.Path(exists=True))
@click.option("--actors", type=click.Path(exists=True), default=None)
@click.pass_context
def run_cmd(ctx, inputs, dnc, snapshots, actors):
    """Run the full pipeline end to end."""
    try:
        run = run_pipeline(list(inputs), dnc, ctx.obj["thresholds"],
                           ctx.obj["data_dir"], snapshot_paths=list(snapshots),
                           actors_path=actors)
    except (PipelineError, IngestError, LabelError) as exc:
        _data_error(exc)
    click.echo(f"run {run.run_id}: {run.stage_counts}")


@main.command()
@click.option("--grid", default="0.3,0.5,0.7,0.8,0.9,0.95",
              help="Comma-separated merge thresholds to sweep.")
@click.pass_context
def cluster(ctx, grid):
    """Rebuild phone clusters from the store and sweep merge thresholds."""
    thresholds = ctx.obj["thresholds"]
    corpus = Corpus(ctx.obj["data_dir"] / "store")
    if not corpus.posts:
        _data_error(RuntimeError("empty corpus store; run ingest first"))
    clusters = []
    for canonical, posts in sorted(corpus.posts_by_phone().items()):
        phone = next(p for p in posts[0].phones if p.canonical == canonical)
        profile = cl.build_token_profile(phone, posts, thresholds)
        clusters.append(cl.assign_posts_to_phone(profile, posts, thresholds))
    sweep = cl.silhouette_sweep(
        clusters, [float(t) for t in grid.split(",")], thresholds)
    for threshold, score in sweep:
        shown = "undefined" if score is None else f"{score:.4f}"
        click.echo(f"merge_threshold={threshold:.2f} silhouette={shown}")


@main.command()
@click.pass_context
def flag(ctx):
    """Show auto-flag status for a finished run."""
    try:
        data = load_run(ctx.obj["data_dir"])
    except FileNotFoundError as exc:
        _data_error(exc)
    for cid, flag_rec in sorted(data.flags.items()):
        mark = "SPAM?" if flag_rec["auto_flag"] else "-"
        click.echo(f"{cid} {mark} reasons={len(flag_rec['reasons'])} "
                   f"eligible={data.eligible[cid]}")


@main.command()
@click.argument("campaign_id")
@click.pass_context
def metrics(ctx, campaign_id):
    """Print the metrics document for one campaign."""
    try:
        data = load_run(ctx.obj["data_dir"])
        campaign = data.store.get(campaign_id)
    except (FileNotFoundError, LabelError) as exc:
        _data_error(exc)
    doc = mt.campaign_metrics(campaign, data.posts_by_key,
                              data.corpus.accounts, data.thresholds,
                              data.engagement_actors())
    click.echo(json.dumps(doc, indent=1, sort_keys=True, default=str))


@main.command()
@click.argument("campaign_id")
@click.pass_context
def identities(ctx, campaign_id):
    """Identity clusters among a campaign's authors."""
    try:
        data = load_run(ctx.obj["data_dir"])
        campaign = data.store.get(campaign_id)
    except (FileNotFoundError, LabelError) as exc:
        _data_error(exc)
    accounts = [data.corpus.accounts[k] for k in sorted(campaign.user_ids)
                if k in data.corpus.accounts]
    clusters = match_identities(accounts, data.thresholds)
    click.echo(json.dumps(
        [{"members": [list(m) for m in c.members], "platforms": c.platforms,
          "evidence": c.evidence} for c in clusters], indent=1))


@main.command()
@click.argument("campaign_id")
@click.option("--verdict", type=click.Choice(["spam", "benign"]),
              required=True)
@click.option("--topic", default="")
@click.option("--reviewer", default="cli")
@click.pass_context
def label(ctx, campaign_id, verdict, topic, reviewer):
    """Record a review verdict for a campaign."""
    import time as _time
    try:
        data = load_run(ctx.obj["data_dir"])
        review = ReviewLabel(campaign_id=campaign_id, verdict=verdict,
                             topic=topic, reviewer=reviewer,
                             reviewed_at=_time.time())
        data.store.apply_review_label(review)
        append_label(ctx.obj["data_dir"], review)
    except (FileNotFoundError, LabelError) as exc:
        _data_error(exc)
    click.echo(f"{campaign_id} labeled {verdict}")


@main.command()
@click.option("--out", type=click.Path(), default=None,
              help="Output directory (defaults to the data dir).")
@click.pass_context
def report(ctx, out):
    """Export the JSON + CSV report bundle."""
    try:
        data = load_run(ctx.obj["data_dir"])
    except FileNotFoundError as exc:
        _data_error(exc)
    paths = export_report(data, out or ctx.obj["data_dir"])
    for path in paths:
        click.echo(str(path))


@main.command()
@click.argument("spec_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def synth(spec_file, out):
    """Generate a synthetic corpus with ground truth."""
    try:
        spec = SynthSpec.from_file(spec_file)
        emitted = generate_corpus(spec, out)
    except (SynthError, KeyError, TypeError) as exc:
        _data_error(exc)
    click.echo(json.dumps(emitted))


@main.command()
@click.argument("truth_file", type=click.Path(exists=True))
@click.pass_context
def evaluate(ctx, truth_file):
    """Score a finished run's partition against ground truth."""
    try:
        data = load_run(ctx.obj["data_dir"])
        truth = GroundTruth.load(truth_file)
        predicted = {}
        for cid, campaign in data.store.campaigns.items():
            keys = {f"{p}|{i}" for p, i in campaign.post_ids
                    if f"{p}|{i}" in truth.posts}
            if keys:
                predicted[cid] = keys
        scores = evaluate_clustering(predicted, truth.posts)
    except (FileNotFoundError, SynthError) as exc:
        _data_error(exc)
    click.echo(json.dumps({k: scores[k] for k in
                           ("precision", "recall", "f1", "ari")}))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8800, type=int)
@click.option("--static-dir", type=click.Path(), default=None,
              help="Directory of built UI assets to serve at /.")
@click.pass_context
def serve(ctx, host, port, static_dir):
    """Serve the triage HTTP API (and optionally the UI) for a finished run."""
    import uvicorn

    from .api import create_app
    try:
        app = create_app(ctx.obj["data_dir"], static_dir=static_dir)
    except FileNotFoundError as exc:
        _data_error(exc)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
