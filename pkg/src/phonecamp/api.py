"""HTTP/JSON API for the triage UI: read endpoints over a finished pipeline
run plus the single label-write endpoint.

Reads are pure views over the loaded run snapshot; label writes are
serialized through one lock and appended to the run's label log.
"""

from __future__ import annotations

import threading
import time
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import metrics as mt
from .identity import match_identities
from .labeler import LabelError, ReviewLabel
from .pipeline import RunData, append_label, build_report, load_run

POST_SAMPLE_LIMIT = 100


class LabelRequest(BaseModel):
    verdict: str
    topic: str = ""
    reviewer: str = "anonymous"
    run_id: str | None = None


def _campaign_summary(data: RunData, campaign) -> dict:
    posts_by_key = None
    per_platform = {p: 0 for p in mt.PLATFORM_ORDER}
    for platform, _ in campaign.post_ids:
        per_platform[platform] += 1
    suspended = sum(
        1 for key in campaign.user_ids
        if (a := data.corpus.accounts.get(key)) and a.status == "suspended")
    total = len(campaign.user_ids)
    return {
        "campaign_id": campaign.campaign_id,
        "post_count": len(campaign.post_ids),
        "user_count": total,
        "platform_breakdown": per_platform,
        "phones": [asdict(p) for p in campaign.phones],
        "label": campaign.label,
        "topic": campaign.topic,
        "origin_country": campaign.origin_country,
        "auto_flag": data.flags[campaign.campaign_id]["auto_flag"],
        "flag_reasons": data.flags[campaign.campaign_id]["reasons"],
        "eligible": data.eligible[campaign.campaign_id],
        "suspension_fraction": suspended / total if total else None,
    }


def create_app(data_dir: str | Path, static_dir: str | Path | None = None
               ) -> FastAPI:
    data = load_run(data_dir)
    app = FastAPI(title="phonecamp triage API")
    write_lock = threading.Lock()
    posts_by_key = data.posts_by_key
    actors = data.engagement_actors()

    def with_run(payload: dict) -> JSONResponse:
        payload["run_id"] = data.run_id
        return JSONResponse(payload)

    def get_campaign(campaign_id: str):
        campaign = data.store.campaigns.get(campaign_id)
        if campaign is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown campaign {campaign_id}")
        return campaign

    @app.get("/campaigns")
    def list_campaigns(label: str | None = None, topic: str | None = None,
                       country: str | None = None,
                       platform: str | None = None,
                       min_posts: int = Query(default=0, ge=0)):
        rows = []
        for campaign in sorted(data.store.campaigns.values(),
                               key=lambda c: -len(c.post_ids)):
            if label and campaign.label != label:
                continue
            if topic and campaign.topic != topic:
                continue
            if country and (campaign.origin_country or "unknown") != country:
                continue
            if platform and not any(p == platform
                                    for p, _ in campaign.post_ids):
                continue
            if len(campaign.post_ids) < min_posts:
                continue
            rows.append(_campaign_summary(data, campaign))
        return with_run({"campaigns": rows})

    @app.get("/campaigns/{campaign_id}")
    def campaign_detail(campaign_id: str):
        campaign = get_campaign(campaign_id)
        posts = [posts_by_key[k] for k in sorted(campaign.post_ids)
                 if k in posts_by_key]
        sample = [{
            "post_id": p.post_id, "platform": p.platform,
            "user_id": p.user_id, "timestamp": p.timestamp,
            "text": p.text, "urls": p.urls,
            "engagement": asdict(p.engagement),
        } for p in posts[:POST_SAMPLE_LIMIT]]
        campaign_accounts = [data.corpus.accounts[k]
                             for k in sorted(campaign.user_ids)
                             if k in data.corpus.accounts]
        clusters = match_identities(campaign_accounts, data.thresholds)
        payload = _campaign_summary(data, campaign)
        payload.update({
            "post_sample": sample,
            "label_history": campaign.label_history,
            "identity_clusters": [
                {"members": [list(m) for m in c.members],
                 "platforms": c.platforms, "evidence": c.evidence}
                for c in clusters],
            "metrics": mt.campaign_metrics(campaign, posts_by_key,
                                           data.corpus.accounts,
                                           data.thresholds, actors),
        })
        return with_run(payload)

    @app.get("/campaigns/{campaign_id}/metrics")
    def campaign_metrics_endpoint(campaign_id: str):
        campaign = get_campaign(campaign_id)
        return with_run({"metrics": mt.campaign_metrics(
            campaign, posts_by_key, data.corpus.accounts,
            data.thresholds, actors)})

    @app.post("/campaigns/{campaign_id}/label")
    def label_campaign(campaign_id: str, body: LabelRequest):
        get_campaign(campaign_id)
        if body.run_id is not None and body.run_id != data.run_id:
            raise HTTPException(status_code=409,
                                detail="label submitted against a stale run")
        try:
            label = ReviewLabel(campaign_id=campaign_id, verdict=body.verdict,
                                topic=body.topic, reviewer=body.reviewer,
                                reviewed_at=time.time())
            with write_lock:
                campaign = data.store.apply_review_label(label)
                append_label(data.data_dir, label)
        except LabelError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return with_run({"campaign_id": campaign_id,
                         "label": campaign.label, "topic": campaign.topic,
                         "history_length": len(campaign.label_history)})

    @app.get("/runs/{run_id}")
    def run_info(run_id: str):
        if run_id != data.run_id:
            raise HTTPException(status_code=404, detail="unknown run")
        import json
        meta = json.loads((data.data_dir / "run.json").read_text())
        return JSONResponse(meta)

    @app.get("/report")
    def report():
        return with_run({"report": build_report(data)})

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")
    return app
