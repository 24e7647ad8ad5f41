"""Spam flagging rules, verified-phone filtering, eligibility cut, and the
human review-label store."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .cluster import Campaign
from .ingest import Corpus, Thresholds
from .phone_core import PhoneError, normalize_phone


class LabelError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class DncList:
    phones: frozenset[str]
    source: str = ""
    loaded_at: float = 0.0

    @classmethod
    def from_file(cls, path: str | Path) -> "DncList":
        """One canonical phone per line; '#' comments and blanks allowed.
        Every entry must survive normalization."""
        entries = set()
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                entries.add(normalize_phone(line).canonical)
            except PhoneError as exc:
                raise LabelError("bad_dnc_entry", f"{line}: {exc.reason}")
        return cls(phones=frozenset(entries), source=str(path),
                   loaded_at=time.time())

    def __contains__(self, canonical: str) -> bool:
        return canonical in self.phones


@dataclass
class ReviewLabel:
    campaign_id: str
    verdict: str
    topic: str
    reviewer: str
    reviewed_at: float

    def __post_init__(self):
        if self.verdict not in ("spam", "benign"):
            raise LabelError("bad_verdict", self.verdict)


def filter_verified_phones(corpus: Corpus) -> set[str]:
    """Phones used by even one verified account are excluded from campaign
    formation entirely; returns the excluded canonical set."""
    excluded: set[str] = set()
    for post in corpus.posts.values():
        acct = corpus.accounts.get((post.platform, post.user_id))
        if acct is not None and acct.verified:
            excluded.update(p.canonical for p in post.phones)
    return excluded


def flag_spam(campaign: Campaign, dnc: DncList, corpus: Corpus) -> dict:
    """Auto-flag when any campaign phone is DNC-listed or any involved
    account is suspended; reasons name each trigger."""
    reasons = []
    for phone in campaign.phones:
        if phone.canonical in dnc:
            reasons.append({"kind": "dnc_phone", "phone": phone.canonical})
    for platform, user_id in sorted(campaign.user_ids):
        acct = corpus.accounts.get((platform, user_id))
        if acct is not None and acct.status == "suspended":
            reasons.append({"kind": "suspended_account",
                            "platform": platform, "user_id": user_id})
    return {"auto_flag": bool(reasons), "reasons": reasons}


def eligible_for_characterization(campaign: Campaign,
                                  thresholds: Thresholds) -> bool:
    return len(campaign.post_ids) >= thresholds.min_campaign_posts


@dataclass
class CampaignStore:
    """Holds formed campaigns and their append-only review-label history."""

    campaigns: dict[str, Campaign] = field(default_factory=dict)

    def add(self, campaign: Campaign):
        self.campaigns[campaign.campaign_id] = campaign

    def get(self, campaign_id: str) -> Campaign:
        try:
            return self.campaigns[campaign_id]
        except KeyError:
            raise LabelError("unknown_campaign", campaign_id)

    def apply_review_label(self, label: ReviewLabel) -> Campaign:
        """Latest label wins; identical resubmissions are idempotent; all
        prior labels are kept in the campaign's history."""
        campaign = self.get(label.campaign_id)
        entry = {"verdict": label.verdict, "topic": label.topic,
                 "reviewer": label.reviewer, "reviewed_at": label.reviewed_at}
        last = campaign.label_history[-1] if campaign.label_history else None
        if last != entry:
            campaign.label_history.append(entry)
        campaign.label = label.verdict
        campaign.topic = label.topic
        return campaign
