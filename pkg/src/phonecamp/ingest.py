"""Normalized post/account data model, JSON Lines ingestion, and the corpus store.

The store is an embedded append-only JSON Lines log plus an in-memory index
rebuilt on open; single writer, any number of concurrent readers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

from .phone_core import CountryTable, PhoneNumber, extract_phone_numbers

PLATFORMS = ("TW", "FB", "GP", "YT", "FL")


class IngestError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class Engagement:
    likes: int = 0
    shares: int = 0
    reactions: int = 0

    def __post_init__(self):
        if min(self.likes, self.shares, self.reactions) < 0:
            raise IngestError("negative_engagement")


@dataclass
class Post:
    post_id: str
    platform: str
    user_id: str
    timestamp: float
    text: str
    urls: list[str] = field(default_factory=list)
    phones: list[PhoneNumber] = field(default_factory=list)
    engagement: Engagement = field(default_factory=Engagement)
    client: str | None = None
    language: str | None = None
    has_photo: bool = False

    @property
    def key(self) -> tuple[str, str]:
        return (self.platform, self.post_id)


@dataclass
class Account:
    platform: str
    user_id: str
    display_name: str = ""
    screen_name: str | None = None
    followers: int = 0
    friends: int = 0
    verified: bool = False
    status: str = "unknown"
    status_checked_at: float | None = None
    status_history: list[tuple[str, float]] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, str]:
        return (self.platform, self.user_id)


@dataclass
class Thresholds:
    token_overlap: float = 0.33
    jaccard_merge: float = 0.7
    silhouette_target: float = 0.8
    min_campaign_posts: int = 5000
    automation_gap_seconds: int = 600
    identity_similarity: float = 0.7
    profile_doc_frequency: float = 0.5
    cost_per_victim_usd: float = 290.9
    pair_sample_cap: int = 10000
    profile_token_cap: int = 50

    def __post_init__(self):
        for name in ("token_overlap", "jaccard_merge", "silhouette_target",
                     "identity_similarity", "profile_doc_frequency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise IngestError("bad_threshold", f"{name}={v}")
        if self.min_campaign_posts < 1:
            raise IngestError("bad_threshold", "min_campaign_posts")

    @classmethod
    def from_file(cls, path: str | Path) -> "Thresholds":
        with open(path) as f:
            data = json.load(f)
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class IngestSummary:
    read: int = 0
    kept: int = 0
    filtered_no_phone: int = 0
    duplicates: int = 0
    malformed: int = 0

    def consistent(self) -> bool:
        return self.read == (self.kept + self.filtered_no_phone
                             + self.duplicates + self.malformed)


_REQUIRED = ("post_id", "platform", "author", "timestamp", "text")


def parse_post_record(record: dict) -> tuple[Post, Account]:
    """Validate one JSON post object into (Post, Account); unknown fields are
    ignored. Raises IngestError(missing_required_field | bad_timestamp |
    unknown_platform)."""
    for name in _REQUIRED:
        if name not in record or record[name] in (None, ""):
            raise IngestError("missing_required_field", name)
    platform = record["platform"]
    if platform not in PLATFORMS:
        raise IngestError("unknown_platform", str(platform))
    try:
        ts = float(record["timestamp"])
    except (TypeError, ValueError):
        raise IngestError("bad_timestamp", repr(record["timestamp"]))
    if ts <= 0:
        raise IngestError("bad_timestamp", str(ts))
    author = record["author"]
    if not isinstance(author, dict) or not author.get("user_id"):
        raise IngestError("missing_required_field", "author.user_id")
    eng = record.get("engagement") or {}
    post = Post(
        post_id=str(record["post_id"]),
        platform=platform,
        user_id=str(author["user_id"]),
        timestamp=ts,
        text=str(record["text"]),
        urls=[str(u) for u in record.get("urls") or []],
        engagement=Engagement(
            likes=int(eng.get("likes", 0)),
            shares=int(eng.get("shares_or_retweets_or_reshares", eng.get("shares", 0))),
            reactions=int(eng.get("reactions", 0)),
        ),
        client=record.get("client"),
        language=record.get("language"),
        has_photo=bool(record.get("has_photo", False)),
    )
    account = Account(
        platform=platform,
        user_id=str(author["user_id"]),
        display_name=str(author.get("display_name", "")),
        screen_name=author.get("screen_name"),
        followers=int(author.get("followers", 0)),
        friends=int(author.get("friends", 0)),
        verified=bool(author.get("verified", False)),
    )
    return post, account


def load_keywords() -> list[str]:
    text = resources.files("phonecamp.data").joinpath("keywords.txt").read_text()
    return [ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")]


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def keyword_filter(post: Post, keywords: list[str]) -> bool:
    """True iff the text contains any keyword as a token, or the post already
    carries an extracted phone number (phone presence overrides keywords)."""
    if post.phones:
        return True
    tokens = set(_TOKEN_RE.findall(post.text.lower()))
    return any(k in tokens for k in keywords)


class Corpus:
    """In-memory corpus index, optionally backed by an append-only log dir."""

    def __init__(self, data_dir: str | Path | None = None):
        self.posts: dict[tuple[str, str], Post] = {}
        self.accounts: dict[tuple[str, str], Account] = {}
        self.ingest_log: dict[str, IngestSummary] = {}
        self._dir = Path(data_dir) if data_dir else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._replay()

    # -- persistence ---------------------------------------------------------

    def _log_path(self) -> Path:
        return self._dir / "posts.log"

    def _acct_path(self) -> Path:
        return self._dir / "accounts.log"

    def _replay(self):
        if self._log_path().exists():
            with open(self._log_path()) as f:
                for line in f:
                    rec = json.loads(line)
                    post = _post_from_dict(rec)
                    self.posts.setdefault(post.key, post)
        if self._acct_path().exists():
            with open(self._acct_path()) as f:
                for line in f:
                    rec = json.loads(line)
                    self._apply_account_record(rec)

    def _append(self, which: str, record: dict):
        if self._dir:
            path = self._log_path() if which == "posts" else self._acct_path()
            with open(path, "a") as f:
                f.write(json.dumps(record, sort_keys=True) + "\n")

    # -- writes --------------------------------------------------------------

    def add_post(self, post: Post, account: Account) -> bool:
        """Returns False when the (platform, post_id) key already exists."""
        if post.key in self.posts:
            return False
        self.posts[post.key] = post
        if account.key not in self.accounts:
            self.accounts[account.key] = account
            self._append("accounts", {"kind": "account", **_account_to_dict(account)})
        else:
            existing = self.accounts[account.key]
            existing.verified = existing.verified or account.verified
            existing.followers = max(existing.followers, account.followers)
            existing.friends = max(existing.friends, account.friends)
            if account.display_name and not existing.display_name:
                existing.display_name = account.display_name
            if account.screen_name and not existing.screen_name:
                existing.screen_name = account.screen_name
        self._append("posts", _post_to_dict(post))
        return True

    def _apply_account_record(self, rec: dict):
        kind = rec.pop("kind", "account")
        if kind == "account":
            acct = Account(**{k: v for k, v in rec.items()
                              if k in Account.__dataclass_fields__})
            acct.status_history = [tuple(h) for h in acct.status_history]
            self.accounts.setdefault(acct.key, acct)
        elif kind == "status":
            key = (rec["platform"], rec["user_id"])
            acct = self.accounts.get(key)
            if acct is not None:
                _update_status(acct, rec["status"], rec["checked_at"])

    def update_account_status(self, platform: str, user_id: str,
                              status: str, checked_at: float) -> bool:
        acct = self.accounts.get((platform, user_id))
        if acct is None:
            return False
        _update_status(acct, status, checked_at)
        self._append("accounts", {"kind": "status", "platform": platform,
                                         "user_id": user_id, "status": status,
                                         "checked_at": checked_at})
        return True

    # -- reads ---------------------------------------------------------------

    def posts_by_phone(self) -> dict[str, list[Post]]:
        index: dict[str, list[Post]] = {}
        for post in self.posts.values():
            for phone in post.phones:
                index.setdefault(phone.canonical, []).append(post)
        return index


def _update_status(acct: Account, status: str, checked_at: float):
    acct.status_history.append((status, checked_at))
    if acct.status_checked_at is None or checked_at >= acct.status_checked_at:
        acct.status = status
        acct.status_checked_at = checked_at


def _post_to_dict(post: Post) -> dict:
    d = asdict(post)
    d["phones"] = [asdict(p) for p in post.phones]
    return d


def _post_from_dict(d: dict) -> Post:
    phones = [PhoneNumber(**p) for p in d.get("phones", [])]
    eng = d.get("engagement") or {}
    return Post(post_id=d["post_id"], platform=d["platform"], user_id=d["user_id"],
                timestamp=d["timestamp"], text=d["text"], urls=d.get("urls", []),
                phones=phones, engagement=Engagement(**eng),
                client=d.get("client"), language=d.get("language"),
                has_photo=d.get("has_photo", False))


def _account_to_dict(acct: Account) -> dict:
    return asdict(acct)


def ingest_file(corpus: Corpus, path: str | Path, table: CountryTable,
                keywords: list[str] | None = None) -> IngestSummary:
    """Parse, extract phones, filter, and dedupe one JSON Lines file.

    Posts without any extracted phone number are dropped as noise. Malformed
    lines are counted and skipped. Re-ingesting an already-loaded file only
    increments the duplicate count.
    """
    if keywords is None:
        keywords = load_keywords()
    summary = IngestSummary()
    path = Path(path)
    if not path.exists():
        raise IngestError("io_error", str(path))
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            summary.read += 1
            try:
                record = json.loads(line)
                post, account = parse_post_record(record)
            except (json.JSONDecodeError, IngestError, ValueError):
                summary.malformed += 1
                continue
            post.phones = [m.phone for m in extract_phone_numbers(post.text, table)]
            if not post.phones or not keyword_filter(post, keywords):
                summary.filtered_no_phone += 1
                continue
            if corpus.add_post(post, account):
                summary.kept += 1
            else:
                summary.duplicates += 1
    corpus.ingest_log[str(path)] = summary
    return summary


def snapshot_accounts(corpus: Corpus, path: str | Path) -> dict:
    """Apply a JSON Lines account-status snapshot; later checked_at wins.
    Unknown accounts are skipped and counted."""
    path = Path(path)
    if not path.exists():
        raise IngestError("io_error", str(path))
    updated = skipped = malformed = 0
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                platform, user_id = rec["platform"], str(rec["user_id"])
                status, checked_at = rec["status"], float(rec["checked_at"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                malformed += 1
                continue
            if corpus.update_account_status(platform, user_id, status, checked_at):
                updated += 1
            else:
                skipped += 1
    return {"updated": updated, "skipped": skipped, "malformed": malformed}
