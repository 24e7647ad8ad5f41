"""Campaign characterization statistics: temporal, automation, suspension,
visibility, collusion, cross-referencing, propagation sequences, content
attributes, blacklist checks, and origin distributions.

Every operation is pure over an immutable snapshot of posts/accounts.
Undefined values are returned as None, never silently 0.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from urllib.parse import urlparse

from .cluster import Campaign
from .ingest import Account, Post, Thresholds

PLATFORM_ORDER = ("TW", "FB", "GP", "YT", "FL")

SECONDS_PER_DAY = 86400.0


class MetricsError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


# -- temporal ----------------------------------------------------------------

def _percentile(sorted_vals: list[float], q: float) -> float:
    """Linear-interpolation percentile (matches numpy's default)."""
    if len(sorted_vals) == 1:
        return sorted_vals[0]
    pos = q / 100.0 * (len(sorted_vals) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    frac = pos - lo
    return sorted_vals[lo] * (1 - frac) + sorted_vals[hi] * frac


def gap_stats(gaps: list[float]) -> dict | None:
    if not gaps:
        return None
    vals = sorted(gaps)
    n = len(vals)
    mid = n // 2
    median = vals[mid] if n % 2 else (vals[mid - 1] + vals[mid]) / 2
    return {"mean": sum(vals) / n, "median": median,
            "p90": _percentile(vals, 90), "count": n}


def inter_arrival_stats(posts: list[Post], group_by: str = "campaign") -> dict:
    """Mean/median/p90 of consecutive timestamp gaps per group. Groups with
    fewer than two posts are reported as None."""
    if group_by == "campaign":
        keyfn = lambda p: "all"
    elif group_by == "platform":
        keyfn = lambda p: p.platform
    elif group_by == "account":
        keyfn = lambda p: (p.platform, p.user_id)
    else:
        raise MetricsError("bad_group_by", group_by)
    groups: dict = {}
    for post in posts:
        groups.setdefault(keyfn(post), []).append(post.timestamp)
    out = {}
    for key, stamps in groups.items():
        stamps.sort()
        gaps = [b - a for a, b in zip(stamps, stamps[1:])]
        out[key] = gap_stats(gaps)
    return out


_MESSAGING_RE = re.compile(r"\b(?:sms|whatsapp|wa|text)\b", re.IGNORECASE)


def automation_fraction(posts: list[Post], thresholds: Thresholds) -> dict:
    """Fraction of consecutive gaps strictly below automation_gap_seconds,
    the posting-client distribution, and the fraction of posts carrying
    SMS/WhatsApp-style messaging keywords."""
    if len(posts) < 2:
        raise MetricsError("insufficient_posts", str(len(posts)))
    stamps = sorted(p.timestamp for p in posts)
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    below = sum(1 for g in gaps if g < thresholds.automation_gap_seconds)
    clients = Counter(p.client or "unknown" for p in posts)
    messaging = sum(1 for p in posts if _MESSAGING_RE.search(p.text))
    return {"fraction": below / len(gaps),
            "client_distribution": dict(clients),
            "messaging_keyword_fraction": messaging / len(posts)}


def pearson_correlation(x: list[float], y: list[float]) -> float:
    """Standard product-moment coefficient."""
    if len(x) != len(y):
        raise MetricsError("length_mismatch", f"{len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise MetricsError("length_mismatch", "need at least 2 points")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    if sxx == 0 or syy == 0:
        raise MetricsError("degenerate_variance")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


# -- suspension --------------------------------------------------------------

def suspension_stats(accounts: list[Account], posts: list[Post]) -> dict:
    """Suspended-account lifetimes (last post - first post, in days; the
    suspension is assumed to follow the last observed post, which makes the
    lifetime an approximation) and the never-suspended fraction."""
    first_last: dict[tuple[str, str], tuple[float, float]] = {}
    for post in posts:
        key = (post.platform, post.user_id)
        cur = first_last.get(key)
        if cur is None:
            first_last[key] = (post.timestamp, post.timestamp)
        else:
            first_last[key] = (min(cur[0], post.timestamp),
                               max(cur[1], post.timestamp))
    total = len(accounts)
    suspended = [a for a in accounts if a.status == "suspended"]
    lifetimes = []
    within_a_day = 0
    for acct in suspended:
        span = first_last.get(acct.key)
        if span is None:
            continue
        days = (span[1] - span[0]) / SECONDS_PER_DAY
        lifetimes.append(days)
        if days < 1.0:
            within_a_day += 1
    return {
        "total_accounts": total,
        "suspended_count": len(suspended),
        "never_suspended_fraction":
            (total - len(suspended)) / total if total else None,
        "mean_lifetime_days":
            sum(lifetimes) / len(lifetimes) if lifetimes else None,
        "lifetimes_days": sorted(lifetimes),
        "suspended_within_a_day": within_a_day,
        "lifetime_is_approximation": True,
    }


# -- visibility --------------------------------------------------------------

def _post_visibility(post: Post) -> int:
    """Per-platform engagement sum; Facebook reactions fold into likes.
    Flickr is excluded (view counts do not indicate victims)."""
    e = post.engagement
    if post.platform == "TW":
        return e.likes + e.shares
    if post.platform == "FB":
        return e.likes + e.reactions + e.shares
    if post.platform == "GP":
        return e.likes + e.shares
    if post.platform == "YT":
        return e.likes
    return 0


def compute_visibility(posts: list[Post]) -> dict:
    totals = {p: 0 for p in PLATFORM_ORDER}
    for post in posts:
        totals[post.platform] += _post_visibility(post)
    return {"per_platform": totals,
            "total": sum(v for p, v in totals.items() if p != "FL"),
            "excluded_platforms": ["FL"]}


def collusion_adjusted_visibility(campaign: Campaign, posts: list[Post],
                                  engagement_actors:
                                  dict[tuple[str, str], list[tuple[str, str]]]
                                  | None) -> dict:
    """Visibility after removing engagement actions performed by the
    campaign's own authors. Requires the optional actor sidecar; when it is
    missing the metric is reported unavailable."""
    raw = compute_visibility(posts)
    if engagement_actors is None:
        return {"available": False, "reason": "missing_actor_data", "raw": raw}
    colluders = campaign.user_ids
    adjusted = {p: 0 for p in PLATFORM_ORDER}
    for post in posts:
        vis = _post_visibility(post)
        actors = engagement_actors.get(post.key, [])
        colluder_actions = sum(1 for a in actors if tuple(a) in colluders)
        adjusted[post.platform] += max(vis - colluder_actions, 0)
    total_raw = raw["total"]
    total_adj = sum(v for p, v in adjusted.items() if p != "FL")
    contribution = 0.0 if total_raw == 0 else 1.0 - total_adj / total_raw
    return {"available": True, "raw": raw,
            "adjusted_per_platform": adjusted, "adjusted_total": total_adj,
            "colluder_contribution": contribution}


# -- URLs and domains --------------------------------------------------------

def _host_of(url: str) -> str:
    if "://" not in url:
        url = "http://" + url
    host = urlparse(url).netloc.lower()
    return host.split(":")[0].removeprefix("www.")


def load_osn_domain_map() -> dict[str, str]:
    import json
    raw = resources.files("phonecamp.data").joinpath("osn_domains.json").read_text()
    return json.loads(raw)


def _platform_for_host(host: str, osn_domain_map: dict[str, str]) -> str | None:
    if host in osn_domain_map:
        return osn_domain_map[host]
    for domain, platform in osn_domain_map.items():
        if host.endswith("." + domain):
            return platform
    return None


def detect_cross_references(posts: list[Post],
                            osn_domain_map: dict[str, str] | None = None
                            ) -> list[tuple[str, str, tuple[str, str]]]:
    """(source platform, target platform, post key) per URL pointing at a
    different platform; same-platform and unmapped hosts are ignored."""
    if osn_domain_map is None:
        osn_domain_map = load_osn_domain_map()
    refs = []
    for post in posts:
        for url in post.urls:
            target = _platform_for_host(_host_of(url), osn_domain_map)
            if target is not None and target != post.platform:
                refs.append((post.platform, target, post.key))
    return refs


def load_shorteners() -> set[str]:
    text = resources.files("phonecamp.data").joinpath("shorteners.txt").read_text()
    return {ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")}


_HASHTAG_RE = re.compile(r"#\w")


def content_attribute_report(posts: list[Post]) -> dict:
    """Fractions of posts with hashtags, URLs, short URLs, and photos; all
    None for an empty post list."""
    if not posts:
        return {"hashtags": None, "urls": None, "short_urls": None,
                "photos": None, "post_count": 0}
    shorteners = load_shorteners()
    n = len(posts)
    with_hashtags = sum(1 for p in posts if _HASHTAG_RE.search(p.text))
    with_urls = sum(1 for p in posts if p.urls)
    with_short = sum(1 for p in posts
                     if any(_host_of(u) in shorteners for u in p.urls))
    with_photos = sum(1 for p in posts if p.has_photo)
    return {"hashtags": with_hashtags / n, "urls": with_urls / n,
            "short_urls": with_short / n, "photos": with_photos / n,
            "post_count": n}


def load_public_suffixes() -> set[str]:
    text = resources.files("phonecamp.data").joinpath("public_suffixes.txt").read_text()
    return {ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")}


def registrable_domain(host: str, suffixes: set[str] | None = None) -> str:
    """Registered label plus the longest matching public suffix; the host
    itself when no suffix matches."""
    if suffixes is None:
        suffixes = load_public_suffixes()
    host = host.lower().rstrip(".")
    labels = host.split(".")
    for cut in range(1, len(labels)):
        suffix = ".".join(labels[cut:])
        if suffix in suffixes:
            return ".".join(labels[cut - 1:])
    return host


def domain_blacklist_check(urls: list[str], blacklist_path: str | Path) -> dict:
    """Flag registrable domains present in the blacklist file, including
    parent-domain matches."""
    path = Path(blacklist_path)
    if not path.exists():
        raise MetricsError("io_error", str(path))
    blacklist = {ln.strip().lower() for ln in path.read_text().splitlines()
                 if ln.strip() and not ln.startswith("#")}
    suffixes = load_public_suffixes()
    domains = sorted({registrable_domain(_host_of(u), suffixes) for u in urls})

    def flagged(domain: str) -> bool:
        labels = domain.split(".")
        return any(".".join(labels[i:]) in blacklist
                   for i in range(len(labels)))

    hit = [d for d in domains if flagged(d)]
    return {"distinct_domains": len(domains),
            "flagged_fraction": len(hit) / len(domains) if domains else 0.0,
            "flagged": hit}


# -- sequences ---------------------------------------------------------------

@dataclass
class SequenceEntry:
    phone: str
    starting_platform: str
    sequence: list[str]
    inter_osn_latency: float | None


def first_appearance_sequence(phone_canonical: str,
                              posts: list[Post]) -> SequenceEntry:
    """Platforms ordered by earliest post; timestamp ties break on the fixed
    TW, FB, GP, YT, FL order. Latency is the gap between the start platform's
    first post and the first post on any other platform; None when the phone
    stays on one platform."""
    if not posts:
        raise MetricsError("insufficient_posts", phone_canonical)
    earliest: dict[str, float] = {}
    for post in posts:
        cur = earliest.get(post.platform)
        if cur is None or post.timestamp < cur:
            earliest[post.platform] = post.timestamp
    ordered = sorted(earliest,
                     key=lambda p: (earliest[p], PLATFORM_ORDER.index(p)))
    latency = None
    if len(ordered) > 1:
        latency = earliest[ordered[1]] - earliest[ordered[0]]
    return SequenceEntry(phone=phone_canonical, starting_platform=ordered[0],
                         sequence=ordered, inter_osn_latency=latency)


def sequence_summary(entries: list[SequenceEntry]) -> dict:
    starts = Counter(e.starting_platform for e in entries)
    seqs = Counter(tuple(e.sequence) for e in entries)
    most_common = seqs.most_common(1)[0][0] if seqs else ()
    histogram = {p: starts.get(p, 0) for p in PLATFORM_ORDER}
    return {"starting_platform_histogram": histogram,
            "most_common_sequence": list(most_common)}


# -- aggregates --------------------------------------------------------------

def origin_distribution(campaigns: list[Campaign],
                        post_counts: dict[str, int] | None = None) -> dict:
    """Country histogram over campaigns with an explicit unknown bucket."""
    out: dict[str, dict] = {}
    for c in campaigns:
        country = c.origin_country or "unknown"
        bucket = out.setdefault(country, {"campaign_count": 0, "post_count": 0})
        bucket["campaign_count"] += 1
        bucket["post_count"] += (post_counts or {}).get(c.campaign_id,
                                                        len(c.post_ids))
    return out


def account_activity_timeline(posts: list[Post], period: str = "week") -> dict:
    """Per-period new accounts (first-ever post), post volume, and the
    posts-per-account distribution."""
    if period == "day":
        span = SECONDS_PER_DAY
    elif period == "week":
        span = 7 * SECONDS_PER_DAY
    else:
        raise MetricsError("bad_period", period)
    first_post: dict[tuple[str, str], float] = {}
    for post in posts:
        key = (post.platform, post.user_id)
        if key not in first_post or post.timestamp < first_post[key]:
            first_post[key] = post.timestamp
    if not posts:
        return {"period": period, "new_accounts": {}, "posts": {},
                "posts_per_account": {}}
    origin = min(p.timestamp for p in posts)
    bucket = lambda ts: int((ts - origin) // span)
    new_accounts = Counter(bucket(ts) for ts in first_post.values())
    per_period_posts = Counter(bucket(p.timestamp) for p in posts)
    per_account = Counter((p.platform, p.user_id) for p in posts)
    dist = Counter(per_account.values())
    return {"period": period,
            "new_accounts": dict(sorted(new_accounts.items())),
            "posts": dict(sorted(per_period_posts.items())),
            "posts_per_account": dict(sorted(dist.items()))}


# -- the combined per-campaign record ---------------------------------------

def campaign_metrics(campaign: Campaign,
                     posts_by_key: dict[tuple[str, str], Post],
                     accounts: dict[tuple[str, str], Account],
                     thresholds: Thresholds,
                     engagement_actors=None) -> dict:
    posts = [posts_by_key[k] for k in sorted(campaign.post_ids)
             if k in posts_by_key]
    per_platform = Counter(p.platform for p in posts)
    campaign_accounts = [accounts[k] for k in sorted(campaign.user_ids)
                         if k in accounts]
    phones = {ph.canonical for ph in campaign.phones}
    entries = []
    for canonical in sorted(phones):
        phone_posts = [p for p in posts
                       if any(x.canonical == canonical for x in p.phones)]
        if phone_posts:
            entries.append(first_appearance_sequence(canonical, phone_posts))
    try:
        automation = automation_fraction(posts, thresholds)
    except MetricsError:
        automation = None
    return {
        "campaign_id": campaign.campaign_id,
        "post_count": len(posts),
        "per_platform_posts": {p: per_platform.get(p, 0)
                               for p in PLATFORM_ORDER},
        "inter_arrival": {
            "overall": inter_arrival_stats(posts, "campaign").get("all"),
            "per_platform": inter_arrival_stats(posts, "platform"),
        },
        "automation": automation,
        "suspension": suspension_stats(campaign_accounts, posts),
        "visibility": collusion_adjusted_visibility(campaign, posts,
                                                    engagement_actors),
        "sequence": {
            "per_phone": [e.__dict__ for e in entries],
            "summary": sequence_summary(entries),
        },
        "attributes": content_attribute_report(posts),
        "cross_references": [
            {"source": s, "target": t, "post": list(k)}
            for s, t, k in detect_cross_references(posts)],
    }
