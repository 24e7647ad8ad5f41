"""Cross-platform identity matching via normalized edit-distance similarity,
suspension asymmetry, and the intelligence-sharing savings estimate.

Similarity follows the convention 1.0 = identical, 0.0 = completely
different (the inverse of textbook edit distance).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal

from .ingest import Account, Thresholds


class IdentityError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


_WS_RE = re.compile(r"\s+")


def _normalize(s: str) -> str:
    return _WS_RE.sub(" ", s.strip().lower())


def edit_distance(s1: str, s2: str) -> int:
    """Unit-cost insert/delete/substitute, two-row DP."""
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, 1):
        cur = [i]
        for j, c2 in enumerate(s2, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (c1 != c2)))
        prev = cur
    return prev[-1]


def name_similarity(s1: str, s2: str) -> float:
    """1 - editdistance / max length, over lowercased, whitespace-collapsed
    strings. Both empty gives 1.0; exactly one empty gives 0.0."""
    a, b = _normalize(s1), _normalize(s2)
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


@dataclass
class IdentityCluster:
    members: list[tuple[str, str]]
    platforms: list[str]
    evidence: list[dict] = field(default_factory=list)


def _pair_score(a: Account, b: Account) -> tuple[float, str] | None:
    if a.screen_name and b.screen_name:
        return name_similarity(a.screen_name, b.screen_name), "screen_name"
    if a.display_name and b.display_name:
        return name_similarity(a.display_name, b.display_name), "display_name"
    return None


def match_identities(accounts: list[Account],
                     thresholds: Thresholds) -> list[IdentityCluster]:
    """Connected components over account pairs whose screen-name similarity
    (or display-name similarity, when either side lacks a screen name) meets
    identity_similarity. Output order is input-order independent."""
    accounts = sorted(accounts, key=lambda a: a.key)
    n = len(accounts)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    evidence: dict[int, list[dict]] = {}
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            scored = _pair_score(accounts[i], accounts[j])
            if scored is None:
                continue
            score, feature = scored
            if score >= thresholds.identity_similarity:
                edges.append((i, j, score, feature))
    for i, j, _, _ in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for i, j, score, feature in edges:
        evidence.setdefault(find(i), []).append(
            {"pair": [list(accounts[i].key), list(accounts[j].key)],
             "score": round(score, 6), "feature": feature})
    clusters = []
    for root, idxs in sorted(groups.items()):
        if len(idxs) < 2:
            continue
        members = [accounts[i].key for i in idxs]
        platforms = sorted({p for p, _ in members})
        clusters.append(IdentityCluster(members=members, platforms=platforms,
                                        evidence=evidence.get(root, [])))
    return clusters


def identity_suspension_stats(clusters: list[IdentityCluster],
                              accounts: dict[tuple[str, str], Account]) -> dict:
    """Per-platform suspension fraction among matched identities, plus the
    relative asymmetry between every platform pair with defined fractions."""
    per_platform: dict[str, dict] = {}
    for cluster in clusters:
        for key in cluster.members:
            platform = key[0]
            bucket = per_platform.setdefault(platform,
                                             {"total": 0, "suspended": 0})
            bucket["total"] += 1
            acct = accounts.get(key)
            if acct is not None and acct.status == "suspended":
                bucket["suspended"] += 1
    fractions = {p: (b["suspended"] / b["total"] if b["total"] else None)
                 for p, b in per_platform.items()}
    asymmetry = {}
    for p1, f1 in fractions.items():
        for p2, f2 in fractions.items():
            if p1 >= p2 or f1 is None or f2 is None:
                continue
            hi, lo = max(f1, f2), min(f1, f2)
            if hi > 0:
                asymmetry[f"{p1 if f1 >= f2 else p2}_vs_{p2 if f1 >= f2 else p1}"] = \
                    (hi - lo) / hi
    return {"per_platform": per_platform, "fractions": fractions,
            "asymmetry": asymmetry}


@dataclass
class SavingsEstimate:
    audience_counts: dict[str, int]
    seed_platform: str
    total_victims: int
    cost_per_victim: Decimal
    total_savings: Decimal
    lower_bound: bool = True
    notes: list[str] = field(default_factory=list)


def estimate_cross_platform_savings(audience_counts: dict[str, int],
                                    thresholds: Thresholds,
                                    seed_platform: str = "TW",
                                    reference_total: Decimal | None = None
                                    ) -> SavingsEstimate:
    """Victims = audiences reachable on every platform except the seed;
    savings = victims x cost per victim, exact decimal arithmetic. The
    result is a lower bound (suspended accounts' audiences are missing).
    When a previously reported reference_total is supplied and disagrees
    with the exact product, the discrepancy is annotated."""
    if not audience_counts:
        raise IdentityError("missing_audience_data")
    included = {p: c for p, c in audience_counts.items() if p != seed_platform}
    total_victims = sum(included.values())
    cost = Decimal(str(thresholds.cost_per_victim_usd))
    total = cost * total_victims
    notes = ["reported totals are a lower bound: audiences of suspended or "
             "deleted accounts could not be retrieved"]
    if reference_total is not None and reference_total != total:
        notes.append(
            f"discrepancy: exact product {total_victims} x {cost} = {total} "
            f"USD differs from the previously reported figure of "
            f"{reference_total} USD")
    return SavingsEstimate(
        audience_counts=dict(audience_counts), seed_platform=seed_platform,
        total_victims=total_victims, cost_per_victim=cost, total_savings=total,
        notes=notes)
