"""Token profiles, per-phone post assignment, Jaccard campaign merging, and
silhouette-based threshold evaluation.

Pairwise Jaccard work is vectorized with numpy over a token-incidence matrix;
the campaign merge itself is a single-threaded connected-components pass.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .ingest import Post, Thresholds
from .phone_core import PhoneNumber


class ClusterError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class TokenProfile:
    phone: PhoneNumber
    tokens: set[str]
    doc_frequency: dict[str, float]


@dataclass
class PhoneCluster:
    phone: PhoneNumber
    profile: TokenProfile
    posts: list[Post]

    @property
    def post_ids(self) -> set[tuple[str, str]]:
        return {p.key for p in self.posts}


@dataclass
class Campaign:
    campaign_id: str
    phones: list[PhoneNumber]
    post_ids: set[tuple[str, str]]
    user_ids: set[tuple[str, str]]
    label: str = "unreviewed"
    topic: str | None = None
    origin_country: str | None = None
    label_history: list[dict] = field(default_factory=list)


_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased unigrams: URLs and @-mentions removed, hashtag bodies kept,
    tokens shorter than 2 chars and pure-digit tokens dropped."""
    cleaned = _MENTION_RE.sub(" ", _URL_RE.sub(" ", text.lower()))
    return [t for t in _TOKEN_RE.findall(cleaned)
            if len(t) >= 2 and not t.isdigit()]


def load_stopwords() -> set[str]:
    text = resources.files("phonecamp.data").joinpath("stopwords.txt").read_text()
    return {ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")}


_STOPWORDS: set[str] | None = None


def _stopwords() -> set[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = load_stopwords()
    return _STOPWORDS


def post_token_set(post: Post) -> frozenset[str]:
    return frozenset(tokenize(post.text))


def build_token_profile(phone: PhoneNumber, posts: list[Post],
                        thresholds: Thresholds) -> TokenProfile:
    """Representative tokens of a phone: those present in at least
    profile_doc_frequency of its posts, minus stopwords and the phone's own
    digits, capped at the highest-frequency profile_token_cap tokens (ties
    broken lexicographically). An empty profile is a legal outcome."""
    if not posts:
        raise ClusterError("empty_posts", phone.canonical)
    n = len(posts)
    counts: dict[str, int] = {}
    for post in posts:
        for tok in post_token_set(post):
            counts[tok] = counts.get(tok, 0) + 1
    stop = _stopwords()
    df = {tok: c / n for tok, c in counts.items()
          if tok not in stop and tok != phone.canonical}
    passing = sorted((tok for tok, f in df.items()
                      if f >= thresholds.profile_doc_frequency),
                     key=lambda t: (-df[t], t))
    kept = passing[:thresholds.profile_token_cap]
    return TokenProfile(phone=phone, tokens=set(kept),
                        doc_frequency={t: df[t] for t in kept})


def assign_posts_to_phone(profile: TokenProfile, candidates: list[Post],
                          thresholds: Thresholds) -> PhoneCluster:
    """Keep candidates whose tokens cover at least token_overlap of the
    profile. An empty profile keeps every candidate (degenerate rule)."""
    if not profile.tokens:
        return PhoneCluster(phone=profile.phone, profile=profile,
                            posts=list(candidates))
    size = len(profile.tokens)
    kept = [p for p in candidates
            if len(post_token_set(p) & profile.tokens) / size
            >= thresholds.token_overlap]
    return PhoneCluster(phone=profile.phone, profile=profile, posts=kept)


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 1.0


def _token_matrix(token_sets: list[frozenset[str]],
                  vocab: dict[str, int]) -> np.ndarray:
    mat = np.zeros((len(token_sets), len(vocab)), dtype=np.float32)
    for i, toks in enumerate(token_sets):
        for t in toks:
            mat[i, vocab[t]] = 1.0
    return mat


def _jaccard_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inter = a @ b.T
    sizes_a = a.sum(axis=1)[:, None]
    sizes_b = b.sum(axis=1)[None, :]
    union = sizes_a + sizes_b - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(union > 0, inter / np.maximum(union, 1e-12), 1.0)
    return out


def _pair_seed(c1: PhoneCluster, c2: PhoneCluster) -> int:
    key = "|".join(sorted([c1.phone.canonical, c2.phone.canonical]))
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def phone_pair_similarity(c1: PhoneCluster, c2: PhoneCluster,
                          thresholds: Thresholds | None = None) -> float:
    """Mean Jaccard over cross-pairs of post token sets. Above
    pair_sample_cap pairs, a seeded uniform sample is used; the seed derives
    from the sorted phone pair so the result is symmetric."""
    if not c1.posts or not c2.posts:
        raise ClusterError("empty_cluster")
    cap = thresholds.pair_sample_cap if thresholds else 10000
    # Orient by canonical order so sim(a, b) == sim(b, a) under sampling.
    if c2.phone.canonical < c1.phone.canonical:
        c1, c2 = c2, c1
    sets1 = [post_token_set(p) for p in c1.posts]
    sets2 = [post_token_set(p) for p in c2.posts]
    vocab = {t: i for i, t in enumerate(sorted(set().union(*sets1, *sets2)))}
    if not vocab:
        return 1.0
    n1, n2 = len(sets1), len(sets2)
    if n1 * n2 <= cap:
        m1 = _token_matrix(sets1, vocab)
        m2 = _token_matrix(sets2, vocab)
        return float(_jaccard_matrix(m1, m2).mean())
    rng = np.random.default_rng(_pair_seed(c1, c2))
    idx = rng.integers(0, n1 * n2, size=cap)
    rows, cols = np.divmod(idx, n2)
    m1 = _token_matrix([sets1[i] for i in rows], vocab)
    m2 = _token_matrix([sets2[j] for j in cols], vocab)
    inter = (m1 * m2).sum(axis=1)
    union = m1.sum(axis=1) + m2.sum(axis=1) - inter
    vals = np.where(union > 0, inter / np.maximum(union, 1e-12), 1.0)
    return float(vals.mean())


def campaign_id_for(phones: list[PhoneNumber]) -> str:
    key = ",".join(sorted(p.canonical for p in phones))
    return "c" + hashlib.sha256(key.encode()).hexdigest()[:12]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def pairwise_similarities(clusters: list[PhoneCluster],
                          thresholds: Thresholds) -> dict[tuple[int, int], float]:
    sims: dict[tuple[int, int], float] = {}
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            if clusters[i].posts and clusters[j].posts:
                sims[(i, j)] = phone_pair_similarity(clusters[i], clusters[j],
                                                     thresholds)
    return sims


def merge_phone_clusters(clusters: list[PhoneCluster], thresholds: Thresholds,
                         sims: dict[tuple[int, int], float] | None = None
                         ) -> list[Campaign]:
    """Single-linkage merge: connect phones whose pairwise similarity exceeds
    jaccard_merge, campaigns are the connected components. Posts shared by
    merged clusters are deduplicated by key."""
    clusters = sorted(clusters, key=lambda c: c.phone.canonical)
    if sims is None:
        sims = pairwise_similarities(clusters, thresholds)
    uf = _UnionFind(len(clusters))
    for (i, j), sim in sims.items():
        if sim > thresholds.jaccard_merge:
            uf.union(i, j)
    groups: dict[int, list[PhoneCluster]] = {}
    for i, cluster in enumerate(clusters):
        groups.setdefault(uf.find(i), []).append(cluster)
    raw = []
    for members in groups.values():
        phones = sorted((m.phone for m in members), key=lambda p: p.canonical)
        posts = {p.key: p for m in members for p in m.posts}
        raw.append((campaign_id_for(phones), phones, posts))
    # A post whose phones land in different components would otherwise appear
    # in several campaigns; claim each post for exactly one, in id order.
    raw.sort(key=lambda r: r[0])
    claimed: set[tuple[str, str]] = set()
    campaigns = []
    for cid, phones, posts in raw:
        mine = {k: p for k, p in posts.items() if k not in claimed}
        claimed.update(mine)
        campaigns.append(Campaign(
            campaign_id=cid, phones=phones, post_ids=set(mine),
            user_ids={(p.platform, p.user_id) for p in mine.values()}))
    return campaigns


def mean_silhouette(campaigns: list[Campaign],
                    posts_by_key: dict[tuple[str, str], Post],
                    max_posts: int = 4000, seed: int = 7) -> float | None:
    """Mean silhouette over posts with distance 1 - Jaccard(token sets).
    Singleton campaigns contribute 0; a single-campaign partition is
    undefined (None). Corpora above max_posts are subsampled per campaign,
    seeded, to bound the quadratic distance matrix."""
    labeled = [(idx, key) for idx, c in enumerate(campaigns)
               for key in sorted(c.post_ids)]
    if len({idx for idx, _ in labeled}) < 2:
        return None
    if len(labeled) > max_posts:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(labeled), size=max_posts, replace=False)
        labeled = [labeled[i] for i in sorted(chosen)]
        if len({idx for idx, _ in labeled}) < 2:
            return None
    token_sets = [post_token_set(posts_by_key[key]) for _, key in labeled]
    labels = np.array([idx for idx, _ in labeled])
    vocab_list = sorted(set().union(*token_sets)) if token_sets else []
    vocab = {t: i for i, t in enumerate(vocab_list)}
    mat = _token_matrix(token_sets, vocab)
    dist = 1.0 - _jaccard_matrix(mat, mat)
    np.fill_diagonal(dist, 0.0)
    n = len(labeled)
    scores = np.zeros(n)
    unique_labels = np.unique(labels)
    members = {lab: np.where(labels == lab)[0] for lab in unique_labels}
    for i in range(n):
        own = members[labels[i]]
        if len(own) < 2:
            scores[i] = 0.0
            continue
        a = dist[i, own].sum() / (len(own) - 1)
        b = min(dist[i, members[lab]].mean()
                for lab in unique_labels if lab != labels[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def silhouette_sweep(clusters: list[PhoneCluster], thresholds_grid: list[float],
                     thresholds: Thresholds
                     ) -> list[tuple[float, float | None]]:
    """Mean silhouette of the campaign partition at each merge threshold.
    Thresholds yielding a single campaign report None."""
    clusters = sorted(clusters, key=lambda c: c.phone.canonical)
    sims = pairwise_similarities(clusters, thresholds)
    posts_by_key = {p.key: p for c in clusters for p in c.posts}
    results = []
    for merge_t in thresholds_grid:
        t = Thresholds(**{**thresholds.__dict__, "jaccard_merge": merge_t})
        campaigns = merge_phone_clusters(clusters, t, sims=sims)
        results.append((merge_t, mean_silhouette(campaigns, posts_by_key)))
    return results
