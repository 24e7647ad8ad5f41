"""Seeded synthetic multi-platform corpora with planted campaigns and ground
truth, plus partition scoring against that truth.

Generation is single-threaded and fully deterministic given the seed; the
emitted files use the same JSON Lines schemas the ingest module reads.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from pathlib import Path

PLATFORMS = ("TW", "FB", "GP", "YT", "FL")

_PHONE_FORMATS = (
    "{a}-{b}-{c}-{d}",
    "{a}({b}){c}-{d}",
    "{a}({b}) {c}-{d}",
    "{a}.{b}.{c}.{d}",
    "{a} {b} {c} {d}",
    "{a}{b}{c}{d}",
)

_OSN_URL = {"TW": "twitter.com/i/status", "FB": "fb.me", "GP": "plus.google.com",
            "YT": "youtu.be", "FL": "flic.kr"}


class SynthError(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class CampaignSpec:
    name: str
    phone_count: int
    account_count: int
    post_count: int
    vocabulary: list[str]
    platform_mix: dict[str, float] = field(
        default_factory=lambda: {"TW": 0.5, "FB": 0.2, "GP": 0.15,
                                 "YT": 0.1, "FL": 0.05})
    start_platform: str | None = None
    posting_rate: float = 120.0
    suspension_fraction: float = 0.0
    engagement_mean_likes: float = 2.0
    engagement_mean_shares: float = 1.0
    cross_reference_rate: float = 0.0
    hashtag_rate: float = 0.5
    photo_rate: float = 0.3
    collusion_rate: float = 0.0

    def validate(self):
        if abs(sum(self.platform_mix.values()) - 1.0) > 1e-9:
            raise SynthError("invalid_spec",
                             f"{self.name}: platform weights must sum to 1")
        for attr in ("suspension_fraction", "cross_reference_rate",
                     "hashtag_rate", "photo_rate", "collusion_rate"):
            v = getattr(self, attr)
            if not 0.0 <= v <= 1.0:
                raise SynthError("invalid_spec", f"{self.name}: {attr}={v}")
        if min(self.phone_count, self.account_count, self.post_count) < 1:
            raise SynthError("invalid_spec", f"{self.name}: counts must be >= 1")
        if not self.vocabulary:
            raise SynthError("invalid_spec", f"{self.name}: empty vocabulary")
        if self.start_platform and self.start_platform not in PLATFORMS:
            raise SynthError("invalid_spec", self.start_platform)
        active = [p for p in PLATFORMS if self.platform_mix.get(p, 0) > 0]
        if self.start_platform and self.start_platform not in active:
            raise SynthError("invalid_spec",
                             f"{self.name}: start_platform needs a nonzero "
                             "platform_mix weight")
        if self.account_count < len(active):
            raise SynthError("invalid_spec",
                             f"{self.name}: need at least one account per "
                             "active platform")


@dataclass
class SynthSpec:
    seed: int
    campaigns: list[CampaignSpec]
    background_phoneless: int = 0
    background_benign_phone: int = 0

    def validate(self):
        names = [c.name for c in self.campaigns]
        if len(names) != len(set(names)):
            raise SynthError("invalid_spec", "duplicate campaign names")
        for c in self.campaigns:
            c.validate()

    @classmethod
    def from_file(cls, path: str | Path) -> "SynthSpec":
        data = json.loads(Path(path).read_text())
        campaigns = [CampaignSpec(**c) for c in data["campaigns"]]
        return cls(seed=data["seed"], campaigns=campaigns,
                   background_phoneless=data.get("background_phoneless", 0),
                   background_benign_phone=data.get("background_benign_phone", 0))


@dataclass
class GroundTruth:
    posts: dict[str, str]
    phones: dict[str, str]
    accounts: dict[str, dict]

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(asdict(self), sort_keys=True, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        data = json.loads(Path(path).read_text())
        return cls(**data)


def _format_phone(canonical: str, rng: random.Random) -> str:
    if len(canonical) == 11:
        a, b, c, d = canonical[0], canonical[1:4], canonical[4:7], canonical[7:]
    else:
        a, b, c, d = canonical[:2], canonical[2:5], canonical[5:8], canonical[8:]
    return rng.choice(_PHONE_FORMATS).format(a=a, b=b, c=c, d=d)


def _mean_count(rng: random.Random, mean: float) -> int:
    if mean <= 0:
        return 0
    return min(int(rng.expovariate(1.0 / mean)), int(mean * 10) + 1)


def generate_corpus(spec: SynthSpec, out_dir: str | Path) -> dict:
    """Write posts.jsonl, snapshots.jsonl, engagement_actors.jsonl, and
    truth.json under out_dir; returns a ledger of emitted counts."""
    spec.validate()
    rng = random.Random(spec.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    posts_lines: list[str] = []
    snapshot_lines: list[str] = []
    actor_lines: list[str] = []
    truth = GroundTruth(posts={}, phones={}, accounts={})
    used_phones: set[str] = set()
    filler_counter = 0
    base_time = 1_600_000_000

    def fresh_phone(prefix: str) -> str:
        while True:
            cand = prefix + "".join(str(rng.randrange(10)) for _ in range(7))
            if cand not in used_phones:
                used_phones.add(cand)
                return cand

    emitted = {"campaign_posts": 0, "noise_posts": 0, "accounts": 0}

    for ci, camp in enumerate(spec.campaigns):
        phones = [fresh_phone("1888") for _ in range(camp.phone_count)]
        for ph in phones:
            truth.phones[ph] = camp.name

        mix_platforms = [p for p in PLATFORMS if camp.platform_mix.get(p, 0) > 0]
        weights = [camp.platform_mix[p] for p in mix_platforms]
        accounts = []
        for k in range(camp.account_count):
            # Round-robin over active platforms so every platform in the mix
            # has at least one author.
            platform = (mix_platforms[k % len(mix_platforms)]
                        if k < len(mix_platforms)
                        else rng.choices(mix_platforms, weights)[0])
            user_id = f"u{ci}_{k}"
            accounts.append({"platform": platform, "user_id": user_id,
                             "screen_name": f"{camp.name}_{k}",
                             "display_name": f"{camp.name} {k}",
                             "followers": rng.randrange(10, 5000),
                             "friends": rng.randrange(10, 1000),
                             "verified": False})
            truth.accounts[f"{platform}|{user_id}"] = {
                "campaign": camp.name, "suspended": False}
        by_platform: dict[str, list[dict]] = {}
        for acct in accounts:
            by_platform.setdefault(acct["platform"], []).append(acct)

        ts = float(base_time + ci * 50)
        first_post_of_phone: set[str] = set()
        for i in range(camp.post_count):
            phone = phones[i % len(phones)]
            if camp.start_platform and phone not in first_post_of_phone:
                platform = camp.start_platform
            else:
                platform = rng.choices(mix_platforms, weights)[0]
            first_post_of_phone.add(phone)
            author = rng.choice(by_platform[platform])

            tokens = list(camp.vocabulary)
            n_fillers = rng.choice((1, 2))
            fillers = []
            for _ in range(n_fillers):
                fillers.append(f"zz{filler_counter:06d}")
                filler_counter += 1
            words = tokens + fillers
            if rng.random() < camp.hashtag_rate:
                words[0] = "#" + words[0]
            text = " ".join(words) + " call " + _format_phone(phone, rng)
            urls = []
            if rng.random() < camp.cross_reference_rate:
                others = [p for p in PLATFORMS if p != platform]
                target = rng.choice(others)
                urls.append(f"http://{_OSN_URL[target]}/x{ci}{i}")
            likes = _mean_count(rng, camp.engagement_mean_likes)
            shares = _mean_count(rng, camp.engagement_mean_shares)
            post_id = f"p{ci}_{i}"
            record = {
                "post_id": post_id, "platform": platform,
                "author": author, "timestamp": round(ts, 3), "text": text,
                "urls": urls,
                "engagement": {"likes": likes,
                               "shares_or_retweets_or_reshares": shares,
                               "reactions": 0},
                "client": rng.choice(("twittbot.net", "web", "app")),
                "language": "en", "has_photo": rng.random() < camp.photo_rate,
            }
            posts_lines.append(json.dumps(record, sort_keys=True))
            truth.posts[f"{platform}|{post_id}"] = camp.name
            emitted["campaign_posts"] += 1

            vis = likes + shares if platform != "FL" else 0
            n_colluders = min(int(round(vis * camp.collusion_rate)),
                              vis, len(accounts))
            actors = [[a["platform"], a["user_id"]]
                      for a in rng.sample(accounts, n_colluders)]
            actors += [["EXT", f"ext{ci}_{i}_{j}"]
                       for j in range(vis - n_colluders)]
            actor_lines.append(json.dumps(
                {"platform": platform, "post_id": post_id, "actors": actors},
                sort_keys=True))

            ts += camp.posting_rate * (0.5 + rng.random())

        n_suspend = int(round(camp.suspension_fraction * len(accounts)))
        to_suspend = rng.sample(accounts, n_suspend)
        suspended_keys = {(a["platform"], a["user_id"]) for a in to_suspend}
        for acct in accounts:
            key = (acct["platform"], acct["user_id"])
            status = "suspended" if key in suspended_keys else "active"
            if status == "suspended":
                truth.accounts[f"{key[0]}|{key[1]}"]["suspended"] = True
            snapshot_lines.append(json.dumps(
                {"platform": key[0], "user_id": key[1], "status": status,
                 "checked_at": round(ts + 86400, 3)}, sort_keys=True))
        emitted["accounts"] += len(accounts)

    # Background noise: phoneless chatter plus benign low-volume phones.
    noise_ts = float(base_time)
    for i in range(spec.background_phoneless):
        words = [f"noise{rng.randrange(10000)}" for _ in range(6)]
        record = {"post_id": f"bgn{i}", "platform": rng.choice(PLATFORMS),
                  "author": {"user_id": f"bg{i}", "display_name": f"bg {i}"},
                  "timestamp": round(noise_ts + i * 37.0, 3),
                  "text": " ".join(words), "urls": [],
                  "engagement": {"likes": 0,
                                 "shares_or_retweets_or_reshares": 0,
                                 "reactions": 0}}
        posts_lines.append(json.dumps(record, sort_keys=True))
        emitted["noise_posts"] += 1
    for i in range(spec.background_benign_phone):
        phone = fresh_phone("1877")
        words = [f"benign{rng.randrange(10000)}" for _ in range(6)]
        record = {"post_id": f"bgp{i}", "platform": rng.choice(PLATFORMS),
                  "author": {"user_id": f"bb{i}", "display_name": f"bb {i}"},
                  "timestamp": round(noise_ts + i * 53.0, 3),
                  "text": " ".join(words) + " call " + _format_phone(phone, rng),
                  "urls": [],
                  "engagement": {"likes": 0,
                                 "shares_or_retweets_or_reshares": 0,
                                 "reactions": 0}}
        posts_lines.append(json.dumps(record, sort_keys=True))
        emitted["noise_posts"] += 1

    (out / "posts.jsonl").write_text("\n".join(posts_lines) + "\n"
                                     if posts_lines else "")
    (out / "snapshots.jsonl").write_text("\n".join(snapshot_lines) + "\n"
                                         if snapshot_lines else "")
    (out / "engagement_actors.jsonl").write_text("\n".join(actor_lines) + "\n"
                                                 if actor_lines else "")
    truth.save(out / "truth.json")
    emitted["files"] = ["posts.jsonl", "snapshots.jsonl",
                        "engagement_actors.jsonl", "truth.json"]
    return emitted


def load_engagement_actors(path: str | Path) -> dict:
    actors = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        actors[(rec["platform"], rec["post_id"])] = [tuple(a) for a in
                                                     rec["actors"]]
    return actors


def evaluate_clustering(predicted: dict[str, set], truth_assignment: dict) -> dict:
    """Pairwise co-membership precision/recall/F1 and the adjusted Rand
    index for a predicted partition against ground truth. Both partitions
    must cover exactly the same item ids."""
    pred_of = {}
    for cid, items in predicted.items():
        for item in items:
            if item in pred_of:
                raise SynthError("id_mismatch", f"{item} in two predicted clusters")
            pred_of[item] = cid
    if set(pred_of) != set(truth_assignment):
        raise SynthError("id_mismatch",
                         f"{len(pred_of)} predicted vs {len(truth_assignment)} true items")

    from collections import Counter
    cont = Counter((pred_of[i], truth_assignment[i]) for i in pred_of)
    pred_sizes = Counter(pred_of.values())
    true_sizes = Counter(truth_assignment.values())
    n = len(pred_of)

    def c2(x: int) -> int:
        return x * (x - 1) // 2

    tp = sum(c2(v) for v in cont.values())
    pred_pairs = sum(c2(v) for v in pred_sizes.values())
    true_pairs = sum(c2(v) for v in true_sizes.values())
    precision = Fraction(tp, pred_pairs) if pred_pairs else Fraction(1)
    recall = Fraction(tp, true_pairs) if true_pairs else Fraction(1)
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else Fraction(0))

    total_pairs = c2(n)
    if total_pairs == 0:
        ari = Fraction(1)
    else:
        expected = Fraction(pred_pairs * true_pairs, total_pairs)
        max_index = Fraction(pred_pairs + true_pairs, 2)
        ari = (Fraction(1) if max_index == expected
               else (tp - expected) / (max_index - expected))
    return {"precision": float(precision), "recall": float(recall),
            "f1": float(f1), "ari": float(ari),
            "exact": {"precision": precision, "recall": recall,
                      "f1": f1, "ari": ari}}
