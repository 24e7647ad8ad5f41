"""Independent brute-force reference implementations used to cross-check the
package's statistics. Deliberately naive: plain loops, no shared code with
the implementations under test."""

from __future__ import annotations

import math


def brute_jaccard(a, b):
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    inter = sum(1 for x in a if x in b)
    union = len(a) + len(b) - inter
    return inter / union


def brute_mean_cross_jaccard(sets1, sets2):
    vals = []
    for s1 in sets1:
        for s2 in sets2:
            vals.append(brute_jaccard(s1, s2))
    return sum(vals) / len(vals)


def brute_edit_distance(s1, s2):
    rows = len(s1) + 1
    cols = len(s2) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if s1[i - 1] == s2[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + cost)
    return d[-1][-1]


def brute_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((x[i] - mx) * (y[i] - my) for i in range(n))
    den = math.sqrt(sum((v - mx) ** 2 for v in x)) * \
        math.sqrt(sum((v - my) ** 2 for v in y))
    return num / den


def brute_gaps(timestamps):
    ts = sorted(timestamps)
    return [ts[i + 1] - ts[i] for i in range(len(ts) - 1)]


def brute_median(vals):
    vals = sorted(vals)
    n = len(vals)
    if n % 2 == 1:
        return vals[n // 2]
    return (vals[n // 2 - 1] + vals[n // 2]) / 2


def brute_percentile_linear(vals, q):
    vals = sorted(vals)
    if len(vals) == 1:
        return vals[0]
    rank = q / 100 * (len(vals) - 1)
    lower = int(rank)
    upper = lower + 1 if lower + 1 < len(vals) else lower
    frac = rank - lower
    return vals[lower] + (vals[upper] - vals[lower]) * frac


def brute_silhouette(token_sets, labels):
    """Mean silhouette with distance 1 - Jaccard; singletons score 0;
    None when fewer than two clusters."""
    if len(set(labels)) < 2:
        return None
    n = len(token_sets)
    dist = [[1.0 - brute_jaccard(token_sets[i], token_sets[j])
             for j in range(n)] for i in range(n)]
    scores = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(dist[i][j] for j in own) / len(own)
        b = min(sum(dist[i][j] for j in range(n)
                    if labels[j] == other) /
                sum(1 for j in range(n) if labels[j] == other)
                for other in set(labels) if other != labels[i])
        scores.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(scores) / n


def brute_pairwise_scores(pred_of, true_of):
    """All-pairs co-membership precision/recall/F1 and ARI."""
    items = sorted(pred_of)
    tp = fp = fn = tn = 0
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            same_pred = pred_of[items[i]] == pred_of[items[j]]
            same_true = true_of[items[i]] == true_of[items[j]]
            if same_pred and same_true:
                tp += 1
            elif same_pred:
                fp += 1
            elif same_true:
                fn += 1
            else:
                tn += 1
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    total = tp + fp + fn + tn
    if total == 0:
        ari = 1.0
    else:
        sum_pred = tp + fp
        sum_true = tp + fn
        expected = sum_pred * sum_true / total
        max_index = (sum_pred + sum_true) / 2
        ari = 1.0 if max_index == expected else \
            (tp - expected) / (max_index - expected)
    return {"precision": precision, "recall": recall, "f1": f1, "ari": ari}


def brute_visibility(posts):
    total = 0
    per = {}
    for p in posts:
        e = p.engagement
        if p.platform == "TW":
            v = e.likes + e.shares
        elif p.platform == "FB":
            v = e.likes + e.reactions + e.shares
        elif p.platform == "GP":
            v = e.likes + e.shares
        elif p.platform == "YT":
            v = e.likes
        else:
            v = 0
        per[p.platform] = per.get(p.platform, 0) + v
        if p.platform != "FL":
            total += v
    return per, total


def brute_sequence(posts):
    order = ["TW", "FB", "GP", "YT", "FL"]
    firsts = {}
    for p in posts:
        if p.platform not in firsts or p.timestamp < firsts[p.platform]:
            firsts[p.platform] = p.timestamp
    seq = sorted(firsts, key=lambda pl: (firsts[pl], order.index(pl)))
    latency = firsts[seq[1]] - firsts[seq[0]] if len(seq) > 1 else None
    return seq, latency


def brute_suspension_lifetimes(accounts, posts):
    lifetimes = {}
    for acct in accounts:
        if acct.status != "suspended":
            continue
        stamps = [p.timestamp for p in posts
                  if (p.platform, p.user_id) == (acct.platform, acct.user_id)]
        if stamps:
            lifetimes[(acct.platform, acct.user_id)] = \
                (max(stamps) - min(stamps)) / 86400.0
    return lifetimes
