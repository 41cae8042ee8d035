"""Independent brute-force reference computations used by the tests.

Nothing here calls into the code paths being checked; inputs are raw
records and arithmetic is exact (``fractions.Fraction``) where it matters.
"""

import math
from fractions import Fraction

N_TOPICS = 18


def infer_oracle(expert_topics, posts, min_support=10):
    """Expected inference per keyword.

    ``expert_topics``: user -> set of topic indices (possibly empty).
    ``posts``: iterable of (user, keyword) pairs, repeats allowed.
    Returns keyword -> None | (topic, raw_fraction Fraction, score Fraction, support, tied).
    """
    n_t = [0] * N_TOPICS
    for topics in expert_topics.values():
        for t in topics:
            n_t[t] += 1
    posters = {}
    for user, kw in posts:
        posters.setdefault(kw, set())
        if expert_topics.get(user):
            posters[kw].add(user)
    out = {}
    for kw, users in posters.items():
        if len(users) < min_support:
            out[kw] = None
            continue
        scores = {}
        for t in range(N_TOPICS):
            if n_t[t] == 0:
                continue
            c = sum(1 for u in users if t in expert_topics[u])
            if c:
                scores[t] = Fraction(c, len(users)) / n_t[t]
        best = max(scores.values())
        winners = sorted(t for t, s in scores.items() if s == best)
        t = winners[0]
        out[kw] = (t, best * n_t[t], best, len(users), len(winners) > 1)
    return out


def diet_oracle(tweet_keyword_topics):
    """Exact raw diet from per-tweet lists of topic-or-None."""
    weight = [Fraction(0)] * N_TOPICS
    unattributed = Fraction(0)
    counted = keywordless = 0
    for topics in tweet_keyword_topics:
        if not topics:
            keywordless += 1
            continue
        counted += 1
        share = Fraction(1, len(topics))
        for t in topics:
            if t is None:
                unattributed += share
            else:
                weight[t] += share
    return weight, unattributed, counted, keywordless


def kl_oracle(p, q, alpha):
    """Scalar per-term KL in nats with the same additive smoothing."""
    z = 1.0 + len(p) * alpha
    total = 0.0
    for pi, qi in zip(p, q):
        ps = (pi + alpha) / z
        qs = (qi + alpha) / z
        if ps > 0:
            total += ps * math.log(ps / qs)
    return total


def recommend_oracle(user, edges, stream, t_end, window, top_k, include_followings=False):
    """Enumerate every original tweet and score it from scratch.

    ``edges``: iterable of (follower, followee); ``stream``: dicts with
    id/user/ts/retweet_of.
    """
    edges = set(edges)
    direct = {b for a, b in edges if a == user and b != user}
    hood = set(direct)
    for a, b in edges:
        if a in direct and b != a:
            hood.add(b)
    hood.discard(user)
    ranked = []
    for x in stream:
        if x["retweet_of"] is not None or not (t_end - window < x["ts"] <= t_end):
            continue
        if x["user"] == user or (not include_followings and x["user"] in direct):
            continue
        engagers = set()
        for y in stream:
            if not (t_end - window < y["ts"] <= t_end) or y["user"] not in hood:
                continue
            if y["id"] == x["id"] or y["retweet_of"] == x["id"]:
                engagers.add(y["user"])
        if engagers:
            ranked.append((-len(engagers), -x["ts"], x["id"]))
    ranked.sort()
    return [r[2] for r in ranked[:top_k]]
