"""Regenerate the bundled fixtures under src/infodiet/data/fixtures/.

    python scripts/make_fixtures.py

Output is a pure function of the seeds below, so re-running is a no-op
unless this script changes.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "infodiet" / "data" / "fixtures"


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")


def write_edges(path, edges):
    path.write_text("follower,followee\n" + "".join(f"{a},{b}\n" for a, b in edges), encoding="utf-8")


# --------------------------------------------------------------------------
# mini corpus: a handful of hand-written tweets for the golden diet report
# --------------------------------------------------------------------------


def make_mini(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    experts, etweets = [], []
    groups = {
        "sp": (["basketball", "sports", "nba fans"], 10),
        "po": (["politics", "law", "journalists"], 10),
        "en": (["music", "entertainment", "singers"], 10),
    }
    for prefix, (tags, n) in groups.items():
        for i in range(n):
            experts.append({"user": f"{prefix}{i:02d}", "tags": tags})
    experts.append({"user": "nobody", "tags": ["misc", "random stuff"]})

    def post(user, text):
        etweets.append({"id": f"e{len(etweets):04d}", "user": user, "ts": 1418000000 + len(etweets), "text": text,
                        "retweet_of": None})

    variants = [
        "https://www.nytimes.com/politics/",
        "http://nytimes.com/politics?ref=tw",
        "https://NYTimes.com/Politics#top",
    ]
    for i in range(10):
        post(f"sp{i:02d}", "what a game #NBA")
        post(f"po{i:02d}", f"read this {variants[i % 3]} #Election")
        post(f"en{i:02d}", "new album out #music")
    post("sp00", "voting today #election")  # election: 11 posters, politics wins
    for i in range(9):
        post(f"en{i:02d}", "red carpet #oscars")  # 9 posters: below support
    post("nobody", "#nba #music https://nytimes.com/politics")

    write_jsonl(out / "experts.jsonl", experts)
    write_jsonl(out / "expert_tweets.jsonl", etweets)

    tweets = [
        ("t01", "alice", "Lakers win! #NBA"),
        ("t02", "alice", "#nba and #election night https://www.nytimes.com/politics/"),
        ("t03", "bob", "just chatting today"),
        ("t04", "bob", "#oscars tonight #music"),
        ("t05", "carol", "https://example.com/a/b/?x=1 interesting"),
        ("t06", "carol", "#Election #election #ELECTION"),
        ("t07", "dave", "listening #music https://nyti.ms/XyZ"),
        ("t08", "dave", "good morning"),
        ("t09", "erin", "#nba #oscars #music #election"),
        ("t10", "erin", "#unknownthing"),
    ]
    write_jsonl(out / "tweets.jsonl", [
        {"id": tid, "user": u, "ts": 1418100000 + 60 * i, "text": text, "retweet_of": None}
        for i, (tid, u, text) in enumerate(tweets)
    ])
    write_edges(out / "graph.csv", [("zoe", "alice"), ("zoe", "bob"), ("yan", "carol"), ("yan", "dave"),
                                    ("yan", "erin"), ("xia", "alice")])


# --------------------------------------------------------------------------
# skewed-user fixture for the simulation harness
# --------------------------------------------------------------------------

TOPICS = {
    "sports": (["basketball", "sports"], ["nba", "worldcup", "nfl", "cricket"], "espn.com/story"),
    "politics-law": (["politics", "law"], ["election", "senate", "congress", "scotus"], "politico.com/news"),
    "entertainment": (["movies", "entertainment"], ["oscars", "grammys", "netflix", "boxoffice"], "variety.com/film"),
    "business-finance": (["economics", "marketing"], ["stocks", "wallstreet", "ipo", "fed"], "wsj.com/markets"),
    "technology": (["programming", "technology"], ["ai", "iphone", "startup", "opensource"], "theverge.com/tech"),
    "science": (["physics", "biology"], ["nasa", "space", "crispr", "climatescience"], "nature.com/news"),
    "health-fitness": (["healthcare", "disease"], ["ebola", "vaccine", "fitness", "nutrition"], "webmd.com/news"),
    "food-drink": (["food", "wine"], ["recipe", "foodie", "craftbeer", "brunch"], "eater.com/food"),
    "environment": (["climate", "energy"], ["climatechange", "solar", "wildlife", "cop20"], "grist.org/climate"),
    "arts-crafts": (["art", "design"], ["museum", "theatre", "artbasel", "design"], "artnews.com/art"),
    "education-books": (["books", "teachers"], ["books", "edchat", "reading", "library"], "edweek.org/news"),
    "religion": (["christianity", "islam"], ["faith", "pope", "prayer", "christmas"], "religionnews.com/story"),
}
T0 = 1418256000  # 2014-12-11 00:00 UTC
SPAN = 24 * 3600


def make_skewed(out: Path, seed: int = 7):
    rng = random.Random(seed)
    out.mkdir(parents=True, exist_ok=True)

    experts, etweets = [], []
    for topic, (tags, hashtags, site) in TOPICS.items():
        for i in range(12):
            user = f"x_{topic}_{i:02d}"
            experts.append({"user": user, "tags": tags})
            for h in hashtags:
                etweets.append((user, f"#{h} thoughts"))
            etweets.append((user, f"must read https://{site}/{i}"))
            etweets.append((user, f"https://{site}/top via {user}"))
    # cross-topic noise: a few experts also use other topics' tags
    topic_names = list(TOPICS)
    for k in range(40):
        a, b = rng.sample(topic_names, 2)
        user = f"x_{a}_{rng.randrange(12):02d}"
        etweets.append((user, f"#{rng.choice(TOPICS[b][1])} interesting"))
    rng.shuffle(etweets)
    write_jsonl(out / "experts.jsonl", experts)
    write_jsonl(out / "expert_tweets.jsonl", [
        {"id": f"e{i:05d}", "user": u, "ts": T0 - 86400 + i, "text": t, "retweet_of": None}
        for i, (u, t) in enumerate(etweets)
    ])

    def text_for(topic):
        _, hashtags, site = TOPICS[topic]
        r = rng.random()
        if r < 0.6:
            return f"{rng.choice(['big news', 'wow', 'today', 'live'])} #{rng.choice(hashtags)}"
        if r < 0.85:
            return f"read https://{site}/top #{rng.choice(hashtags)}"
        return f"https://{site}/top"

    stream, edges = [], []
    nid = 0

    def tweet(user, ts, text, rt=None):
        nonlocal nid
        nid += 1
        tid = f"s{nid:05d}"
        stream.append({"id": tid, "user": user, "ts": ts, "text": text, "retweet_of": rt})
        return tid

    # alice's followings post sports, with the odd entertainment tweet
    sports_accounts = [f"sp{i}" for i in range(5)]
    diverse = {t: [f"d_{t}_{i}" for i in range(2)] for t in topic_names if t != "sports"}
    diverse_accounts = [a for accs in diverse.values() for a in accs]
    originals = []
    for acct in sports_accounts:
        ts = T0 + rng.randrange(600)
        while ts < T0 + SPAN:
            topic = "sports" if rng.random() < 0.9 else "entertainment"
            tweet(acct, ts, text_for(topic))
            ts += rng.randrange(900, 2400)
    for topic, accs in diverse.items():
        for acct in accs:
            ts = T0 + rng.randrange(600)
            while ts < T0 + SPAN:
                originals.append((tweet(acct, ts, text_for(topic)), acct, ts, topic))
                ts += rng.randrange(1200, 3600)

    # diverse accounts retweet each other within minutes, creating neighbourhood popularity
    for tid, author, ts, topic in originals:
        n_rt = rng.choice([0, 1, 1, 2, 3])
        for rter in rng.sample([a for a in diverse_accounts if a != author], n_rt):
            src = next(s for s in stream if s["id"] == tid)
            tweet(rter, ts + rng.randrange(30, 900), f"RT @{author}: {src['text']}", rt=tid)

    for a in sports_accounts:
        edges.append(("alice", a))
        for d in rng.sample(diverse_accounts, 8):
            edges.append((a, d))
    # bob already follows a broad set of accounts
    for topic, accs in diverse.items():
        edges.append(("bob", accs[0]))
    edges.append(("bob", "sp0"))
    for d in diverse_accounts:
        edges.append((d, rng.choice(diverse_accounts)))
    edges = sorted({e for e in edges if e[0] != e[1]})

    stream.sort(key=lambda s: (s["ts"], s["id"]))
    write_jsonl(out / "tweets.jsonl", stream)
    write_edges(out / "graph.csv", edges)
    (out / "sim.toml").write_text(
        "\n".join([
            'tweets = "tweets.jsonl"',
            'experts = "experts.jsonl"',
            'expert_tweets = "expert_tweets.jsonl"',
            'graph = "graph.csv"',
            'users = ["alice", "bob"]',
            'baseline = "nytimes"',
            "min_support = 10",
            "alpha = 0.0001",
            "snapshot_interval = 1800",
            "top_k = 10",
            "seed = 0",
            "dedupe_across_snapshots = true",
            "",
        ]),
        encoding="utf-8",
    )


if __name__ == "__main__":
    make_mini(ROOT / "mini")
    make_skewed(ROOT / "skewed")
    print(f"fixtures written to {ROOT}")
