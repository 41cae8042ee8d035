import csv
import json
from fractions import Fraction

import pytest

from infodiet.cli import dispatch
from infodiet.taxonomy import TOPIC_NAMES, TopicId

from conftest import GOLDEN
from oracles import diet_oracle

SP, PO, EN = TopicId.SPORTS, TopicId.POLITICS_LAW, TopicId.ENTERTAINMENT


def mini_args(mini_dir, *extra):
    return [
        "diet",
        "--tweets", str(mini_dir / "tweets.jsonl"),
        "--experts", str(mini_dir / "experts.jsonl"),
        "--expert-tweets", str(mini_dir / "expert_tweets.jsonl"),
        *extra,
    ]


def test_golden_diet_byte_identical(mini_dir, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        assert dispatch(mini_args(mini_dir, "--out", str(out))) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == (GOLDEN / "mini_diet.json").read_bytes()


def test_golden_matches_hand_oracle():
    # keyword topics per mini-corpus tweet, worked out by hand from the fixture
    # (#oscars has 9 expert posters, below support; nyti.ms and example.com have none)
    per_tweet = [
        [SP], [SP, PO, PO], [], [None, EN], [None], [PO, PO, PO], [EN, None], [], [SP, None, EN, PO], [None],
    ]
    weight, unattributed, counted, keywordless = diet_oracle(per_tweet)
    report = json.loads((GOLDEN / "mini_diet.json").read_text())
    assert report["tweet_count"] == counted == 8
    assert report["keywordless_count"] == keywordless == 2
    assert report["unattributed"] == pytest.approx(float(unattributed), abs=1e-12)
    total = sum(weight)
    for t, name in enumerate(TOPIC_NAMES):
        assert report["weights"][name] == pytest.approx(float(weight[t]), abs=1e-12)
        assert report["distribution"][name] == pytest.approx(float(weight[t] / total), abs=1e-12)
    assert weight[SP] == Fraction(19, 12)
    assert report["coverage"] == 0.5


def test_diet_csv_and_filters(mini_dir, capsys):
    assert dispatch(mini_args(mini_dir, "--format", "csv", "--user", "alice")) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["topic", "weight", "share"]
    table = {r[0]: r for r in rows[1:]}
    assert float(table["sports"][1]) == pytest.approx(1 + 1 / 3)
    assert float(table["politics-law"][2]) == pytest.approx((2 / 3) / 2)

    args = mini_args(mini_dir, "--consumer", "zoe", "--graph", str(mini_dir / "graph.csv"), "--include-unattributed")
    assert dispatch(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tweet_count"] == 3 and report["keywordless_count"] == 1  # alice + bob
    assert report["distribution_with_unattributed"]["unattributed"] == pytest.approx(0.5 / 3)


def test_infer_topics_outputs(mini_dir, tmp_path, capsys):
    args = ["infer-topics", "--experts", str(mini_dir / "experts.jsonl"),
            "--expert-tweets", str(mini_dir / "expert_tweets.jsonl"),
            "--tweets", str(mini_dir / "tweets.jsonl"), "--out-dir", str(tmp_path)]
    assert dispatch(args) == 0
    assert "coverage: 0.5000" in capsys.readouterr().out
    inferred = list(csv.DictReader(open(tmp_path / "inferences.csv")))
    assert {r["keyword"]: r["topic"] for r in inferred} == {
        "election": "politics-law", "music": "entertainment", "nba": "sports",
        "nytimes.com/politics": "politics-law",
    }
    election = next(r for r in inferred if r["keyword"] == "election")
    assert election["support"] == "11" and float(election["raw_fraction"]) == 10 / 11
    missing = {r["keyword"]: r["reason"] for r in csv.DictReader(open(tmp_path / "uninferred.csv"))}
    assert missing["oscars"] == "below_support"
    assert missing["unknownthing"] == "unknown_keyword"


def test_baselines_command(capsys):
    assert dispatch(["baselines", "--name", "nytimes"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["percent"]["politics-law"] == 29.49
    assert sum(out["distribution"].values()) == pytest.approx(1, abs=1e-12)
    assert dispatch(["baselines"]) == 0
    assert set(json.loads(capsys.readouterr().out)) == {"nytimes", "washpost", "economist"}


@pytest.mark.parametrize(
    "argv",
    [
        ["infer-topics", "--min-support", "0"],
        ["frobnicate"],
        ["diet", "--no-such-flag"],
        ["baselines", "--name", "guardian"],
        ["diet", "--tweets", "/nonexistent.jsonl", "--experts", "x", "--expert-tweets", "y"],
        ["simulate", "--config", "/nonexistent.toml"],
    ],
)
def test_validation_errors_exit_1(argv, capsys):
    assert dispatch(argv) == 1
    assert "Error" in capsys.readouterr().err


def test_data_error_exit_2(mini_dir, tmp_path):
    bad = tmp_path / "t.jsonl"
    bad.write_text('{"id": "1", "user": "a", "ts": 1, "text": "#x"}\nbroken\n')
    args = ["diet", "--tweets", str(bad), "--experts", str(mini_dir / "experts.jsonl"),
            "--expert-tweets", str(mini_dir / "expert_tweets.jsonl"), "--strict"]
    assert dispatch(args) == 2
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    args = ["diet", "--tweets", str(bad), "--experts", str(empty), "--expert-tweets", str(bad)]
    assert dispatch(args) == 2


def test_english_filter(mini_dir, tmp_path, capsys):
    words = tmp_path / "words.txt"
    words.write_text("what\na\ngame\nand\nnight\njust\nchatting\ntoday\n")
    assert dispatch(mini_args(mini_dir, "--english-filter")) == 1  # needs a dictionary
    capsys.readouterr()
    assert dispatch(mini_args(mini_dir, "--english-filter", "--dictionary", str(words))) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tweet_count"] + report["keywordless_count"] < 10


def test_config_file_with_override(mini_dir, tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        f'tweets = "{mini_dir / "tweets.jsonl"}"\n'
        f'experts = "{mini_dir / "experts.jsonl"}"\n'
        f'expert_tweets = "{mini_dir / "expert_tweets.jsonl"}"\n'
        "min_support = 9\n"
    )
    assert dispatch(["diet", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["coverage"] == 5 / 8  # oscars now inferred
    assert dispatch(["diet", "--config", str(cfg), "--min-support", "10"]) == 0
    assert json.loads(capsys.readouterr().out)["coverage"] == 0.5
    cfg.write_text(cfg.read_text() + "bogus = 1\n")
    assert dispatch(["diet", "--config", str(cfg)]) == 1


def test_simulate_and_analyze(skewed_dir, tmp_path):
    out = tmp_path / "sim"
    assert dispatch(["simulate", "--config", str(skewed_dir / "sim.toml"), "--out-dir", str(out)]) == 0
    rows = {r["user"]: r for r in csv.DictReader(open(out / "mitigation.csv"))}
    assert rows["alice"]["mitigated_flag"] == "1"
    assert float(rows["alice"]["kl_combined_baseline"]) < float(rows["alice"]["kl_consumed_baseline"])
    first = (out / "sim_result.json").read_bytes()
    assert dispatch(["simulate", "--config", str(skewed_dir / "sim.toml"), "--out-dir", str(out)]) == 0
    assert (out / "sim_result.json").read_bytes() == first
    assert not list(out.glob(".*.tmp"))

    an = tmp_path / "an"
    common = ["--tweets", str(skewed_dir / "tweets.jsonl"), "--experts", str(skewed_dir / "experts.jsonl"),
              "--expert-tweets", str(skewed_dir / "expert_tweets.jsonl"), "--out-dir", str(an)]
    assert dispatch(["analyze", *common, "--sim-result", str(out / "sim_result.json")]) == 0
    groups = list(csv.DictReader(open(an / "groups.csv")))
    assert sum(int(g["count"]) for g in groups) == json.loads((an / "summary.json").read_text())["users"]
    dist = list(csv.DictReader(open(an / "distribution.csv")))
    assert sum(float(r["fraction"]) for r in dist) == pytest.approx(1)
    assert (an / "mitigation.csv").read_text() == (out / "mitigation.csv").read_text()

    assert dispatch(["analyze", *common, "--role", "consumed", "--graph", str(skewed_dir / "graph.csv"),
                     "--min-followings", "5"]) == 0
    summary = json.loads((an / "summary.json").read_text())
    assert summary["role"] == "consumed" and summary["users"] >= 1
    assert dispatch(["analyze", *common, "--role", "consumed"]) == 1
