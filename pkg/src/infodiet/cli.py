"""``infodiet`` command line: infer-topics, diet, analyze, simulate, baselines.

Exit codes: 0 success, 1 usage or validation error, 2 data error.
Every subcommand accepts ``--config FILE.toml``; its keys (flag names with
underscores) act as defaults and explicit flags override them. Relative
paths in a config file are resolved against the file's directory.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import click

from . import _kernels
from .analysis import (
    UserDiet,
    group_top_topic_means,
    mitigation_report,
    top_k_share_quantile,
    top_topic_distribution,
)
from .corpus import (
    CorpusError,
    FollowGraph,
    Tweet,
    extract_keywords,
    is_english,
    load_dictionary,
    load_experts,
    load_graph,
    load_redirect_map,
    load_tweets,
)
from .diet import (
    BASELINES,
    DEFAULT_ALPHA,
    DietDistribution,
    EmptyDietError,
    baseline_percentages,
    compute_diet,
    load_baseline,
    normalize,
)
from .inference import DEFAULT_MIN_SUPPORT, build_expert_index, explain, infer_all
from .simnet import SimConfig, deliver_timeline, run_experiment
from .taxonomy import TOPIC_NAMES, TaxonomyError, TopicId, load_taxonomy

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("infodiet")


class ConfigError(click.UsageError):
    exit_code = 1


class DataError(click.ClickException):
    exit_code = 2


# --------------------------------------------------------------------------
# config
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    tweets: Path | None = None
    experts: Path | None = None
    expert_tweets: Path | None = None
    graph: Path | None = None
    taxonomy: Path | None = None
    dictionary: Path | None = None
    redirects: Path | None = None
    baselines_dir: Path | None = None
    min_support: int = DEFAULT_MIN_SUPPORT
    alpha: float = DEFAULT_ALPHA
    english_filter: bool = False
    strict_parse: bool = False
    out: Path | None = None
    required: tuple[str, ...] = field(default=(), repr=False)

    def validate(self) -> "RunConfig":
        if self.min_support < 1:
            raise ConfigError("--min-support must be >= 1")
        if not (self.alpha >= 0):
            raise ConfigError("--alpha must be >= 0")
        for name in self.required:
            if getattr(self, name) is None:
                raise ConfigError(f"missing required option --{name.replace('_', '-')}")
        for name in ("tweets", "experts", "expert_tweets", "graph", "taxonomy", "dictionary", "redirects"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"--{name.replace('_', '-')}: file not found: {p}")
        if self.baselines_dir is not None and not Path(self.baselines_dir).is_dir():
            raise ConfigError(f"--baselines-dir: not a directory: {self.baselines_dir}")
        if self.english_filter and self.dictionary is None:
            raise ConfigError("--english-filter needs --dictionary")
        return self


def _load_config(ctx: click.Context, param: click.Parameter, value):
    if value is None:
        return None
    path = Path(value)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    params = {p.name: p for p in ctx.command.params}
    defaults = {}
    for key, val in raw.items():
        name = key.replace("-", "_")
        if name not in params or name == "config":
            raise ConfigError(f"{path}: unknown key {key!r}")
        p = params[name]
        if isinstance(p.type, click.Path) and isinstance(val, str):
            val = str((path.parent / val).resolve()) if not os.path.isabs(val) else val
        defaults[name] = val
    ctx.default_map = {**(ctx.default_map or {}), **defaults}
    return value


config_option = click.option(
    "--config",
    type=click.Path(dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="TOML file with defaults for this subcommand's options.",
)


def _path(help_: str, **kw):
    return dict(type=click.Path(dir_okay=False, path_type=Path), default=None, help=help_, **kw)


def corpus_options(f):
    opts = [
        click.option("--experts", **_path("Expert profiles JSONL.")),
        click.option("--expert-tweets", **_path("Tweets posted by experts (JSONL).")),
        click.option("--taxonomy", **_path("Taxonomy JSON (default: bundled table).")),
        click.option("--redirects", **_path("URL redirect map CSV short,target.")),
        click.option("--dictionary", **_path("Word list for the English filter.")),
        click.option("--english-filter/--no-english-filter", default=False, help="Keep only English tweets."),
        click.option("--strict/--lenient", "strict_parse", default=False, help="Fail on the first malformed record."),
        click.option("--min-support", type=int, default=DEFAULT_MIN_SUPPORT, show_default=True,
                     help="Minimum distinct expert posters before a keyword gets a topic."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


# --------------------------------------------------------------------------
# shared plumbing
# --------------------------------------------------------------------------


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        write_atomic(out, text)


class _Pipeline:
    """Loads inputs once and wires ingestion into inference."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.stats = Counter()
        try:
            self.taxonomy = load_taxonomy(cfg.taxonomy)
            self.redirects = load_redirect_map(cfg.redirects) if cfg.redirects else None
            self.dictionary = load_dictionary(cfg.dictionary) if cfg.dictionary else None
            self.experts = load_experts(cfg.experts, cfg.strict_parse, self.stats)
            self.expert_tweets = load_tweets(cfg.expert_tweets, cfg.strict_parse, self.stats)
            self.index = build_expert_index(self.experts, self.expert_tweets, self.taxonomy, self.redirects)
        except (CorpusError, TaxonomyError, ValueError) as exc:
            raise DataError(str(exc)) from exc

    def load_tweets(self, path: Path) -> list[Tweet]:
        try:
            tweets = load_tweets(path, self.cfg.strict_parse, self.stats)
        except CorpusError as exc:
            raise DataError(str(exc)) from exc
        if self.cfg.english_filter:
            kept = [t for t in tweets if is_english(t.text, self.dictionary)]
            self.stats["non_english"] += len(tweets) - len(kept)
            tweets = kept
        return tweets

    def load_graph(self, path: Path) -> FollowGraph:
        try:
            return load_graph(path, self.cfg.strict_parse, self.stats)
        except CorpusError as exc:
            raise DataError(str(exc)) from exc

    def baseline(self, name: str) -> DietDistribution:
        try:
            return load_baseline(name, self.cfg.baselines_dir)
        except (OSError, KeyError, ValueError) as exc:
            raise DataError(f"cannot load baseline {name}: {exc}") from exc

    def keywords(self, tweets):
        return {k for t in tweets for k in extract_keywords(t.text, self.redirects)}

    def infer(self, tweets):
        kws = self.keywords(tweets)
        if not kws:
            return {}, 0.0, kws
        inferred, coverage = infer_all(kws, self.index, self.cfg.min_support)
        return inferred, coverage, kws


def _run_config(required: tuple[str, ...], **kw) -> RunConfig:
    fields_ = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in kw.items() if k in fields_}, required=required)
    return cfg.validate()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", count=True, help="More logging.")
def cli(verbose: int):
    """Quantify and compare topical information diets of tweet sets."""
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    log.debug("kernel backend: %s", _kernels.BACKEND)


@cli.command("infer-topics")
@config_option
@corpus_options
@click.option("--tweets", **_path("Tweets whose keywords to infer (default: the expert tweets)."))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=Path("."),
              show_default=True, help="Where inferences.csv and uninferred.csv go.")
def infer_topics_cmd(tweets, out_dir, **kw):
    """Infer a topic for every distinct keyword."""
    cfg = _run_config(("experts", "expert_tweets"), tweets=tweets, **kw)
    pipe = _Pipeline(cfg)
    source = pipe.load_tweets(tweets) if tweets else pipe.expert_tweets
    inferred, coverage, kws = pipe.infer(source)
    rows, missing = [], []
    for k in sorted(kws):
        inf = inferred.get(k)
        if inf is None:
            reason = explain(k, pipe.index, cfg.min_support)
            missing.append([k.kind, k.canonical, reason.value, pipe.index.support(k)])
        else:
            rows.append([k.kind, k.canonical, inf.topic.canonical_name, repr(inf.raw_fraction),
                         repr(inf.normalized_score), inf.support])
    write_atomic(out_dir / "inferences.csv", _csv_text(
        ["keyword_kind", "keyword", "topic", "raw_fraction", "normalized_score", "support"], rows))
    write_atomic(out_dir / "uninferred.csv", _csv_text(["keyword_kind", "keyword", "reason", "support"], missing))
    click.echo(f"keywords: {len(kws)}  inferred: {len(rows)}  coverage: {coverage:.4f}")


@cli.command("diet")
@config_option
@corpus_options
@click.option("--tweets", **_path("Tweets JSONL to build the diet from."))
@click.option("--graph", **_path("Follow graph CSV (needed with --consumer)."))
@click.option("--user", "users", multiple=True, help="Only tweets authored by these users (produced diet).")
@click.option("--consumer", default=None, help="Diet of tweets this user receives from followings.")
@click.option("--include-unattributed", is_flag=True, help="Report unattributed mass as a share too.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Output file (default stdout).")
def diet_cmd(tweets, graph, users, consumer, include_unattributed, fmt, out, **kw):
    """Build the information diet of a set of tweets."""
    cfg = _run_config(("tweets", "experts", "expert_tweets"), tweets=tweets, graph=graph, out=out, **kw)
    if consumer and graph is None:
        raise ConfigError("--consumer needs --graph")
    pipe = _Pipeline(cfg)
    stream = pipe.load_tweets(tweets)
    if users:
        wanted = set(users)
        stream = [t for t in stream if t.author in wanted]
    if consumer:
        g = pipe.load_graph(graph)
        ids = set(deliver_timeline(consumer, g, stream))
        stream = [t for t in stream if t.id in ids]
    inferred, coverage, _ = pipe.infer(stream)
    vec = compute_diet(stream, inferred, pipe.redirects)
    report = vec.to_dict()
    report["coverage"] = coverage
    if include_unattributed and vec.weight.sum() > 0:
        d = normalize(vec, include_unattributed=True)
        report["distribution_with_unattributed"] = {**d.to_dict(), "unattributed": d.unattributed}
    if fmt == "json":
        text = _json_text(report)
    else:
        dist = report["distribution"] or {}
        rows = [[name, repr(report["weights"][name]), repr(dist.get(name, 0.0))] for name in TOPIC_NAMES]
        rows.append(["unattributed", repr(report["unattributed"]), ""])
        text = _csv_text(["topic", "weight", "share"], rows)
    _emit(text, out)


def _user_diets(pipe: _Pipeline, stream, role: str, graph: FollowGraph | None, min_followings: int):
    inferred, _, _ = pipe.infer(stream)
    diets = []
    if role == "produced":
        by_author: dict[str, list[Tweet]] = {}
        for t in stream:
            by_author.setdefault(t.author, []).append(t)
        groups = sorted(by_author.items())
    else:
        by_id = {t.id: t for t in stream}
        groups = [
            (u, [by_id[i] for i in deliver_timeline(u, graph, stream)])
            for u in sorted(graph.followings)
            if len(graph.following(u)) >= min_followings
        ]
    for user, tweets in groups:
        try:
            diets.append(UserDiet(user, normalize(compute_diet(tweets, inferred, pipe.redirects)), role))
        except EmptyDietError:
            log.info("user %s has an empty %s diet; skipped", user, role)
    return diets


def _read_sim_diets(path: Path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rows = []
        for u in data["users"]:
            d = u["diets"]
            if d["consumed"] is None or d["recommended"] is None:
                continue
            rows.append((u["user"], DietDistribution.from_mapping(d["consumed"]),
                         DietDistribution.from_mapping(d["recommended"])))
        return rows
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"cannot read simulation result {path}: {exc}") from exc


def _mitigation_csv(report) -> str:
    return _csv_text(
        ["user", "kl_consumed_baseline", "kl_combined_baseline", "kl_reco_consumed", "mitigated_flag"],
        [[r.user, repr(r.kl_consumed_baseline), repr(r.kl_combined_baseline), repr(r.kl_reco_consumed),
          int(r.mitigated)] for r in report.records],
    )


@cli.command("analyze")
@config_option
@corpus_options
@click.option("--tweets", **_path("Tweets JSONL."))
@click.option("--graph", **_path("Follow graph CSV (needed for --role consumed)."))
@click.option("--role", type=click.Choice(["produced", "consumed"]), default="produced", show_default=True)
@click.option("--min-followings", type=int, default=0, show_default=True,
              help="Consumers must follow at least this many accounts.")
@click.option("--sim-result", **_path("SimResult JSON from `simulate`; adds mitigation.csv."))
@click.option("--baseline", type=click.Choice(BASELINES), default="nytimes", show_default=True)
@click.option("--baselines-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory of <name>.csv baselines overriding the bundled ones.")
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True, help="KL smoothing.")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=Path("."), show_default=True)
def analyze_cmd(tweets, graph, role, min_followings, sim_result, baseline, baselines_dir, alpha, out_dir, **kw):
    """Top-topic groups, top-topic distribution and (optionally) mitigation tables."""
    cfg = _run_config(("tweets", "experts", "expert_tweets"), tweets=tweets, graph=graph, alpha=alpha,
                      baselines_dir=baselines_dir, **kw)
    if role == "consumed" and graph is None:
        raise ConfigError("--role consumed needs --graph")
    if min_followings < 0:
        raise ConfigError("--min-followings must be >= 0")
    if sim_result is not None and not Path(sim_result).is_file():
        raise ConfigError(f"--sim-result: file not found: {sim_result}")
    pipe = _Pipeline(cfg)
    stream = pipe.load_tweets(tweets)
    g = pipe.load_graph(graph) if graph else None
    diets = _user_diets(pipe, stream, role, g, min_followings)
    if not diets:
        raise DataError("no user has a non-empty diet")
    groups = group_top_topic_means(diets)
    dist = top_topic_distribution(diets)
    mitig = None
    if sim_result is not None:
        mitig = mitigation_report(_read_sim_diets(sim_result), pipe.baseline(baseline), alpha, baseline)

    write_atomic(out_dir / "groups.csv", _csv_text(
        ["topic", "count", "mean_top_share", "mean_tail_share"],
        [[t.canonical_name, g_.count, repr(g_.mean_top_share), repr(g_.mean_tail_share)] for t, g_ in groups.items()],
    ))
    write_atomic(out_dir / "distribution.csv", _csv_text(
        ["topic", "fraction"], [[t.canonical_name, repr(v)] for t, v in dist.items()]))
    write_atomic(out_dir / "summary.json", _json_text({
        "role": role,
        "users": len(diets),
        "top2_over_half": top_k_share_quantile(diets, 2, 0.5),
    }))
    if mitig is not None:
        write_atomic(out_dir / "mitigation.csv", _mitigation_csv(mitig))
    click.echo(f"{len(diets)} {role} diets analysed; outputs in {out_dir}")


@cli.command("simulate")
@config_option
@corpus_options
@click.option("--tweets", **_path("Stream of tweets to replay (JSONL)."))
@click.option("--graph", **_path("Follow graph CSV."))
@click.option("--user", "users", multiple=True, help="Users to simulate (default: every follower in the graph).")
@click.option("--baseline", type=click.Choice(BASELINES), default="nytimes", show_default=True)
@click.option("--baselines-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory of <name>.csv baselines overriding the bundled ones.")
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True, help="KL smoothing.")
@click.option("--snapshot-interval", type=int, default=1800, show_default=True, help="Seconds between snapshots.")
@click.option("--top-k", type=int, default=10, show_default=True, help="Recommended tweets kept per snapshot.")
@click.option("--window", type=int, default=None, help="Popularity lookback in seconds (default: interval).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dedupe/--no-dedupe", "dedupe_across_snapshots", default=True, show_default=True)
@click.option("--include-followings/--exclude-followings", default=False, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=Path("."), show_default=True)
def simulate_cmd(tweets, graph, users, baseline, baselines_dir, alpha, snapshot_interval, top_k, window, seed,
                 dedupe_across_snapshots, include_followings, out_dir, **kw):
    """Replay consumption and 2-hop recommendations; report mitigation against a baseline."""
    cfg = _run_config(("tweets", "experts", "expert_tweets", "graph"), tweets=tweets, graph=graph, alpha=alpha,
                      baselines_dir=baselines_dir, **kw)
    try:
        sim_cfg = SimConfig(snapshot_interval, top_k, window, seed, dedupe_across_snapshots, include_followings)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    pipe = _Pipeline(cfg)
    stream = pipe.load_tweets(tweets)
    g = pipe.load_graph(graph)
    inferred, _, _ = pipe.infer(stream)
    users = list(users) or sorted(g.followings)
    result, report = run_experiment(users, g, stream, inferred, sim_cfg, pipe.baseline(baseline),
                                    baseline, alpha, pipe.redirects)
    write_atomic(out_dir / "sim_result.json", result.to_json())
    write_atomic(out_dir / "mitigation.csv", _mitigation_csv(report))
    click.echo(f"{len(report.records)} users; mitigated: {sum(r.mitigated for r in report.records)}")


@cli.command("baselines")
@click.option("--name", type=click.Choice(BASELINES), default=None, help="One organization (default: all).")
def baselines_cmd(name):
    """Print the bundled mass-media diets as JSON."""
    names = [name] if name else list(BASELINES)
    out = {}
    for n in names:
        pct = baseline_percentages(n)
        out[n] = {
            "percent": {t.canonical_name: pct[t] for t in TopicId},
            "distribution": load_baseline(n).to_dict(),
        }
    click.echo(_json_text(out[name] if name else out), nl=False)


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------


def dispatch(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        rv = cli.main(args=argv, prog_name="infodiet", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except (CorpusError, TaxonomyError, EmptyDietError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(dispatch())
