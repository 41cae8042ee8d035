"""Topical information diets of social-media posts.

Keywords (hashtags and URLs) get a topic from the experts who post them;
a set of tweets then has a diet, the distribution of its keyword mass over
18 fixed topic categories. Diets can be compared with each other and with
bundled mass-media baselines.
"""

from ._kernels import BACKEND
from .analysis import (
    MitigationReport,
    UserDiet,
    group_top_topic_means,
    mitigation_report,
    tail_contribution,
    top_k_share_quantile,
    top_topic,
    top_topic_distribution,
)
from .corpus import (
    ExpertProfile,
    FollowGraph,
    Keyword,
    Tweet,
    canonicalize_url,
    extract_keywords,
    is_english,
    load_corpus,
)
from .diet import (
    DietDistribution,
    DietVector,
    combine,
    compute_diet,
    kl_divergence,
    load_baseline,
    normalize,
)
from .inference import ExpertIndex, TopicInference, build_expert_index, infer_all, infer_topic
from .simnet import SimConfig, SimResult, deliver_timeline, recommend_snapshot, run_experiment
from .taxonomy import Taxonomy, TopicId, load_taxonomy, map_expert_tags

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DietDistribution",
    "DietVector",
    "ExpertIndex",
    "ExpertProfile",
    "FollowGraph",
    "Keyword",
    "MitigationReport",
    "SimConfig",
    "SimResult",
    "Taxonomy",
    "TopicId",
    "TopicInference",
    "Tweet",
    "UserDiet",
    "build_expert_index",
    "canonicalize_url",
    "combine",
    "compute_diet",
    "deliver_timeline",
    "extract_keywords",
    "group_top_topic_means",
    "infer_all",
    "infer_topic",
    "is_english",
    "kl_divergence",
    "load_baseline",
    "load_corpus",
    "load_taxonomy",
    "map_expert_tags",
    "mitigation_report",
    "normalize",
    "recommend_snapshot",
    "run_experiment",
    "tail_contribution",
    "top_k_share_quantile",
    "top_topic",
    "top_topic_distribution",
]
