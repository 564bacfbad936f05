"""ruleaug: edit a tabular classifier by pre-processing its training data.

Given user feedback rules, covered rows are kept/relabelled/dropped and the
dataset is then grown with rule-satisfying synthetic rows until retraining
aligns the model's decision boundaries with the rules without giving up
performance elsewhere.
"""

from .data import (
    Attribute,
    Dataset,
    Instance,
    Schema,
    apply_modification,
    load_dataset,
    load_schema,
    save_dataset,
    save_schema,
    split_with_tcf,
)
from .engine import AugmentationResult, EngineConfig, run_augmentation
from .errors import RuleaugError, ValidationError
from .generation import DistanceMetric, generate, neighbors_in_rule
from .harness import (
    ExperimentConfig,
    extract_seed_rules,
    make_blob_benchmark,
    perturb_rules,
    run_experiment,
)
from .models import TrainerSpec, load_model, train
from .objective import ObjectiveReport, holdout_score, outside_f1, rule_agreement, training_loss
from .relaxation import BasePopulation, pre_select_bp, relax_rule
from .rules import (
    Clause,
    FeedbackRule,
    FeedbackRuleSet,
    LabelDistribution,
    Predicate,
    coverage,
    detect_conflicts,
    merge_overlapping,
    parse_rules,
    render_rules,
    resolve_conflicts,
    sample_label,
    satisfies,
)
from .selection import InstanceWeights, SelectionPlan, compute_weights, select_ip, select_random

__version__ = "0.1.0"
