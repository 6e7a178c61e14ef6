"""Time-redundant ALU fault tolerance with diversified operands and learned weighted voting."""
from .errors import ConfigurationError, FtealuError, UsageError
from .word import AluOp, CarryIO, Word, alu_exec, golden
from .diversify import Transform, TransformKind, VersionResult, decode, encode, execute_version, make_transform
from .faults import FaultSet, Scenario, ScenarioSet, StuckAt, Transient
from .voting import MAJORITY, WeightTable, ft_ealu, majority_vote, make_combo, weighted_vote
from .scoring import NormalizationKind, ScoringScheme, normalize, score_punishment_only, score_reward_punishment
from .training import TrainingConfig, build_dataset, coverage, cross_validate, evaluate, train_weights

__version__ = "0.1.0"
