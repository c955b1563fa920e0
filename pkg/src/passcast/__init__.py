"""Pass-receiver prediction and greedy defensive assignment from soccer-simulation logs."""
from passcast.defense import AssignmentPlan, DefenseConfig, ThreatScore, greedy_assign, opponent_score, plan_defense, score_all
from passcast.estimators import ReceiverMLP, SnapshotFeaturizer
from passcast.features import Level, extract, free_angle
from passcast.geometry import FieldSpec, PlayerState, Side, Snapshot, Vec2, angle_deg, dist, mirror
from passcast.labeler import PassEvent, extract_pass_events, label_onehot, possession
from passcast.mlp import Model, TrainConfig, forward, init_model, predict_topk, train
from passcast.rcg import ParsedLog, parse_log, read_log

__version__ = "0.1.0"

__all__ = [
    "AssignmentPlan", "DefenseConfig", "ThreatScore", "greedy_assign", "opponent_score",
    "plan_defense", "score_all", "ReceiverMLP", "SnapshotFeaturizer", "Level", "extract",
    "free_angle", "FieldSpec", "PlayerState", "Side", "Snapshot", "Vec2", "angle_deg", "dist",
    "mirror", "PassEvent", "extract_pass_events", "label_onehot", "possession", "Model",
    "TrainConfig", "forward", "init_model", "predict_topk", "train", "ParsedLog", "parse_log",
    "read_log",
]
