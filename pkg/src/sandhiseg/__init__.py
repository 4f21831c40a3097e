"""Lattice-based word segmentation for sandhi-fused text."""

from .charlm import CharLM, train_charlm
from .lattice import (
    Chunk,
    Lattice,
    Path,
    SandhiRule,
    SpanNode,
    apply_sandhi_rule_nodes,
    build_char_nodes,
    build_ngram_candidates,
    enumerate_paths,
    ingest_candidate_space,
    ngram_lattice,
    normalize_text,
    rectify_mapping,
    split_chunks,
)
from .labels import LabelVocab, align_gold_labels, decode_labels
from .metrics import EvalReport, evaluate, perfect_match, word_prf
from .model import EncoderConfig, EncoderParams, encoder_forward, init_params
from .prcp import PathScore, detect_corrupted, prcp_rectify, score_path
from .train import TrainConfig, grad_check, train

__version__ = "0.1.0"

__all__ = [
    "CharLM",
    "Chunk",
    "EncoderConfig",
    "EncoderParams",
    "EvalReport",
    "LabelVocab",
    "Lattice",
    "Path",
    "PathScore",
    "SandhiRule",
    "SpanNode",
    "TrainConfig",
    "align_gold_labels",
    "apply_sandhi_rule_nodes",
    "build_char_nodes",
    "build_ngram_candidates",
    "decode_labels",
    "detect_corrupted",
    "encoder_forward",
    "enumerate_paths",
    "evaluate",
    "grad_check",
    "ingest_candidate_space",
    "init_params",
    "ngram_lattice",
    "normalize_text",
    "perfect_match",
    "prcp_rectify",
    "rectify_mapping",
    "score_path",
    "split_chunks",
    "train",
    "train_charlm",
    "word_prf",
]
