"""Chunk decompositions of weakly generalized alternating link diagrams,
boundary-curve labeling and normalization, forbidden-word censuses and
normal-surface disk collections."""

from .census import Census, compare, enumerate_curves, oracle_enumerate
from .chunk import ChunkDecomposition, build_chunks, verify_decomposition
from .curve import CurvePattern, LetterWord, check_normal, label, normalize, parse_pattern
from .diagram import Diagram, parse_wgad, validate_wga
from .fixtures import FIXTURES, load_fixture
from .patterns import TAGS, check_ssss_zones, classify_word
from .surface import NormalPiece, canonical_strip, complexes_equivalent, glue_pieces, maximal_collections

__version__ = "0.1.0"

__all__ = ["Census", "ChunkDecomposition", "CurvePattern", "Diagram", "FIXTURES", "LetterWord", "NormalPiece",
           "TAGS", "build_chunks", "canonical_strip", "check_normal", "check_ssss_zones", "classify_word", "compare",
           "complexes_equivalent", "enumerate_curves", "glue_pieces", "label", "load_fixture",
           "maximal_collections", "normalize", "oracle_enumerate", "parse_pattern", "parse_wgad",
           "validate_wga", "verify_decomposition"]
