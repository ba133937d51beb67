from .model import (
    Alphabet,
    BlockCode,
    LayerProduct,
    Pattern,
    SftSpec,
    TapeInfo,
    TorusConfig,
    WangTile,
    WangTileset,
)
from .ops import check_deterministic, product, transform_spec, wang_to_sft
from .textio import (
    bundle_to_text,
    parse_pattern,
    parse_spec_file,
    parse_torus,
    pattern_to_text,
    sft_to_text,
    torus_to_text,
    wang_to_text,
)
from .validity import is_admissible, is_locally_valid, is_valid

__all__ = [
    "Alphabet",
    "BlockCode",
    "LayerProduct",
    "Pattern",
    "SftSpec",
    "TapeInfo",
    "TorusConfig",
    "WangTile",
    "WangTileset",
    "bundle_to_text",
    "check_deterministic",
    "is_admissible",
    "is_locally_valid",
    "is_valid",
    "parse_pattern",
    "parse_spec_file",
    "parse_torus",
    "pattern_to_text",
    "product",
    "sft_to_text",
    "torus_to_text",
    "transform_spec",
    "wang_to_sft",
    "wang_to_text",
]
