from .gray import gray_fold
from .layers import (
    LayerBundle,
    Transducer,
    breaker_layer,
    counter_layer,
    grid_layer,
    skeleton_cells,
    y_k,
)
from .robinson import east_deterministic_base, kari_nw, robinson

__all__ = [
    "LayerBundle",
    "Transducer",
    "breaker_layer",
    "counter_layer",
    "east_deterministic_base",
    "gray_fold",
    "grid_layer",
    "kari_nw",
    "robinson",
    "skeleton_cells",
    "y_k",
]
