"""Random walks on bubble graphs and the associated groups."""

from ._core import (
    LevelCapError,
    ResourceGuardError,
    ScalingRule,
    Vertex,
    apply_word,
    ball,
    ball_count,
    bound_pipeline,
    conditioned_orbit_stats,
    confine_prob_exact,
    confine_rate,
    count_small_orbit_elements,
    deep_word,
    dist_to_root,
    elements_equal,
    flow_energy,
    green_function_estimate,
    harmonic_estimate,
    inverted_orbit,
    kirchhoff_check,
    parse_address,
    simulate_sws,
    tree_distance,
    volume_exponent_fit,
    wreath_equal,
    wreath_inverse,
    wreath_multiply,
)

__all__ = [name for name in dir() if not name.startswith("_")]
