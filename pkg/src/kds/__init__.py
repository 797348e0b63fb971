"""Kerr-de Sitter geometry, trapping certificates, and quasinormal modes."""

from .geometry import (
    BL,
    STARRED,
    ErgoregionMap,
    GaugeFunction,
    HorizonStructure,
    MetricSample,
    SpacetimeParams,
    StationaryFrame,
    beta_threshold,
    build_gauge,
    ergoregion_map,
    frame_set,
    fredholm_window,
    horizon_structure,
    metric_at,
    mu_eval,
    t_norm,
    t_norm_radial_derivative,
)

__version__ = "0.1.0"
