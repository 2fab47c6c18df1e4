"""Confidence intervals for interval-identified parameters chosen from data."""

import json

from ._core import (
    BoundsSpec,
    BoundselectError,
    ConfidenceInterval,
    Polyhedron,
    ReducedForm,
    Selection,
    __version__,
    catalog_spec,
    confidence_interval,
    difference_family,
    estimate_bounds,
    estimate_reduced_form,
    fixed_target,
    lp_to_bounds_spec,
    max_gauss_quantile,
    norm_quantile,
    rule_cms,
    rule_undominated,
    rule_weighted,
    solve_location,
    tn_cdf,
)
from ._core import simulate as _simulate

KINDS = ("conventional", "conditional", "projection", "hybrid")


def intervals(spec, rf, selection, kinds=KINDS, **options):
    """All requested interval kinds for one selection, keyed by kind."""
    return {k: confidence_interval(k, spec, rf, selection, **options) for k in kinds}


def simulate(config, threads=0):
    """Run an experiment from a config dict or JSON string; returns csv/json/dat texts."""
    text = config if isinstance(config, str) else json.dumps(config)
    return _simulate(text, threads)
