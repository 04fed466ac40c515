"""Wave-particle duality relations and machine-checkable reports.

Each check pairs a configuration's coherence with a discrimination outcome's
probabilities and reports both bound sides, the slack oriented so that
``slack >= -1e-8`` means the relation is satisfied, and the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrimination import DiscriminationOutcome
from .matlin import ValidationError
from .quantum import InterferometerConfig, binary_entropy, coherence_rel_ent

__all__ = [
    "DualityReport",
    "SLACK_TOL",
    "all_checks",
    "check_error_margin_bound",
    "check_error_margin_duality",
    "check_simplified_bound",
    "check_usd_duality",
    "error_margin_surface",
]

SLACK_TOL = 1e-8

RELATION_USD = "usd-eq1"
RELATION_MARGIN = "error-margin-eq31"
RELATION_MARGIN_DUALITY = "error-margin-duality-eq32"
RELATION_SIMPLIFIED = "simplified-eq33"


@dataclass(frozen=True)
class DualityReport:
    """One evaluated duality relation.

    ``slack`` is oriented in the relation's natural direction (bound side
    minus constrained side), so nonnegative slack means the bound holds.
    """

    coherence_C: float
    distinguishability_D: float
    bound_lhs: float
    bound_rhs: float
    slack: float
    relation: str
    satisfied: bool


def _report(c, d, lhs, rhs, slack, relation) -> DualityReport:
    return DualityReport(
        coherence_C=float(c),
        distinguishability_D=float(d),
        bound_lhs=float(lhs),
        bound_rhs=float(rhs),
        slack=float(slack),
        relation=relation,
        satisfied=bool(slack >= -SLACK_TOL),
    )


def _conditional_error_entropy(p_error: float, p_failure: float) -> float:
    """(1 - P_f) H2(P_e / (1 - P_f)) with the continuous P_f -> 1 limit."""
    conclusive = 1.0 - p_failure
    if conclusive <= 1e-15:
        return 0.0
    ratio = min(max(p_error / conclusive, 0.0), 1.0)
    return conclusive * binary_entropy(ratio)


def _coherence(cfg: InterferometerConfig, precomputed: float | None) -> float:
    return coherence_rel_ent(cfg) if precomputed is None else float(precomputed)


def error_margin_surface(n_paths: int, p_error: float, p_failure: float) -> float:
    """Normalized error-margin bound value at a (P_e, P_f) point.

    This is the surface the normalized coherence of any physical strategy
    must stay below; NaN where P_e exceeds the conclusive probability.
    """
    if p_error > 1.0 - p_failure + 1e-12:
        return float("nan")
    log_n = float(np.log2(n_paths))
    return (
        _conditional_error_entropy(p_error, p_failure) / log_n
        + p_error * float(np.log2(n_paths - 1)) / log_n
        + p_failure
    )


def check_usd_duality(
    cfg: InterferometerConfig, outcome: DiscriminationOutcome,
    coherence_bits: float | None = None,
) -> DualityReport:
    """D + C <= 1 for a zero-error strategy.

    ``D`` is the success probability, ``C`` the normalized coherence; inputs
    with nonzero error probability are rejected.  ``coherence_bits`` lets a
    caller pass a precomputed (e.g. closed-form) coherence value.
    """
    if outcome.p_error > 1e-12:
        raise ValidationError(
            f"zero-error duality check got p_error={outcome.p_error}"
        )
    log_n = float(np.log2(cfg.n_paths))
    c = _coherence(cfg, coherence_bits) / log_n
    d = outcome.p_success
    lhs = d + c
    return _report(c, d, lhs, 1.0, 1.0 - lhs, RELATION_USD)


def check_error_margin_bound(
    cfg: InterferometerConfig, outcome: DiscriminationOutcome,
    coherence_bits: float | None = None,
) -> DualityReport:
    """Entropic which-way bound with both failure and error probabilities.

    (1-P_f) H2(P_e/(1-P_f)) + P_e log2(N-1) + P_f log2 N >= C_rel-ent(rho_p).
    At P_e = 0 this reduces to P_f log2 N >= C_rel-ent.
    """
    n = cfg.n_paths
    log_n = float(np.log2(n))
    rhs = _coherence(cfg, coherence_bits)
    lhs = (
        _conditional_error_entropy(outcome.p_error, outcome.p_failure)
        + outcome.p_error * float(np.log2(n - 1))
        + outcome.p_failure * log_n
    )
    return _report(rhs / log_n, outcome.p_success, lhs, rhs, lhs - rhs,
                   RELATION_MARGIN)


def check_error_margin_duality(
    cfg: InterferometerConfig, outcome: DiscriminationOutcome,
    coherence_bits: float | None = None,
) -> DualityReport:
    """The same bound restated against the normalized coherence.

    (1-P_f)/log2 N * H2(P_e/(1-P_f)) + P_e log2(N-1)/log2 N + P_f >= C.
    """
    n = cfg.n_paths
    log_n = float(np.log2(n))
    c = _coherence(cfg, coherence_bits) / log_n
    lhs = (
        _conditional_error_entropy(outcome.p_error, outcome.p_failure) / log_n
        + outcome.p_error * float(np.log2(n - 1)) / log_n
        + outcome.p_failure
    )
    return _report(c, outcome.p_success, lhs, c, lhs - c, RELATION_MARGIN_DUALITY)


def check_simplified_bound(
    cfg: InterferometerConfig, outcome: DiscriminationOutcome,
    coherence_bits: float | None = None,
) -> DualityReport:
    """C + D <= 1 + (1-P_f)/log2 N * H2(P_e/(1-P_f)).

    Coincides with the zero-error duality relation as P_e -> 0.
    """
    log_n = float(np.log2(cfg.n_paths))
    c = _coherence(cfg, coherence_bits) / log_n
    d = outcome.p_success
    lhs = c + d
    rhs = 1.0 + _conditional_error_entropy(outcome.p_error, outcome.p_failure) / log_n
    return _report(c, d, lhs, rhs, rhs - lhs, RELATION_SIMPLIFIED)


def all_checks(
    cfg: InterferometerConfig, outcome: DiscriminationOutcome,
    coherence_bits: float | None = None,
) -> list[DualityReport]:
    """Every applicable relation for the outcome (the zero-error relation is
    included only when the outcome has no errors)."""
    if coherence_bits is None:
        coherence_bits = coherence_rel_ent(cfg)
    reports = []
    if outcome.p_error <= 1e-12:
        reports.append(check_usd_duality(cfg, outcome, coherence_bits))
    reports.append(check_error_margin_bound(cfg, outcome, coherence_bits))
    reports.append(check_error_margin_duality(cfg, outcome, coherence_bits))
    reports.append(check_simplified_bound(cfg, outcome, coherence_bits))
    return reports
