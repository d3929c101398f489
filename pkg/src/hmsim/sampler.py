"""Monte Carlo runners and exact enumeration checks.

Sampling is vectorized over trials but consumes one stream in trial order,
so results are a pure function of (seed, stream_id, inputs): evaluation
order and thread count cannot change them. Deterministic outcome tables are
precomputed per experiment (the target probability is fixed across trials),
so a trial costs one draw and one table lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dichotomic import (
    DichotomicOutcome,
    DiscreteContext,
    DyadicRule,
    LAMBDA_CAP,
    continuous_probability,
    expand,
    expand_geometric_t,
    _check_unit_interval,
)
from .errors import DomainError
from .histories import (
    Convention,
    HistoryOutcome,
    HomogeneousHistory,
    InhomogeneousHistory,
    history_probability,
    inhomogeneous_probability,
)
from .hilbert import StateVector
from .rng import RandomSource, _check_lambda_max, draw_lambdas, draw_uniforms


class Model(Enum):
    CONTINUOUS = "continuous"
    GREEDY = "greedy"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    context: DiscreteContext | float
    outcome: DichotomicOutcome | HistoryOutcome


@dataclass(frozen=True)
class FrequencySummary:
    n_trials: int
    count_alpha: int
    expected_p: float
    z_score: float

    @property
    def frequency(self) -> float:
        return self.count_alpha / self.n_trials

    def to_record(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "count_alpha": self.count_alpha,
            "expected_p": self.expected_p,
            "z_score": self.z_score,
        }


@dataclass(frozen=True)
class ExactCheckReport:
    """Exact enumeration of one target probability up to level L."""

    rule: DyadicRule
    target_p: float
    level: int
    partial_sum: float
    abs_error: float
    bound_satisfied: bool
    tail_mass: float

    def to_record(self) -> dict:
        return {
            "partial_sum": self.partial_sum,
            "abs_error": self.abs_error,
            "bound_satisfied": self.bound_satisfied,
            "tail_mass": self.tail_mass,
        }


def summarize(n_trials: int, count_alpha: int, expected_p: float) -> FrequencySummary:
    """Binomial z-score of the observed count against the expected probability.

    For the degenerate probabilities 0 and 1 the score is 0 when the count
    matches exactly and infinite otherwise.
    """
    if n_trials < 1:
        raise DomainError(f"n_trials must be >= 1, got {n_trials}")
    if not 0 <= count_alpha <= n_trials:
        raise DomainError("count outside [0, n_trials]")
    if expected_p in (0.0, 1.0):
        z = 0.0 if count_alpha == int(round(expected_p * n_trials)) else math.inf
    else:
        z = (count_alpha - n_trials * expected_p) / math.sqrt(
            n_trials * expected_p * (1.0 - expected_p)
        )
    return FrequencySummary(int(n_trials), int(count_alpha), float(expected_p), float(z))


def _model_table(model: Model, value: float, lambda_max: int) -> tuple[float, np.ndarray | None]:
    """Expected probability and (for discrete models) the outcome table by level."""
    if model is Model.CONTINUOUS:
        _check_unit_interval(value, "t")
        return continuous_probability(value), None
    if model is Model.GREEDY:
        return value, expand(value, lambda_max, DyadicRule.GREEDY).alpha_bools()
    if model is Model.GEOMETRIC:
        _check_unit_interval(value, "t")
        return continuous_probability(value), expand_geometric_t(value, lambda_max).alpha_bools()
    raise DomainError(f"unknown model {model!r}")


def _alpha_flags(
    model: Model, value: float, n: int, rng: RandomSource, lambda_max: int
) -> tuple[float, np.ndarray, np.ndarray]:
    """(expected_p, per-trial context values, per-trial ALPHA booleans)."""
    if n < 1:
        raise DomainError(f"trial count must be >= 1, got {n}")
    _check_lambda_max(lambda_max)
    expected, table = _model_table(model, value, lambda_max)
    if model is Model.CONTINUOUS:
        us = draw_uniforms(rng, n)
        return expected, us, us >= value
    lams = draw_lambdas(rng, n, lambda_max)
    return expected, lams, table[lams - 1]


def run_dichotomic(
    model: Model,
    value: float,
    n: int,
    rng: RandomSource,
    lambda_max: int = LAMBDA_CAP,
) -> FrequencySummary:
    """n independent trials of one dichotomic model.

    `value` is the target probability for GREEDY and the chord coordinate t
    for CONTINUOUS and GEOMETRIC (expected probability 1 - t).
    """
    expected, _, flags = _alpha_flags(model, value, n, rng, lambda_max)
    return summarize(n, int(flags.sum()), expected)


def dichotomic_trials(
    model: Model,
    value: float,
    n: int,
    rng: RandomSource,
    lambda_max: int = LAMBDA_CAP,
) -> list[TrialRecord]:
    """Materialized per-trial records; same draw path as run_dichotomic."""
    _, contexts, flags = _alpha_flags(model, value, n, rng, lambda_max)
    records = []
    for i in range(n):
        ctx = float(contexts[i]) if model is Model.CONTINUOUS else DiscreteContext(int(contexts[i]))
        out = DichotomicOutcome.ALPHA if flags[i] else DichotomicOutcome.NOT_ALPHA
        records.append(TrialRecord(i, ctx, out))
    return records


def run_history(
    p: StateVector,
    a: HomogeneousHistory | InhomogeneousHistory,
    convention: Convention,
    n: int,
    rng: RandomSource,
    lambda_max: int = LAMBDA_CAP,
) -> FrequencySummary:
    """Sample the deterministic history outcome over drawn context levels."""
    if isinstance(a, InhomogeneousHistory):
        prob = inhomogeneous_probability(p, a, convention)
        if prob > 1.0:
            raise DomainError(
                f"branch procedure probabilities sum to {prob!r}; a sum beyond 1"
                " cannot be realized by a single dichotomic context model"
            )
    else:
        prob = history_probability(p, a, convention)
    return run_dichotomic(Model.GREEDY, prob, n, rng, lambda_max)


def history_trials(
    p: StateVector,
    a: HomogeneousHistory,
    convention: Convention,
    n: int,
    rng: RandomSource,
    lambda_max: int = LAMBDA_CAP,
) -> list[TrialRecord]:
    """Per-trial records with history outcomes; same draw path as run_history."""
    prob = history_probability(p, a, convention)
    records = dichotomic_trials(Model.GREEDY, prob, n, rng, lambda_max)
    mapped = {DichotomicOutcome.ALPHA: HistoryOutcome.A,
              DichotomicOutcome.NOT_ALPHA: HistoryOutcome.NOT_A}
    return [TrialRecord(r.trial_index, r.context, mapped[r.outcome]) for r in records]


def lambda_preimage(
    prob: float, outcome: DichotomicOutcome, level: int, rule: DyadicRule = DyadicRule.GREEDY
) -> list[int]:
    """All levels <= `level` whose deterministic outcome matches `outcome`."""
    exp = expand(prob, level, rule)
    if outcome is DichotomicOutcome.ALPHA:
        return exp.alpha_levels()
    alpha = set(exp.alpha_levels())
    return [i for i in range(1, level + 1) if i not in alpha]


def exact_check(prob: float, level: int, rule: DyadicRule = DyadicRule.GREEDY) -> ExactCheckReport:
    """Exact partial-sum check: 0 <= prob - sum <= 2**-level, in integer arithmetic.

    abs_error is the exact numerator converted once to float; the bound flag
    itself is decided on integers. tail_mass is the weight of all levels
    beyond the enumeration cap, 2**-level.
    """
    exp = expand(prob, level, rule)
    return ExactCheckReport(
        rule=rule,
        target_p=float(prob),
        level=int(level),
        partial_sum=exp.partial_sum(),
        abs_error=exp.abs_error(),
        bound_satisfied=exp.bound_satisfied(),
        tail_mass=2.0 ** (-level),
    )
