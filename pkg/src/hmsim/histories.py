"""History propositions as projectors on a tensor-product space.

A homogeneous history is a time-ordered sequence of projectors, represented
as the pure-tensor projector of its slots. Negation is identity minus that
tensor; a disjoint family of homogeneous histories is represented by the sum
of the branch tensors. Probabilities come from chaining the slot projectors
through the initial state.

Two probability conventions are provided. LUEDERS renormalizes the state
after every slot and multiplies the step survival weights, giving the
sequential-measurement value ||pi_n ... pi_1 p||^2; it satisfies
P(A) + P(not A) = 1. LITERAL evaluates the tensor-space expectation on the
raw unnormalized projection chain, which multiplies the cumulative survival
weights instead; the two agree for single-time histories and differ beyond
that. LUEDERS is the default everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dichotomic import DichotomicOutcome, dyadic_outcome
from .errors import (
    DimensionError,
    DisjointnessError,
    DomainError,
    InfeasibleError,
    SupportError,
)
from .hilbert import (
    Projector,
    StateVector,
    TensorFactorization,
    UnitaryMap,
    apply_projector,
    complement_projector,
    conjugate,
    tensor_projectors,
    tensor_vectors,
)

DISJOINT_TOL = 1e-10
CONTAINMENT_TOL = 1e-10
ZERO_SURVIVAL_TOL = 1e-24  # on a squared norm


class Convention(Enum):
    LUEDERS = "lueders"
    LITERAL = "literal"


class HistoryForm(Enum):
    PURE_TENSOR = "pure_tensor"
    COMPLEMENT = "complement"
    DISJOINT_SUM = "disjoint_sum"


class HistoryOutcome(Enum):
    A = "A"
    NOT_A = "NOT_A"


@dataclass(frozen=True)
class TemporalSupport:
    """Strictly increasing, nonempty time stamps."""

    times: tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        if not ts:
            raise SupportError("temporal support must contain at least one time")
        if any(not (a < b) for a, b in zip(ts, ts[1:])):
            raise SupportError(f"times must be strictly increasing, got {ts}")
        object.__setattr__(self, "times", ts)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True, eq=False)
class HomogeneousHistory:
    support: TemporalSupport
    projectors: tuple[Projector, ...]

    def __post_init__(self):
        projs = tuple(self.projectors)
        if len(projs) != len(self.support):
            raise DimensionError(
                f"{len(projs)} projectors for {len(self.support)} time points"
            )
        object.__setattr__(self, "projectors", projs)

    @classmethod
    def at_times(cls, times, projectors) -> "HomogeneousHistory":
        return cls(TemporalSupport(tuple(times)), tuple(projectors))

    @property
    def length(self) -> int:
        return len(self.projectors)

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return tuple(p.space_dim for p in self.projectors)


@dataclass(frozen=True, eq=False)
class HistoryProjector:
    """Projector on the product space together with its provenance form."""

    factorization: TensorFactorization
    matrix: Projector
    form: HistoryForm

    def __post_init__(self):
        if self.factorization.total_dim != self.matrix.space_dim:
            raise DimensionError("factorization does not cover the projector's space")


@dataclass(frozen=True, eq=False)
class InhomogeneousHistory:
    """Disjoint family of homogeneous histories on one support.

    The branch list is a chosen decomposition: it fixes the physical
    procedure, so two different branch lists with the same projector sum are
    deliberately distinct values.
    """

    branches: tuple[HomogeneousHistory, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise DisjointnessError("at least one branch required")
        for b in branches[1:]:
            _check_same_layout(branches[0], b)
        for i in range(len(branches)):
            for j in range(i + 1, len(branches)):
                if not _tensors_orthogonal(branches[i], branches[j]):
                    raise DisjointnessError(f"branches {i} and {j} are not disjoint")
        object.__setattr__(self, "branches", branches)


@dataclass(frozen=True, eq=False)
class PseudoProjection:
    """Normalized projection chain of an initial state along a history.

    `chain` holds the pre-slot states (q0 = p, then the renormalized image
    after each of the first n-1 slots); `survival` holds the squared norms
    lost at those steps. If a step annihilates the state the chain stops
    there and `annihilated` is set.
    """

    chain: tuple[StateVector, ...]
    tensor: StateVector
    survival: tuple[float, ...]
    annihilated: bool


def _check_same_layout(a: HomogeneousHistory, b: HomogeneousHistory) -> None:
    if a.support != b.support:
        raise SupportError("histories have different temporal supports")
    if a.factor_dims != b.factor_dims:
        raise SupportError("histories have different slot dimensions")


def _tensors_orthogonal(a: HomogeneousHistory, b: HomogeneousHistory) -> bool:
    prod = hpo_projector(a).matrix.matrix @ hpo_projector(b).matrix.matrix
    return float(np.max(np.abs(prod))) <= DISJOINT_TOL


def hpo_projector(a: HomogeneousHistory) -> HistoryProjector:
    """Pure-tensor projector of the history's slots."""
    return HistoryProjector(
        TensorFactorization(a.factor_dims),
        tensor_projectors(a.projectors),
        HistoryForm.PURE_TENSOR,
    )


def hpo_negation(a: HomogeneousHistory) -> HistoryProjector:
    """Identity minus the pure tensor."""
    return HistoryProjector(
        TensorFactorization(a.factor_dims),
        complement_projector(tensor_projectors(a.projectors)),
        HistoryForm.COMPLEMENT,
    )


def are_disjoint(a: HomogeneousHistory, b: HomogeneousHistory) -> bool:
    _check_same_layout(a, b)
    return _tensors_orthogonal(a, b)


def disjoint_or(branches) -> HistoryProjector:
    """Sum of the branch tensors of a pairwise-disjoint family."""
    branches = tuple(branches)
    if not branches:
        raise DisjointnessError("at least one branch required")
    for b in branches[1:]:
        _check_same_layout(branches[0], b)
    for i in range(len(branches)):
        for j in range(i + 1, len(branches)):
            if not _tensors_orthogonal(branches[i], branches[j]):
                raise DisjointnessError(f"branches {i} and {j} are not disjoint")
    total = sum(hpo_projector(b).matrix.matrix for b in branches)
    return HistoryProjector(
        TensorFactorization(branches[0].factor_dims),
        Projector(total),
        HistoryForm.DISJOINT_SUM,
    )


def downset_contains(candidate: HomogeneousHistory, family) -> bool:
    """True iff the candidate tensor lies below some family member slotwise.

    Slot containment is range(pi_cand) inside range(pi_fam), checked as
    pi_fam pi_cand == pi_cand.
    """
    family = tuple(family)
    for member in family:
        _check_same_layout(candidate, member)
    for member in family:
        ok = True
        for pc, pf in zip(candidate.projectors, member.projectors):
            if float(np.max(np.abs(pf.matrix @ pc.matrix - pc.matrix))) > CONTAINMENT_TOL:
                ok = False
                break
        if ok:
            return True
    return False


def _require_state_fits(p: StateVector, a: HomogeneousHistory) -> None:
    p.require_normalized()
    for k, proj in enumerate(a.projectors):
        if proj.space_dim != p.space_dim:
            raise DimensionError(
                f"slot {k} has dim {proj.space_dim}, state has dim {p.space_dim}"
            )


def pseudo_project(p: StateVector, a: HomogeneousHistory) -> PseudoProjection:
    """Chain the state through the first n-1 slots, renormalizing each step."""
    _require_state_fits(p, a)
    chain: list[StateVector] = [p]
    survival: list[float] = []
    annihilated = False
    for proj in a.projectors[:-1]:
        w = apply_projector(proj, chain[-1])
        s = w.norm_sq()
        survival.append(s)
        if s < ZERO_SURVIVAL_TOL:
            annihilated = True
            break
        chain.append(StateVector(w.amplitudes / math.sqrt(s)))
    return PseudoProjection(tuple(chain), tensor_vectors(chain), tuple(survival), annihilated)


def history_probability(
    p: StateVector, a: HomogeneousHistory, convention: Convention = Convention.LUEDERS
) -> float:
    """Probability of the affirmative outcome for a homogeneous history.

    LUEDERS multiplies the per-step survival weights of the renormalized
    chain (telescopes to ||pi_n ... pi_1 p||^2). LITERAL evaluates the
    tensor expectation on the unnormalized chain, i.e. the product of the
    cumulative survivals ||pi_k ... pi_1 p||^2 over all slots.
    """
    _require_state_fits(p, a)
    if convention is Convention.LUEDERS:
        state = p
        prob = 1.0
        for proj in a.projectors:
            w = apply_projector(proj, state)
            s = w.norm_sq()
            if s < ZERO_SURVIVAL_TOL:
                return 0.0
            prob *= s
            state = StateVector(w.amplitudes / math.sqrt(s))
        return min(prob, 1.0)
    if convention is Convention.LITERAL:
        amps = p.amplitudes
        prob = 1.0
        for proj in a.projectors:
            amps = proj.matrix @ amps
            prob *= float(np.real(np.vdot(amps, amps)))
            if prob < ZERO_SURVIVAL_TOL:
                return 0.0
        return min(prob, 1.0)
    raise DomainError(f"unknown convention {convention!r}")


def inhomogeneous_probability(
    p: StateVector, h: InhomogeneousHistory, convention: Convention = Convention.LUEDERS
) -> float:
    """Branch probabilities summed in index order, one procedure per branch.

    Roundoff can push a sum that is mathematically 1 a few ulps above it;
    such sums are snapped back to 1. Larger sums are genuinely possible
    (each branch is its own procedure, so the terms need not be exclusive
    events of a single experiment) and are returned as computed.
    """
    total = sum(history_probability(p, b, convention) for b in h.branches)
    if 1.0 < total <= 1.0 + 1e-12:
        return 1.0
    return total


def history_hms_outcome(
    p: StateVector,
    a: HomogeneousHistory,
    lam: int,
    convention: Convention = Convention.LUEDERS,
) -> HistoryOutcome:
    """Deterministic outcome at context level lam (greedy rule on the probability)."""
    out = dyadic_outcome(history_probability(p, a, convention), lam)
    return HistoryOutcome.A if out is DichotomicOutcome.ALPHA else HistoryOutcome.NOT_A


def trajectory(
    p: StateVector, a: HomogeneousHistory, outcome: HistoryOutcome
) -> tuple[StateVector, ...] | None:
    """Post-slot states when the affirmative outcome occurred; None otherwise.

    A negative outcome determines no trajectory. Requesting the affirmative
    trajectory when its probability vanishes is infeasible.
    """
    if outcome is HistoryOutcome.NOT_A:
        return None
    _require_state_fits(p, a)
    states: list[StateVector] = []
    current = p
    for proj in a.projectors:
        w = apply_projector(proj, current)
        s = w.norm_sq()
        if s < ZERO_SURVIVAL_TOL:
            raise InfeasibleError("affirmative outcome has probability zero")
        current = StateVector(w.amplitudes / math.sqrt(s))
        states.append(current)
    return tuple(states)


def conjugate_history(a: HomogeneousHistory, us) -> HomogeneousHistory:
    """Slotwise unitary conjugation of the history's projectors."""
    us = tuple(us)
    if len(us) != a.length:
        raise DimensionError(f"{len(us)} unitaries for {a.length} slots")
    rotated = tuple(conjugate(p, u) for p, u in zip(a.projectors, us))
    return HomogeneousHistory(a.support, rotated)


def uniform_unitaries(u: UnitaryMap, n: int) -> tuple[UnitaryMap, ...]:
    """The same unitary repeated for every slot."""
    return (u,) * n
