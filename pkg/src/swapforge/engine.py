"""Protocol core: measurement rounds on the middle pair of two maximally
entangled pairs, Born-rule branching, conditional states, and per-branch
entanglement.

Wire layout is (1, 2, 3, 4): pair (1,2) is shared with the first distant
party, pair (3,4) with the second, measurements act on (2,3), and the
target pair is (1,4).  A measurement element with amplitude grid a[i, j]
on wires (2,3) steers the outer pair onto the conjugated grid, wire 1
taking the role of 2 and wire 4 the role of 3.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import prod

import numpy as np

from . import measures
from .errors import (
    BadDimension,
    InternalCheckError,
    IncompleteBranchSet,
    InvalidPovm,
    ShapeMismatch,
)
from .measures import CUT_12_34, CUT_14_23, i_concurrence, negativity, trace_distance
from .states import DensityMatrix, Povm, PovmElement, PureState, conjugate_computational
from .tolerances import PROB_TOL

__all__ = [
    "AllBranches",
    "ALL_BRANCHES",
    "DisturbanceReport",
    "MAX_BRANCHES",
    "OutcomeRecord",
    "SelectOutcome",
    "SwapScenario",
    "apply_element",
    "apply_round",
    "average_negativity",
    "chain",
    "disturbance_check",
    "initial_state",
    "reduced_states_round1",
    "rho12_contraction",
    "rho14_from_element",
    "rho14_two_round_spectral",
    "rho34_contraction",
    "second_round_probability",
    "state_from_element_spectral",
]

logger = logging.getLogger(__name__)

# Guard against K^rounds blowup in chain expansion.
MAX_BRANCHES = 100_000


@dataclass(frozen=True)
class AllBranches:
    """Expand every outcome of every round."""


ALL_BRANCHES = AllBranches()


@dataclass(frozen=True)
class SelectOutcome:
    """Follow a single outcome path, one index per round."""

    outcomes: tuple[int, ...]


@dataclass(frozen=True)
class SwapScenario:
    """A measurement chain on the middle pair."""

    local_dim: int
    rounds: tuple[Povm, ...]
    branch_policy: AllBranches | SelectOutcome = ALL_BRANCHES

    def __post_init__(self):
        d = int(self.local_dim)
        if d < 2:
            raise BadDimension(f"local_dim must be >= 2, got {d}")
        rounds = tuple(self.rounds)
        if not rounds:
            raise InvalidPovm("a scenario needs at least one measurement round")
        for povm in rounds:
            if povm.local_dim != d:
                raise ShapeMismatch(
                    f"round POVM acts on dimension {povm.local_dim}^2, scenario has d={d}"
                )
        if isinstance(self.branch_policy, SelectOutcome):
            sel = self.branch_policy.outcomes
            if len(sel) != len(rounds):
                raise ShapeMismatch("SelectOutcome needs one outcome index per round")
            for k, povm in zip(sel, rounds):
                if not 0 <= k < len(povm.elements):
                    raise ShapeMismatch(f"outcome index {k} out of range")
        object.__setattr__(self, "local_dim", d)
        object.__setattr__(self, "rounds", rounds)


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    """One branch of the measurement chain.

    ``probability`` is the joint weight of the whole outcome path; the
    per-round conditional probabilities are kept alongside so averages
    can be taken without renormalizing.  ``rho12``/``rho34`` are filled
    for first-round records only.
    """

    outcome_path: tuple[int, ...]
    probability: float
    round_probabilities: tuple[float, ...]
    full_state: PureState
    rho14: DensityMatrix
    rho12: DensityMatrix | None
    rho34: DensityMatrix | None
    negativity14: float
    c14vs23: float
    c12vs34: float
    element: PovmElement


def initial_state(d: int) -> PureState:
    """Two maximally entangled pairs (1,2) and (3,4) in wire order (1,2,3,4)."""
    d = int(d)
    if d < 2:
        raise BadDimension(f"local dimension must be >= 2, got {d}")
    amps = np.zeros((d, d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            amps[i, i, j, j] = 1.0 / d
    return PureState(amps.reshape(-1), (d, d, d, d))


def _require_four_wires(state: PureState) -> int:
    if state.n_wires != 4 or len(set(state.dims)) != 1:
        raise ShapeMismatch(f"expected four wires of equal dimension, got dims {state.dims}")
    return state.dims[0]


def apply_element(state: PureState, el: PovmElement) -> tuple[float, PureState | None]:
    """Born probability and normalized post-measurement state for one
    element acting on wires (2,3); the state is None when the branch
    probability is too small to normalize."""
    d = _require_four_wires(state)
    if el.local_dim != d:
        raise ShapeMismatch(f"element local dimension {el.local_dim} does not match d={d}")
    op = el.sqrt_matrix.reshape(d, d, d, d)
    out = np.einsum("klmn,imnj->iklj", op, state.tensor())
    p = float(np.vdot(out, out).real)
    if p < PROB_TOL:
        return p, None
    return p, PureState(out.reshape(-1) / np.sqrt(p), state.dims)


def _make_record(
    post: PureState,
    element: PovmElement,
    path: tuple[int, ...],
    round_probs: tuple[float, ...],
    include_pair_states: bool,
) -> OutcomeRecord:
    rho14 = post.reduced((0, 3))
    rho12 = post.reduced((0, 1)) if include_pair_states else None
    rho34 = post.reduced((2, 3)) if include_pair_states else None
    return OutcomeRecord(
        outcome_path=path,
        probability=float(prod(round_probs)),
        round_probabilities=round_probs,
        full_state=post,
        rho14=rho14,
        rho12=rho12,
        rho34=rho34,
        negativity14=negativity(rho14),
        c14vs23=i_concurrence(post, CUT_14_23),
        c12vs34=i_concurrence(post, CUT_12_34),
        element=element,
    )


def apply_round(
    state: PureState,
    povm: Povm,
    *,
    path_prefix: tuple[int, ...] = (),
    prior_round_probs: tuple[float, ...] = (),
    include_pair_states: bool = True,
    prob_tol: float = PROB_TOL,
) -> list[OutcomeRecord]:
    """Expand one measurement round into its nonzero-probability branches.

    Zero-probability outcomes (conditional probability below prob_tol)
    are omitted and logged; the returned conditional probabilities of a
    full expansion sum to one.
    """
    d = _require_four_wires(state)
    if povm.local_dim != d:
        raise InvalidPovm(f"POVM local dimension {povm.local_dim} does not match d={d}")
    records = []
    for n, el in enumerate(povm.elements):
        p, post = apply_element(state, el)
        if post is None or p < prob_tol:
            logger.debug(
                "skipping outcome %s: probability %.3e below %.0e",
                path_prefix + (n,), p, prob_tol,
            )
            continue
        records.append(
            _make_record(
                post, el, path_prefix + (n,), prior_round_probs + (p,), include_pair_states
            )
        )
    return records


def chain(scenario: SwapScenario, prob_tol: float = PROB_TOL) -> list[OutcomeRecord]:
    """Depth-first expansion of every round; returns the final-round records.

    Joint probabilities multiply along each path.  A one-round scenario
    reproduces apply_round on the initial state.
    """
    if isinstance(scenario.branch_policy, AllBranches):
        total = prod(len(p.elements) for p in scenario.rounds)
        if total > MAX_BRANCHES:
            raise InvalidPovm(f"scenario expands to {total} branches (limit {MAX_BRANCHES})")
    n_rounds = len(scenario.rounds)
    selected = (
        scenario.branch_policy.outcomes
        if isinstance(scenario.branch_policy, SelectOutcome)
        else None
    )
    leaves: list[OutcomeRecord] = []
    include_pairs_first = n_rounds == 1

    def expand(state: PureState, depth: int, path: tuple[int, ...], probs: tuple[float, ...]):
        povm = scenario.rounds[depth]
        last = depth == n_rounds - 1
        outcomes = range(len(povm.elements)) if selected is None else [selected[depth]]
        for n in outcomes:
            el = povm.elements[n]
            p, post = apply_element(state, el)
            if post is None or p < prob_tol:
                logger.debug("skipping branch %s: probability %.3e", path + (n,), p)
                continue
            if last:
                leaves.append(
                    _make_record(post, el, path + (n,), probs + (p,), include_pairs_first)
                )
            else:
                expand(post, depth + 1, path + (n,), probs + (p,))

    expand(initial_state(scenario.local_dim), 0, (), ())
    return leaves


def average_negativity(records: list[OutcomeRecord], prob_sum_tol: float = 1e-6) -> float:
    """Probability-weighted average of the branch negativities.

    The records must form a complete sibling set; branch negativities
    are nonnegative, so the average of an all-separable set is 0.
    """
    total = sum(rec.probability for rec in records)
    if abs(total - 1.0) > prob_sum_tol:
        raise IncompleteBranchSet(f"branch probabilities sum to {total!r}, expected 1")
    return float(sum(rec.probability * rec.negativity14 for rec in records))


# ---------------------------------------------------------------------------
# Conditional reduced states, first round.
# ---------------------------------------------------------------------------


def rho14_from_element(el: PovmElement) -> DensityMatrix:
    """Outer-pair state determined by the element alone: its computational
    conjugate normalized by its trace."""
    tr = el.trace
    if tr <= 0.0:
        raise InvalidPovm("outer-pair state undefined for a traceless element")
    d = el.local_dim
    return DensityMatrix(conjugate_computational(el.matrix) / tr, (d, d))


def reduced_states_round1(rec: OutcomeRecord) -> tuple[DensityMatrix, DensityMatrix, DensityMatrix]:
    """The three conditional pair states of a first-round record."""
    if rec.rho12 is None or rec.rho34 is None:
        raise ShapeMismatch("record does not carry first-round pair states")
    return rec.rho14, rec.rho12, rec.rho34


def _branch_amplitudes(el: PovmElement) -> np.ndarray:
    # t[i(w1), j(w4), k(w2), l(w3)]: one sqrt(pi) weight per spectral term
    a = el.basis_tensor()
    return np.einsum("a,aij,akl->ijkl", np.sqrt(el.spectral.eigenvalues), a.conj(), a)


def rho12_contraction(el: PovmElement) -> DensityMatrix:
    """(1,2)-pair state of the element's branch via the explicit index
    contraction over eigenbasis amplitudes (independent of partial traces)."""
    t = _branch_amplitudes(el)
    d = el.local_dim
    rho = np.einsum("ijkl,pjql->ikpq", t, t.conj()).reshape(d * d, d * d) / el.trace
    return DensityMatrix(rho, (d, d))


def rho34_contraction(el: PovmElement) -> DensityMatrix:
    """(3,4)-pair state of the element's branch via the explicit index
    contraction; wire 3 indexes first."""
    t = _branch_amplitudes(el)
    d = el.local_dim
    rho = np.einsum("ijkl,iJkL->ljLJ", t, t.conj()).reshape(d * d, d * d) / el.trace
    return DensityMatrix(rho, (d, d))


def state_from_element_spectral(el: PovmElement) -> PureState:
    """Full four-wire branch state rebuilt from the element's spectral
    data alone; equals the operational route's post-measurement state."""
    return measures.element_swap_state(el)


# ---------------------------------------------------------------------------
# Second round: spectral cross-checks.
# ---------------------------------------------------------------------------


def _overlaps(first: PovmElement, second: PovmElement) -> np.ndarray:
    # g[m, a] = <second basis m | first basis a>
    return second.spectral.eigenvectors.conj().T @ first.spectral.eigenvectors


def second_round_probability(rec: OutcomeRecord, em: PovmElement) -> float:
    """Probability of a second-round outcome on a first-round branch.

    Computed by the Born rule on the branch state and, independently,
    from the two elements' spectral data; the two must agree to 1e-10.
    Valid for records produced from the initial state.
    """
    born, _ = apply_element(rec.full_state, em)
    first = rec.element
    g = _overlaps(first, em)
    weights = np.outer(em.spectral.eigenvalues, first.spectral.eigenvalues)
    spectral = float((weights * np.abs(g) ** 2).sum()) / first.trace
    if abs(born - spectral) > 1e-10:
        raise InternalCheckError(
            f"second-round probability paths disagree: born={born!r} spectral={spectral!r}"
        )
    return born


def rho14_two_round_spectral(first: PovmElement, second: PovmElement) -> DensityMatrix:
    """Outer-pair state after two rounds, built from the double sum over
    both elements' spectral data (no four-wire state is formed)."""
    if first.local_dim != second.local_dim:
        raise ShapeMismatch("elements act on different local dimensions")
    d = first.local_dim
    g = _overlaps(first, second)
    mu = second.spectral.eigenvalues
    # coeff[a, b] = sum_m mu_m g[m, a] conj(g[m, b])
    coeff = np.einsum("m,ma,mb->ab", mu, g, g.conj())
    root_pi = np.sqrt(first.spectral.eigenvalues)
    weighted = coeff * np.outer(root_pi, root_pi)
    basis = first.spectral.eigenvectors.conj()  # columns are the conjugated grids
    rho = basis @ weighted @ basis.conj().T
    tr = float(np.trace(rho).real)
    if tr <= 0.0:
        raise InvalidPovm("two-round branch has vanishing probability")
    return DensityMatrix(rho / tr, (d, d))


@dataclass(frozen=True)
class DisturbanceReport:
    """Worst-case movement of the outer-pair state under a second measurement."""

    max_trace_distance: float
    max_negativity_change: float
    per_outcome: tuple[tuple[int, float, float], ...]


def disturbance_check(
    rec: OutcomeRecord, povm2: Povm, prob_tol: float = PROB_TOL
) -> DisturbanceReport:
    """How much a second measurement can move the outer-pair state of a
    branch: per-outcome trace distance and negativity change, plus maxima.

    Rank-one first elements leave every entry at zero up to rounding.
    """
    base_rho = rec.rho14
    base_neg = rec.negativity14
    per_outcome = []
    for m, em in enumerate(povm2.elements):
        p, post = apply_element(rec.full_state, em)
        if post is None or p < prob_tol:
            continue
        rho = post.reduced((0, 3))
        per_outcome.append(
            (m, trace_distance(rho, base_rho), abs(negativity(rho) - base_neg))
        )
    return DisturbanceReport(
        max_trace_distance=max((t for _, t, _ in per_outcome), default=0.0),
        max_negativity_change=max((n for _, _, n in per_outcome), default=0.0),
        per_outcome=tuple(per_outcome),
    )
