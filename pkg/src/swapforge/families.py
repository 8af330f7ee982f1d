"""Constructors for the parametric measurement families used by the
protocol: the white-noise Bell measurement, the Bell projective basis,
the single-wire computational measurement, and separable product
operations built from single-qubit factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, IncompletePovm, ZeroTrace
from .linalg import kron
from .states import Povm, PovmElement, read_povm
from .tolerances import COMPLETENESS_TOL

__all__ = [
    "BELL_STATES",
    "FAMILIES",
    "SingleQubitElementParams",
    "bell_projective",
    "build_family",
    "family_sweep_params",
    "noisy_bell_povm",
    "separable_product_povm",
    "single_qubit_element",
    "single_qubit_residual_concurrence",
    "wire2_computational_povm",
]

_S2 = 1.0 / np.sqrt(2.0)

# Bell basis in outcome order (phi+, phi-, psi+, psi-); report outcome
# indices follow this ordering.
BELL_STATES = np.array(
    [
        [_S2, 0.0, 0.0, _S2],
        [_S2, 0.0, 0.0, -_S2],
        [0.0, _S2, _S2, 0.0],
        [0.0, _S2, -_S2, 0.0],
    ],
    dtype=complex,
)
BELL_STATES.setflags(write=False)


def noisy_bell_povm(lam: float) -> Povm:
    """Bell measurement mixed with white noise:
    each element is lam * |bell_n><bell_n| + (1 - lam)/4 * I."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise BadParameter(f"lambda must lie in [0, 1], got {lam!r}")
    eye = np.eye(4, dtype=complex)
    els = [
        PovmElement(lam * np.outer(b, b.conj()) + (1.0 - lam) / 4.0 * eye)
        for b in BELL_STATES
    ]
    return Povm(elements=tuple(els), local_dim=2)


def bell_projective() -> Povm:
    """The four rank-one Bell projectors."""
    return noisy_bell_povm(1.0)


def wire2_computational_povm() -> Povm:
    """Computational-basis measurement of wire 2 alone, written on the
    full (2,3) pair: E1 = |0><0| x I, E2 = |1><1| x I (rank two each)."""
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    return Povm(
        elements=(PovmElement(kron(p0, eye)), PovmElement(kron(p1, eye))),
        local_dim=2,
    )


@dataclass(frozen=True)
class SingleQubitElementParams:
    """A single-qubit PSD factor tau1 |v1><v1| + tau2 |v2><v2| with
    v1 = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> and v2 orthogonal."""

    theta: float
    phi: float
    tau1: float
    tau2: float

    def __post_init__(self):
        if self.tau1 < 0.0 or self.tau2 < 0.0:
            raise BadParameter(f"weights must be nonnegative, got ({self.tau1}, {self.tau2})")


def single_qubit_element(p: SingleQubitElementParams) -> np.ndarray:
    half = p.theta / 2.0
    phase = np.exp(1j * p.phi)
    v1 = np.array([np.cos(half), phase * np.sin(half)], dtype=complex)
    v2 = np.array([np.sin(half), -phase * np.cos(half)], dtype=complex)
    return p.tau1 * np.outer(v1, v1.conj()) + p.tau2 * np.outer(v2, v2.conj())


def separable_product_povm(pairs) -> Povm:
    """POVM with product elements A_n x B_n from single-qubit factor
    parameters; the caller owns closure to the identity."""
    mats = [kron(single_qubit_element(a), single_qubit_element(b)) for a, b in pairs]
    total = sum(mats)
    deviation = float(np.abs(total - np.eye(4)).max())
    if deviation > COMPLETENESS_TOL:
        raise IncompletePovm(
            f"product elements sum deviates from identity by {deviation:.3e}"
        )
    return Povm(elements=tuple(PovmElement(m) for m in mats), local_dim=2)


def single_qubit_residual_concurrence(p: SingleQubitElementParams) -> float:
    """Entanglement kept by one pair when a single-qubit factor acts on
    its second wire: 2 sqrt(tau1 tau2) / (tau1 + tau2), independent of
    the basis angles."""
    total = p.tau1 + p.tau2
    if total <= 0.0:
        raise ZeroTrace("residual concurrence undefined for a zero factor")
    return float(2.0 * np.sqrt(p.tau1 * p.tau2) / total)


# ---------------------------------------------------------------------------
# Family registry used by scenario configs.  Each entry maps the family
# name to a builder taking the params mapping, plus the set of parameter
# names a sweep may vary.
# ---------------------------------------------------------------------------


def _build_noisy_bell(params: dict) -> Povm:
    if "lambda" not in params:
        raise BadParameter("noisy_bell needs a 'lambda' parameter")
    return noisy_bell_povm(params["lambda"])


def _build_bell_projective(params: dict) -> Povm:
    return bell_projective()


def _build_wire2_computational(params: dict) -> Povm:
    return wire2_computational_povm()


def _build_separable_product(params: dict) -> Povm:
    try:
        pairs = [
            (
                SingleQubitElementParams(**entry["a"]),
                SingleQubitElementParams(**entry["b"]),
            )
            for entry in params["elements"]
        ]
    except (KeyError, TypeError) as exc:
        raise BadParameter(f"separable_product needs elements: [{{a: ..., b: ...}}]: {exc}")
    return separable_product_povm(pairs)


def _build_file(params: dict) -> Povm:
    if "path" not in params:
        raise BadParameter("file family needs a 'path' parameter")
    return read_povm(params["path"])


FAMILIES = {
    "noisy_bell": _build_noisy_bell,
    "bell_projective": _build_bell_projective,
    "wire2_computational": _build_wire2_computational,
    "separable_product": _build_separable_product,
    "file": _build_file,
}

_SWEEPABLE = {
    "noisy_bell": frozenset({"lambda"}),
    "bell_projective": frozenset(),
    "wire2_computational": frozenset(),
    "separable_product": frozenset(),
    "file": frozenset(),
}


def family_sweep_params(name: str) -> frozenset[str]:
    if name not in _SWEEPABLE:
        raise BadParameter(f"unknown measurement family {name!r}")
    return _SWEEPABLE[name]


def build_family(name: str, params: dict | None = None) -> Povm:
    if name not in FAMILIES:
        raise BadParameter(f"unknown measurement family {name!r}")
    return FAMILIES[name](dict(params or {}))
