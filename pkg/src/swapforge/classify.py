"""Classification of POVM elements and whole measurements.

Element verdicts come from the partial-transpose test on the normalized
element, which is an exact separability criterion for a pair of qubits;
for larger local dimension the unentangled verdict only certifies PPT
and is labelled that way in serialized reports.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .errors import ShapeMismatch, ZeroTrace
from .measures import c12_vs_34, c14_vs_23
from .states import Povm, PovmElement
from .tolerances import INSEP_TOL, PPT_TOL, RANK_REL_TOL

__all__ = [
    "ClassificationReport",
    "ElementClass",
    "ENTANGLED",
    "INSEPARABLE_OPERATION",
    "SEPARABLE_OPERATION",
    "UNENTANGLED",
    "UNENTANGLED_BOUNDARY",
    "classify_element",
    "classify_measurement",
    "lemma1_predicate",
    "lemma2_predicate",
    "report_to_json",
    "verdict_label",
]

ENTANGLED = "entangled"
UNENTANGLED = "unentangled"
UNENTANGLED_BOUNDARY = "unentangled-boundary"

SEPARABLE_OPERATION = "separable-operation"
INSEPARABLE_OPERATION = "inseparable-operation"


@dataclass(frozen=True)
class ElementClass:
    """Per-element verdicts and the numbers they were decided on."""

    verdict: str
    min_pt_eigenvalue: float
    rank: int
    c14vs23: float
    c12vs34: float
    operation_kind: str
    local_dim: int


@dataclass(frozen=True)
class ClassificationReport:
    """Aggregate classification of a whole measurement."""

    per_element: tuple[ElementClass, ...]
    measurement_entangled: bool
    measurement_separable_operation: bool
    lemma1_blocked: bool
    lemma2_open_outcomes: tuple[int, ...]
    local_dim: int


def _min_pt_eigenvalue(el: PovmElement) -> float:
    normalized = el.matrix / el.trace
    pt = linalg.partial_transpose(normalized, el.dims, 1)
    return float(np.linalg.eigvalsh(pt)[0])


def classify_element(
    el: PovmElement,
    d: int | None = None,
    ppt_tol: float = PPT_TOL,
    insep_tol: float = INSEP_TOL,
    rank_rel_tol: float = RANK_REL_TOL,
) -> ElementClass:
    """Classify one measurement element.

    Values within ppt_tol of the separability edge get the boundary
    verdict rather than being silently rounded to either side.
    """
    if el.trace <= 0.0:
        raise ZeroTrace("cannot classify a traceless element")
    if d is not None and d != el.local_dim:
        raise ShapeMismatch(f"element local dimension {el.local_dim} does not match d={d}")
    min_pt = _min_pt_eigenvalue(el)
    if min_pt < -ppt_tol:
        verdict = ENTANGLED
    elif min_pt <= ppt_tol:
        verdict = UNENTANGLED_BOUNDARY
    else:
        verdict = UNENTANGLED
    c14 = c14_vs_23(el)
    c12 = c12_vs_34(el)
    kind = INSEPARABLE_OPERATION if c12 > insep_tol else SEPARABLE_OPERATION
    return ElementClass(
        verdict=verdict,
        min_pt_eigenvalue=min_pt,
        rank=linalg.matrix_rank(el.matrix, rel_tol=rank_rel_tol),
        c14vs23=c14,
        c12vs34=c12,
        operation_kind=kind,
        local_dim=el.local_dim,
    )


def classify_measurement(
    povm: Povm,
    ppt_tol: float = PPT_TOL,
    insep_tol: float = INSEP_TOL,
    rank_rel_tol: float = RANK_REL_TOL,
) -> ClassificationReport:
    """Classify every element and aggregate the measurement-level flags."""
    per_element = tuple(
        classify_element(el, ppt_tol=ppt_tol, insep_tol=insep_tol, rank_rel_tol=rank_rel_tol)
        for el in povm.elements
    )
    return ClassificationReport(
        per_element=per_element,
        measurement_entangled=any(ec.verdict == ENTANGLED for ec in per_element),
        measurement_separable_operation=all(
            ec.operation_kind == SEPARABLE_OPERATION for ec in per_element
        ),
        lemma1_blocked=all(ec.rank <= 1 for ec in per_element),
        lemma2_open_outcomes=tuple(
            i for i, ec in enumerate(per_element) if ec.rank > 1 and ec.c14vs23 > insep_tol
        ),
        local_dim=povm.local_dim,
    )


def lemma1_predicate(el: PovmElement, rank_rel_tol: float = RANK_REL_TOL) -> bool:
    """True when the element is rank one or zero, i.e. no later measurement
    on the middle pair can disturb the outer pair of its branch."""
    return linalg.matrix_rank(el.matrix, rel_tol=rank_rel_tol) <= 1


def lemma2_predicate(
    el: PovmElement,
    insep_tol: float = INSEP_TOL,
    rank_rel_tol: float = RANK_REL_TOL,
) -> bool:
    """True when a second measurement has the potential to disturb the
    outer pair: rank above one and nonzero 14|23 concurrence."""
    if el.trace <= 0.0:
        raise ZeroTrace("lemma2 predicate undefined for a traceless element")
    if linalg.matrix_rank(el.matrix, rel_tol=rank_rel_tol) <= 1:
        return False
    return c14_vs_23(el) > insep_tol


def _sig15(x: float) -> float:
    return float(format(float(x), ".15g"))


def verdict_label(verdict: str, local_dim: int) -> str:
    """Verdict name for serialized reports.  Beyond a pair of qubits PPT
    does not certify separability, so the unentangled verdicts are
    relabelled to claim only what was tested."""
    if local_dim > 2:
        if verdict == UNENTANGLED:
            return "ppt"
        if verdict == UNENTANGLED_BOUNDARY:
            return "ppt-boundary"
    return verdict


def report_to_json(report: ClassificationReport) -> str:
    """Serialize a report; numbers carry 15 significant digits."""
    doc = asdict(report)
    for i, ec in enumerate(report.per_element):
        entry = doc["per_element"][i]
        entry["verdict"] = verdict_label(ec.verdict, ec.local_dim)
        entry["min_pt_eigenvalue"] = _sig15(ec.min_pt_eigenvalue)
        entry["c14vs23"] = _sig15(ec.c14vs23)
        entry["c12vs34"] = _sig15(ec.c12vs34)
    doc["lemma2_open_outcomes"] = list(report.lemma2_open_outcomes)
    return json.dumps(doc, indent=2)
