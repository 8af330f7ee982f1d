import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swapforge.classify import (
    ENTANGLED,
    INSEPARABLE_OPERATION,
    SEPARABLE_OPERATION,
    UNENTANGLED,
    UNENTANGLED_BOUNDARY,
    classify_element,
    classify_measurement,
    lemma1_predicate,
    lemma2_predicate,
    report_to_json,
)
from swapforge.errors import ZeroTrace
from swapforge.families import bell_projective, noisy_bell_povm, wire2_computational_povm
from swapforge.measures import negativity
from swapforge.sampling import (
    random_element,
    random_product_rank1_element,
    random_rank1_element,
    random_separable_element,
)
from swapforge.states import Povm, PovmElement

from conftest import rng_from

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def test_bell_projector_classification():
    ec = classify_element(bell_projective().elements[0])
    assert ec.verdict == ENTANGLED
    assert ec.rank == 1
    assert ec.c14vs23 == pytest.approx(0.0, abs=1e-12)
    assert ec.operation_kind == INSEPARABLE_OPERATION


def test_noisy_bell_inside_separable_region():
    ec = classify_element(noisy_bell_povm(0.2).elements[0])
    assert ec.verdict == UNENTANGLED
    assert ec.rank == 4
    assert ec.c14vs23 == pytest.approx(np.sqrt(0.96), abs=1e-12)
    assert ec.operation_kind == INSEPARABLE_OPERATION


def test_product_projector_is_separable_operation():
    ec = classify_element(PovmElement(np.diag([1.0, 0, 0, 0])))
    assert ec.verdict in (UNENTANGLED, UNENTANGLED_BOUNDARY)
    assert ec.verdict != ENTANGLED
    assert ec.rank == 1
    assert ec.operation_kind == SEPARABLE_OPERATION


def test_boundary_flag_at_one_third():
    assert classify_element(noisy_bell_povm(1 / 3).elements[0]).verdict == UNENTANGLED_BOUNDARY
    assert classify_element(noisy_bell_povm(1 / 3 - 1e-6).elements[0]).verdict == UNENTANGLED
    assert classify_element(noisy_bell_povm(1 / 3 + 1e-6).elements[0]).verdict == ENTANGLED


def test_classify_zero_trace_raises():
    with pytest.raises(ZeroTrace):
        classify_element(PovmElement(np.zeros((4, 4))))


def test_classify_measurement_bell_projective():
    report = classify_measurement(bell_projective())
    assert report.measurement_entangled
    assert report.lemma1_blocked
    assert report.lemma2_open_outcomes == ()
    assert not report.measurement_separable_operation


def test_classify_measurement_noisy_bell_quarter():
    report = classify_measurement(noisy_bell_povm(0.25))
    assert not report.measurement_entangled
    assert report.lemma2_open_outcomes == (0, 1, 2, 3)
    assert not report.lemma1_blocked


def test_classify_measurement_computational_product_basis():
    mats = [np.zeros((4, 4)) for _ in range(4)]
    for k in range(4):
        mats[k][k, k] = 1.0
    report = classify_measurement(Povm.from_matrices(mats, local_dim=2))
    assert report.measurement_separable_operation
    assert report.lemma1_blocked
    assert not report.measurement_entangled


def test_classify_measurement_wire2_computational():
    report = classify_measurement(wire2_computational_povm())
    assert report.measurement_separable_operation
    assert not report.measurement_entangled
    assert all(ec.rank == 2 for ec in report.per_element)


# ---------------------------------------------------------------------------
# lemma predicates
# ---------------------------------------------------------------------------


def test_lemma1_predicate_values(rng):
    assert lemma1_predicate(random_rank1_element(rng))
    assert not lemma1_predicate(PovmElement(np.eye(4)))
    assert lemma1_predicate(noisy_bell_povm(1.0).elements[0])


def test_lemma2_predicate_values(rng):
    assert lemma2_predicate(noisy_bell_povm(0.5).elements[0])
    assert not lemma2_predicate(bell_projective().elements[0])  # rank 1
    assert lemma2_predicate(PovmElement(np.eye(4)))  # rank 4, c14 = 1


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def test_entangled_verdict_implies_entangled_outer_pair(rng):
    from swapforge.engine import rho14_from_element

    entangled_seen = 0
    while entangled_seen < 200:
        el = random_element(rng, rank=int(rng.integers(1, 5)))
        ec = classify_element(el)
        if ec.verdict != ENTANGLED:
            continue
        entangled_seen += 1
        assert negativity(rho14_from_element(el)) > 1e-10


@given(seeds)
def test_unentangled_zero_c14_forces_zero_c12(seed):
    rng = rng_from(seed)
    el = (
        random_product_rank1_element(rng)
        if seed % 2
        else random_separable_element(rng, terms=3)
    )
    ec = classify_element(el)
    if ec.c14vs23 <= 1e-9:
        assert ec.c12vs34 <= 1e-9


def test_separable_operation_flag_invariant_under_rescale_and_reorder():
    povm = wire2_computational_povm()
    base = classify_measurement(povm)
    # reorder
    reordered = Povm(elements=tuple(reversed(povm.elements)), local_dim=2)
    assert (
        classify_measurement(reordered).measurement_separable_operation
        == base.measurement_separable_operation
    )
    # elementwise rescale keeps each element's operation kind
    for el in povm.elements:
        scaled = PovmElement(0.3 * el.matrix)
        assert classify_element(scaled).operation_kind == SEPARABLE_OPERATION


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_report_serialization_round_trip_fields():
    report = classify_measurement(noisy_bell_povm(0.2))
    doc = json.loads(report_to_json(report))
    assert doc["measurement_entangled"] is False
    assert doc["lemma2_open_outcomes"] == [0, 1, 2, 3]
    assert len(doc["per_element"]) == 4
    first = doc["per_element"][0]
    assert first["verdict"] == "unentangled"
    assert first["c14vs23"] == pytest.approx(np.sqrt(0.96), abs=1e-12)


def test_report_serialization_renames_ppt_beyond_qubits(rng):
    el = random_separable_element(rng, d=3, terms=2)
    report = classify_measurement(
        Povm.from_matrices([el.matrix, np.eye(9) - el.matrix], local_dim=3)
    )
    doc = json.loads(report_to_json(report))
    for entry in doc["per_element"]:
        assert entry["verdict"] in ("ppt", "ppt-boundary", "entangled")
        assert "unentangled" not in entry["verdict"]
