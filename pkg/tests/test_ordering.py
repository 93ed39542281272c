"""Measurement-ordering contextuality and the order-free induced model."""

from __future__ import annotations

import math

import numpy as np
import pytest

from eprb_lab.core import (
    AngleQuadruple,
    GridScheme,
    LambdaSpace,
    probe_locality,
    theta_between,
    uniform_distribution,
)
from eprb_lab.inequalities import stats_from_model
from eprb_lab.models import SequentialModel, sequential_singlet_model
from eprb_lab.ordering import (
    MocReport,
    induce_noncontextual,
    moc_demo,
    moc_transition_measure,
)
from eprb_lab.transition import full_report

CHAIN = AngleQuadruple.chain(math.pi / 4)


def order_blind_model() -> SequentialModel:
    """A sequential coin whose second answer ignores the order entirely."""
    space = LambdaSpace(2)

    def first_outcome(wing, own, coords):
        coords = np.asarray(coords, dtype=np.float64)
        return np.where(coords[..., 0] < 0.5, 1, -1).astype(np.int8)

    def second_outcome(wing, own, other, first_value, coords):
        return np.asarray(first_value)

    return SequentialModel(
        name="order-blind",
        space=space,
        equilibrium=uniform_distribution(space),
        first_outcome=first_outcome,
        second_outcome=second_outcome,
    )


def test_moc_measure_matches_flip_threshold():
    model = sequential_singlet_model()
    named = CHAIN.named_angles()
    scheme = GridScheme(1024)
    for wing, own, other in (("A", "a", "b"), ("A", "a", "b'"), ("B", "b'", "a'"), ("B", "b", "a")):
        estimate = moc_transition_measure(
            model, model.equilibrium, named[own], named[other], wing, scheme
        )
        theta = theta_between(named[own], named[other])
        assert estimate.value == pytest.approx((1 + math.cos(theta)) / 2, abs=1e-3)


def test_moc_measure_vanishes_at_opposite_settings():
    model = sequential_singlet_model()
    quad = AngleQuadruple.chain(math.pi)
    named = quad.named_angles()
    estimate = moc_transition_measure(
        model, model.equilibrium, named["a'"], named["b"], "A", GridScheme(256)
    )
    # settings pi apart never flip the second answer
    assert estimate.value == 0.0


def test_moc_measure_rejects_bad_wing():
    model = sequential_singlet_model()
    named = CHAIN.named_angles()
    with pytest.raises(ValueError, match="wing"):
        moc_transition_measure(
            model, model.equilibrium, named["a"], named["b"], "C", GridScheme(64)
        )


def test_order_blind_model_has_no_moc():
    model = order_blind_model()
    named = CHAIN.named_angles()
    estimate = moc_transition_measure(
        model, model.equilibrium, named["a"], named["b"], "A", GridScheme(128)
    )
    assert estimate.value == 0.0
    # the induced model reproduces the blind model's own statistics
    induced = induce_noncontextual(model)
    stats = stats_from_model(induced, induced.equilibrium, CHAIN, GridScheme(128))
    assert stats.p_plus == (1.0, 1.0, 1.0, 1.0)


def test_induced_model_is_local_and_transition_free():
    model = sequential_singlet_model()
    induced = induce_noncontextual(model)
    assert induced.name == "sequential-singlet+order-free"
    assert induced.locality_tag == "local"
    assert probe_locality(induced, seed=5)
    report = full_report(induced, induced.equilibrium, CHAIN, GridScheme(256))
    assert report.sigma_minus.value == 0.0
    assert report.region_measures["none"].value == 1.0
    # both wings answer with the same shared coin, so products are all +1
    stats = stats_from_model(induced, induced.equilibrium, CHAIN, GridScheme(256))
    assert stats.p_plus == (1.0, 1.0, 1.0, 1.0)


def test_moc_demo_report():
    report = moc_demo(sequential_singlet_model(), CHAIN, GridScheme(512))
    assert isinstance(report, MocReport)
    assert report.wing in ("A", "B")
    assert report.moc_measure.value == 437 / 512
    assert report.moc_measure.value == pytest.approx((1 + math.cos(math.pi / 4)) / 2, abs=1e-3)
    assert report.induced_sigma_minus.value == 0.0
    assert report.induced_bell_lhs == 2.0
    assert abs(report.quantum_required - (math.sqrt(2) - 1)) < 1e-12
    assert report.quantum_required > 0.0
    assert "companion" in report.pair and report.pair.startswith(f"{report.wing}@")


def test_moc_demo_degenerate_quadruple():
    report = moc_demo(sequential_singlet_model(), AngleQuadruple.chain(math.pi), GridScheme(128))
    # every cross-wing pairing sits pi apart, so order never matters and the
    # statistics demand nothing
    assert report.moc_measure.value == 0.0
    assert report.quantum_required == 0.0


def test_moc_report_json_keys():
    report = moc_demo(sequential_singlet_model(), CHAIN, GridScheme(64))
    blob = report.to_json()
    assert set(blob) == {
        "pair",
        "wing",
        "own",
        "other",
        "moc_measure",
        "induced_sigma_minus",
        "induced_bell_lhs",
        "quantum_required",
    }
    assert blob["moc_measure"]["value"] == report.moc_measure.value
    assert blob["own"] == report.own.radians
