import json
import math
import warnings

import numpy as np
import pytest

from logholder import (
    ConstructionBudgetExceeded,
    ConstructionConfig,
    InvalidInput,
    InvariantViolation,
    PeriodicPotential,
    PhiFunction,
    band_edges,
    build_sequence,
    limit_proximity_bound,
    refine_once,
    spectrum_measure,
    verify_records,
)
from logholder.construct import StageRecord, candidate_seed, certify, stage_budget
from logholder.exceptions import ThinBandWarning

from conftest import DEMO_CONFIG, DEMO_PHI

# Frozen outputs of the demo construction (V0 = 0, C0 = 10, eps = 8,
# phi = 0.1 x^3, two stages, seed 1).
FROZEN = [
    dict(p=8, m=8, seed_used=1258465162, attempts=10, eps_j=0.37948942528747415,
         budget=4.0, lhs=0.9689285473898253, rhs=0.3497671429381511),
    dict(p=32, m=4, seed_used=2327607824, attempts=6, eps_j=0.19810558115292987,
         budget=0.09487235632186854, lhs=1.618955152262431, rhs=1.592282364575534),
]


def test_phi_function():
    phi = PhiFunction("power", 0.25)
    assert phi(16.0) == pytest.approx(2.0)
    assert phi.scaled(3.0)(16.0) == pytest.approx(6.0)
    assert PhiFunction("power", 3.0, 0.1).validate()
    assert PhiFunction("loglog", 1.0).validate()
    with pytest.raises(InvalidInput):
        PhiFunction("cubic", 1.0)
    with pytest.raises(InvalidInput):
        PhiFunction("power", -1.0)


def test_config_validation():
    with pytest.raises(InvalidInput):
        ConstructionConfig(C0=1.0, eps=2.0)
    with pytest.raises(InvalidInput):
        ConstructionConfig(stages=-1)
    with pytest.raises(InvalidInput):
        ConstructionConfig(period_cap=0)


def test_certify_recomputes(dimer):
    cert = certify(dimer, lambda x: 0.0)
    assert cert.measure == pytest.approx(2.0)
    assert cert.lhs == pytest.approx(-math.log(2.0))
    assert not cert.ok


def test_short_circuit():
    f = PeriodicPotential([8.0, -8.0])
    cfg = ConstructionConfig(C0=10, eps=1)
    g, info = refine_once(f, 1.0, lambda x: 1e-6 * x, cfg)
    assert g is f and info["m"] == 1 and info["seed_used"] is None


def test_budget_exceeded():
    cfg = ConstructionConfig(period_cap=2, candidate_attempts=2)
    with pytest.raises(ConstructionBudgetExceeded) as exc:
        refine_once(PeriodicPotential([0.0]), 0.5, lambda x: 1e3 * x ** 0.25, cfg)
    best, cert = exc.value.best
    assert best.period <= 2 and exc.value.gap == pytest.approx(cert.gap) and exc.value.gap > 0


def test_refine_once_precondition():
    with pytest.raises(InvalidInput):
        refine_once(PeriodicPotential([2.9]), 0.5, lambda x: x, ConstructionConfig())
    with pytest.raises(InvalidInput):
        refine_once(PeriodicPotential([0.0]), 0.0, lambda x: x, ConstructionConfig())


def test_candidate_seed_deterministic():
    assert candidate_seed(1, 2, 4, 0) == candidate_seed(1, 2, 4, 0)
    assert candidate_seed(1, 2, 4, 0) != candidate_seed(1, 2, 4, 1)


def test_stage_budget():
    assert stage_budget(0.5, [], 1) == 0.25
    assert stage_budget(0.5, [0.1], 2) == pytest.approx(0.025)


def test_zero_stages():
    assert build_sequence(PeriodicPotential([0.0]), PhiFunction(), ConstructionConfig(stages=0)) == []


def test_seed_potential_too_large():
    with pytest.raises(InvalidInput):
        build_sequence(PeriodicPotential([2.8]), PhiFunction(), ConstructionConfig())


def test_demo_frozen(demo_run):
    _, _, _, records = demo_run
    assert len(records) == 2
    for rec, ref in zip(records, FROZEN):
        for key, val in ref.items():
            assert getattr(rec, key) == pytest.approx(val, rel=1e-12, abs=0), key


def test_demo_invariants(demo_run):
    V0, phi, cfg, records = demo_run
    certs = verify_records(records, V0, phi, cfg)
    prev = V0
    for rec, cert in zip(records, certs):
        assert rec.p % prev.period == 0
        assert rec.actual_step <= rec.budget
        assert rec.supnorm <= prev.supnorm + rec.budget <= cfg.C0
        assert cert.lhs >= cert.rhs
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ThinBandWarning)
            assert spectrum_measure(band_edges(rec.potential)) == pytest.approx(rec.eps_j, rel=1e-12)
        assert rec.ids_error <= 4 * (rec.p + 1) / cfg.N_validate
        prev = rec.potential


def test_demo_deterministic(demo_run):
    V0, phi, cfg, records = demo_run
    again = build_sequence(V0, phi, cfg)
    a = json.dumps([r.to_dict() for r in records], sort_keys=True)
    b = json.dumps([r.to_dict() for r in again], sort_keys=True)
    assert a == b


def test_record_round_trip(demo_run):
    rec = demo_run[3][0]
    back = StageRecord.from_dict(json.loads(json.dumps(rec.to_dict())))
    assert back.potential == rec.potential and back.to_dict() == rec.to_dict()


def test_verify_detects_tampering(demo_run):
    V0, phi, cfg, records = demo_run
    bad = StageRecord.from_dict({**records[0].to_dict(), "eps_j": 0.1})
    with pytest.raises(InvariantViolation, match="eps_j"):
        verify_records([bad], V0, phi, cfg)
    moved = StageRecord.from_dict({**records[0].to_dict(), "values": (records[0].potential.values + 5).tolist()})
    with pytest.raises(InvariantViolation, match="budget"):
        verify_records([moved], V0, phi, cfg)


def test_limit_proximity_bound(demo_run):
    records = demo_run[3]
    J = len(records)
    assert limit_proximity_bound(records, J) == 0.0
    for j in range(J + 1):
        tail = limit_proximity_bound(records, j)
        eps_j = DEMO_CONFIG["eps"] if j == 0 else records[j - 1].eps_j
        assert tail <= eps_j * 2.0 ** -j
    assert limit_proximity_bound(records[:1], 0) == pytest.approx(DEMO_CONFIG["eps"] / 2)
    with pytest.raises(InvalidInput):
        limit_proximity_bound(records, J + 1)
