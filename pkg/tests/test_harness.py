import math

import numpy as np
import pytest

from mubentropy.harness import (
    CampaignConfig,
    Ensemble,
    SCAN_COLUMNS,
    angles_to_state,
    bound_comparison_scan,
    compass_search,
    corrupt_mub_set,
    joint_shannon_sums,
    run_verification_campaign,
    sample_state,
    separability_experiment,
    stream,
    tightness_search,
)
from mubentropy.linalg import purity
from mubentropy.mub import construct_full, fourier_pair


def test_stream_depends_only_on_key():
    a = stream(7, "x", 3).standard_normal(5)
    b = stream(7, "x", 3).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, stream(7, "x", 4).standard_normal(5))
    assert not np.array_equal(a, stream(8, "x", 3).standard_normal(5))


def test_sample_state_bit_identical():
    cfg = CampaignConfig(3, 4, 10, seed=123)
    assert np.array_equal(sample_state(cfg, 5).matrix, sample_state(cfg, 5).matrix)
    big = CampaignConfig(3, 4, 1000, seed=123)
    assert np.array_equal(sample_state(cfg, 5).matrix, sample_state(big, 5).matrix)


def test_ensemble_parse():
    assert Ensemble.parse("rank_limited:2") == Ensemble("rank_limited", 2)
    assert str(Ensemble.parse("haar_pure")) == "haar_pure"
    with pytest.raises(ValueError):
        Ensemble.parse("rank_limited")
    with pytest.raises(ValueError):
        Ensemble.parse("gaussian")


@pytest.mark.parametrize("ens", ["rank_limited:1", "haar_pure"])
def test_rank_one_states_pure(ens):
    cfg = CampaignConfig(4, 2, 50, seed=1, ensemble=Ensemble.parse(ens))
    for i in range(50):
        assert abs(purity(sample_state(cfg, i)) - 1) <= 1e-12


def test_rank_limited_rank():
    cfg = CampaignConfig(5, 2, 5, seed=1, ensemble=Ensemble.parse("rank_limited:2"))
    w = np.linalg.eigvalsh(sample_state(cfg, 0).matrix)
    assert np.sum(w > 1e-10) == 2


@pytest.mark.slow
def test_hilbert_schmidt_mean_purity_qubit():
    # population mean 2d/(d^2+1) = 0.8; standard error at 1e5 samples is about 3e-4
    cfg = CampaignConfig(2, 3, 100_000, seed=2024)
    mean = np.mean([purity(sample_state(cfg, i)) for i in range(cfg.n_samples)])
    assert abs(mean - 0.8) < 0.005


def test_campaign_qubit_pure():
    cfg = CampaignConfig(2, 3, 10_000, seed=0, ensemble=Ensemble("haar_pure"))
    out = run_verification_campaign(cfg, construct_full(2))
    assert out["violations"] == 0
    assert out["min_shannon_sum"] >= 2 - 1e-6
    assert out["config"]["seed"] == 0


def test_campaign_qutrit_mixed():
    cfg = CampaignConfig(3, 4, 10_000, seed=5)
    out = run_verification_campaign(cfg, construct_full(3))
    assert out["violations"] == 0
    assert out["inequalities"]["prop2"]["min_margin"] >= -1e-9
    assert out["inequalities"]["larsen_ivanovic"]["min_margin"] >= -1e-9
    assert out["min_shannon_sum"] >= 4 - 1e-9


def test_campaign_deterministic():
    cfg = CampaignConfig(3, 3, 200, seed=9)
    S = construct_full(3)
    assert run_verification_campaign(cfg, S, per_sample=True) == run_verification_campaign(cfg, S, per_sample=True)


def test_campaign_detects_corruption():
    S = corrupt_mub_set(construct_full(2))
    assert not S.verify().is_mub
    out = run_verification_campaign(CampaignConfig(2, 3, 2000, seed=0, ensemble=Ensemble("haar_pure")), S)
    assert out["inequalities"]["theorem1"]["violations"] > 0


def test_campaign_dimension_checks():
    with pytest.raises(ValueError):
        run_verification_campaign(CampaignConfig(3, 3, 1), construct_full(2))
    with pytest.raises(ValueError):
        run_verification_campaign(CampaignConfig(2, 4, 1), construct_full(2))


def test_angles_give_unit_vectors():
    rng = np.random.default_rng(0)
    for d in range(2, 6):
        psi = angles_to_state(rng.uniform(-3, 3, 2 * d - 2), d)
        assert abs(np.linalg.norm(psi) - 1) <= 1e-14


def test_compass_history_nonincreasing():
    x, fx, hist = compass_search(lambda v: float(np.sum((v - 0.3) ** 2)), np.zeros(3))
    assert np.all(np.diff(hist) <= 0)
    assert fx <= 1e-10


@pytest.mark.parametrize(
    "d, S, bound, target, tol",
    [
        (2, construct_full(2), "theorem2", 2.0, 1e-3),
        (2, fourier_pair(2), "maassen_uffink", 1.0, 1e-3),
        (3, fourier_pair(3), "maassen_uffink", math.log2(3), 1e-2),
    ],
)
def test_tightness_examples(d, S, bound, target, tol):
    res = tightness_search(d, S, bound=bound, restarts=16, seed=0)
    assert res.best_value <= target + tol
    assert res.gap >= -1e-9
    assert all(np.all(np.diff(h) <= 0) for h in res.histories)
    assert res.restarts == 16


def test_tightness_rejects_inapplicable_bound():
    with pytest.raises(ValueError):
        tightness_search(2, construct_full(2), bound="maassen_uffink", restarts=1)


def test_separable_qubits():
    out = separability_experiment(2, 2, 3, 10_000, seed=0)
    assert out["bound"] == pytest.approx(4.0, abs=1e-12)
    assert out["violations"] == 0 and out["separable_min_sum"] >= 4 - 1e-9
    probes = {p["name"]: p for p in out["entangled_examples"]}
    assert probes["singlet"]["shannon_sum"] == pytest.approx(3.0, abs=1e-12)
    assert probes["singlet"]["flagged"]


def test_separable_mixed_ensemble_and_unequal_dims():
    out = separability_experiment(2, 3, 3, 500, seed=1, ensemble=Ensemble("hilbert_schmidt_mixed"))
    assert out["bound"] == pytest.approx(14 / 3, abs=1e-12)
    assert out["violations"] == 0 and out["entangled_examples"] == []


def test_product_state_additive():
    S = construct_full(2)
    a = np.zeros((2, 2)); a[0, 0] = 1
    rho = np.kron(a, a)[None].astype(complex)
    assert joint_shannon_sums(rho, S, S)[0] == pytest.approx(4.0, abs=1e-12)


def test_scan_examples():
    rows = bound_comparison_scan([2, 16], [2, 3, 17], 5)
    assert len(rows) == 2 * 3 * 5
    assert set(rows[0]) == set(SCAN_COLUMNS)
    q = next(r for r in rows if r["d"] == 2 and r["M"] == 3 and r["purity"] == 1.0)
    assert q["strongest"] == "theorem2" and q["theorem2"] == pytest.approx(2.0)
    big = next(r for r in rows if r["d"] == 16 and r["M"] == 17 and r["purity"] == 1.0)
    assert big["dominance_observed"] and big["dominance_predicate"]
    small = next(r for r in rows if r["d"] == 16 and r["M"] == 2 and r["purity"] == 1.0)
    assert not small["dominance_observed"] and not small["dominance_predicate"]
    assert all(r["dominance_predicate"] == r["dominance_observed"] for r in rows)


def test_scan_rejects_empty():
    with pytest.raises(ValueError):
        bound_comparison_scan([], [2], 3)
