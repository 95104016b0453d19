import numpy as np
import pytest

from mubentropy.mub import (
    Basis,
    ConstructionError,
    MubSet,
    best_available,
    construct_full,
    fourier_pair,
    pauli_classes,
    quadratic_phase_mubs,
    same_bases,
    tensor_compose,
    verify_mub_set,
)
from mubentropy.gf import GaloisField

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9]


def overlaps(S, m, n):
    return np.abs(S.bases[m].vectors.conj().T @ S.bases[n].vectors) ** 2


def test_fourier_pair_qubit_is_hadamard():
    S = fourier_pair(2)
    np.testing.assert_allclose(S.bases[1].vectors, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(overlaps(S, 0, 1), 0.5, atol=1e-15)


@pytest.mark.parametrize("d", [3, 5, 6])
def test_fourier_pair_overlaps(d):
    S = fourier_pair(d)
    assert np.max(np.abs(overlaps(S, 0, 1) - 1 / d)) <= 1e-12
    assert verify_mub_set(S.bases).worst_overlap_deviation < 1e-12


@pytest.mark.parametrize("d", PRIME_POWERS + [16])
def test_construct_full_is_complete_mub(d):
    S = construct_full(d)
    assert S.M == d + 1
    for m in range(S.M):
        for n in range(m + 1, S.M):
            assert np.max(np.abs(overlaps(S, m, n) - 1 / d)) <= 1e-9
    assert S.M * (d - 1) + 1 == d * d


def test_construct_full_qubit_is_pauli_eigenbases():
    S = construct_full(2)
    X = np.array([[0, 1], [1, 0]])
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1, -1])
    for basis in S.bases:
        U = basis.vectors
        diagonal = [P for P in (X, Y, Z) if np.allclose(U.conj().T @ P @ U, np.diag(np.diag(U.conj().T @ P @ U)), atol=1e-12)]
        assert len(diagonal) == 1
    np.testing.assert_allclose(overlaps(S, 1, 2), 0.5, atol=1e-12)


@pytest.mark.parametrize("d", [6, 10, 12])
def test_construct_full_rejects_non_prime_power(d):
    with pytest.raises(ValueError, match="not a prime power"):
        construct_full(d)


@pytest.mark.parametrize("d", [2, 4, 8, 9])
def test_construct_full_deterministic(d):
    a, b = construct_full(d), construct_full(d)
    assert a.stack().tobytes() == b.stack().tobytes()
    assert a.metadata["seed"] == b.metadata["seed"]


@pytest.mark.parametrize("d", [4, 8, 9])
def test_pauli_classes_commute(d):
    p = {4: 2, 8: 2, 9: 3}[d]
    classes = pauli_classes(GaloisField(p, {4: 2, 8: 3, 9: 2}[d]))
    assert len(classes) == d + 1
    for ops in classes:
        assert len(ops) == d - 1
        for a in ops:
            for b in ops:
                assert np.linalg.norm(a @ b - b @ a) <= 1e-10
    # all d^2 - 1 operators are pairwise trace-orthogonal
    flat = [u for ops in classes for u in ops]
    gram = np.array([[np.trace(a.conj().T @ b) for b in flat] for a in flat])
    np.testing.assert_allclose(gram, d * np.eye(len(flat)), atol=1e-9)


@pytest.mark.parametrize("d", [3, 5, 7, 11])
def test_quadratic_phase_agrees_with_class_route(d):
    closed = quadratic_phase_mubs(d)
    assert closed.verify().is_mub
    assert same_bases(closed, construct_full(d))


def test_quadratic_phase_needs_odd_prime():
    with pytest.raises(ValueError):
        quadratic_phase_mubs(9)


def test_tensor_compose_2x3():
    S = tensor_compose(construct_full(2), construct_full(3))
    assert S.dim == 6 and S.M == 3
    for m in range(3):
        for n in range(m + 1, 3):
            np.testing.assert_allclose(overlaps(S, m, n), 1 / 6, atol=1e-12)


def test_tensor_compose_2x2():
    S = tensor_compose(construct_full(2), construct_full(2))
    assert S.dim == 4 and S.M == 3 and S.verify().is_mub


def test_tensor_compose_min_rule():
    S = tensor_compose(fourier_pair(2), construct_full(3))
    assert S.M == 2
    assert S.bases[0].vectors.shape == (6, 6)


def test_verify_identical_bases_maximally_biased():
    rep = verify_mub_set([np.eye(3), np.eye(3)])
    assert not rep.is_mub
    assert rep.worst_overlap_deviation == pytest.approx(1 - 1 / 3, abs=1e-15)
    assert rep.worst_orthonormality == 0.0


def test_verify_reports_on_success():
    rep = verify_mub_set(fourier_pair(5).bases)
    assert rep.is_mub and rep.worst_overlap_deviation < 1e-12


def test_verify_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        verify_mub_set([np.eye(2), np.eye(3)])


def test_verify_construct_full_7():
    assert verify_mub_set(construct_full(7).bases).is_mub


def test_verify_detects_non_orthonormal():
    rep = verify_mub_set([np.eye(2), np.array([[1, 1], [0, 1]])])
    assert not rep.is_mub and rep.worst_orthonormality >= 1.0


def test_best_available_composite():
    assert best_available(6).M == 3
    assert best_available(12).M == 4
    assert best_available(7).M == 8


def test_mubset_json_roundtrip(tmp_path):
    S = construct_full(3)
    path = tmp_path / "m.json"
    S.save(path)
    T = MubSet.load(path)
    assert T.dim == 3 and T.M == 4
    assert T.stack().tobytes() == S.stack().tobytes()
    assert T.verify().is_mub


def test_mubset_rejects_mixed_dims():
    with pytest.raises(ValueError):
        MubSet(2, (Basis(np.eye(2)), Basis(np.eye(3))))


def test_construction_error_is_raised_for_bad_set(monkeypatch):
    import mubentropy.mub as mub

    monkeypatch.setattr(mub, "joint_eigenbasis", lambda ops, rng, tol=1e-9: np.eye(ops[0].shape[0]))
    with pytest.raises(ConstructionError, match="verification failed"):
        mub.construct_full(3)
