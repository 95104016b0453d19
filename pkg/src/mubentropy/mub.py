"""Construction and verification of mutually unbiased bases.

A basis is stored as a unitary matrix whose columns are the basis vectors.
Every constructor verifies its output before returning; an unverified set
is never handed back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gf import GaloisField, factorize, prime_power
from .linalg import as_matrix, fingerprint, hermitian_eigensystem, matrix_from_json, matrix_to_json

DEFAULT_TOL = 1e-9
CONSTRUCTION_SEED = 20240613


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Basis:
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = as_matrix(self.vectors)
        if u.shape[0] != u.shape[1]:
            raise ValueError(f"basis matrix must be square, got {u.shape}")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "vectors", u)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def orthonormality_error(self) -> float:
        u = self.vectors
        return float(np.max(np.abs(u.conj().T @ u - np.eye(self.dim))))


@dataclass(frozen=True)
class MubReport:
    is_mub: bool
    worst_overlap_deviation: float
    worst_orthonormality: float

    def to_dict(self) -> dict:
        return {
            "is_mub": self.is_mub,
            "worst_overlap_deviation": self.worst_overlap_deviation,
            "worst_orthonormality": self.worst_orthonormality,
        }


@dataclass(frozen=True)
class MubSet:
    """Ordered family of bases of one dimension.

    Basis order matters: the first basis is the reference for the
    time-reversal convention used in :mod:`mubentropy.measure`.
    The dataclass itself does not verify unbiasedness; use :meth:`verify`
    or build through the constructors in this module.
    """

    dim: int
    bases: tuple[Basis, ...]
    unbiasedness_tol: float = DEFAULT_TOL
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        bases = tuple(b if isinstance(b, Basis) else Basis(b) for b in self.bases)
        if not bases:
            raise ValueError("a MUB set needs at least one basis")
        for b in bases:
            if b.dim != self.dim:
                raise ValueError(f"basis of dim {b.dim} in a set of dim {self.dim}")
        object.__setattr__(self, "bases", bases)

    @property
    def M(self) -> int:
        return len(self.bases)

    def __len__(self):
        return len(self.bases)

    def stack(self) -> np.ndarray:
        """All bases as one ``(M, d, d)`` array."""
        return np.stack([b.vectors for b in self.bases])

    def prefix(self, m: int) -> "MubSet":
        if not 1 <= m <= self.M:
            raise ValueError(f"prefix size {m} outside 1..{self.M}")
        return MubSet(self.dim, self.bases[:m], self.unbiasedness_tol, dict(self.metadata))

    def verify(self, tol: float | None = None) -> MubReport:
        return verify_mub_set(self.bases, self.unbiasedness_tol if tol is None else tol)

    def fingerprint(self) -> str:
        return fingerprint(self.stack().reshape(-1, self.dim))

    def to_json(self) -> dict:
        out = {"dim": self.dim, "bases": [matrix_to_json(b.vectors) for b in self.bases]}
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, obj: dict, tol: float = DEFAULT_TOL) -> "MubSet":
        bases = tuple(Basis(matrix_from_json(b)) for b in obj["bases"])
        return cls(int(obj["dim"]), bases, tol, dict(obj.get("metadata", {})))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path, tol: float = DEFAULT_TOL) -> "MubSet":
        with open(path) as fh:
            return cls.from_json(json.load(fh), tol)


def verify_mub_set(bases, tol: float = DEFAULT_TOL) -> MubReport:
    """Exhaustive pairwise check of orthonormality and unbiasedness.

    Deviations are reported even when the check passes.
    """
    mats = [b.vectors if isinstance(b, Basis) else as_matrix(b) for b in bases]
    if not mats:
        raise ValueError("no bases given")
    d = mats[0].shape[0]
    for u in mats:
        if u.shape != (d, d):
            raise ValueError(f"dimension mismatch: {u.shape} vs {(d, d)}")
    ortho = max(float(np.max(np.abs(u.conj().T @ u - np.eye(d)))) for u in mats)
    dev = 0.0
    for m in range(len(mats)):
        for n in range(m + 1, len(mats)):
            overlaps = np.abs(mats[m].conj().T @ mats[n]) ** 2
            dev = max(dev, float(np.max(np.abs(overlaps - 1.0 / d))))
    return MubReport(bool(ortho <= tol and dev <= tol), dev, ortho)


def _checked(S: MubSet, what: str) -> MubSet:
    rep = S.verify()
    if not rep.is_mub:
        raise ConstructionError(
            f"{what}: verification failed (overlap deviation {rep.worst_overlap_deviation:.3e}, "
            f"orthonormality {rep.worst_orthonormality:.3e})"
        )
    return S


def fourier_pair(d: int, tol: float = DEFAULT_TOL) -> MubSet:
    """Standard basis and the discrete Fourier basis ``w^(ij)/sqrt(d)``."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    j = np.arange(d)
    dft = np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
    S = MubSet(d, (Basis(np.eye(d)), Basis(dft)), tol, {"construction": "fourier"})
    return _checked(S, f"fourier_pair({d})")


def pauli_operators(F: GaloisField):
    """Shift ``X(a)`` and clock ``Z(b)`` operators on the field-element basis.

    ``X(a)|x> = |x + a>`` and ``Z(b)|x> = chi(b x)|x>`` with
    ``chi(y) = exp(2 pi i tr(y) / p)``. Returns two lists indexed by field
    element code.
    """
    q, p = F.order, F.p
    add, mul, tr = F.add_table, F.mul_table, F.trace_table
    X, Z = [], []
    for a in range(q):
        m = np.zeros((q, q), dtype=np.complex128)
        for x in range(q):
            m[add[x][a], x] = 1.0
        X.append(m)
    for b in range(q):
        phases = np.array([np.exp(2j * np.pi * tr[mul[b][x]] / p) for x in range(q)])
        Z.append(np.diag(phases))
    return X, Z


def pauli_classes(F: GaloisField) -> list[list[np.ndarray]]:
    """The d+1 commuting classes of non-identity generalized Pauli operators.

    Class 0 is ``{Z(b)}``; class ``1 + mu`` is ``{X(a) Z(mu a)}`` for field
    element ``mu``.
    """
    X, Z = pauli_operators(F)
    q, mul = F.order, F.mul_table
    classes = [[Z[b] for b in range(1, q)]]
    for mu in range(q):
        classes.append([X[a] @ Z[mul[mu][a]] for a in range(1, q)])
    return classes


def joint_eigenbasis(ops, rng: np.random.Generator, attempts: int = 8, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Common eigenbasis of commuting unitaries via a random Hermitian mix."""
    d = ops[0].shape[0]
    for _ in range(attempts):
        h = np.zeros((d, d), dtype=np.complex128)
        for u in ops:
            c, s = rng.normal(size=2)
            h += c * (u + u.conj().T) + s * 1j * (u - u.conj().T)
        w, v = hermitian_eigensystem(h)
        if np.min(np.diff(w)) < 1e-6:
            continue
        worst = 0.0
        for u in ops:
            t = v.conj().T @ u @ v
            worst = max(worst, float(np.max(np.abs(t - np.diag(np.diag(t))))))
        if worst <= tol:
            return v
    raise ConstructionError("could not find a nondegenerate joint eigenbasis")


def construct_full(d: int, tol: float = DEFAULT_TOL, seed: int = CONSTRUCTION_SEED) -> MubSet:
    """Complete set of d+1 MUBs for prime-power ``d``.

    Basis 0 is the standard basis (joint eigenbasis of the clock class);
    the others are joint eigenbases of the ``X(a)Z(mu a)`` classes, ordered
    by the code of ``mu``.
    """
    pk = prime_power(d)
    if pk is None:
        fac = " * ".join(f"{p}^{k}" if k > 1 else str(p) for p, k in sorted(factorize(d).items()))
        raise ValueError(f"d = {d} is not a prime power (d = {fac})")
    F = GaloisField(*pk)
    rng = np.random.default_rng(seed)
    classes = pauli_classes(F)
    bases = [Basis(np.eye(d))]
    for ops in classes[1:]:
        bases.append(Basis(joint_eigenbasis(ops, rng, tol=tol)))
    meta = {"construction": "pauli_classes", "p": pk[0], "k": pk[1], "modulus": list(F.modulus), "seed": seed}
    return _checked(MubSet(d, tuple(bases), tol, meta), f"construct_full({d})")


def quadratic_phase_mubs(d: int, tol: float = DEFAULT_TOL) -> MubSet:
    """Closed-form d+1 MUBs for odd prime ``d``: vectors ``w^(m j^2 + i j)/sqrt(d)``."""
    if d == 2 or prime_power(d) != (d, 1):
        raise ValueError(f"quadratic-phase construction needs an odd prime, got {d}")
    j = np.arange(d)
    bases = [Basis(np.eye(d))]
    for m in range(d):
        # column i holds vector i
        phase = (m * j[:, None] ** 2 + j[:, None] * j[None, :]) % d
        bases.append(Basis(np.exp(2j * np.pi * phase / d) / np.sqrt(d)))
    return _checked(MubSet(d, tuple(bases), tol, {"construction": "quadratic_phase"}), f"quadratic_phase_mubs({d})")


def tensor_compose(S1: MubSet, S2: MubSet, tol: float = DEFAULT_TOL) -> MubSet:
    """Pairwise Kronecker products of the first ``min(M1, M2)`` bases."""
    if not S1.bases or not S2.bases:
        raise ValueError("empty MUB set")
    m = min(S1.M, S2.M)
    bases = tuple(Basis(np.kron(S1.bases[i].vectors, S2.bases[i].vectors)) for i in range(m))
    meta = {"construction": "tensor", "factors": [S1.dim, S2.dim]}
    return _checked(MubSet(S1.dim * S2.dim, bases, tol, meta), f"tensor_compose({S1.dim}, {S2.dim})")


def best_available(d: int, tol: float = DEFAULT_TOL) -> MubSet:
    """Largest set this module can build for ``d``.

    Prime powers get d+1 bases; other dimensions get the tensor product of
    complete sets over the prime-power factors (min over factors of p^k + 1).
    """
    if prime_power(d):
        return construct_full(d, tol)
    factors = [p**k for p, k in sorted(factorize(d).items())]
    S = construct_full(factors[0], tol)
    for f in factors[1:]:
        S = tensor_compose(S, construct_full(f, tol), tol)
    return S


def same_bases(S1: MubSet, S2: MubSet, tol: float = 1e-9) -> bool:
    """True if both sets contain the same bases up to vector order and phases."""
    if S1.dim != S2.dim or S1.M != S2.M:
        return False
    unused = list(range(S2.M))
    for b in S1.bases:
        for idx in unused:
            ov = np.abs(b.vectors.conj().T @ S2.bases[idx].vectors) ** 2
            perm = np.argmax(ov, axis=1)
            if len(set(perm)) == S1.dim and np.allclose(ov[np.arange(S1.dim), perm], 1.0, atol=tol):
                unused.remove(idx)
                break
        else:
            return False
    return True
