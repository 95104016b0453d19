"""Measurement statistics in MUBs and the index-of-coincidence inequality.

``probability_table`` gives ``p[m, i] = <i_m| rho |i_m>``. The coincidence
summary compares ``sum_m sum_i p[m, i]^2`` with ``Tr(rho^2) + (M - 1)/d``,
and ``proof_construction_check`` replays the two-qudit argument behind that
inequality numerically.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import DensityMatrix, purity
from .mub import MubSet

CLAMP_TOL = 1e-12
ROW_TOL = 1e-10
THEOREM_TOL = 1e-10


class ProvenanceError(ValueError):
    pass


def probabilities(rho: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Raw ``<i_m|rho|i_m>`` for ``rho`` of shape ``(..., d, d)`` and bases ``(M, d, d)``.

    Returns an array of shape ``(..., M, d)``. No clamping or validation.
    """
    rho = np.asarray(rho)
    # p[..., m, i] = sum_jk conj(U[m, j, i]) rho[..., j, k] U[m, k, i]
    tmp = np.einsum("...jk,mki->...mji", rho, bases)
    return np.einsum("mji,...mji->...mi", bases.conj(), tmp)


def clean_probabilities(raw: np.ndarray) -> np.ndarray:
    """Real part, clamp rounding negatives, renormalize rows.

    Raises if imaginary parts, negatives or row sums exceed float noise.
    """
    imag = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if imag > CLAMP_TOL:
        raise ValueError(f"probabilities have imaginary part {imag:.3e}; bad state or basis")
    p = raw.real.copy()
    low = float(p.min())
    if low < -CLAMP_TOL:
        raise ValueError(f"negative probability {low:.3e}; bad state or basis")
    p[p < 0] = 0.0
    sums = p.sum(axis=-1, keepdims=True)
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > ROW_TOL:
        raise ValueError(f"probability row sums deviate from 1 by {worst:.3e}")
    return p / sums


@dataclass(frozen=True)
class ProbabilityTable:
    p: np.ndarray = field(repr=False)
    state_hash: str = ""
    mub_hash: str = ""

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def M(self) -> int:
        return self.p.shape[0]

    @property
    def d(self) -> int:
        return self.p.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["basis", "outcome", "probability"])
        for m in range(self.M):
            for i in range(self.d):
                w.writerow([m, i, repr(float(self.p[m, i]))])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "d": self.d,
            "p": self.p.tolist(),
            "source": {"state": self.state_hash, "mubs": self.mub_hash},
        }


def probability_table(rho: DensityMatrix, S: MubSet) -> ProbabilityTable:
    if rho.dim != S.dim:
        raise ValueError(f"state dimension {rho.dim} != MUB dimension {S.dim}")
    p = clean_probabilities(probabilities(rho.matrix, S.stack()))
    return ProbabilityTable(p, rho.fingerprint(), S.fingerprint())


@dataclass(frozen=True)
class CoincidenceSummary:
    per_basis_ic: np.ndarray = field(repr=False)
    total_ic: float
    bound_C: float
    margin: float
    violated: bool

    def to_json(self) -> dict:
        return {
            "per_basis_ic": self.per_basis_ic.tolist(),
            "total_ic": self.total_ic,
            "bound_C": self.bound_C,
            "margin": self.margin,
            "violated": self.violated,
        }


def coincidence_summary(T: ProbabilityTable, rho: DensityMatrix, tol: float = THEOREM_TOL) -> CoincidenceSummary:
    """Total index of coincidence against ``Tr(rho^2) + (M-1)/d``.

    A margin below ``-tol`` is flagged: it cannot happen for a genuine MUB
    family, so it signals a biased input set.
    """
    if T.state_hash and T.state_hash != rho.fingerprint():
        raise ProvenanceError("probability table was not computed from this state")
    per = np.sum(T.p**2, axis=1)
    total = float(per.sum())
    C = purity(rho) + (T.M - 1) / T.d
    margin = C - total
    return CoincidenceSummary(per, total, C, margin, margin < -tol)


def larsen_ivanovic_residual(rho: DensityMatrix, S: MubSet) -> float:
    """``|sum p^2 - (Tr rho^2 + 1)|`` for a complete set of d+1 bases."""
    if S.M != S.dim + 1:
        raise ValueError(f"need a complete set of {S.dim + 1} bases, got {S.M}")
    T = probability_table(rho, S)
    return abs(float(np.sum(T.p**2)) - (purity(rho) + 1.0))


def fourier_modes(p: np.ndarray) -> np.ndarray:
    """``rho_mk = (1/d) sum_i w^(-k i) p[m, i]`` for k = 0..d-1, ``w = exp(2 pi i/d)``.

    Outcome index ``i`` is zero-based, matching exponent ``(i - 1)`` for
    one-based labels. Mode ``k = 0`` is always ``1/d``.
    """
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    i = np.arange(d)
    w = np.exp(-2j * np.pi * np.outer(np.arange(d), i) / d)
    return np.einsum("ki,...mi->...mk", w, p) / d


def rows_from_modes(modes: np.ndarray) -> np.ndarray:
    d = modes.shape[-1]
    w = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)
    return np.einsum("ik,...mk->...mi", w, modes).real


@dataclass(frozen=True)
class ProofCheckReport:
    basis_orthonormality_err: float
    coeff_identity_err: float
    inner_product_err: float
    expansion_err: float

    def max_error(self) -> float:
        return max(self.basis_orthonormality_err, self.coeff_identity_err, self.inner_product_err, self.expansion_err)


def time_reversed(S: MubSet) -> np.ndarray:
    """Bases with expansion coefficients on basis 0 complex-conjugated."""
    U = S.stack()
    ref = U[0]
    coeffs = np.einsum("ji,mjk->mik", ref.conj(), U)
    return np.einsum("ji,mik->mjk", ref, coeffs.conj())


def proof_vectors(S: MubSet) -> tuple[np.ndarray, np.ndarray]:
    """Two-qudit vectors ``|Phi>`` and ``|phi_{m,k}>`` (k = 1..d-1).

    Returns ``(Phi, phis)`` with ``phis`` of shape ``(M, d-1, d*d)``.
    """
    d, M = S.dim, S.M
    U = S.stack()
    Ustar = time_reversed(S)
    # pair[m, i] = |i_m> (x) |i_m>*
    pair = np.einsum("mai,mbi->miab", U, Ustar).reshape(M, d, d * d)
    phi0 = pair[0].sum(axis=0) / np.sqrt(d)
    ks = np.arange(1, d)
    phase = np.exp(2j * np.pi * np.outer(ks, np.arange(d)) / d)
    phis = np.einsum("ki,miv->mkv", phase, pair) / np.sqrt(d)
    return phi0, phis


def proof_construction_check(rho: DensityMatrix, S: MubSet) -> ProofCheckReport:
    """Numerical replay of the two-qudit proof of the coincidence inequality.

    Reports the worst deviation from orthonormality of ``{|Phi>, |phi_mk>}``,
    the error of the closed form for ``sum |rho_mk|^2``, the error of
    ``<Phi|rho^2 (x) I|Phi> = Tr(rho^2)/d``, and the largest mismatch between
    ``<phi_mk|rho (x) I|Phi>`` and the Fourier coefficients ``rho_mk``.
    """
    d, M = S.dim, S.M
    if rho.dim != d:
        raise ValueError(f"state dimension {rho.dim} != MUB dimension {d}")
    if M * (d - 1) + 1 > d * d:
        raise ValueError(f"{M} bases in dimension {d} cannot be mutually unbiased")
    phi0, phis = proof_vectors(S)
    vecs = np.vstack([phi0[None, :], phis.reshape(M * (d - 1), d * d)])
    gram = vecs.conj() @ vecs.T
    ortho = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    T = probability_table(rho, S)
    modes = fourier_modes(T.p)[:, 1:]
    lhs = float(np.sum(np.abs(modes) ** 2))
    rhs = float(np.sum(T.p**2)) / d - M / d**2
    coeff = abs(lhs - rhs)

    r = rho.matrix
    big = np.kron(r @ r, np.eye(d))
    inner = abs(complex(phi0.conj() @ big @ phi0) - purity(rho) / d)

    state = np.kron(r, np.eye(d)) @ phi0
    proj = phis.conj() @ state
    expansion = float(np.max(np.abs(proj - modes)))
    expansion = max(expansion, abs(complex(phi0.conj() @ state) - 1.0 / d))
    return ProofCheckReport(ortho, coeff, inner, expansion)


def joint_probability_table(rho_ab: DensityMatrix, SA: MubSet, SB: MubSet) -> np.ndarray:
    """Joint outcome tables ``p[m, i, s]`` for local measurements in basis m on both sides."""
    if SA.M != SB.M:
        raise ValueError(f"both sides need the same number of bases ({SA.M} != {SB.M})")
    dA, dB = SA.dim, SB.dim
    if rho_ab.dim != dA * dB:
        raise ValueError(f"state dimension {rho_ab.dim} != {dA} * {dB}")
    prod = np.stack([np.kron(a.vectors, b.vectors) for a, b in zip(SA.bases, SB.bases)])
    p = clean_probabilities(probabilities(rho_ab.matrix, prod))
    return p.reshape(SA.M, dA, dB)


def save_table(T: ProbabilityTable, path, fmt: str = "json") -> None:
    with open(path, "w") as fh:
        if fmt == "csv":
            fh.write(T.to_csv())
        else:
            json.dump(T.to_json(), fh)
