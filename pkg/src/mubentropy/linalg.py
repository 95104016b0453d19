"""Small dense complex linear algebra: states, Hermitian eigensolver, tensor products.

Matrices are plain ``numpy`` complex128 arrays. ``DensityMatrix`` and
``PureState`` validate on construction and freeze their storage.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

TOL = 1e-9

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first nonzero component real positive
    for col in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, col]) > tol)
        if nz.size:
            c = v[nz[0], col]
            v[:, col] *= np.conj(c) / abs(c)
    return v


def _jacobi(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(float(np.linalg.norm(a)), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b <= 1e-300:
                    continue
                # phase q so that a[p, q] becomes real non-negative
                ph = apq / b
                a[:, q] *= np.conj(ph)
                a[q, :] *= ph
                v[:, q] *= np.conj(ph)
                theta = 0.5 * np.arctan2(2.0 * b, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(a).real.copy(), v


def hermitian_eigensystem(a, method: str = "jacobi") -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like
        Square matrix, Hermitian within 1e-10.
    method : {"jacobi", "lapack"}
        ``"jacobi"`` runs cyclic complex Jacobi rotations; ``"lapack"``
        defers to ``numpy.linalg.eigh``.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Orthonormal columns; the first nonzero component of each column is
        made real positive.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix is not square: {a.shape}")
    err = hermiticity_error(a)
    if err > 1e-10:
        raise ValueError(f"matrix is not Hermitian: max|A - A^H| = {err:.3e}")
    a = 0.5 * (a + a.conj().T)
    if method == "jacobi":
        w, v = _jacobi(a)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    order = np.argsort(w, kind="stable")
    return w[order], _fix_phase(v[:, order].copy())


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


@dataclass(frozen=True)
class DensityMatrix:
    """Validated qudit state: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        d = m.shape[0]
        if m.shape != (d, d) or d < 2:
            raise ValueError(f"density matrix must be square with d >= 2, got {m.shape}")
        herr = hermiticity_error(m)
        if herr > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian: max|A - A^H| = {herr:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr.real:.15g} != 1")
        m = 0.5 * (m + m.conj().T)
        lam_min = float(np.linalg.eigvalsh(m)[0])
        if lam_min < -PSD_TOL:
            raise ValueError(f"density matrix not PSD: min eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    @classmethod
    def basis_state(cls, d: int, i: int = 0) -> "DensityMatrix":
        m = np.zeros((d, d))
        m[i, i] = 1.0
        return cls(m)

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        return PureState(psi).projector()

    def purity(self) -> float:
        return purity(self)

    def fingerprint(self) -> str:
        return fingerprint(self.matrix)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm {norm:.15g} != 1")
        psi = psi.copy()
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)."""
    m = rho.matrix
    # Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def fingerprint(a: np.ndarray) -> str:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    h = hashlib.sha256()
    h.update(str(a.shape).encode())
    h.update(a.tobytes())
    return h.hexdigest()[:16]


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros(rows * cols)), dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError(f"matrix payload has {re.size}/{im.size} entries, expected {rows * cols}")
    return as_matrix((re + 1j * im).reshape(rows, cols))


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(path, a) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(a), fh)
