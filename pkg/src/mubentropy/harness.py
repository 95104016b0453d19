"""Randomized verification campaigns, tightness search and the separability experiment.

Random streams
--------------
Every random draw comes from a Philox-4x64 counter-based generator whose
128-bit key is the first 16 bytes of ``sha256(f"{seed}:{tag}:{index}")``.
A sample therefore depends only on ``(seed, tag, index)``, never on how
many samples were drawn before it or in which order.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds, entropy
from .linalg import DensityMatrix
from .measure import clean_probabilities, probabilities
from .mub import Basis, MubSet, best_available

DEFAULT_TOL = 1e-9
HIST_BINS = 20


def stream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    digest = hashlib.sha256(f"{int(seed)}:{tag}:{int(index)}".encode()).digest()
    return np.random.Generator(np.random.Philox(key=int.from_bytes(digest[:16], "little")))


@dataclass(frozen=True)
class Ensemble:
    """State ensemble: ``haar_pure``, ``hilbert_schmidt_mixed`` or ``rank_limited`` with a rank."""

    kind: str = "hilbert_schmidt_mixed"
    rank: int | None = None

    def __post_init__(self):
        if self.kind not in ("haar_pure", "hilbert_schmidt_mixed", "rank_limited"):
            raise ValueError(f"unknown ensemble {self.kind!r}")
        if self.kind == "rank_limited" and (self.rank is None or self.rank < 1):
            raise ValueError("rank_limited ensemble needs a rank >= 1")

    @classmethod
    def parse(cls, text: str) -> "Ensemble":
        """Accepts ``haar_pure``, ``hilbert_schmidt_mixed`` or ``rank_limited:R``."""
        if text.startswith("rank_limited"):
            _, _, r = text.partition(":")
            if not r:
                raise ValueError("rank_limited needs a rank, e.g. rank_limited:2")
            return cls("rank_limited", int(r))
        return cls(text)

    def __str__(self):
        return f"rank_limited:{self.rank}" if self.kind == "rank_limited" else self.kind

    def columns(self, d: int) -> int:
        if self.kind == "haar_pure":
            return 1
        if self.kind == "hilbert_schmidt_mixed":
            return d
        return min(self.rank, d)


def _ginibre(gen: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = gen.standard_normal((rows, cols, 2))
    return g[..., 0] + 1j * g[..., 1]


def random_state_matrix(d: int, ensemble: Ensemble, gen: np.random.Generator) -> np.ndarray:
    g = _ginibre(gen, d, ensemble.columns(d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class CampaignConfig:
    d: int
    M: int
    n_samples: int
    seed: int = 0
    ensemble: Ensemble = field(default_factory=Ensemble)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.d < 2 or self.M < 1:
            raise ValueError(f"need d >= 2 and M >= 1, got d={self.d}, M={self.M}")

    def to_json(self) -> dict:
        out = asdict(self)
        out["ensemble"] = str(self.ensemble)
        return out


def sample_state(cfg: CampaignConfig, index: int) -> DensityMatrix:
    """State number ``index`` of the campaign; a pure function of ``(seed, index)``."""
    gen = stream(cfg.seed, f"state/{cfg.ensemble}/d{cfg.d}", index)
    return DensityMatrix(random_state_matrix(cfg.d, cfg.ensemble, gen))


def corrupt_mub_set(S: MubSet, basis_index: int = 1, angle: float = 0.1) -> MubSet:
    """Rotate vectors 0 and 1 of one basis by ``angle`` within their span.

    The basis stays orthonormal but is no longer unbiased to the others.
    """
    U = np.array(S.bases[basis_index].vectors)
    c, s = math.cos(angle), math.sin(angle)
    v0, v1 = U[:, 0].copy(), U[:, 1].copy()
    U[:, 0], U[:, 1] = c * v0 + s * v1, -s * v0 + c * v1
    bases = list(S.bases)
    bases[basis_index] = Basis(U)
    meta = dict(S.metadata, corrupted={"basis": basis_index, "angle": angle})
    return MubSet(S.dim, tuple(bases), S.unbiasedness_tol, meta)


def _histogram(values: np.ndarray, lo: float, hi: float) -> dict:
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(values, bins=HIST_BINS, range=(lo, hi))
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


def sample_margins(P: np.ndarray, pur: np.ndarray, d: int) -> dict[str, np.ndarray]:
    """Per-sample margins (measured minus bound) for every applicable inequality.

    ``P`` has shape ``(n, M, d)`` and ``pur`` shape ``(n,)``.
    """
    n, M, _ = P.shape
    H = entropy.shannon(P)
    ic = np.sum(P**2, axis=-1)
    Hsum = H.sum(axis=1)
    out: dict[str, np.ndarray] = {}

    caps = pur[:, None] + np.arange(M)[None, :] / d
    out["theorem1"] = np.min(caps - np.cumsum(ic, axis=1), axis=1)
    if M == d + 1:
        out["larsen_ivanovic"] = -np.abs(ic.sum(axis=1) - (pur + 1.0))

    ht = np.full(n, np.inf)
    for k in range(1, d):
        ht = np.minimum(ht, np.min(H - entropy.ht_lower_bound(ic, k), axis=1))
    out["harremoes_topsoe"] = ht

    if M >= 2:
        pairs = [H[:, a] + H[:, b] for a, b in itertools.combinations(range(M), 2)]
        out["maassen_uffink"] = np.min(np.stack(pairs), axis=0) - math.log2(d)
        out["grouped_half_log"] = Hsum - M / 2 * math.log2(d)

    dep = [bounds.BoundInputs.state_dependent(M, d, float(x)) for x in pur]
    out["theorem2"] = Hsum - np.array([bounds.theorem2_bound(b) for b in dep])
    out["simple_state_dep"] = Hsum - np.array([bounds.simple_bounds(b)["state_dep"] for b in dep])
    out["simple_state_indep"] = Hsum - M * math.log2(M * d / (d + M - 1))
    out["prop2"] = Hsum - bounds.prop2_bound(M, d)
    if M == d + 1:
        out["sanchez_ruiz"] = Hsum - bounds.sanchez_ruiz_bound(d)
    if d == 2 and M == 3:
        out["qubit_special"] = Hsum - (4.0 - 2.0 * pur)

    C = pur + (M - 1) / d
    renyi_dep = -M * np.log2(C / M)
    renyi_indep = M * math.log2(M * d / (d + M - 1))
    R = entropy.renyi(P, 2).sum(axis=1)
    out["renyi_state_dep"] = R - renyi_dep
    out["renyi_chain"] = renyi_dep - renyi_indep
    out["renyi_state_indep"] = R - renyi_indep
    out["tsallis"] = entropy.tsallis(P, 2).sum(axis=1) - (M - C)
    return out


def run_verification_campaign(cfg: CampaignConfig, S: MubSet, per_sample: bool = False) -> dict:
    """Check every inequality on ``cfg.n_samples`` random states.

    Uses the first ``cfg.M`` bases of ``S``. Violations (margin below
    ``-cfg.tol``) are counted, not raised.
    """
    if S.dim != cfg.d:
        raise ValueError(f"MUB dimension {S.dim} != campaign dimension {cfg.d}")
    if cfg.M > S.M:
        raise ValueError(f"campaign wants {cfg.M} bases, set has {S.M}")
    S = S.prefix(cfg.M)
    rhos = np.stack([sample_state(cfg, i).matrix for i in range(cfg.n_samples)])
    pur = np.sum(np.abs(rhos) ** 2, axis=(1, 2))
    P = clean_probabilities(probabilities(rhos, S.stack()))
    margins = sample_margins(P, pur, cfg.d)

    ineq = {}
    total = 0
    for name, m in margins.items():
        v = int(np.sum(m < -cfg.tol))
        total += v
        ineq[name] = {"min_margin": float(np.min(m)), "violations": v}
    Hsum = entropy.shannon(P).sum(axis=1)
    d, M = cfg.d, cfg.M
    summary = {
        "config": cfg.to_json(),
        "mubs": {"dim": S.dim, "M": S.M, "fingerprint": S.fingerprint(), "verification": S.verify().to_dict()},
        "violations": total,
        "inequalities": ineq,
        "min_shannon_sum": float(Hsum.min()),
        "histograms": {
            "shannon_sum": _histogram(Hsum, 0.0, M * math.log2(d)),
            "purity": _histogram(pur, 1.0 / d, 1.0),
            "theorem1_margin": _histogram(margins["theorem1"], float(margins["theorem1"].min()), float(margins["theorem1"].max())),
        },
    }
    if per_sample:
        summary["samples"] = [
            {
                "index": i,
                "purity": float(pur[i]),
                "shannon_sum": float(Hsum[i]),
                "theorem1_margin": float(margins["theorem1"][i]),
                "theorem2_margin": float(margins["theorem2"][i]),
            }
            for i in range(cfg.n_samples)
        ]
    return summary


# -- tightness search ---------------------------------------------------------


@dataclass
class TightnessResult:
    best_state: DensityMatrix
    best_value: float
    bound_value: float
    gap: float
    iterations: int
    restarts: int
    best_vector: np.ndarray = field(repr=False, default=None)
    histories: list[list[float]] = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        psi = self.best_vector
        return {
            "best_value": self.best_value,
            "bound_value": self.bound_value,
            "gap": self.gap,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "best_vector": {"re": psi.real.tolist(), "im": psi.imag.tolist()},
        }


def angles_to_state(x: np.ndarray, d: int) -> np.ndarray:
    """Unit vector from ``d-1`` hyperspherical angles followed by ``d-1`` relative phases."""
    theta, phi = x[: d - 1], x[d - 1 :]
    amp = np.ones(d)
    for j in range(d - 1):
        amp[j] *= math.cos(theta[j])
        amp[j + 1 :] *= math.sin(theta[j])
    return amp * np.exp(1j * np.concatenate(([0.0], phi)))


def shannon_sum_pure(psi: np.ndarray, U: np.ndarray) -> float:
    p = np.abs(np.einsum("mji,j->mi", U.conj(), psi)) ** 2
    p = p / p.sum(axis=1, keepdims=True)
    return float(np.sum(entropy.shannon(p)))


def pure_state_bound(name: str, M: int, d: int) -> float:
    if name == "theorem2":
        return bounds.theorem2_bound(bounds.BoundInputs.state_dependent(M, d, 1.0))
    if name == "prop2":
        return bounds.prop2_bound(M, d)
    if name == "simple_state_dep":
        return bounds.simple_bounds(bounds.BoundInputs.state_dependent(M, d, 1.0))["state_dep"]
    if name == "maassen_uffink" and M == 2:
        return math.log2(d)
    if name == "grouped_half_log" and M >= 2:
        return M / 2 * math.log2(d)
    if name == "sanchez_ruiz" and M == d + 1:
        return bounds.sanchez_ruiz_bound(d)
    if name == "qubit_special" and d == 2 and M == 3:
        return bounds.qubit_special_bound(1.0)
    raise ValueError(f"bound {name!r} does not apply to M={M}, d={d}")


def compass_search(fun, x0: np.ndarray, step: float = math.pi / 4, min_step: float = 1e-6, max_iters: int = 10_000):
    """Coordinate pattern search; returns ``(x, f(x), history)`` with a non-increasing history.

    A move is accepted only on sufficient decrease ``1e-4 step^2 + 1e-13``;
    otherwise flat directions are crawled at coarse steps for float-noise gains.
    """
    x = np.array(x0, dtype=float)
    fx = fun(x)
    history = [fx]
    for _ in range(max_iters):
        if step < min_step:
            break
        improved = False
        for i in range(x.size):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sign * step
                ft = fun(trial)
                if ft < fx - (1e-4 * step * step + 1e-13):
                    x, fx, improved = trial, ft, True
                    break
        if not improved:
            step *= 0.5
        history.append(fx)
    return x, fx, history


def tightness_search(d: int, S: MubSet, bound: str = "theorem2", restarts: int = 64, max_iters: int = 10_000, seed: int = 0) -> TightnessResult:
    """Minimize the Shannon-entropy sum over pure states by restarted compass search.

    Reports the best value found; no claim of global optimality.
    """
    if S.dim != d:
        raise ValueError(f"MUB dimension {S.dim} != {d}")
    U = S.stack()
    bound_value = pure_state_bound(bound, S.M, d)

    def fun(x):
        return shannon_sum_pure(angles_to_state(x, d), U)

    best_x, best_f, histories, iters = None, math.inf, [], 0
    for r in range(restarts):
        gen = stream(seed, f"tighten/d{d}/M{S.M}", r)
        x0 = np.concatenate((gen.uniform(0, math.pi / 2, d - 1), gen.uniform(0, 2 * math.pi, d - 1)))
        x, fx, hist = compass_search(fun, x0, max_iters=max_iters)
        histories.append(hist)
        iters += len(hist) - 1
        if fx < best_f:
            best_x, best_f = x, fx
    psi = angles_to_state(best_x, d)
    psi = psi / np.linalg.norm(psi)
    return TightnessResult(
        best_state=DensityMatrix.from_vector(psi),
        best_value=best_f,
        bound_value=bound_value,
        gap=best_f - bound_value,
        iterations=iters,
        restarts=restarts,
        best_vector=psi,
        histories=histories,
    )


# -- separability -------------------------------------------------------------


def entangled_probes(dA: int, dB: int) -> dict[str, np.ndarray]:
    probes = {}
    if dA == dB:
        psi = np.zeros(dA * dB, dtype=np.complex128)
        for i in range(dA):
            psi[i * dB + i] = 1.0
        probes["max_entangled"] = psi / math.sqrt(dA)
    if dA == dB == 2:
        probes["singlet"] = np.array([0, 1, -1, 0], dtype=np.complex128) / math.sqrt(2)
    return probes


def joint_shannon_sums(rhos: np.ndarray, SA: MubSet, SB: MubSet) -> np.ndarray:
    """``sum_m H(p^(m,m))`` for a batch of bipartite states ``(n, dA dB, dA dB)``."""
    prod = np.stack([np.kron(a.vectors, b.vectors) for a, b in zip(SA.bases, SB.bases)])
    P = clean_probabilities(probabilities(rhos, prod))
    return entropy.shannon(P).sum(axis=-1)


def random_separable(dA: int, dB: int, n_terms: int, ensemble: Ensemble, gen: np.random.Generator) -> np.ndarray:
    q = gen.dirichlet(np.ones(n_terms))
    rho = np.zeros((dA * dB, dA * dB), dtype=np.complex128)
    for w in q:
        rho += w * np.kron(random_state_matrix(dA, ensemble, gen), random_state_matrix(dB, ensemble, gen))
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def separability_experiment(
    dA: int,
    dB: int,
    M: int,
    n_samples: int,
    n_product_terms: int | None = None,
    seed: int = 0,
    ensemble: Ensemble | None = None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Sample separable states, check the separable bound, and evaluate entangled probes."""
    ensemble = ensemble or Ensemble("haar_pure")
    n_terms = n_product_terms or max(dA, dB) ** 2
    SA, SB = best_available(dA), best_available(dB)
    if M > min(SA.M, SB.M):
        raise ValueError(f"only {min(SA.M, SB.M)} bases available on both sides, asked for {M}")
    SA, SB = SA.prefix(M), SB.prefix(M)
    bound = bounds.separable_bound(M, dA, dB)
    rhos = np.stack(
        [random_separable(dA, dB, n_terms, ensemble, stream(seed, f"separable/{dA}x{dB}/{ensemble}", i)) for i in range(n_samples)]
    )
    sums = joint_shannon_sums(rhos, SA, SB)
    probes = []
    for name, psi in entangled_probes(dA, dB).items():
        value = float(joint_shannon_sums(np.outer(psi, psi.conj())[None], SA, SB)[0])
        probes.append({"name": name, "shannon_sum": value, "flagged": value < bound - tol})
    return {
        "config": {
            "dA": dA,
            "dB": dB,
            "M": M,
            "n_samples": n_samples,
            "n_product_terms": n_terms,
            "seed": seed,
            "ensemble": str(ensemble),
            "tol": tol,
        },
        "bound": bound,
        "separable_min_sum": float(sums.min()),
        "violations": int(np.sum(sums < bound - tol)),
        "entangled_examples": probes,
        "histograms": {"shannon_sum": _histogram(sums, 0.0, M * math.log2(dA * dB))},
    }


# -- bound comparison ---------------------------------------------------------

SCAN_COLUMNS = (
    "d",
    "M",
    "purity",
    "maassen_uffink",
    "grouped_half_log",
    "theorem2",
    "simple_state_dep",
    "simple_state_indep",
    "prop2_closed",
    "prop2_rewritten",
    "sanchez_ruiz",
    "qubit_special",
    "strongest",
    "dominance_predicate",
    "dominance_observed",
)


def bound_comparison_scan(d_range, M_range, purity_grid: int) -> list[dict]:
    """Evaluate every bound on a ``(d, M, purity)`` grid.

    Purities run from ``1/d`` to 1 in ``purity_grid`` equal steps. Each row
    marks the strongest bound and whether the simple state-dependent bound
    beats the grouping bound, both as predicted and as observed.
    """
    d_range, M_range = list(d_range), list(M_range)
    if not d_range or not M_range or purity_grid < 1:
        raise ValueError("scan ranges must be nonempty")
    rows = []
    for d in d_range:
        grid = np.linspace(1.0 / d, 1.0, purity_grid) if purity_grid > 1 else np.array([1.0])
        for M in M_range:
            for P in grid:
                P = float(P)
                vals = bounds.evaluate_bounds(M, d, P)
                row = {"d": d, "M": M, "purity": P, **vals}
                row["strongest"] = bounds.strongest(vals)[0]
                if vals["grouped_half_log"] is not None:
                    row["dominance_predicate"] = bounds.dominance_predicate(M, d, P)
                    row["dominance_observed"] = vals["simple_state_dep"] > vals["grouped_half_log"]
                else:
                    row["dominance_predicate"] = row["dominance_observed"] = None
                rows.append(row)
    return rows
