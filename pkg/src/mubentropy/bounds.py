"""Closed-form entropic uncertainty bounds for M mutually unbiased bases.

Everything here is real arithmetic on ``(M, d, C)`` where ``C`` is an upper
bound on the total index of coincidence ``sum_m sum_i p[m, i]^2``. Only
:func:`build_report` touches a state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import entropy
from .linalg import DensityMatrix, purity
from .measure import probability_table
from .mub import MubSet

FEASIBILITY_TOL = 1e-9
TIE_TOL = 1e-12

# preference order when several bounds tie for strongest
SHANNON_BOUNDS = (
    "theorem2",
    "qubit_special",
    "prop2_closed",
    "prop2_rewritten",
    "sanchez_ruiz",
    "simple_state_dep",
    "simple_state_indep",
    "grouped_half_log",
    "maassen_uffink",
)


class InfeasibleBoundError(ValueError):
    pass


def _xlogx(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


@dataclass(frozen=True)
class BoundInputs:
    """``M`` bases in dimension ``d`` with coincidence cap ``C``.

    Use :meth:`state_dependent`, :meth:`state_independent` or :meth:`custom`.
    ``C`` must lie in ``[M/d, M]``; values within 1e-9 of an end are snapped.
    """

    M: int
    d: int
    C: float
    variant: str = "custom"

    def __post_init__(self):
        if self.M < 1 or self.d < 2:
            raise ValueError(f"need M >= 1 and d >= 2, got M={self.M}, d={self.d}")
        lo, hi = self.M / self.d, float(self.M)
        C = float(self.C)
        if C < lo - FEASIBILITY_TOL:
            raise InfeasibleBoundError(f"C = {C!r} below the lower limit M/d = {lo!r}")
        if C > hi + FEASIBILITY_TOL:
            raise InfeasibleBoundError(f"C = {C!r} above the upper limit M = {hi!r}")
        object.__setattr__(self, "C", min(max(C, lo), hi))

    @classmethod
    def state_dependent(cls, M: int, d: int, purity: float) -> "BoundInputs":
        return cls(M, d, purity + (M - 1) / d, "state_dependent")

    @classmethod
    def state_independent(cls, M: int, d: int) -> "BoundInputs":
        return cls(M, d, 1.0 + (M - 1) / d, "state_independent")

    @classmethod
    def custom(cls, M: int, d: int, C: float) -> "BoundInputs":
        return cls(M, d, C, "custom")

    @property
    def ratio(self) -> float:
        """``M / C``, snapped to an integer when within float noise of one."""
        r = self.M / self.C
        n = round(r)
        return float(n) if abs(r - n) <= 1e-12 * max(1.0, r) else r

    def to_json(self) -> dict:
        return {"M": self.M, "d": self.d, "C": self.C, "variant": self.variant}


def f_of_k(M: float, C: float, k: int) -> float:
    """``(M - kC)(k+1) log2(k+1) - (M - (k+1)C) k log2 k``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return (M - k * C) * _xlogx(k + 1) - (M - (k + 1) * C) * _xlogx(k)


@dataclass(frozen=True)
class Argmax:
    k_star: int
    value: float


def appendix_argmax(M: int, C: float, d: int) -> Argmax:
    """Maximizer of ``f_of_k`` over ``k = 1..d-1`` in closed form: ``min(floor(M/C), d-1)``."""
    inp = BoundInputs.custom(M, d, C)
    k = min(int(math.floor(inp.ratio)), d - 1)
    return Argmax(k, f_of_k(inp.M, inp.C, k))


def brute_force_argmax(M: int, C: float, d: int) -> tuple[list[int], float]:
    """Exhaustive oracle: all maximizing ``k`` and the maximum of ``f_of_k`` over 1..d-1."""
    vals = [f_of_k(M, C, k) for k in range(1, d)]
    best = max(vals)
    return [k for k, v in zip(range(1, d), vals) if v >= best - TIE_TOL * max(1.0, abs(best))], best


def theorem2_bound(inputs: BoundInputs) -> float:
    """``a C (K+1) log2(K+1) + (1-a) C K log2 K`` with ``K = floor(M/C)``, ``a = M/C - K``.

    When ``K`` exceeds ``d - 1`` (only at ``C = M/d``) the value is
    ``f_of_k(d - 1)``, which equals ``f_of_k(d)`` there.
    """
    r = inputs.ratio
    K = int(math.floor(r))
    if K > inputs.d - 1:
        return f_of_k(inputs.M, inputs.C, inputs.d - 1)
    a = r - K
    C = inputs.C
    return a * C * _xlogx(K + 1) + (1 - a) * C * _xlogx(K)


def qubit_special_bound(rho_purity: float) -> float:
    """``4 - 2 Tr(rho^2)`` for three qubit MUBs."""
    if not 0.5 - 1e-12 <= rho_purity <= 1 + 1e-12:
        raise ValueError(f"qubit purity must lie in [0.5, 1], got {rho_purity}")
    return 4.0 - 2.0 * rho_purity


def simple_bounds(inputs: BoundInputs) -> dict[str, float]:
    M, d = inputs.M, inputs.d
    return {
        "state_dep": M * math.log2(M / inputs.C),
        "state_indep": M * math.log2(M * d / (d + M - 1)),
    }


def _prop2_parts(M: int, d: int) -> tuple[int, float]:
    ratio = Fraction(M * d, d + M - 1)
    K = math.floor(ratio)
    return K, float(ratio - K)


def prop2_bound(M: int, d: int) -> float:
    """State-independent bound ``(a (K+1) log2(K+1) + (1-a) K log2 K) (d+M-1)/d``.

    ``K`` and ``a`` are the integer and fractional parts of ``Md/(d+M-1)``,
    computed exactly.
    """
    if M < 1 or d < 2:
        raise ValueError(f"need M >= 1 and d >= 2, got M={M}, d={d}")
    K, a = _prop2_parts(M, d)
    return (a * _xlogx(K + 1) + (1 - a) * _xlogx(K)) * (d + M - 1) / d


def prop2_rewritten(M: int, d: int) -> float:
    """Same bound as :func:`prop2_bound` written as ``M log2 K + (K+1)(M - K(d+M-1)/d) log2(1 + 1/K)``."""
    if M < 1 or d < 2:
        raise ValueError(f"need M >= 1 and d >= 2, got M={M}, d={d}")
    K, _ = _prop2_parts(M, d)
    return M * math.log2(K) + (K + 1) * (M - K * (d + M - 1) / d) * math.log2(1 + 1 / K)


def sanchez_ruiz_bound(d: int) -> float:
    """Bound for a complete set of d+1 bases, split by the parity of ``d``."""
    if d % 2:
        return (d + 1) * math.log2((d + 1) / 2)
    h = d // 2
    return _xlogx(h) + _xlogx(h + 1)


def classic_bounds(M: int, d: int) -> dict[str, float | None]:
    """Pair bound ``log2 d`` (M = 2 only) and the grouping bound ``(M/2) log2 d`` (M >= 2)."""
    return {
        "maassen_uffink": math.log2(d) if M == 2 else None,
        "grouped": M / 2 * math.log2(d) if M >= 2 else None,
    }


def renyi_tsallis_bounds(inputs: BoundInputs) -> dict[str, float]:
    M, d, C = inputs.M, inputs.d, inputs.C
    return {
        "renyi_sum_bound": -M * math.log2(C / M),
        "renyi_state_indep": M * math.log2(M * d / (d + M - 1)),
        "tsallis_sum_bound": M - C,
    }


def separable_bound(M: int, dA: int, dB: int) -> float:
    """Lower bound on ``sum_m H(p^(m,m))`` for separable bipartite states."""
    return prop2_rewritten(M, dA) + prop2_rewritten(M, dB)


def dominance_predicate(M: int, d: int, rho_purity: float) -> bool:
    """Whether ``M log2(M/C)`` should beat ``(M/2) log2 d``: ``M > (P - 1/d) d / (sqrt d - 1)``."""
    return M > (rho_purity - 1 / d) * d / (math.sqrt(d) - 1)


def evaluate_bounds(M: int, d: int, rho_purity: float) -> dict[str, float | None]:
    """All Shannon-sum bounds for ``M`` bases, ``d`` levels and a state of given purity.

    Bounds that do not apply to ``(M, d)`` are ``None``.
    """
    dep = BoundInputs.state_dependent(M, d, rho_purity)
    indep = BoundInputs.state_independent(M, d)
    classic = classic_bounds(M, d)
    simple_dep = simple_bounds(dep)["state_dep"]
    return {
        "maassen_uffink": classic["maassen_uffink"],
        "grouped_half_log": classic["grouped"],
        "theorem2": theorem2_bound(dep),
        "simple_state_dep": simple_dep,
        "simple_state_indep": simple_bounds(indep)["state_indep"],
        "prop2_closed": prop2_bound(M, d),
        "prop2_rewritten": prop2_rewritten(M, d),
        "sanchez_ruiz": sanchez_ruiz_bound(d) if M == d + 1 else None,
        "qubit_special": qubit_special_bound(rho_purity) if (d == 2 and M == 3) else None,
    }


def strongest(values: dict[str, float | None]) -> tuple[str, float]:
    live = {k: v for k, v in values.items() if v is not None and k in SHANNON_BOUNDS}
    best = max(live.values())
    for name in SHANNON_BOUNDS:
        if name in live and live[name] >= best - TIE_TOL:
            return name, live[name]
    raise AssertionError("unreachable")


@dataclass
class BoundReport:
    inputs: BoundInputs
    purity: float
    values: dict[str, float | None]
    renyi_sum: float
    tsallis_sum: float
    measured_shannon_sum: float
    measured_renyi_sum: float
    measured_tsallis_sum: float
    per_basis_shannon: list[float] = field(default_factory=list)

    @property
    def margins(self) -> dict[str, float | None]:
        out = {k: (None if v is None else self.measured_shannon_sum - v) for k, v in self.values.items()}
        out["renyi_sum"] = self.measured_renyi_sum - self.renyi_sum
        out["tsallis_sum"] = self.measured_tsallis_sum - self.tsallis_sum
        return out

    def to_json(self) -> dict:
        out = dict(self.values)
        out["renyi_sum"] = self.renyi_sum
        out["tsallis_sum"] = self.tsallis_sum
        out["measured_shannon_sum"] = self.measured_shannon_sum
        out["measured_renyi_sum"] = self.measured_renyi_sum
        out["measured_tsallis_sum"] = self.measured_tsallis_sum
        out["per_basis_shannon"] = list(self.per_basis_shannon)
        out["margins"] = self.margins
        out["inputs"] = dict(self.inputs.to_json(), purity=self.purity)
        return out


def build_report(rho: DensityMatrix, S: MubSet) -> BoundReport:
    T = probability_table(rho, S)
    P = purity(rho)
    inputs = BoundInputs.state_dependent(S.M, S.dim, P)
    rt = renyi_tsallis_bounds(inputs)
    H = entropy.shannon(T.p)
    return BoundReport(
        inputs=inputs,
        purity=P,
        values=evaluate_bounds(S.M, S.dim, P),
        renyi_sum=rt["renyi_sum_bound"],
        tsallis_sum=rt["tsallis_sum_bound"],
        measured_shannon_sum=float(np.sum(H)),
        measured_renyi_sum=float(np.sum(entropy.renyi(T.p, 2))),
        measured_tsallis_sum=float(np.sum(entropy.tsallis(T.p, 2))),
        per_basis_shannon=[float(h) for h in H],
    )


def compare_bounds(inputs: BoundInputs, report: BoundReport) -> dict:
    """Strongest applicable Shannon bound plus the simple-vs-grouped dominance check."""
    name, value = strongest(report.values)
    out = {"strongest": name, "value": value}
    grouped = report.values.get("grouped_half_log")
    if grouped is not None:
        predicted = dominance_predicate(inputs.M, inputs.d, report.purity)
        observed = report.values["simple_state_dep"] > grouped
        out.update(dominance_predicate=predicted, dominance_observed=observed, agree=predicted == observed)
    return out
