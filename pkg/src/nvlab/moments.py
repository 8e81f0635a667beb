"""Mollified moments S1, S2 over moduli in a short interval / progression,
their predicted main terms, the Cauchy-Schwarz bound and the census.

Every per-modulus quantity is computed independently (optionally on a
thread pool) and reduced in ascending-q order with ``math.fsum``, so the
totals do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .arith import euler_phi
from .characters import CharacterSet
from .lvalue import lvalues_for_modulus
from .mollifier import MollifierSpec, lambda_coeff, mollifier_batch
from .weights import WeightConfig, phi_at_modulus

__all__ = [
    "ModulusSet",
    "ModulusData",
    "MomentReport",
    "CensusReport",
    "build_modulus_set",
    "analyze_modulus",
    "analyze_window",
    "evaluate",
    "s1_moment",
    "s2_moment",
    "weighted_mass",
    "predict_s1",
    "predict_s2",
    "cs_lower_bound",
    "census",
    "TAU_NV",
]

TAU_NV = 1e-8


@dataclass(frozen=True)
class ModulusSet:
    cfg: WeightConfig
    moduli: tuple[int, ...]
    weights: tuple[float, ...]  # Phi(q/Q) q / phi(q)

    def __len__(self) -> int:
        return len(self.moduli)

    def __iter__(self):
        return iter(zip(self.moduli, self.weights))


def build_modulus_set(cfg: WeightConfig) -> ModulusSet:
    """All q = a mod D with Phi(q/Q) > 0, ascending."""
    lo = max(1, math.floor(cfg.Q / 2))
    hi = math.ceil(3 * cfg.Q / 2)
    qs, ws = [], []
    for q in range(lo, hi + 1):
        if (q - cfg.a) % cfg.D:
            continue
        phi = phi_at_modulus(cfg, q)
        if phi > 0:
            qs.append(q)
            ws.append(phi * q / euler_phi(q))
    return ModulusSet(cfg, tuple(qs), tuple(ws))


@dataclass
class ModulusData:
    """Per-modulus values over the primitive characters."""

    q: int
    weight: float
    even_index: np.ndarray
    odd_index: np.ndarray
    L_even: np.ndarray
    L_odd: np.ndarray
    M_even: np.ndarray | None = None

    @property
    def n_even(self) -> int:
        return len(self.even_index)

    @property
    def n_odd(self) -> int:
        return len(self.odd_index)

    def lm_sums(self) -> tuple[complex, float]:
        """(sum L M, sum |L M|^2) over even primitive characters, compensated."""
        lm = self.L_even * self.M_even
        s1 = complex(math.fsum(lm.real), math.fsum(lm.imag))
        s2 = math.fsum(np.abs(lm) ** 2)
        return s1, s2


def _eps_conj_even(cs: CharacterSet, mask: np.ndarray) -> np.ndarray:
    # for even chi, eps(conj chi) = conj(eps(chi))
    q = cs.q
    h = np.arange(q)
    tw = np.cos(2 * np.pi * h / q) + 1j * np.sin(2 * np.pi * h / q)
    eps = cs.transform(tw)[mask] / math.sqrt(q)
    return np.conj(eps)


def analyze_modulus(q: int, spec: MollifierSpec | None = None, weight: float = 1.0, cache=None) -> ModulusData:
    """L(1/2, chi) for primitive chi mod q, and M(chi) for the even ones."""
    cs = CharacterSet(q)
    ev = cs.even_primitive_mask
    od = cs.odd_primitive_mask
    ev_idx = np.nonzero(ev)[0]
    od_idx = np.nonzero(od)[0]
    L = None
    if cache is not None:
        L = cache.lookup_modulus(q, np.concatenate([ev_idx, od_idx]))
    if L is None:
        Lall = lvalues_for_modulus(cs) if (len(ev_idx) or len(od_idx)) else np.zeros(len(cs), complex)
        L_even, L_odd = Lall[ev_idx], Lall[od_idx]
        if cache is not None:
            cache.store_modulus(q, cs, ev_idx, od_idx, L_even, L_odd)
    else:
        L_even, L_odd = L[: len(ev_idx)], L[len(ev_idx) :]
    M = None
    if spec is not None and len(ev_idx):
        mis, mmv = mollifier_batch(cs, ev, _eps_conj_even(cs, ev), spec)
        M = mis + mmv
    elif spec is not None:
        M = np.zeros(0, dtype=np.complex128)
    return ModulusData(q, weight, ev_idx, od_idx, L_even, L_odd, M)


def analyze_window(ms: ModulusSet, spec, threads: int = 1, cache=None) -> list[ModulusData]:
    """Per-modulus data in ascending q; ``threads=0`` uses one per CPU."""
    threads = threads or os.cpu_count() or 1
    jobs = list(ms)
    if threads == 1 or len(jobs) < 2:
        return [analyze_modulus(q, spec, w, cache) for q, w in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda qw: analyze_modulus(qw[0], spec, qw[1], cache), jobs))


def _fsum_c(vals: Iterable[complex]) -> complex:
    vals = list(vals)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


@dataclass
class MomentReport:
    s1: complex
    s2: float
    mass: float
    pred_s1: float
    pred_s2: float
    cs_bound: float
    census_count: float
    rows: list[dict] = field(default_factory=list, repr=False)
    flags: list[str] = field(default_factory=list)

    @property
    def ratio_s1(self) -> float:
        return abs(self.s1) / self.pred_s1 if self.pred_s1 else float("nan")

    @property
    def ratio_s2(self) -> float:
        return self.s2 / self.pred_s2 if self.pred_s2 else float("nan")


def evaluate(
    ms: ModulusSet,
    spec: MollifierSpec,
    threads: int = 1,
    cache=None,
    tau_nv: float = TAU_NV,
    data: list[ModulusData] | None = None,
) -> MomentReport:
    """S1, S2, predictions, CS bound and weighted even census in one sweep."""
    data = data if data is not None else analyze_window(ms, spec, threads, cache)
    rows = []
    s1_parts, s2_parts, mass_parts, nv_parts = [], [], [], []
    for d in data:
        s1q, s2q = d.lm_sums()
        nv = int(np.sum(np.abs(d.L_even) > tau_nv))
        s1_parts.append(d.weight * s1q)
        s2_parts.append(d.weight * s2q)
        mass_parts.append(d.weight * d.n_even)
        nv_parts.append(d.weight * nv)
        rows.append(
            {
                "q": d.q,
                "weight": d.weight,
                "even_primitive": d.n_even,
                "s1_re": s1q.real,
                "s1_im": s1q.imag,
                "s2": s2q,
            }
        )
    s1 = _fsum_c(s1_parts)
    s2 = math.fsum(s2_parts)
    mass = math.fsum(mass_parts)
    flags = ["lambda3 read as lambda2 (P2, theta2)"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        bound = cs_lower_bound(s1, s2)
    if caught:
        flags.append("s2 == 0: CS bound set to 0")
    if not data:
        flags.append("empty")
    return MomentReport(
        s1=s1,
        s2=s2,
        mass=mass,
        pred_s1=float(spec.P1.at_one() + spec.P2.at_one()) * mass,
        pred_s2=_s2_coefficient(spec) * mass,
        cs_bound=bound,
        census_count=math.fsum(nv_parts),
        rows=rows,
        flags=flags,
    )


def s1_moment(ms: ModulusSet, spec: MollifierSpec, cfg=None, threads: int = 1, cache=None) -> complex:
    return evaluate(ms, spec, threads, cache).s1


def s2_moment(ms: ModulusSet, spec: MollifierSpec, cfg=None, threads: int = 1, cache=None) -> float:
    return evaluate(ms, spec, threads, cache).s2


def even_primitive_count(q: int) -> int:
    return int(CharacterSet(q).even_primitive_mask.sum())


def weighted_mass(ms: ModulusSet) -> float:
    """sum_q Phi(q/Q) (q/phi(q)) N+(q), N+ counted exactly."""
    return math.fsum(w * even_primitive_count(q) for q, w in ms)


def _s2_coefficient(spec: MollifierSpec) -> float:
    return (
        lambda_coeff(spec.P1, spec.theta1)
        + lambda_coeff(spec.P2, spec.theta2)
        + 2 * float(spec.P1.at_one() * spec.P2.at_one())
    )


def predict_s1(ms: ModulusSet, spec: MollifierSpec, cfg=None) -> float:
    return float(spec.P1.at_one() + spec.P2.at_one()) * weighted_mass(ms)


def predict_s2(ms: ModulusSet, spec: MollifierSpec, cfg=None) -> float:
    return _s2_coefficient(spec) * weighted_mass(ms)


def cs_lower_bound(s1: complex, s2: float) -> float:
    """|s1|^2 / s2; 0 (with a warning) when s2 = 0."""
    if s2 == 0:
        warnings.warn("S2 = 0: Cauchy-Schwarz bound defined as 0", RuntimeWarning, stacklevel=2)
        return 0.0
    if s2 < 0:
        raise ValueError("S2 must be non-negative")
    return abs(s1) ** 2 / s2


@dataclass
class CensusReport:
    rows: list[dict]
    weighted_nonvanishing_even: float
    weighted_total_even: float
    weighted_nonvanishing_odd: float
    weighted_total_odd: float
    tau_nv: float

    @property
    def weighted_nonvanishing(self) -> float:
        return self.weighted_nonvanishing_even + self.weighted_nonvanishing_odd

    @property
    def weighted_total(self) -> float:
        return self.weighted_total_even + self.weighted_total_odd

    @staticmethod
    def _ratio(a: float, b: float) -> float:
        return a / b if b else float("nan")

    @property
    def proportion_even(self) -> float:
        return self._ratio(self.weighted_nonvanishing_even, self.weighted_total_even)

    @property
    def proportion_odd(self) -> float:
        return self._ratio(self.weighted_nonvanishing_odd, self.weighted_total_odd)

    @property
    def proportion(self) -> float:
        return self._ratio(self.weighted_nonvanishing, self.weighted_total)


def census(
    ms: ModulusSet,
    cfg=None,
    tau_nv: float = TAU_NV,
    threads: int = 1,
    cache=None,
    data: list[ModulusData] | None = None,
) -> CensusReport:
    """Weighted count of primitive chi with |L(1/2, chi)| > tau_nv, by parity."""
    if tau_nv <= 0:
        raise ValueError("tau_nv must be positive")
    data = data if data is not None else analyze_window(ms, None, threads, cache)
    rows = []
    parts = {k: [] for k in ("nv_e", "tot_e", "nv_o", "tot_o")}
    for d in data:
        nv_e = int(np.sum(np.abs(d.L_even) > tau_nv))
        nv_o = int(np.sum(np.abs(d.L_odd) > tau_nv))
        for parity, tot, nv in (("even", d.n_even, nv_e), ("odd", d.n_odd, nv_o)):
            rows.append(
                {"q": d.q, "parity": parity, "primitive_count": tot, "nonvanishing_count": nv, "weight": d.weight}
            )
        parts["nv_e"].append(d.weight * nv_e)
        parts["tot_e"].append(d.weight * d.n_even)
        parts["nv_o"].append(d.weight * nv_o)
        parts["tot_o"].append(d.weight * d.n_odd)
    s = {k: math.fsum(v) for k, v in parts.items()}
    return CensusReport(rows, s["nv_e"], s["tot_e"], s["nv_o"], s["tot_o"], tau_nv)
