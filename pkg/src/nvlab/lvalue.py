"""Central values L(1/2, chi).

Two independent routes:

* the approximate functional equation for |L(1/2, chi)|^2 (even primitive
  chi), with the kernel ``Z(x)`` computed by trapezoid quadrature on a
  vertical line;
* a direct evaluation ``L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta(1/2, a/q)``
  with Hurwitz zeta by Euler-Maclaurin.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .characters import Character, CharacterSet

__all__ = [
    "KernelConfig",
    "KernelConvergenceError",
    "ZKernel",
    "complex_gamma",
    "z_kernel",
    "lvalue_sq_afe",
    "hurwitz_zeta_half",
    "lvalue_direct",
    "lvalues_for_modulus",
    "LValueRecord",
]

_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
# G(s) = (1 - 4 s^2)^2
DEFAULT_G = (1.0, 0.0, -8.0, 0.0, 16.0)


class KernelConvergenceError(RuntimeError):
    pass


def _lanczos_right(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 1/2
    z = z - 1
    x = np.full(z.shape, _LANCZOS[0], dtype=np.complex128)
    for i in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return np.exp(0.5 * np.log(2 * np.pi) + (z + 0.5) * np.log(t) - t) * x


def complex_gamma(s):
    """Gamma function for complex argument (scalar or array), Lanczos g=7.

    Reflection handles ``Re s < 1/2``. Non-positive integers raise.
    """
    arr = np.asarray(s, dtype=np.complex128)
    bad = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if np.any(bad):
        raise ValueError("Gamma has a pole at non-positive integers")
    out = np.empty(arr.shape, dtype=np.complex128)
    left = arr.real < 0.5
    out[~left] = _lanczos_right(arr[~left])
    zl = arr[left]
    out[left] = np.pi / (np.sin(np.pi * zl) * _lanczos_right(1 - zl))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class KernelConfig:
    """Quadrature set-up for Z(x).

    ``g_coeffs`` are the coefficients of the even polynomial G in ascending
    powers of s. ``H=None`` picks the truncation height from the decay of
    the integrand. ``h`` is the starting step; it is halved until two
    successive evaluations on the probe set agree within ``tol`` (scaled by
    ``x^-c0`` for small x, where the line integral is a cancellation).
    """

    g_coeffs: tuple[float, ...] = DEFAULT_G
    c0: float = 1.0
    H: float | None = None
    h: float = 0.25
    tol: float = 1e-12
    fast: bool = False
    max_halvings: int = 10

    def __post_init__(self):
        g = [Fraction(c).limit_denominator(10**9) for c in self.g_coeffs]
        val0 = g[0] if g else 0
        at_half = sum(c * Fraction(1, 2) ** k for k, c in enumerate(g))
        d_half = sum(k * c * Fraction(1, 2) ** (k - 1) for k, c in enumerate(g) if k)
        if val0 != 1:
            raise ValueError("G(0) must be 1")
        if at_half != 0 or d_half != 0:
            raise ValueError("G must vanish to second order at s = 1/2")
        if any(c != 0 for k, c in enumerate(g) if k % 2):
            raise ValueError("G must be even")
        if self.c0 <= 0:
            raise ValueError("contour must lie right of the pole at s = 0")

    def G(self, s):
        s = np.asarray(s, dtype=np.complex128)
        out = np.zeros(s.shape, dtype=np.complex128)
        for c in reversed(self.g_coeffs):
            out = out * s + c
        return out

    def config_hash(self) -> str:
        key = repr((self.g_coeffs, self.c0, self.H, self.h, self.tol, self.fast))
        return hashlib.sha1(key.encode()).hexdigest()[:12]


_GAMMA_QUARTER_SQ = complex_gamma(0.25) ** 2


def _integrand_base(cfg: KernelConfig, s: np.ndarray) -> np.ndarray:
    gam = complex_gamma(s / 2 + 0.25)
    return gam * gam / _GAMMA_QUARTER_SQ * cfg.G(s) / s * np.pi ** (-s)


class ZKernel:
    """Z(x) = (1/2 pi i) int_(c0) Gamma^2(s/2+1/4)/Gamma^2(1/4) G(s)/s (pi x)^-s ds."""

    PROBE = np.geomspace(1e-8, 30.0, 41)

    def __init__(self, cfg: KernelConfig):
        self.cfg = cfg
        self.H = cfg.H if cfg.H is not None else self._auto_height()
        self.h = self._converge_step()
        self._t, self._w = self._nodes(self.h)
        self.x_star = self._find_x_star()
        self._spline = None
        if cfg.fast:
            self._build_table()

    def _auto_height(self) -> float:
        H = 4.0
        while True:
            f = np.abs(_integrand_base(self.cfg, np.array([self.cfg.c0 + 1j * H])))[0]
            if f < 1e-17:
                return H
            H += 1.0
            if H > 400:
                raise KernelConvergenceError("integrand tail does not decay")

    def _nodes(self, h: float):
        n = int(np.ceil(self.H / h))
        t = h * np.arange(-n, n + 1)
        w = _integrand_base(self.cfg, self.cfg.c0 + 1j * t) * (h / (2 * np.pi))
        return t, w

    def _eval(self, x: np.ndarray, t: np.ndarray, w: np.ndarray) -> np.ndarray:
        lx = np.log(x)[:, None]
        s = self.cfg.c0 + 1j * t[None, :]
        return (np.exp(-s * lx) * w[None, :]).sum(axis=1)

    def _converge_step(self) -> float:
        cfg = self.cfg
        h = cfg.h
        scale = np.maximum(1.0, self.PROBE ** (-cfg.c0))
        prev = self._eval(self.PROBE, *self._nodes(h))
        for _ in range(cfg.max_halvings):
            h /= 2
            cur = self._eval(self.PROBE, *self._nodes(h))
            if np.all(np.abs(cur - prev) < cfg.tol * scale):
                return h
            prev = cur
        raise KernelConvergenceError(f"Z(x) quadrature did not converge (h={h})")

    def _find_x_star(self) -> float:
        grid = np.arange(0.25, 60.0, 0.25)
        vals = np.abs(self.exact(grid))
        small = vals < 1e-14
        for i in range(len(grid)):
            if small[i:].all():
                return float(grid[i])
        raise KernelConvergenceError("Z(x) does not drop below 1e-14 on (0, 60)")

    def exact(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if np.any(x <= 0):
            raise ValueError("Z(x) needs x > 0")
        out = np.empty(len(x), dtype=np.complex128)
        for lo in range(0, len(x), 512):
            out[lo : lo + 512] = self._eval(x[lo : lo + 512], self._t, self._w)
        bad = np.abs(out.imag) > self.cfg.tol * np.maximum(1.0, x ** (-self.cfg.c0))
        if np.any(bad):
            raise KernelConvergenceError(f"Z(x) has imaginary part {out.imag[bad][0]:.3e}")
        return out.real

    # geometric-grid interpolation, opt in via cfg.fast
    _X0 = 1e-4

    def _build_table(self):
        from scipy.interpolate import CubicSpline

        rho = 1.02
        while True:
            n = int(np.ceil(np.log(2 * self.x_star / self._X0) / np.log(rho))) + 1
            grid = self._X0 * rho ** np.arange(n)
            spline = CubicSpline(np.log(grid), self.exact(grid))
            mid = np.sqrt(grid[:-1] * grid[1:])
            err = np.max(np.abs(spline(np.log(mid)) - self.exact(mid)))
            if err < 1e-9 or rho < 1.0005:
                break
            rho = np.sqrt(rho)
        self._spline = spline
        self._grid_hi = grid[-1]
        self.interp_error = float(err)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self._spline is None:
            return self.exact(x)
        out = np.empty(len(x))
        use = (x >= self._X0) & (x <= self._grid_hi)
        out[use] = self._spline(np.log(x[use]))
        if (~use).any():
            out[~use] = self.exact(x[~use])
        return out


@lru_cache(maxsize=16)
def get_kernel(cfg: KernelConfig) -> ZKernel:
    return ZKernel(cfg)


def z_kernel(x, cfg: KernelConfig | None = None):
    """Z(x) for scalar or array ``x > 0``."""
    cfg = cfg or KernelConfig()
    vals = get_kernel(cfg)(x)
    return float(vals[0]) if np.ndim(x) == 0 else vals


@lru_cache(maxsize=32)
def _afe_weights(cfg: KernelConfig, q: int, x_star: float) -> np.ndarray:
    """``w[k] = Z(k/q) / sqrt(k)`` for ``1 <= k <= q x*``; shared by all chi mod q."""
    kmax = int(np.floor(q * x_star))
    k = np.arange(1, kmax + 1, dtype=np.float64)
    w = np.zeros(kmax + 1)
    w[1:] = get_kernel(cfg)(k / q) / np.sqrt(k)
    w.flags.writeable = False
    return w


def lvalue_sq_afe(chi: Character, cfg: KernelConfig | None = None, x_star: float | None = None) -> float:
    """|L(1/2, chi)|^2 from the approximate functional equation.

    The double sum is cut at ``m n <= q x*``; ``x_star`` overrides the
    kernel's own truncation point.
    """
    cfg = cfg or KernelConfig()
    q = chi.modulus
    if q < 3 or not chi.is_even or not chi.is_primitive:
        raise ValueError("AFE needs an even primitive character with q >= 3")
    xs = get_kernel(cfg).x_star if x_star is None else x_star
    w = _afe_weights(cfg, q, float(xs))
    val = 2 * _kernels.afe_sum(chi.values, w, len(w) - 1)
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"AFE sum not real: {val}")
    return val.real


def hurwitz_zeta_half(alpha) -> float | np.ndarray:
    """zeta(1/2, alpha) for ``0 < alpha <= 1`` (scalar or array)."""
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(a <= 0) or np.any(a > 1):
        raise ValueError("alpha must lie in (0, 1]")
    out = _kernels.hurwitz_half(np.atleast_1d(a))
    return float(out[0]) if a.ndim == 0 else out


def lvalue_direct(chi: Character) -> complex:
    """L(1/2, chi) = q^{-1/2} sum_{a=1}^{q} chi(a) zeta(1/2, a/q)."""
    if chi.is_principal:
        raise ValueError("lvalue_direct needs a non-principal character")
    q = chi.modulus
    a = np.arange(1, q + 1)
    z = hurwitz_zeta_half(a / q)
    vals = chi.values[a % q]
    return complex(np.sum(vals * z)) / np.sqrt(q)


def lvalues_for_modulus(cs: CharacterSet) -> np.ndarray:
    """L(1/2, chi) for every character in ``cs`` (principal entry meaningless)."""
    q = cs.q
    a = np.arange(q)
    alpha = np.where(a == 0, 1.0, a / q)
    z = hurwitz_zeta_half(alpha)
    return cs.transform(z) / np.sqrt(q)


@dataclass(frozen=True)
class LValueRecord:
    modulus: int
    index: int
    value: float
    method: str
    config_hash: str = field(default="")

    def __post_init__(self):
        if self.value < -1e-9:
            raise ValueError("|L|^2 must be non-negative")
