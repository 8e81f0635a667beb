"""Maximizing the non-vanishing ratio over the mollifier polynomials.

With P(0) = 0 and P(1) = 1 the ratio is ``4 / (4 + I1/theta1 + I2/theta2)``
where ``I = int_0^1 P'^2``, so each polynomial is optimized on its own by
minimizing the quadratic form ``I(a) = a^T H a``, ``H_ij = ij/(i+j-1)``,
subject to ``sum a_i = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .mollifier import PolySpec, lambda_coeff_exact, to_fraction

__all__ = [
    "OptimizeResult",
    "nv_ratio",
    "nv_ratio_exact",
    "optimize",
    "minimize_energy_exact",
    "minimize_energy_descent",
    "sandwich_value",
    "c_eta",
    "c_eta_exact",
    "theta_max",
    "theta_max_exact",
    "MAX_DEGREE",
]

MAX_DEGREE = 8


def nv_ratio_exact(P1: PolySpec, P2: PolySpec, theta1, theta2) -> Fraction:
    num = (P1.at_one() + P2.at_one()) ** 2
    den = lambda_coeff_exact(P1, theta1) + lambda_coeff_exact(P2, theta2) + 2 * P1.at_one() * P2.at_one()
    return num / den


def nv_ratio(P1: PolySpec, P2: PolySpec, theta1, theta2) -> float:
    """(P1(1)+P2(1))^2 / (lambda(P1) + lambda(P2) + 2 P1(1) P2(1))."""
    for th in (theta1, theta2):
        if not 0 < th < 0.5:
            raise ValueError(f"theta must lie in (0, 1/2), got {th}")
    return float(nv_ratio_exact(P1, P2, theta1, theta2))


def _energy_matrix(d: int) -> list[list[Fraction]]:
    return [[Fraction(i * j, i + j - 1) for j in range(1, d + 1)] for i in range(1, d + 1)]


def _solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def minimize_energy_exact(d: int) -> list[Fraction]:
    """Coefficients a_1..a_d minimizing int P'^2 with P(1) = 1, in rationals.

    KKT system ``[2H 1; 1^T 0] [a; lam] = [0; 1]``.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    H = _energy_matrix(d)
    A = [[2 * H[i][j] for j in range(d)] + [Fraction(1)] for i in range(d)]
    A.append([Fraction(1)] * d + [Fraction(0)])
    rhs = [Fraction(0)] * d + [Fraction(1)]
    sol = _solve_exact(A, rhs)
    return sol[:d]


def minimize_energy_descent(d: int, tol: float = 1e-12, max_sweeps: int = 10000) -> np.ndarray:
    """Float cross-check of :func:`minimize_energy_exact` by coordinate descent.

    P' is expanded in shifted Legendre polynomials on [0, 1]; the first
    coefficient is pinned by P(1) - P(0) = 1 and the rest are swept one at a
    time with an exact line minimization of ``a^T H a``. The monomial Gram
    matrix is ill-conditioned beyond d ~ 6, the Legendre one is not.
    Starts from a perturbed point and returns monomial coefficients a_1..a_d.
    """
    H = np.array([[i * j / (i + j - 1) for j in range(1, d + 1)] for i in range(1, d + 1)])
    # column k: monomial coefficients a_1..a_d of P with P' = shifted Legendre L_k
    Tm = np.zeros((d, d))
    for k in range(d):
        dp = np.polynomial.Legendre.basis(k, domain=[0, 1]).convert(kind=np.polynomial.Polynomial).coef
        for i, c in enumerate(dp):
            Tm[i, k] = c / (i + 1)
    A = Tm.T @ H @ Tm
    c = np.full(d, 0.1)
    c[0] = 1.0
    for _ in range(max_sweeps):
        biggest = 0.0
        for k in range(1, d):
            new = -(A[k] @ c - A[k, k] * c[k]) / A[k, k]
            biggest = max(biggest, abs(new - c[k]))
            c[k] = new
        if biggest < tol:
            break
    return Tm @ c


@dataclass
class OptimizeResult:
    p1: list[Fraction]
    p2: list[Fraction]
    ratio: float
    sandwich: float
    theta1: float
    theta2: float
    descent_max_dev: float
    slack: dict = field(default_factory=dict)

    @property
    def discrepancy(self) -> bool:
        """True where the exact maximum falls below the sandwich value."""
        return self.sandwich - self.ratio > 1e-12


def optimize(d: int, theta1, theta2, eta1: float | None = None, eta2: float | None = None) -> OptimizeResult:
    """Best P1, P2 of degree <= d (each minimizes its own int P'^2)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d > MAX_DEGREE:
        raise ValueError(f"degree capped at {MAX_DEGREE}")
    a = minimize_energy_exact(d)
    poly = PolySpec([Fraction(0), *a])
    ratio = nv_ratio(poly, poly, theta1, theta2)
    dev = float(np.max(np.abs(minimize_energy_descent(d) - np.array([float(x) for x in a]))))
    slack = {}
    if eta1 is not None and eta2 is not None:
        tm = theta_max(eta1, eta2)
        slack = {"theta_max": tm, "theta1_slack": tm - theta1, "theta2_slack": tm - theta2}
    return OptimizeResult(
        p1=[Fraction(0), *a],
        p2=[Fraction(0), *a],
        ratio=ratio,
        sandwich=sandwich_value(theta1, theta2),
        theta1=theta1,
        theta2=theta2,
        descent_max_dev=dev,
        slack=slack,
    )


def sandwich_value(theta1, theta2) -> float:
    """(theta1 + theta2) / (1 + theta1 + theta2)."""
    return (theta1 + theta2) / (1 + theta1 + theta2)


def _xi(eta1, eta2) -> Fraction:
    return 41 * to_fraction(eta1) + 5 * to_fraction(eta2)


def c_eta_exact(eta1, eta2) -> Fraction:
    xi = _xi(eta1, eta2)
    if xi >= Fraction(1, 2):
        raise ValueError("need 41 eta1 + 5 eta2 < 1/2")
    return Fraction(1, 2) - (1 - 2 * xi) / (2 - 2 * xi)


def c_eta(eta1, eta2) -> float:
    """1/2 - (1 - 2 xi)/(2 - 2 xi), xi = 41 eta1 + 5 eta2."""
    return float(c_eta_exact(eta1, eta2))


def theta_max_exact(eta1, eta2) -> Fraction:
    return Fraction(1, 2) - _xi(eta1, eta2)


def theta_max(eta1, eta2) -> float:
    """Exclusive upper bound 1/2 - 41 eta1 - 5 eta2 on admissible theta."""
    return float(theta_max_exact(eta1, eta2))
