"""Dirichlet characters built from an explicit decomposition of (Z/qZ)^x.

A character mod ``q`` is stored by its exponent vector ``j`` relative to the
generators ``g_i`` (orders ``n_i``) of :class:`UnitGroup`:

    chi(prod g_i^{k_i}) = e(sum_i j_i k_i / n_i).

Characters in a :class:`CharacterSet` are ordered so that the flat index is
``np.ravel_multi_index(j, orders)``. That layout makes a full character
transform ``F(chi) = sum_u chi(u) f(u)`` a single ``ifftn`` over the
exponent grid, which is what the moment sweeps use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, lcm, prod

import numpy as np

from .arith import divisors, euler_phi, factorize, mobius, primitive_root_prime_power

__all__ = [
    "UnitGroup",
    "Character",
    "CharacterSet",
    "unit_group",
    "enumerate_characters",
    "conductor",
    "conductor_by_search",
    "phi_star",
    "gauss_sum",
    "epsilon_chi",
    "even_orthogonality",
]

# full value tables are materialized up to this modulus
TABLE_LIMIT = 10**5


def _crt_lift(x: int, pk: int, q: int) -> int:
    """The residue mod q that is x mod pk and 1 mod q/pk."""
    rest = q // pk
    if rest == 1:
        return x % q
    # y = x + pk * t with y = 1 mod rest
    t = ((1 - x) * pow(pk, -1, rest)) % rest
    return (x + pk * t) % q


@dataclass(frozen=True)
class UnitGroup:
    """(Z/qZ)^x as a product of cyclic groups.

    ``local`` records, per component, the prime power it lives on and its
    role: ``"cyclic"`` for odd p, ``"minus"`` for the -1 factor at 2 and
    ``"five"`` for the <5> factor mod 2^k, k >= 3.
    """

    modulus: int
    components: tuple[tuple[int, int], ...]
    local: tuple[tuple[int, int, str], ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.components)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.components else 1

    @cached_property
    def unit_grid(self) -> np.ndarray:
        """Units ``prod g_i^{k_i} mod q`` in C order of the exponent grid."""
        q = self.modulus
        arr = np.array([1 % q], dtype=np.int64)
        for g, n in self.components:
            powers = np.empty(n, dtype=np.int64)
            powers[0] = 1 % q
            for e in range(1, n):
                powers[e] = (powers[e - 1] * g) % q
            arr = ((arr[:, None] * powers[None, :]) % q).ravel()
        return arr

    @cached_property
    def dlog(self) -> np.ndarray:
        """``dlog[u]`` = exponent vector of unit ``u``; rows of -1 on non-units."""
        q, r = self.modulus, len(self.components)
        out = np.full((q, r), -1, dtype=np.int64)
        if r:
            idx = np.stack(np.unravel_index(np.arange(self.order), self.orders), axis=1)
            out[self.unit_grid] = idx
        else:
            out[self.unit_grid] = np.zeros((1, 0), dtype=np.int64)
        return out

    @cached_property
    def is_unit(self) -> np.ndarray:
        mask = np.zeros(self.modulus, dtype=bool)
        mask[self.unit_grid] = True
        return mask


def unit_group(q: int) -> UnitGroup:
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    comps: list[tuple[int, int]] = []
    local: list[tuple[int, int, str]] = []
    for p, k in factorize(q) if q > 1 else ():
        pk = p**k
        if p == 2:
            if k == 2:
                comps.append((_crt_lift(3, pk, q), 2))
                local.append((2, k, "minus"))
            elif k >= 3:
                comps.append((_crt_lift(pk - 1, pk, q), 2))
                local.append((2, k, "minus"))
                comps.append((_crt_lift(5, pk, q), 2 ** (k - 2)))
                local.append((2, k, "five"))
        else:
            g = primitive_root_prime_power(p, k)
            comps.append((_crt_lift(g, pk, q), pk // p * (p - 1)))
            local.append((p, k, "cyclic"))
    return UnitGroup(q, tuple(comps), tuple(local))


@lru_cache(maxsize=64)
def _root_table(L: int) -> np.ndarray:
    """e(j/L) for j < L; exact at multiples of L/4 and conjugate-symmetric."""
    j = np.arange(L, dtype=np.float64)
    out = np.cos(2 * np.pi * j / L) + 1j * np.sin(2 * np.pi * j / L)
    out[1:] = np.where(np.arange(1, L) <= L // 2, out[1:], np.conj(out[1:][::-1]))
    for k, v in enumerate((1, 1j, -1, -1j)):
        if (k * L) % 4 == 0:
            out[k * L // 4] = v
    return out


@dataclass(frozen=True, eq=False)
class Character:
    """One Dirichlet character.

    The value table on ``0..q-1`` is stored for ``q <= TABLE_LIMIT``; above
    that ``chi(n)`` goes through the discrete log and ``values`` is rebuilt
    on each access.
    """

    modulus: int
    exponents: tuple[int, ...]
    table: np.ndarray | None = field(repr=False)
    conductor: int
    parity: str
    index: int = -1
    owner: CharacterSet | None = field(default=None, repr=False, compare=False)

    @property
    def values(self) -> np.ndarray:
        if self.table is not None:
            return self.table
        return self.owner._table(self.owner.exponents[self.index : self.index + 1])[0]

    def __call__(self, n: int) -> complex:
        if self.table is not None:
            return complex(self.table[n % self.modulus])
        row = self.owner.exponents[self.index : self.index + 1]
        return complex(self.owner.values_at(n, None, row)[0])

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def conj(self) -> Character:
        cs = enumerate_characters(self.modulus)
        return cs[cs.conjugate_index(self.index)]


class CharacterSet:
    """All phi(q) characters mod ``q``, with vectorized evaluation helpers."""

    def __init__(self, q: int):
        self.q = q
        self.group = unit_group(q)
        orders = self.group.orders
        if orders:
            self.exponents = np.stack(
                np.unravel_index(np.arange(self.group.order), orders), axis=1
            ).astype(np.int64)
        else:
            self.exponents = np.zeros((1, 0), dtype=np.int64)
        self.index = {tuple(int(v) for v in row): i for i, row in enumerate(self.exponents)}
        self._cache: dict[int, Character] = {}

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __getitem__(self, i: int) -> Character:
        if i < 0:
            i += len(self)
        ch = self._cache.get(i)
        if ch is None:
            big = self.q > TABLE_LIMIT
            ch = Character(
                self.q,
                tuple(int(v) for v in self.exponents[i]),
                None if big else self._table(self.exponents[i : i + 1])[0],
                int(self.conductors[i]),
                "even" if self.even_mask[i] else "odd",
                i,
                self if big else None,
            )
            self._cache[i] = ch
        return ch

    # -- structure -------------------------------------------------------

    @cached_property
    def _scale(self) -> np.ndarray:
        L = self.group.exponent
        return np.array([L // n for n in self.group.orders], dtype=np.int64)

    def _phases(self, logs: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
        """Integer phases mod L, shape (len(rows), len(logs))."""
        ex = self.exponents if rows is None else rows
        L = self.group.exponent
        if ex.shape[1] == 0:
            return np.zeros((len(ex), len(logs)), dtype=np.int64)
        return ((ex * self._scale) @ logs.T) % L

    def _table(self, rows: np.ndarray) -> np.ndarray:
        q = self.q
        vals = np.zeros((len(rows), q), dtype=np.complex128)
        units = self.group.unit_grid
        ph = self._phases(self.group.dlog[units], rows)
        vals[:, units] = _root_table(self.group.exponent)[ph]
        return vals

    def value_matrix(self, mask: np.ndarray | None = None) -> np.ndarray:
        """Values of the (masked) characters on ``0..q-1``, one row each."""
        rows = self.exponents if mask is None else self.exponents[mask]
        return self._table(rows)

    def values_at(self, n: int, mask: np.ndarray | None = None, rows: np.ndarray | None = None) -> np.ndarray:
        """``chi(n)`` for every character (or the masked subset, or explicit exponent rows)."""
        if rows is None:
            rows = self.exponents if mask is None else self.exponents[mask]
        n %= self.q
        if not self.group.is_unit[n]:
            return np.zeros(len(rows), dtype=np.complex128)
        ph = self._phases(self.group.dlog[n : n + 1], rows)[:, 0]
        return _root_table(self.group.exponent)[ph]

    def transform(self, f: np.ndarray) -> np.ndarray:
        """``F[i] = sum_{u unit} chi_i(u) f(u)`` for ``f`` given on ``0..q-1``."""
        f = np.asarray(f)
        grid = f[self.group.unit_grid]
        orders = self.group.orders
        if not orders:
            return grid.astype(np.complex128)
        out = np.fft.ifftn(grid.reshape(orders)) * self.group.order
        return out.ravel()

    def conjugate_index(self, i: int) -> int:
        orders = np.array(self.group.orders, dtype=np.int64)
        if len(orders) == 0:
            return i
        return int(np.ravel_multi_index(tuple((-self.exponents[i]) % orders), self.group.orders))

    @cached_property
    def even_mask(self) -> np.ndarray:
        q = self.q
        if q <= 2:
            return np.ones(len(self), dtype=bool)
        ph = self._phases(self.group.dlog[q - 1 : q])[:, 0]
        return ph == 0

    @cached_property
    def conductors(self) -> np.ndarray:
        """Conductor of every character from its local components."""
        ex = self.exponents
        cond = np.ones(len(ex), dtype=np.int64)
        minus_col = None
        for col, ((_, n), (p, k, role)) in enumerate(zip(self.group.components, self.group.local)):
            j = ex[:, col]
            if role == "cyclic":
                o = n // np.gcd(j, n)
                v = np.zeros_like(o)
                oo = o.copy()
                while True:
                    hit = (oo % p == 0) & (oo > 1)
                    if not hit.any():
                        break
                    v[hit] += 1
                    oo[hit] //= p
                cond *= np.where(o > 1, p ** (v + 1), 1)
            elif role == "minus":
                minus_col = j
                if k == 2:
                    cond *= np.where(j != 0, 4, 1)
            else:  # five, k >= 3
                o = n // np.gcd(j, n)
                v = np.log2(o).round().astype(np.int64)
                f2 = np.where(v >= 1, 2 ** (v + 2), np.where(minus_col != 0, 4, 1))
                cond *= f2
        return cond

    @cached_property
    def primitive_mask(self) -> np.ndarray:
        return self.conductors == self.q

    @cached_property
    def even_primitive_mask(self) -> np.ndarray:
        return self.primitive_mask & self.even_mask

    @cached_property
    def odd_primitive_mask(self) -> np.ndarray:
        return self.primitive_mask & ~self.even_mask


@lru_cache(maxsize=256)
def enumerate_characters(q: int) -> CharacterSet:
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    return CharacterSet(q)


def conductor(chi: Character) -> int:
    return chi.conductor


def conductor_by_search(chi: Character) -> int:
    """Conductor straight from the definition.

    Smallest ``f | q`` such that ``chi(n) = 1`` for every unit ``n = 1 mod f``.
    Independent of the exponent bookkeeping in :attr:`CharacterSet.conductors`.
    """
    q = chi.modulus
    n = np.arange(q)
    units = np.gcd(n, q) == 1
    for f in divisors(q):
        sel = units & (n % f == 1 % f)
        if np.all(np.abs(chi.values[sel] - 1.0) < 1e-9):
            return f
    return q


def phi_star(q: int) -> int:
    """Number of primitive characters mod q, as ``sum_{k|q} phi(k) mu(q/k)``."""
    return sum(euler_phi(k) * mobius(q // k) for k in divisors(q))


def gauss_sum(chi: Character) -> complex:
    q = chi.modulus
    h = np.arange(q)
    tw = np.cos(2 * np.pi * h / q) + 1j * np.sin(2 * np.pi * h / q)
    return complex(np.sum(chi.values * tw))


def epsilon_chi(chi: Character) -> complex:
    return gauss_sum(chi) / chi.modulus**0.5


def _orth_rhs_part(q: int, x: int) -> int:
    # sum over vw = q with w | x (every w divides 0)
    return sum(mobius(q // w) * euler_phi(w) for w in divisors(q) if x % w == 0)


def even_orthogonality(q: int, m: int, n: int) -> tuple[float, float]:
    """Both sides of the even-primitive orthogonality relation.

    ``lhs`` sums ``chi(m) conj(chi(n))`` over even primitive ``chi`` mod q;
    ``rhs`` is ``(A(m-n) + A(m+n)) / 2`` with
    ``A(x) = sum_{vw=q, w|x} mu(v) phi(w)``.
    """
    if gcd(m * n, q) != 1:
        raise ValueError(f"need gcd(mn, q) = 1, got q={q}, m={m}, n={n}")
    cs = enumerate_characters(q)
    mask = cs.even_primitive_mask
    lhs = complex(np.sum(cs.values_at(m, mask) * np.conj(cs.values_at(n, mask))))
    if abs(lhs.imag) > 1e-9:
        raise ArithmeticError(f"orthogonality sum not real: {lhs}")
    rhs = 0.5 * (_orth_rhs_part(q, m - n) + _orth_rhs_part(q, m + n))
    return lhs.real, rhs

