"""Randomness-free chaos machinery.

Hermite polynomials (probabilists' convention), the cosine orthonormal basis
of L2([0, T]) together with its antiderivatives, sparse multi-index algebra,
graded enumeration of the truncated index set, and the binomial weights of
the Wick product expansion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

# Largest index-set size we are willing to materialize.
MAX_TRUNCATION_MEMBERS = 5_000_000


@dataclass(frozen=True)
class MultiIndex:
    """Sparse multi-index over (wiener channel k, basis index p) slots.

    Entries are stored in canonical form: sorted by (k, p), every stored
    order strictly positive.  The empty index is the zero multi-index.
    """

    entries: tuple[tuple[tuple[int, int], int], ...] = ()

    def __post_init__(self):
        for (k, p), n in self.entries:
            if k < 1 or p < 1:
                raise ValueError(f"slot indices must be positive, got ({k}, {p})")
            if n <= 0:
                raise ValueError(f"stored orders must be positive, got {n} at ({k}, {p})")
        keys = [slot for slot, _ in self.entries]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("entries must be sorted by (k, p) and unique")

    @classmethod
    def from_dict(cls, orders: Mapping[tuple[int, int], int]) -> "MultiIndex":
        entries = tuple(sorted((slot, n) for slot, n in orders.items() if n != 0))
        return cls(entries)

    @classmethod
    def unit(cls, k: int, p: int, order: int = 1) -> "MultiIndex":
        return cls.from_dict({(k, p): order})

    @property
    def order(self) -> int:
        """Total order |alpha|."""
        return sum(n for _, n in self.entries)

    @property
    def degree(self) -> int:
        """Largest active basis index p, zero for the empty index."""
        return max((p for (_, p), _ in self.entries), default=0)

    @property
    def max_channel(self) -> int:
        return max((k for (k, _), _ in self.entries), default=0)

    def get(self, k: int, p: int) -> int:
        for slot, n in self.entries:
            if slot == (k, p):
                return n
        return 0

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.entries)

    @property
    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(slot for slot, _ in self.entries)

    def leq(self, other: "MultiIndex") -> bool:
        """Componentwise <=."""
        o = other.as_dict()
        return all(n <= o.get(slot, 0) for slot, n in self.entries)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        out = self.as_dict()
        for slot, n in other.entries:
            out[slot] = out.get(slot, 0) + n
        return MultiIndex.from_dict(out)

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        out = self.as_dict()
        for slot, n in other.entries:
            m = out.get(slot, 0) - n
            if m < 0:
                raise ValueError(f"subtraction would go negative at slot {slot}")
            out[slot] = m
        return MultiIndex.from_dict(out)

    def scaled(self, factor: int) -> "MultiIndex":
        if factor < 0:
            raise ValueError("factor must be nonnegative")
        return MultiIndex.from_dict({slot: factor * n for slot, n in self.entries})

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return "+".join(f"{n}*e[{k},{p}]" for (k, p), n in self.entries)


ZERO_INDEX = MultiIndex()


@dataclass(frozen=True)
class BasisSpec:
    """Time horizon defining the cosine basis of L2([0, T])."""

    horizon: float

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")


def hermite(n: int, x):
    """Probabilists' Hermite polynomial H_n(x) via the three-term recurrence.

    Accepts scalars or numpy arrays for ``x``.
    """
    if n < 0:
        raise ValueError("polynomial order must be nonnegative")
    h_prev = np.ones_like(np.asarray(x, dtype=float))
    if n == 0:
        return h_prev if np.ndim(x) else float(h_prev)
    h = np.asarray(x, dtype=float).copy()
    for m in range(1, n):
        h, h_prev = x * h - m * h_prev, h
    return h if np.ndim(x) else float(h)


def _check_time(t: float, spec: BasisSpec) -> None:
    if t < 0 or t > spec.horizon:
        raise ValueError(f"time {t} outside [0, {spec.horizon}]")


def basis_m(p: int, t: float, spec: BasisSpec) -> float:
    """Cosine basis element m_p evaluated at time t."""
    if p < 1:
        raise ValueError("basis index must be positive")
    _check_time(t, spec)
    T = spec.horizon
    if p == 1:
        return 1.0 / math.sqrt(T)
    return math.sqrt(2.0 / T) * math.cos((p - 1) * math.pi * t / T)


def basis_m_antiderivative(p: int, t: float, spec: BasisSpec) -> float:
    """Closed-form integral of m_p over [0, t]."""
    if p < 1:
        raise ValueError("basis index must be positive")
    _check_time(t, spec)
    T = spec.horizon
    if p == 1:
        return t / math.sqrt(T)
    return math.sqrt(2.0 * T) / ((p - 1) * math.pi) * math.sin((p - 1) * math.pi * t / T)


def _compositions(total: int, slots: int):
    """All length-``slots`` tuples of nonnegative ints summing to ``total``, lexicographic."""
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class TruncationSet:
    """Graded-lexicographic enumeration of multi-indices with |alpha| <= N,
    basis support <= I and channel support <= K."""

    num_wiener: int
    max_order: int
    max_basis: int
    members: tuple[MultiIndex, ...]
    lookup: Mapping[MultiIndex, int]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, alpha: MultiIndex) -> bool:
        return alpha in self.lookup

    def position(self, alpha: MultiIndex) -> int:
        return self.lookup[alpha]


def enumerate_truncation(K: int, N: int, I: int) -> TruncationSet:
    """Build the truncated index set over K*I slots, graded then lexicographic."""
    if K < 1 or I < 1 or N < 0:
        raise ValueError("require K >= 1, I >= 1, N >= 0")
    slots = [(k, p) for k in range(1, K + 1) for p in range(1, I + 1)]
    count = math.comb(N + len(slots), len(slots))
    if count > MAX_TRUNCATION_MEMBERS:
        raise ValueError(
            f"truncation set with {count} members exceeds the cap of {MAX_TRUNCATION_MEMBERS}"
        )
    members = []
    for grade in range(N + 1):
        for combo in _compositions(grade, len(slots)):
            members.append(MultiIndex.from_dict(dict(zip(slots, combo))))
    lookup = {alpha: i for i, alpha in enumerate(members)}
    return TruncationSet(
        num_wiener=K,
        max_order=N,
        max_basis=I,
        members=tuple(members),
        lookup=lookup,
    )


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def wick_G(alpha: MultiIndex, beta: MultiIndex, rho: MultiIndex) -> float:
    """Binomial weight of the Wick product expansion.

    Computed as the square root of the componentwise product
    C(alpha, beta) * C(beta+rho, rho) * C(alpha-beta+rho, rho), evaluated in
    log-factorial space.  Vanishes when any binomial does.
    """
    if not beta.leq(alpha):
        raise ValueError("beta must be componentwise <= alpha")
    a = alpha.as_dict()
    b = beta.as_dict()
    r = rho.as_dict()
    log_total = 0.0
    for slot in set(a) | set(b) | set(r):
        an = a.get(slot, 0)
        bn = b.get(slot, 0)
        rn = r.get(slot, 0)
        log_total += _log_binomial(an, bn)
        log_total += _log_binomial(bn + rn, rn)
        log_total += _log_binomial(an - bn + rn, rn)
    return math.exp(0.5 * log_total)


def evaluate_wick_polynomial(alpha: MultiIndex, xi: Mapping[tuple[int, int], float]):
    """Normalized Hermite tensor product T_alpha at the Gaussian draws ``xi``.

    ``xi`` values may be scalars or numpy arrays (evaluated elementwise).
    Raises KeyError when a supported slot has no draw.
    """
    value = 1.0
    for slot, n in alpha.entries:
        if slot not in xi:
            raise KeyError(f"missing Gaussian draw for slot {slot}")
        norm = math.exp(-0.5 * math.lgamma(n + 1))
        value = value * hermite(n, xi[slot]) * norm
    return value
