"""Coefficient-space engine: index sets, coefficient sequences, eigenvalue maps.

An operator diagonalized by a discrete transform acts on coefficients as
pointwise multiplication by its eigenvalues, so powers, resolvents and
Neumann partial sums are all computed index by index here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import ParameterError, PowerOverflowError, SingularResolventError, ZeroShiftError

INTEGERS = "integers"
NATURALS = "naturals"

DEFAULT_MAX_DEGREE = 256
DEFAULT_THRESHOLD = 1e-12
TAIL_MARGIN = 2

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class IndexSet:
    """Truncated index set: ``{-N..N}`` for integers, ``{0..N}`` for naturals."""

    kind: str
    max_degree: int

    def __post_init__(self):
        if self.kind not in (INTEGERS, NATURALS):
            raise ParameterError(f"unknown index kind {self.kind!r}")
        if int(self.max_degree) != self.max_degree or self.max_degree < 0:
            raise ParameterError(f"max_degree must be a non-negative integer, got {self.max_degree}")

    @property
    def indices(self) -> np.ndarray:
        if self.kind == INTEGERS:
            return np.arange(-self.max_degree, self.max_degree + 1)
        return np.arange(self.max_degree + 1)

    @property
    def size(self) -> int:
        return 2 * self.max_degree + 1 if self.kind == INTEGERS else self.max_degree + 1

    def __contains__(self, n) -> bool:
        if int(n) != n:
            return False
        if self.kind == INTEGERS:
            return abs(n) <= self.max_degree
        return 0 <= n <= self.max_degree

    def position(self, n: int) -> int:
        if n not in self:
            raise IndexError(f"index {n} outside {self}")
        return int(n) + self.max_degree if self.kind == INTEGERS else int(n)

    def near_edge(self, n: int, margin: int = TAIL_MARGIN) -> bool:
        return abs(n) >= self.max_degree - margin


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Complex coefficients stored densely over an :class:`IndexSet`."""

    index_set: IndexSet
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.index_set.size:
            raise ParameterError(
                f"{vals.shape[0]} values given for an index set of size {self.index_set.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ParameterError("coefficient values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, index_set: IndexSet) -> "CoefficientSequence":
        return cls(index_set, np.zeros(index_set.size, dtype=complex))

    @classmethod
    def from_mapping(cls, index_set: IndexSet, mapping: Mapping[int, complex]) -> "CoefficientSequence":
        vals = np.zeros(index_set.size, dtype=complex)
        for n, v in mapping.items():
            vals[index_set.position(n)] += v
        return cls(index_set, vals)

    @classmethod
    def delta(cls, index_set: IndexSet, k: int, value: complex = 1.0) -> "CoefficientSequence":
        return cls.from_mapping(index_set, {k: value})

    @property
    def indices(self) -> np.ndarray:
        return self.index_set.indices

    def __getitem__(self, n: int) -> complex:
        return complex(self.values[self.index_set.position(n)])

    def __len__(self) -> int:
        return self.index_set.size

    def items(self):
        return zip(self.indices.tolist(), self.values.tolist())

    def with_values(self, values) -> "CoefficientSequence":
        return CoefficientSequence(self.index_set, values)

    def scaled(self, alpha: complex) -> "CoefficientSequence":
        return self.with_values(alpha * self.values)

    def restricted(self, indices: Iterable[int]) -> "CoefficientSequence":
        """Copy that keeps only the given indices (others set to zero)."""
        keep = np.zeros(self.index_set.size, dtype=bool)
        for n in indices:
            keep[self.index_set.position(n)] = True
        return self.with_values(np.where(keep, self.values, 0))

    def truncated(self, max_degree: int) -> "CoefficientSequence":
        """Re-express on a smaller or larger index set of the same kind."""
        new = IndexSet(self.index_set.kind, max_degree)
        out = np.zeros(new.size, dtype=complex)
        for n, v in self.items():
            if n in new:
                out[new.position(n)] = v
            elif v != 0:
                raise ParameterError(f"nonzero coefficient at {n} does not fit in {new}")
        return CoefficientSequence(new, out)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class EigenvalueMap:
    """Deterministic map from indices to eigenvalues.

    ``vectorized`` is an optional array version of ``evaluator``.
    """

    family: object
    evaluator: Callable[[int], complex]
    vectorized: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __call__(self, n: int) -> complex:
        return complex(self.evaluator(int(n)))

    def values(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=int)
        if self.vectorized is not None:
            return np.asarray(self.vectorized(idx), dtype=complex)
        return np.array([self.evaluator(int(n)) for n in idx.ravel()], dtype=complex).reshape(idx.shape)


@dataclass(frozen=True)
class SupportSet:
    indices: tuple
    threshold_used: float
    tail_flag: bool
    index_set: IndexSet

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, n):
        return n in self.indices

    @property
    def is_empty(self) -> bool:
        return not self.indices


def support(c: CoefficientSequence, rel_threshold: float = DEFAULT_THRESHOLD) -> SupportSet:
    """Indices whose coefficient exceeds ``rel_threshold`` times the largest one."""
    if rel_threshold < 0 or not math.isfinite(rel_threshold):
        raise ParameterError(f"rel_threshold must be a finite non-negative number, got {rel_threshold}")
    mags = np.abs(c.values)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return SupportSet((), rel_threshold, False, c.index_set)
    keep = mags > rel_threshold * top
    idx = tuple(int(n) for n in c.indices[keep])
    tail = any(c.index_set.near_edge(n) for n in idx)
    return SupportSet(idx, rel_threshold, tail, c.index_set)


def apply_power(c: CoefficientSequence, e: EigenvalueMap, n: int) -> CoefficientSequence:
    """Coefficients of ``T^n f``: ``e(λ)^n c(λ)``.

    Magnitudes are checked in log space first; an unrepresentable entry raises
    :class:`PowerOverflowError` instead of producing ``inf``.
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"power must be a non-negative integer, got {n}")
    n = int(n)
    if n == 0:
        return c
    ev = e.values(c.indices)
    nz = c.values != 0
    with np.errstate(divide="ignore"):
        logmag = n * np.log(np.abs(ev)) + np.log(np.abs(c.values))
    bad = nz & (logmag > _LOG_MAX)
    if np.any(bad):
        k = int(np.argmax(np.where(bad, logmag, -np.inf)))
        raise PowerOverflowError(int(c.indices[k]), float(logmag[k]))
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        out = np.where(nz, ev**n * c.values, 0)
    return c.with_values(out)


def resolvent_floor(z: complex) -> float:
    return 1e-10 * (1 + abs(z))


def _checked_denominators(c, e, z, rel_threshold, floor):
    supp = support(c, rel_threshold)
    floor = resolvent_floor(z) if floor is None else floor
    mask = np.zeros(c.index_set.size, dtype=bool)
    denom = np.ones(c.index_set.size, dtype=complex)
    for n in supp:
        pos = c.index_set.position(n)
        d = e(n) - z
        if abs(d) < floor:
            raise SingularResolventError(n, abs(d), floor)
        mask[pos] = True
        denom[pos] = d
    return mask, denom


def resolvent_coeffs(
    c: CoefficientSequence,
    e: EigenvalueMap,
    z: complex,
    rel_threshold: float = DEFAULT_THRESHOLD,
    floor: float | None = None,
) -> CoefficientSequence:
    """Local resolvent in coefficient space: ``c(λ)/(e(λ) - z)`` on the support."""
    mask, denom = _checked_denominators(c, e, z, rel_threshold, floor)
    return c.with_values(np.where(mask, c.values / denom, 0))


def resolvent_derivative_coeffs(
    c: CoefficientSequence,
    e: EigenvalueMap,
    z: complex,
    rel_threshold: float = DEFAULT_THRESHOLD,
    floor: float | None = None,
) -> CoefficientSequence:
    """z-derivative of :func:`resolvent_coeffs`: ``c(λ)/(e(λ) - z)^2`` on the support."""
    mask, denom = _checked_denominators(c, e, z, rel_threshold, floor)
    return c.with_values(np.where(mask, c.values / denom**2, 0))


def neumann_partial_sum(
    c: CoefficientSequence, e: EigenvalueMap, z: complex, n_terms: int
) -> CoefficientSequence:
    """``-sum_{n < n_terms} e(λ)^n c(λ) / z^(n+1)``; convergence is not enforced."""
    if z == 0:
        raise ZeroShiftError("Neumann series needs z != 0")
    if int(n_terms) != n_terms or n_terms < 1:
        raise ParameterError(f"n_terms must be a positive integer, got {n_terms}")
    q = e.values(c.indices) / z
    total = np.zeros(c.index_set.size, dtype=complex)
    term = np.ones(c.index_set.size, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(int(n_terms)):
            total += term
            term = term * q
        out = -total * c.values / z
    if not np.all(np.isfinite(out)):
        k = int(np.argmax(~np.isfinite(out)))
        raise PowerOverflowError(int(c.indices[k]), math.inf)
    return c.with_values(out)
