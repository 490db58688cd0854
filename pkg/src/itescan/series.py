"""Truncated complex power-series arithmetic.

The shared vehicle for the expansion and continuation machinery: fixed
truncation order M, coefficients c_0..c_M, never silently extended.
Mixed-order operations truncate to the smaller order; the result's own
``order`` field records what was applied.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

_LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0..c_M of a formal power series, M = order."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex).copy()
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d array")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    @classmethod
    def from_list(cls, coefficients) -> "TruncatedSeries":
        return cls(np.asarray(coefficients, dtype=complex))

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(np.zeros(order + 1, dtype=complex))

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries":
        """The series z."""
        coeffs = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    def truncated(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.coefficients[: order + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        m = min(self.order, other.order)
        return TruncatedSeries(self.coefficients[: m + 1] + other.coefficients[: m + 1])

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        m = min(self.order, other.order)
        return TruncatedSeries(self.coefficients[: m + 1] - other.coefficients[: m + 1])

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            m = min(self.order, other.order)
            product = np.convolve(
                self.coefficients[: m + 1], other.coefficients[: m + 1]
            )[: m + 1]
            return TruncatedSeries(product)
        return TruncatedSeries(self.coefficients * complex(other))

    __rmul__ = __mul__


def series_log(series: TruncatedSeries, floor: float = _LOG_FLOOR) -> TruncatedSeries:
    """Formal logarithm through the input's order.

    Uses the standard recurrence from a' = a * (log a)'; exact for
    polynomial inputs up to rounding. Requires |c_0| >= floor.
    """
    a = series.coefficients
    if abs(a[0]) < floor:
        raise ValueError(
            f"vanishing constant term (|c0| = {abs(a[0]):.3e} < {floor:.0e})"
        )
    m = series.order
    b = np.zeros(m + 1, dtype=complex)
    b[0] = cmath.log(a[0])
    for n in range(1, m + 1):
        acc = n * a[n]
        for k in range(1, n):
            acc -= k * b[k] * a[n - k]
        b[n] = acc / (n * a[0])
    return TruncatedSeries(b)


def series_exp(series: TruncatedSeries) -> TruncatedSeries:
    """Formal exponential through the input's order."""
    a = series.coefficients
    m = series.order
    b = np.zeros(m + 1, dtype=complex)
    b[0] = cmath.exp(a[0])
    for n in range(1, m + 1):
        acc = 0.0 + 0j
        for k in range(1, n + 1):
            acc += k * a[k] * b[n - k]
        b[n] = acc / n
    return TruncatedSeries(b)


def series_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Coefficients of outer(inner(z)) through the smaller order.

    The inner series must have zero constant term, otherwise the truncated
    composition is ill-defined.
    """
    if abs(inner.coefficients[0]) != 0.0:
        raise ValueError("inner series must have zero constant term")
    m = min(outer.order, inner.order)
    outer_c = outer.coefficients[: m + 1]
    inner_t = inner.truncated(m)
    result = TruncatedSeries.zero(m)
    for k in range(m, -1, -1):  # Horner in series space
        result = result * inner_t
        coeffs = result.coefficients.copy()
        coeffs[0] += outer_c[k]
        result = TruncatedSeries(coeffs)
    return result


def series_eval(series: TruncatedSeries, z: complex) -> complex:
    """Horner evaluation of the truncated polynomial at z."""
    acc = 0.0 + 0j
    for c in series.coefficients[::-1]:
        acc = acc * z + c
    return complex(acc)
