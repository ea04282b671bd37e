"""Classical observables: polynomials in (p, q), optionally times an
isotropic Gaussian envelope."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import sympy as sp

MAX_DEGREE = 4

P_SYM, Q_SYM = sp.symbols("p q", real=True)


def _normalize_terms(terms):
    acc = {}
    for i, j, c in terms:
        i, j = int(i), int(j)
        if i < 0 or j < 0:
            raise ValueError("exponents must be non-negative")
        acc[(i, j)] = acc.get((i, j), 0) + complex(c)
    return tuple(sorted((i, j, c) for (i, j), c in acc.items() if c != 0))


@dataclass(frozen=True)
class Observable:
    """``f(p, q) = sum c p^i q^j  [* exp(-(p^2 + q^2) / (2 s^2))]``.

    ``terms`` holds ``(i, j, c)`` triples; ``envelope`` is the width ``s`` or
    ``None`` for a bare polynomial.
    """

    terms: tuple = ()
    envelope: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize_terms(self.terms))
        if self.envelope is not None:
            s = float(self.envelope)
            if not (s > 0 and np.isfinite(s)):
                raise ValueError("envelope width must be positive")
            object.__setattr__(self, "envelope", s)
        if self.degree > MAX_DEGREE:
            raise ValueError(f"polynomial degree {self.degree} exceeds {MAX_DEGREE}")

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, c=1.0, envelope=None):
        return cls(((0, 0, c),), envelope)

    @classmethod
    def monomial(cls, i, j, c=1.0, envelope=None):
        return cls(((i, j, c),), envelope)

    @classmethod
    def q(cls):
        return cls.monomial(0, 1)

    @classmethod
    def p(cls):
        return cls.monomial(1, 0)

    @classmethod
    def parse(cls, text, envelope=None):
        """Build from a polynomial expression in ``p`` and ``q``, e.g. ``"p*q + 2*q**2"``."""
        expr = sp.sympify(text, locals={"p": P_SYM, "q": Q_SYM, "I": sp.I})
        return cls.from_sympy(expr, envelope)

    @classmethod
    def from_sympy(cls, expr, envelope=None):
        poly = sp.Poly(sp.expand(expr), P_SYM, Q_SYM)
        terms = [(i, j, complex(c)) for (i, j), c in poly.terms()]
        return cls(tuple(terms), envelope)

    def to_sympy(self):
        """Polynomial part as a sympy expression (the envelope is dropped)."""
        return sum((sp.nsimplify(c.real) + sp.I * sp.nsimplify(c.imag)) * P_SYM ** i * Q_SYM ** j
                   for i, j, c in self.terms) if self.terms else sp.Integer(0)

    # algebra --------------------------------------------------------------
    def _same_envelope(self, other):
        if self.envelope != other.envelope:
            raise ValueError("cannot add observables with different envelopes")

    def __add__(self, other):
        if not isinstance(other, Observable):
            other = Observable.constant(other, self.envelope)
        self._same_envelope(other)
        return Observable(self.terms + other.terms, self.envelope)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Observable):
            if self.envelope is not None and other.envelope is not None:
                env = 1.0 / np.sqrt(self.envelope ** -2 + other.envelope ** -2)
            else:
                env = self.envelope if other.envelope is None else other.envelope
            terms = [(i1 + i2, j1 + j2, c1 * c2)
                     for i1, j1, c1 in self.terms for i2, j2, c2 in other.terms]
            return Observable(tuple(terms), env)
        return Observable(tuple((i, j, c * other) for i, j, c in self.terms), self.envelope)

    __rmul__ = __mul__

    def shifted(self, dp, dq):
        """Polynomial part of ``f(p + dp, q + dq)``; the envelope is kept centred."""
        terms = []
        for i, j, c in self.terms:
            for a in range(i + 1):
                for b in range(j + 1):
                    k = c * comb(i, a) * comb(j, b) * dp ** (i - a) * dq ** (j - b)
                    terms.append((a, b, k))
        return Observable(tuple(terms), self.envelope)

    # queries --------------------------------------------------------------
    @property
    def degree(self):
        return max((i + j for i, j, _ in self.terms), default=0)

    @property
    def is_polynomial(self):
        return self.envelope is None

    @property
    def is_real(self):
        return all(c.imag == 0 for _, _, c in self.terms)

    # evaluation -----------------------------------------------------------
    def _envelope_factor(self, p, q):
        if self.envelope is None:
            return 1.0
        return np.exp(-(p * p + q * q) / (2 * self.envelope ** 2))

    def _poly(self, p, q, dp=0, dq=0):
        out = np.zeros(np.broadcast(p, q).shape, dtype=complex)
        for i, j, c in self.terms:
            if i < dp or j < dq:
                continue
            k = c * _falling(i, dp) * _falling(j, dq)
            out = out + k * p ** (i - dp) * q ** (j - dq)
        return out

    def __call__(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return self._poly(p, q) * self._envelope_factor(p, q)

    def with_gradient(self, p, q):
        """``(f, df/dp, df/dq)`` evaluated at ``(p, q)``."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        g = self._envelope_factor(p, q)
        f0 = self._poly(p, q)
        fp = self._poly(p, q, dp=1)
        fq = self._poly(p, q, dq=1)
        if self.envelope is not None:
            s2 = self.envelope ** 2
            fp = fp - p / s2 * f0
            fq = fq - q / s2 * f0
        return f0 * g, fp * g, fq * g

    def label(self):
        poly = " + ".join(f"({c.real:g}{c.imag:+g}j)*p^{i}*q^{j}" for i, j, c in self.terms) or "0"
        return poly if self.envelope is None else f"[{poly}]*exp(-r^2/(2*{self.envelope:g}^2))"


def _falling(n, k):
    out = 1
    for t in range(k):
        out *= n - t
    return out
