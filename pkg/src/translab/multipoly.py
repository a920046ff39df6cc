"""Sparse multivariate polynomials with exact integer coefficients."""

import re
from fractions import Fraction

TERM_CAP = 200_000


class TermCapExceeded(RuntimeError):
    pass


class MultiPoly:
    """Polynomial in ``x1..xn`` stored as ``{exponent tuple: int}``.

    Zero coefficients are never stored, so ``terms == {}`` is the zero
    polynomial.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars, terms=None, cap=TERM_CAP):
        if n_vars < 1:
            raise ValueError("need at least one variable")
        self.n_vars = n_vars
        clean = {}
        for e, v in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n_vars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {n_vars} variables")
            if not isinstance(v, int):
                raise TypeError("coefficients must be Python ints")
            if v:
                clean[e] = v
        if len(clean) > cap:
            raise TermCapExceeded(f"{len(clean)} terms exceeds cap {cap}")
        self.terms = clean

    @classmethod
    def var(cls, n_vars, j):
        """The coordinate ``x_j`` (1-based)."""
        if not 1 <= j <= n_vars:
            raise ValueError(f"variable index {j} out of range")
        e = [0] * n_vars
        e[j - 1] = 1
        return cls(n_vars, {tuple(e): 1})

    @classmethod
    def const(cls, n_vars, value):
        return cls(n_vars, {(0,) * n_vars: int(value)})

    def _check(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly.const(self.n_vars, other)
        if other.n_vars != self.n_vars:
            raise ValueError("variable count mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, v in other.terms.items():
            out[e] = out.get(e, 0) + v
        return MultiPoly(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n_vars, {e: -v for e, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return MultiPoly(self.n_vars, {e: v * other for e, v in self.terms.items()})
        other = self._check(other)
        out = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + v1 * v2
        return MultiPoly(self.n_vars, out)

    __rmul__ = __mul__

    def mul_var(self, j):
        """Multiply by ``x_j`` without a general product."""
        i = j - 1
        return MultiPoly(self.n_vars, {
            e[:i] + (e[i] + 1,) + e[i + 1:]: v for e, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.n_vars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    @property
    def max_abs_coeff(self):
        return max((abs(v) for v in self.terms.values()), default=0)

    def __call__(self, point):
        """Floating-point evaluation at a complex point."""
        point = [complex(x) for x in point]
        total = 0j
        for e, v in self.terms.items():
            term = complex(v)
            for x, k in zip(point, e):
                if k:
                    term *= x**k
            total += term
        return total

    def evaluate_exact(self, point):
        """Evaluate with exact rational arithmetic, rounding once at the end.

        Each float coordinate is converted to the rational it represents, so
        the result is the correctly rounded value of the polynomial at the
        given double-precision point.
        """
        pts = [(Fraction(complex(x).real), Fraction(complex(x).imag)) for x in point]
        re_sum, im_sum = Fraction(0), Fraction(0)
        powers = [{0: (Fraction(1), Fraction(0))} for _ in pts]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                a, b = power(i, k - 1)
                c, d = pts[i]
                cache[k] = (a * c - b * d, a * d + b * c)
            return cache[k]

        for e, v in self.terms.items():
            a, b = Fraction(v), Fraction(0)
            for i, k in enumerate(e):
                if k:
                    c, d = power(i, k)
                    a, b = a * c - b * d, a * d + b * c
            re_sum += a
            im_sum += b
        return complex(float(re_sum), float(im_sum))

    def sorted_terms(self):
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def to_text(self):
        """Canonical form ``coeff*x1^e1*x2^e2 + ...`` (zero exponents omitted)."""
        if not self.terms:
            return "0"
        parts = []
        for e, v in self.sorted_terms():
            factors = [f"x{i + 1}^{k}" for i, k in enumerate(e) if k]
            parts.append("*".join([str(v)] + factors))
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"MultiPoly({self.n_vars}, {self.to_text()!r})"

    _factor = re.compile(r"^x(\d+)\^(\d+)$")

    @classmethod
    def from_text(cls, text, n_vars):
        """Inverse of :meth:`to_text`."""
        text = text.strip()
        if text == "0":
            return cls(n_vars)
        terms = {}
        for chunk in text.split(" + "):
            coeff, *factors = chunk.strip().split("*")
            e = [0] * n_vars
            for f in factors:
                m = cls._factor.match(f)
                if not m:
                    raise ValueError(f"cannot parse factor {f!r}")
                e[int(m.group(1)) - 1] += int(m.group(2))
            terms[tuple(e)] = terms.get(tuple(e), 0) + int(coeff)
        return cls(n_vars, terms)
