"""Translation sets and their reciprocal / Blaschke classification."""

import json
from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("explicit", "arithmetic", "lacunary", "power")


class PoleError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class TranslationSet:
    """A finite, duplicate-free list of real shifts.

    Parametric families remember how they were generated so that the tail of
    the infinite sequence they truncate can be classified analytically.
    """

    values: tuple
    family: str = "explicit"
    params: dict = field(default_factory=dict)
    tail_model: str | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(np.asarray(self.values, dtype=float)))
        if not all(np.isfinite(vals)):
            raise ValueError("translation values must be finite")
        if len(set(vals)) != len(vals):
            raise ValueError("translation values must be pairwise distinct")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def array(self):
        return np.array(self.values, dtype=float)

    @classmethod
    def explicit(cls, values):
        return cls(tuple(values), "explicit", {})

    @classmethod
    def arithmetic(cls, a, b, k_min, k_max):
        """``{a k + b : k_min <= k <= k_max}``."""
        if a == 0:
            raise ValueError("arithmetic step a must be nonzero")
        if k_max < k_min:
            raise ValueError("k_max < k_min")
        ks = np.arange(int(k_min), int(k_max) + 1)
        return cls(tuple(a * ks + b), "arithmetic",
                   {"a": a, "b": b, "k_min": int(k_min), "k_max": int(k_max)}, "harmonic")

    @classmethod
    def lacunary(cls, ratio, count, scale=1.0):
        """``{scale * ratio^k : k = 1..count}``."""
        if not ratio > 1:
            raise ValueError("lacunary ratio must exceed 1")
        if count < 1 or scale <= 0:
            raise ValueError("need count >= 1 and scale > 0")
        ks = np.arange(1, int(count) + 1)
        return cls(tuple(scale * float(ratio) ** ks), "lacunary",
                   {"ratio": ratio, "count": int(count), "scale": scale}, "geometric")

    @classmethod
    def power(cls, exponent, count, scale=1.0):
        """``{scale * k^exponent : k = 1..count}``."""
        if not exponent > 0:
            raise ValueError("power exponent must be positive")
        if count < 1 or scale <= 0:
            raise ValueError("need count >= 1 and scale > 0")
        ks = np.arange(1, int(count) + 1, dtype=float)
        return cls(tuple(scale * ks**exponent), "power",
                   {"exponent": exponent, "count": int(count), "scale": scale}, "p-series")

    def with_count(self, k):
        """The first ``k`` members of the same family."""
        p = self.params
        if self.family == "arithmetic":
            return TranslationSet.arithmetic(p["a"], p["b"], p["k_min"], p["k_min"] + k - 1)
        if self.family == "lacunary":
            return TranslationSet.lacunary(p["ratio"], k, p["scale"])
        if self.family == "power":
            return TranslationSet.power(p["exponent"], k, p["scale"])
        if k > len(self.values):
            raise ValueError(f"explicit set has only {len(self.values)} values")
        return TranslationSet.explicit(self.values[:k])

    def scaled(self, s):
        if not s > 0:
            raise ValueError("scale factor must be positive")
        p = self.params
        if self.family == "arithmetic":
            return TranslationSet.arithmetic(s * p["a"], s * p["b"], p["k_min"], p["k_max"])
        if self.family == "lacunary":
            return TranslationSet.lacunary(p["ratio"], p["count"], s * p["scale"])
        if self.family == "power":
            return TranslationSet.power(p["exponent"], p["count"], s * p["scale"])
        return TranslationSet.explicit([s * v for v in self.values])


def reciprocal_partial_sums(lam):
    """Running sums of ``1/|lambda|`` in enumeration order, zeros skipped."""
    v = np.array([x for x in lam.values if x != 0.0], dtype=float)
    return np.cumsum(1.0 / np.abs(v))


def moebius_map(z):
    """``(z - 1)/(z + 1)``, the Cayley map of the right half-plane onto the disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1):
        raise PoleError("moebius_map has a pole at z = -1")
    w = (z - 1) / (z + 1)
    return w[()] if w.ndim == 0 else w


def _deficit(x):
    # 1 - |phi(x)| for x > 0, via 1 - |w|^2 = 4 Re z / |z + 1|^2 to avoid cancellation
    w = np.abs(moebius_map(x))
    return (4.0 * x / (x + 1.0) ** 2) / (1.0 + w)


def blaschke_deficit_sums(lam):
    """Running sums of ``1 - |phi(lambda)|`` over the positive and negative parts.

    Negative shifts are reflected into the right half-plane first. A zero
    shift sits on the boundary and counts as a full deficit of 1 in the
    positive stream.
    """
    v = lam.array
    pos = v[v >= 0]
    neg = -v[v < 0]
    d_pos = np.where(pos == 0, 1.0, _deficit(np.where(pos == 0, 1.0, pos))) if pos.size else pos
    d_neg = _deficit(neg) if neg.size else neg
    return np.cumsum(d_pos), np.cumsum(d_neg)


@dataclass(frozen=True)
class ClassificationReport:
    family: str
    verdict: str  # "divergent" | "convergent" | "unknown"
    partial_sums: tuple
    blaschke_plus: tuple
    blaschke_minus: tuple
    tail_model: str | None = None

    def to_dict(self):
        return {
            "family": self.family,
            "verdict": self.verdict,
            "partial_sums": list(self.partial_sums),
            "blaschke_plus": list(self.blaschke_plus),
            "blaschke_minus": list(self.blaschke_minus),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def tail_verdict(lam):
    """Divergence of the reciprocal series for the infinite family ``lam`` truncates."""
    if lam.family == "arithmetic":
        return "divergent"
    if lam.family == "lacunary":
        return "convergent"
    if lam.family == "power":
        return "divergent" if lam.params["exponent"] <= 1 else "convergent"
    # a finite list says nothing about a tail
    return "unknown"


def classify(lam):
    plus, minus = blaschke_deficit_sums(lam)
    return ClassificationReport(
        family=lam.family,
        verdict=tail_verdict(lam),
        partial_sums=tuple(float(s) for s in reciprocal_partial_sums(lam)),
        blaschke_plus=tuple(float(s) for s in plus),
        blaschke_minus=tuple(float(s) for s in minus),
        tail_model=lam.tail_model,
    )
