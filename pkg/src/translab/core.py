"""Generators, shift operators, grids, norms and decay envelopes."""

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

log = logging.getLogger(__name__)

# Largest exponent magnitude we let through to exp() in double precision.
EXP_GUARD = 700.0


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform grid on a compact interval, endpoints included."""

    interval: Interval
    points: np.ndarray
    step: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least 2 points")
        if pts[0] != self.interval.lo or pts[-1] != self.interval.hi:
            raise ValueError("grid must include both endpoints")
        diffs = np.diff(pts)
        if np.any(diffs <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.max(np.abs(diffs - self.step)) > 1e-12 * abs(self.step) * max(1.0, pts.size):
            raise ValueError("grid spacing is not uniform")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, interval, m=401):
        if m < 2:
            raise ValueError("grid needs at least 2 points")
        pts = np.linspace(interval.lo, interval.hi, m)
        return cls(interval, pts, interval.length / (m - 1))

    @property
    def size(self):
        return self.points.size

    def refined(self):
        """Grid with every cell halved (nested in this one)."""
        return Grid.uniform(self.interval, 2 * (self.size - 1) + 1)


class Generator:
    """A function on the real line that can be shifted and sampled.

    Subclasses implement ``__call__`` (vectorised over real ``t``) and may
    override :meth:`log_eval` when a stable log-magnitude is available.
    """

    def __call__(self, t):
        raise NotImplementedError

    def log_eval(self, t):
        """Return ``(log|f(t)|, f(t)/|f(t)|)``; zeros give ``-inf`` and phase 1."""
        v = np.asarray(self(t), dtype=complex)
        mag = np.abs(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            logmag = np.log(mag)
            phase = np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 1.0)
        return logmag, phase

    def shifted(self, s, t):
        return eval_shift(self, s, t)


@dataclass(frozen=True)
class PolyGaussian(Generator):
    """``f(t) = q(t) exp(-c t^2)`` with ``q(t) = sum_j alpha[j] t^j``."""

    alpha: tuple
    c: float

    def __post_init__(self):
        alpha = tuple(complex(a) for a in np.atleast_1d(self.alpha))
        if not alpha or all(a == 0 for a in alpha):
            raise ValueError("polynomial factor must be nonzero")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("Gaussian rate c must be positive")
        # drop trailing zero coefficients so degree is honest
        while alpha[-1] == 0:
            alpha = alpha[:-1]
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", float(self.c))

    @property
    def degree(self):
        return len(self.alpha) - 1

    @property
    def is_real(self):
        return all(a.imag == 0 for a in self.alpha)

    def poly(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_real:
            return npoly.polyval(t, np.array([a.real for a in self.alpha])).astype(complex)
        return npoly.polyval(t, np.array(self.alpha))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.poly(t) * np.exp(-self.c * t * t)

    def log_eval(self, t):
        t = np.asarray(t, dtype=float)
        q = self.poly(t)
        mag = np.abs(q)
        with np.errstate(divide="ignore", invalid="ignore"):
            logmag = np.log(mag) - self.c * t * t
            phase = np.where(mag > 0, q / np.where(mag > 0, mag, 1.0), 1.0)
        return logmag, phase

    def scaled(self, k):
        return PolyGaussian(tuple(k * a for a in self.alpha), self.c)


@dataclass(frozen=True, eq=False)
class TabulatedGenerator(Generator):
    """Piecewise-linear interpolant of user samples; zero outside the table."""

    xs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != vals.shape:
            raise ValueError("need matching 1-d xs/values with at least 2 samples")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("tabulation abscissae must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func, lo, hi, m):
        xs = np.linspace(lo, hi, m)
        return cls(xs, np.asarray(func(xs), dtype=complex))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        re = np.interp(t, self.xs, self.values.real, left=0.0, right=0.0)
        im = np.interp(t, self.xs, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im


def eval_generator(g, t):
    return g(t)


def eval_shift(g, s, t):
    """Sample ``T_s g = g(. - s)`` at ``t``."""
    return g(np.asarray(t, dtype=float) - s)


class ShiftFactors(NamedTuple):
    gauss_t: float
    cross: float
    gauss_shift: float
    overflow: bool

    @property
    def product(self):
        return self.gauss_t * self.cross * self.gauss_shift


def gaussian_shift_factorization(c, t, lam):
    """Split ``exp(-c (t-lam)^2)`` as ``exp(-c t^2) exp(2 c t lam) exp(-c lam^2)``.

    If the middle exponent leaves the double-precision range the factors are
    NaN and ``overflow`` is set.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    cross = 2.0 * c * t * lam
    if abs(cross) > EXP_GUARD:
        nan = float("nan")
        return ShiftFactors(nan, nan, nan, True)
    return ShiftFactors(math.exp(-c * t * t), math.exp(cross), math.exp(-c * lam * lam), False)


def _as_values(values):
    v = np.asarray(values)
    if v.size == 0:
        raise ValueError("norm of an empty sample vector")
    return v


def sup_norm(values):
    return float(np.max(np.abs(_as_values(values))))


def lp_norm(values, p, step):
    """Composite-rectangle L^p norm ``(step * sum |v|^p)^(1/p)``."""
    v = _as_values(values)
    if p < 1:
        raise ValueError("p must be >= 1")
    if not step > 0:
        raise ValueError("step must be positive")
    a = np.abs(v)
    scale = a.max()
    if scale == 0:
        return 0.0
    # factor out the max so large p does not underflow
    return float(scale * (step * np.sum((a / scale) ** p)) ** (1.0 / p))


def sup_on_interval(f, interval, m, polish=False):
    """Max of ``|f|`` over ``m`` uniform points of ``interval``.

    With ``polish`` the grid argmax is refined by a bounded scalar search on
    its two neighbouring cells, which recovers peaks that fall between nodes.
    """
    t = np.linspace(interval.lo, interval.hi, m)
    a = np.abs(f(t))
    i = int(np.argmax(a))
    best = float(a[i])
    if polish and best > 0:
        lo, hi = t[max(i - 1, 0)], t[min(i + 1, m - 1)]
        res = minimize_scalar(lambda s: -abs(complex(f(np.array([s]))[0])), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14 * max(1.0, abs(hi))})
        best = max(best, -float(res.fun))
    return best


ENVELOPE_START = 513
ENVELOPE_CAP = 2**17 + 1


def shift_envelope(g, interval, a, b, xs, rtol=1e-6, start=ENVELOPE_START, cap=ENVELOPE_CAP):
    """``E(x) = sup_{t in I} |g(t - (a x + b))|`` for each ``x`` in ``xs``.

    The sup is taken over a uniform grid that is doubled until two successive
    values agree to ``rtol`` (or the cap is reached, which is logged); each
    grid maximum is polished locally so off-node peaks are not underestimated.
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    out = np.empty(len(xs))
    for i, x in enumerate(np.asarray(xs, dtype=float)):
        s = a * x + b

        def f(t, s=s):
            return g(t - s)

        m = start
        prev = sup_on_interval(f, interval, m, polish=True)
        while True:
            m_next = 2 * (m - 1) + 1
            if m_next > cap:
                log.warning("envelope at x=%g not stable to %g at %d points", x, rtol, m)
                break
            cur = sup_on_interval(f, interval, m_next, polish=True)
            m = m_next
            if abs(cur - prev) <= rtol * abs(cur):
                prev = cur
                break
            prev = cur
        out[i] = prev
    return out


@dataclass(frozen=True)
class DecayProbe:
    gamma: float
    xs: tuple = field(default=())
    tolerance: float = 1e-6

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        if any(x < 0 for x in xs):
            raise ValueError("probe abscissae must be nonnegative")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("probe abscissae must be strictly increasing")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "xs", xs)


@dataclass(frozen=True)
class DecayReport:
    gamma: float
    tolerance: float
    status: str  # "decays" | "failure" | "inconclusive"
    crossing: float | None


def probe_envelope(g, interval, a, b, probe):
    """Envelope pairs ``(x, E(x))`` at the probe abscissae."""
    return list(zip(probe.xs, shift_envelope(g, interval, a, b, probe.xs)))


def superexp_check(envelope: Sequence[tuple[float, float]], probe: DecayProbe) -> DecayReport:
    """Empirical radius beyond which ``E(x) exp(gamma |x|)`` stays below tolerance.

    The crossing is the least sampled ``x`` from which on the weighted envelope
    is below ``probe.tolerance`` and nonincreasing. Without a crossing the
    status is ``inconclusive`` if the weighted tail is still decreasing at the
    end of the range, otherwise ``failure``.
    """
    xs = np.array([x for x, _ in envelope], dtype=float)
    es = np.array([e for _, e in envelope], dtype=float)
    if xs.size == 0:
        return DecayReport(probe.gamma, probe.tolerance, "inconclusive", None)
    if np.any(np.diff(xs) < 0):
        raise ValueError("envelope must be sorted by x")
    with np.errstate(divide="ignore"):
        logw = np.log(np.abs(es)) + probe.gamma * np.abs(xs)
    below = logw < math.log(probe.tolerance)
    # good[i]: from i onwards everything is below tol and nonincreasing
    good = np.zeros(xs.size, dtype=bool)
    good[-1] = below[-1]
    for i in range(xs.size - 2, -1, -1):
        good[i] = good[i + 1] and below[i] and logw[i + 1] <= logw[i]
    if good.any():
        return DecayReport(probe.gamma, probe.tolerance, "decays", float(xs[np.argmax(good)]))
    if xs.size >= 2 and logw[-1] < logw[-2]:
        return DecayReport(probe.gamma, probe.tolerance, "inconclusive", None)
    return DecayReport(probe.gamma, probe.tolerance, "failure", None)
