"""Sampled translate dictionaries, truncated-SVD fits and annihilator surrogates.

Nothing here decides completeness. The functions produce residual evidence;
the verdict for a translation set comes from :func:`translab.lambda_sets.classify`.
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import lp_norm, sup_norm
from .lambda_sets import TranslationSet

log = logging.getLogger(__name__)

DEFAULT_POINTS = 401
DEFAULT_CUTOFF = 1e-12
SWEEP_HEADER = ("target", "K", "residual_sup", "residual_lp", "p", "coeff_norm",
                "effective_rank", "status")


class DictionaryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampledDictionary:
    """Translates ``g(t_i - lambda_k)`` sampled on a grid, one column per shift.

    ``scaled`` holds every column divided by its sampled sup-norm. The scales
    themselves are kept as logarithms: far translates of a Gaussian have a
    sup-norm below the smallest double, yet their normalised shape is
    perfectly representable.
    """

    generator: object
    grid: object
    lambdas: TranslationSet
    scaled: np.ndarray
    log_scales: np.ndarray

    @property
    def shape(self):
        return self.scaled.shape

    @property
    def column_scales(self):
        return np.exp(self.log_scales)

    @property
    def matrix(self):
        """Unscaled samples (far columns may underflow to zero)."""
        return self.scaled * self.column_scales[None, :]


def _scaled_columns(g, t, shifts, log_domain=True):
    tt = t[:, None] - np.asarray(shifts, dtype=float)[None, :]
    if log_domain:
        logmag, phase = g.log_eval(tt)
        log_scales = logmag.max(axis=0)
        bad = ~np.isfinite(log_scales)
        if np.any(bad):
            return None, np.asarray(shifts)[bad]
        with np.errstate(under="ignore"):
            cols = np.exp(logmag - log_scales[None, :]) * phase
        return (cols, log_scales), None
    raw = np.asarray(g(tt), dtype=complex)
    scales = np.abs(raw).max(axis=0)
    if np.any(scales == 0):
        return None, np.asarray(shifts)[scales == 0]
    with np.errstate(divide="ignore"):
        return (raw / scales[None, :], np.log(scales)), None


def build_dictionary(g, grid, lam, log_domain=True):
    """Sample the translates of ``g`` by ``lam`` on ``grid``.

    With ``log_domain`` (the default) columns are normalised in log space via
    :meth:`Generator.log_eval`, so only columns that vanish identically are
    rejected. With ``log_domain=False`` samples are taken at face value and a
    column that underflows to zero raises :class:`DictionaryError`.
    """
    if len(lam) == 0:
        raise ValueError("empty translation set")
    res, zero = _scaled_columns(g, grid.points, lam.values, log_domain)
    if res is None:
        raise DictionaryError(f"translate column(s) vanish on the grid for shifts {zero.tolist()}")
    cols, log_scales = res
    return SampledDictionary(g, grid, lam, cols, log_scales)


@dataclass(frozen=True, eq=False)
class ApproximationResult:
    scaled_coefficients: np.ndarray
    log_scales: np.ndarray
    residual: np.ndarray
    residual_sup: float
    residual_lp: dict
    coefficient_norm: float
    effective_rank: int
    singular_values: np.ndarray = field(repr=False)

    @property
    def coefficients(self):
        """Coefficients in the unscaled translate basis (may overflow to inf)."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.scaled_coefficients * np.exp(-self.log_scales)


def truncated_lstsq(A, y, cutoff):
    """Truncated-SVD solve; returns ``(x, rank, singular values, residual)``.

    The residual is formed as ``y - U_r U_r^H y`` rather than ``y - A x``:
    with coefficient norms around 1e10 the latter loses most of its digits.
    """
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(A.shape[1], dtype=complex), 0, s, y.copy()
    r = int(np.sum(s >= cutoff * s[0]))
    proj = u[:, :r].conj().T @ y
    x = vh[:r].conj().T @ (proj / s[:r])
    return x, r, s, y - u[:, :r] @ proj


def best_approximation(dictionary, target, cutoff=DEFAULT_CUTOFF, p=(2.0,)):
    """Least-squares fit of ``target`` by the dictionary columns.

    Singular values below ``cutoff * sigma_max`` are discarded. Residuals are
    reported in the grid sup-norm and in each requested L^p norm.
    ``coefficient_norm`` is the Euclidean norm of the coefficients on the
    sup-normalised columns.
    """
    if not 0 < cutoff < 1:
        raise ValueError("cutoff must lie in (0, 1)")
    y = np.asarray(target, dtype=complex)
    if y.shape != (dictionary.shape[0],):
        raise ValueError(f"target has {y.size} samples, grid has {dictionary.shape[0]}")
    x, rank, s, resid = truncated_lstsq(dictionary.scaled, y, cutoff)
    ps = (p,) if np.isscalar(p) else tuple(p)
    step = dictionary.grid.step
    return ApproximationResult(
        scaled_coefficients=x,
        log_scales=dictionary.log_scales,
        residual=resid,
        residual_sup=sup_norm(resid),
        residual_lp={float(q): lp_norm(resid, q, step) for q in ps},
        coefficient_norm=float(np.linalg.norm(x)),
        effective_rank=rank,
        singular_values=s,
    )


def bump(t, lo, hi):
    """C-infinity bump supported on ``(lo, hi)``, peak 1 at the midpoint."""
    t = np.asarray(t, dtype=float)
    s = (2 * t - (lo + hi)) / (hi - lo)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def default_targets(g, grid, member_shift):
    """The shipped targets: sin(3t), t^2, a centred bump and one dictionary member."""
    t = grid.points
    iv = grid.interval
    quarter = 0.25 * iv.length
    return {
        "sin3t": np.sin(3 * t).astype(complex),
        "t2": (t**2).astype(complex),
        "bump": bump(t, iv.mid - quarter, iv.mid + quarter).astype(complex),
        "member": np.asarray(g(t - member_shift), dtype=complex),
    }


@dataclass(frozen=True)
class SweepRow:
    target: str
    K: int
    residual_sup: float
    residual_lp: float
    p: float
    coeff_norm: float
    effective_rank: int
    status: str = "ok"


def completeness_sweep(g, grid, family, sizes, targets=None, cutoff=DEFAULT_CUTOFF, p=2.0):
    """Residuals of the best fit to each target by the first K translates of ``family``.

    ``targets`` maps names to sample vectors on ``grid``; by default the
    shipped targets are used. A size whose dictionary cannot be built yields
    rows with status ``skipped``.
    """
    sizes = [int(k) for k in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be increasing")
    if targets is None:
        targets = default_targets(g, grid, family.with_count(1).values[0])
    rows = []
    dicts = {}
    for k in sizes:
        try:
            dicts[k] = build_dictionary(g, grid, family.with_count(k))
        except (DictionaryError, ValueError) as exc:
            dicts[k] = exc
    for name, y in targets.items():
        for k in sizes:
            d = dicts[k]
            if isinstance(d, Exception):
                nan = math.nan
                rows.append(SweepRow(name, k, nan, nan, p, nan, 0, f"skipped: {d}"))
                continue
            r = best_approximation(d, y, cutoff, (p,))
            rows.append(SweepRow(name, k, r.residual_sup, r.residual_lp[float(p)], p,
                                 r.coefficient_norm, r.effective_rank))
    return rows


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def sweep_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([r.target, r.K, _fmt(r.residual_sup), _fmt(r.residual_lp), _fmt(float(r.p)),
                    _fmt(r.coeff_norm), r.effective_rank, r.status])
    return buf.getvalue()


@dataclass(frozen=True, eq=False)
class AnnihilatorResult:
    """Discrete stand-in for an annihilating measure on the grid nodes.

    ``margin`` is ``|| A^T w ||`` for the unit weight vector ``w`` drawn from
    the range of the sup-normalised dictionary ``A``; it equals the smallest
    singular value of ``A``. ``probe_values`` are ``|sum_i w_i f(t_i - lam)|``
    for held-out shifts, with probe columns sup-normalised as well.
    """

    weights: np.ndarray
    margin: float
    probe_max: float
    probe_values: dict

    def to_dict(self):
        return {
            "margin": self.margin,
            "probe_max": self.probe_max,
            "probes": [{"lambda": k, "response": v} for k, v in self.probe_values.items()],
            "weights": [[float(w.real), float(w.imag)] for w in self.weights],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def annihilator_margin(dictionary, probes):
    """Weights that come closest to annihilating the dictionary section.

    The weights are the (conjugated) left singular vector for the smallest
    singular value. Small probe responses at shifts outside the set suggest
    the weights behave like a genuine annihilator rather than one that only
    kills the finite section.
    """
    m, k = dictionary.shape
    if not m > k:
        raise ValueError(f"need more grid nodes than translates (M={m}, K={k})")
    probe_vals = [float(x) for x in probes]
    clash = set(probe_vals) & set(dictionary.lambdas.values)
    if clash:
        raise ValueError(f"probe shifts {sorted(clash)} belong to the dictionary")
    u, s, _ = np.linalg.svd(dictionary.scaled, full_matrices=False)
    w = u[:, -1].conj()
    responses = {}
    if probe_vals:
        res, zero = _scaled_columns(dictionary.generator, dictionary.grid.points, probe_vals)
        if res is None:
            raise DictionaryError(f"probe column(s) vanish on the grid for shifts {zero.tolist()}")
        pcols = res[0]
        responses = {lam: float(abs(w @ pcols[:, i])) for i, lam in enumerate(probe_vals)}
    return AnnihilatorResult(
        weights=w,
        margin=float(s[-1]),
        probe_max=max(responses.values()) if responses else 0.0,
        probe_values=responses,
    )
