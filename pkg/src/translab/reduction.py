"""Shift reduction: from a finite combination F of translates back to T_b f.

Given ``F0 = T_b f + sum_j c_j T_{aj+b} f`` the recursion

    q_j <- q_{j+1} - q_1 c_j   (j < n),    q_n <- -q_1 c_n

starting from ``q = c`` produces ``A_l = T_b f + sum_j q_j T_{a(l+j-1)+b} f``,
each of which is the finite combination ``F0 - sum_{k<l} q_1^(k) T_{ak} F0``.
For generators with super-exponential decay ``A_l -> T_b f`` uniformly on
compact intervals.

Two implementations of the recursion live here: :func:`poly_step` on exact
integer polynomials in the symbols ``c_1..c_n`` (verification) and
:func:`coeff_step` on evaluated complex coefficients (production).
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import sup_norm
from .multipoly import TERM_CAP, MultiPoly, TermCapExceeded

log = logging.getLogger(__name__)

OVERFLOW_LIMIT = 1e300
DEFAULT_TOL = 1e-10
CONVERGENCE_HEADER = ("ell", "err_sup", "max_q", "fitted_C", "status")


class ReductionOverflow(OverflowError):
    pass


def poly_base(n):
    """``[x_1, ..., x_n]``, the polynomials for l = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [MultiPoly.var(n, j) for j in range(1, n + 1)]


def poly_step(polys, cap=TERM_CAP):
    """One step of the recursion on the symbolic polynomials."""
    n = len(polys)
    if n < 1:
        raise ValueError("empty polynomial family")
    if any(p.n_vars != n for p in polys):
        raise ValueError("every polynomial must have n variables")
    p1 = polys[0]
    out = []
    for j in range(1, n + 1):
        nxt = polys[j] if j < n else MultiPoly(n)
        new = nxt - p1.mul_var(j)
        if len(new) > cap:
            raise TermCapExceeded(f"{len(new)} terms exceeds cap {cap}")
        out.append(new)
    return out


def reduction_polys(n, ell, cap=TERM_CAP):
    """The family ``p_{ell,1..n}``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    polys = poly_base(n)
    for _ in range(ell - 1):
        polys = poly_step(polys, cap)
    return polys


def coeff_step(q, c):
    """One step of the recursion on evaluated coefficients."""
    q = np.asarray(q, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if q.shape != c.shape or q.ndim != 1 or q.size < 1:
        raise ValueError("q and c must be vectors of the same length n >= 1")
    out = np.empty_like(q)
    with np.errstate(over="ignore", invalid="ignore"):
        out[:-1] = q[1:] - q[0] * c[:-1]
        out[-1] = -q[0] * c[-1]
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > OVERFLOW_LIMIT:
        raise ReductionOverflow("coefficient recursion left the floating-point range")
    return out


@dataclass(frozen=True, eq=False)
class ReductionProblem:
    """``F = sum_{k=m0}^{m0+n} d_k T_{ak+b} f`` together with its normalisation.

    Leading zero ``d`` coefficients are absorbed into ``m0`` so that the
    first stored coefficient is nonzero.
    """

    generator: object
    a: float
    b: float
    d: tuple
    m0: int = 0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("a must be nonzero")
        d = [complex(x) for x in np.atleast_1d(self.d)]
        if not all(np.isfinite(x) for x in d):
            raise ValueError("coefficients must be finite")
        m0 = int(self.m0)
        while d and d[0] == 0:
            d.pop(0)
            m0 += 1
        if len(d) < 2:
            raise ValueError("F must combine at least two translates (n >= 1)")
        c = np.array(d[1:]) / d[0]
        if not np.all(np.isfinite(c)):
            raise ValueError("normalised coefficients are not finite")
        object.__setattr__(self, "d", tuple(d))
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def from_c(cls, generator, a, b, c):
        """Problem whose F is already ``F0 = T_b f + sum c_j T_{aj+b} f``."""
        return cls(generator, a, b, (1.0,) + tuple(np.atleast_1d(c)))

    @property
    def n(self):
        return len(self.d) - 1

    @property
    def c(self):
        return np.array(self.d[1:], dtype=complex) / self.d[0]

    def base(self, t):
        """Samples of ``T_b f``."""
        return np.asarray(self.generator(np.asarray(t, dtype=float) - self.b), dtype=complex)

    def F(self, t):
        t = np.asarray(t, dtype=float)
        return sum(dk * self.generator(t - (self.a * (self.m0 + k) + self.b))
                   for k, dk in enumerate(self.d))

    def F0(self, t):
        t = np.asarray(t, dtype=float)
        out = self.base(t)
        for j, cj in enumerate(self.c, start=1):
            out = out + cj * self.generator(t - (self.a * j + self.b))
        return out


@dataclass(frozen=True, eq=False)
class ReductionState:
    ell: int
    q: np.ndarray
    q1_history: tuple = field(default=())

    @classmethod
    def initial(cls, problem):
        return cls(1, problem.c.copy(), ())

    def advance(self, c):
        return ReductionState(self.ell + 1, coeff_step(self.q, c), self.q1_history + (complex(self.q[0]),))


def _scaled_term(g, t, s, coeff):
    # coeff * g(t - s) through logs so huge coeff times tiny g does not lose the product
    if coeff == 0:
        return np.zeros(np.shape(t), dtype=complex)
    logmag, phase = g.log_eval(np.asarray(t, dtype=float) - s)
    with np.errstate(under="ignore", over="ignore"):
        mag = np.exp(logmag + math.log(abs(coeff)))
    return mag * phase * (coeff / abs(coeff))


def remainder(problem, state, t):
    """Samples of ``Q_l = A_l - T_b f = sum_j q_j T_{a(l+j-1)+b} f``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for j, qj in enumerate(state.q, start=1):
        s = problem.a * (state.ell + j - 1) + problem.b
        out += _scaled_term(problem.generator, t, s, complex(qj))
    return out


def assemble_A(problem, state, grid):
    """Samples of ``A_l`` on ``grid`` (or on an array of points)."""
    if len(state.q) != problem.n:
        raise ValueError("state and problem disagree on n")
    t = getattr(grid, "points", grid)
    return problem.base(t) + remainder(problem, state, t)


def span_representation(problem, state):
    """Weights ``beta`` with ``A_l = sum_k beta_k T_{ak} F0``.

    ``beta_0 = 1`` and ``beta_k = -q_1^(k)`` for ``k = 1..l-1``.
    """
    if len(state.q1_history) != state.ell - 1:
        raise ValueError(f"q1 history has {len(state.q1_history)} entries, expected {state.ell - 1}")
    return np.array((1.0,) + tuple(-q for q in state.q1_history), dtype=complex)


def translate_combination(problem, beta, t, offset=0):
    """Samples of ``sum_k beta_k T_{a(k+offset)} F0``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for k, bk in enumerate(beta):
        if bk != 0:
            out += bk * problem.F0(t - problem.a * (k + offset))
    return out


@dataclass(frozen=True)
class ReductionRow:
    ell: int
    err_sup: float
    max_q: float
    fitted_C: float
    status: str


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple
    status: str  # "converged" | "no-convergence" | "inconclusive" | "overflow"
    tol: float

    @property
    def errors(self):
        return np.array([r.err_sup for r in self.rows])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CONVERGENCE_HEADER)
        for r in self.rows:
            w.writerow([r.ell, format(r.err_sup, ".17g"), format(r.max_q, ".17g"),
                        format(r.fitted_C, ".17g"), r.status])
        return buf.getvalue()


def _run_status(errs, tol):
    if errs[-1] <= tol:
        return "converged"
    # above tolerance but still setting new minima: undecided
    if len(errs) >= 2 and errs[-1] < min(errs[:-1]):
        return "inconclusive"
    return "no-convergence"


def convergence_run(problem, grid, ell_max, tol=DEFAULT_TOL):
    """Track ``err(l) = sup_I |A_l - T_b f|`` for ``l = 1..ell_max``.

    The error is evaluated as the sup of the remainder ``Q_l`` itself, which
    avoids the cancellation in ``A_l - T_b f``. ``fitted_C`` is the running
    maximum of ``max_j |q_j|^(1/l)``, the empirical growth constant.
    """
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    t = grid.points
    c = problem.c
    state = ReductionState.initial(problem)
    rows = []
    fitted = 0.0
    status = None
    while True:
        err = sup_norm(remainder(problem, state, t))
        max_q = float(np.max(np.abs(state.q)))
        if max_q > 0:
            fitted = max(fitted, max_q ** (1.0 / state.ell))
        rows.append(ReductionRow(state.ell, err, max_q, fitted,
                                 "converged" if err <= tol else "pending"))
        if state.ell >= ell_max:
            break
        try:
            state = state.advance(c)
        except ReductionOverflow:
            log.warning("coefficient overflow after l=%d", state.ell)
            status = "overflow"
            break
    if status is None:
        status = _run_status([r.err_sup for r in rows], tol)
    last = rows[-1]
    rows[-1] = ReductionRow(last.ell, last.err_sup, last.max_q, last.fitted_C, status)
    return ConvergenceTable(tuple(rows), status, tol)


def poly_vs_coeff_consistency(n, ell, c, cap=TERM_CAP):
    """Relative gap between the symbolic and evaluated recursions at ``c``.

    Returns ``max_j |p_{ell,j}(c) - q_j| / max_j |p_{ell,j}(c)|`` with the
    symbolic side evaluated exactly.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (n,):
        raise ValueError(f"c must have length {n}")
    polys = reduction_polys(n, ell, cap)
    exact = np.array([p.evaluate_exact(c) for p in polys])
    q = c.copy()
    for _ in range(ell - 1):
        q = coeff_step(q, c)
    diff = float(np.max(np.abs(exact - q)))
    scale = float(np.max(np.abs(exact)))
    if diff == 0:
        return 0.0
    return diff / scale if scale > 0 else math.inf


def shipped_problems():
    """Reference reduction problems used by tests and the CLI examples."""
    from .core import PolyGaussian
    gauss = PolyGaussian((1.0,), 1.0)
    return {
        "n1-c2": ReductionProblem.from_c(gauss, 1.0, 0.0, [2.0]),
        "n2-half-step": ReductionProblem.from_c(gauss, 0.5, 0.25, [1.5, -0.75]),
        "n3-complex": ReductionProblem.from_c(PolyGaussian((1.0, 0.0, 1.0), 1.0), 1.0, -0.5,
                                              [4.0, -2 + 1j, 0.5j]),
        "negative-step": ReductionProblem(PolyGaussian((0.0, 1.0), 2.0), -1.0, 0.0,
                                          (0.0, 2.0, 3.0, 1.0), m0=-1),
        "max-c4": ReductionProblem.from_c(gauss, 0.5, 0.0, [4.0, 4.0]),
    }
