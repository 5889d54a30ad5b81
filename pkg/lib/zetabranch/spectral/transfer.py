'''
The slow transfer-operator family of a branch system,

    (L_s f)_k(x) = sum_j sum_{g in G(j,k)} |g'(x)|^s f_j(g.x),   x in I_k,

discretised by collocation on compact charts of the I_j, its Fredholm determinant det(I - L_s)
and a resonance scan over a rectangle of s.
'''

import math
import multiprocessing as mp
from typing import NamedTuple

import numpy as np
from scipy import linalg

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import EPSILON
from zetabranch.branches.model import BranchSystem, Facing
from zetabranch.spectral.discretization_factory import DiscretizationFactory
from zetabranch.errors import ChartViolation, NoConvergence
from zetabranch.report import check

WIDEN_ROUNDS = 100

class ChartedInterval(NamedTuple):
    '''
    Compact chart [u, v] inside (or around) I_j, affinely identified with [-1, 1].
    '''
    index: int
    u: float
    v: float

    def toReference(self, x):
        return (2.0 * np.asarray(x, dtype=float) - (self.u + self.v)) / (self.v - self.u)

    def fromReference(self, t):
        return 0.5 * (self.u + self.v) + 0.5 * (self.v - self.u) * np.asarray(t, dtype=float)

    def containsRange(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        scale = tol * max(1.0, abs(self.u), abs(self.v))
        return lo >= self.u - scale and hi <= self.v + scale

class TransferOperatorMatrix(NamedTuple):
    s: complex
    order: int
    indices: tuple
    matrix: np.ndarray

class FredholmResult(NamedTuple):
    det: complex
    log_abs: float
    eigenvalues: tuple

class Resonance(NamedTuple):
    s: complex
    residual: float
    iterations: int

class ScanResult(NamedTuple):
    roots: list
    failures: list
    grid: int
    rectangle: tuple

def _pole(g) -> float:
    return -g.d / g.c if abs(g.c) > EPSILON else math.inf

def _imageRange(g, lo: float, hi: float) -> tuple:
    a, b = g.applyBoundary(lo), g.applyBoundary(hi)
    return (min(a, b), max(a, b))

def _clip(branch, u: float, v: float, lo: float, hi: float) -> tuple:
    '''
    Keep [u, v] at least halfway from the base point x to the nearest of lo, hi, so the chart stays
    strictly inside I_j and off the poles of the transitions leaving it.
    '''
    x = branch.x
    if branch.facing is Facing.RIGHT and lo > x:
        u = max(u, x + 0.5 * (lo - x))
    elif branch.facing is Facing.LEFT and hi < x:
        v = min(v, x - 0.5 * (x - hi))
    return u, v

def chartIntervals(system: BranchSystem, limit_points: np.ndarray, padding: float = 1.2,
                   min_halfwidth: float = 0.5) -> dict:
    '''
    Charts from the hull of the limit points inside each I_j, padded about its midpoint, then widened
    until every transition g in G(j,k) maps chart k into chart j. A pole inside a source chart is a
    ChartViolation.
    '''
    points = np.asarray(limit_points, dtype=float)
    points = points[np.isfinite(points)]
    charts = {}
    for branch in system.branches:
        if branch.facing is Facing.RIGHT:
            inside = points[points > branch.x]
        else:
            inside = points[points < branch.x]
        if len(inside):
            lo, hi = float(inside.min()), float(inside.max())
        else:
            lo = hi = branch.x + (1.0 if branch.facing is Facing.RIGHT else -1.0)
        mid, half = 0.5 * (lo + hi), max(0.5 * (hi - lo) * padding, min_halfwidth)
        u, v = _clip(branch, mid - half, mid + half, lo, hi)
        charts[branch.index] = ChartedInterval(branch.index, u, v)

    for _ in range(WIDEN_ROUNDS):
        changed = False
        poles = []
        for (j, k), items in sorted(system.transitions.items()):
            source = charts[k]
            for transition in items:
                g = transition.element
                pole = _pole(g)
                if source.u - EPSILON <= pole <= source.v + EPSILON:
                    poles.append((j, k, transition.describe()))
                    continue
                lo, hi = _imageRange(g, source.u, source.v)
                target = charts[j]
                if not target.containsRange(lo, hi):
                    margin = 0.01 * (target.v - target.u)
                    u, v = _clip(system.branch(j), lo - margin, hi + margin, lo, hi)
                    charts[j] = target._replace(u=min(target.u, u), v=max(target.v, v))
                    changed = True
        if poles:
            raise ChartViolation(f'{len(poles)} transitions have a pole inside their source chart.', poles)
        if not changed:
            break
    else:
        stuck = []
        for (j, k), items in sorted(system.transitions.items()):
            for transition in items:
                lo, hi = _imageRange(transition.element, charts[k].u, charts[k].v)
                if not charts[j].containsRange(lo, hi):
                    stuck.append((j, k, transition.describe()))
        raise ChartViolation(f'Charts did not settle after {WIDEN_ROUNDS} widenings.', stuck)
    for index, chart in sorted(charts.items()):
        log.debug(f'Chart {index}: [{chart.u:.9g}, {chart.v:.9g}]')
    return charts

class TransferOperator(object):
    '''
    Collocation data of L_s that does not depend on s: nodes per chart and, per transition, the
    log-weights log|g'(x_{k,a})| and the basis matrix l_b(chart_j(g.x_{k,a})). matrix(s) then sums
    exp(s log w) times the basis into the (k, j) blocks.
    '''
    def __init__(self, system: BranchSystem, charts: dict, order: int = 16, discretization: str = 'chebyshev'):
        self.system = system
        self.charts = charts
        self.order = order
        self.scheme = DiscretizationFactory.create_discretization(discretization)
        self.indices = tuple(system.indices())
        self.position = { index: i for i, index in enumerate(self.indices) }
        reference = self.scheme.nodes(order)
        self.nodes = { j: charts[j].fromReference(reference) for j in self.indices }
        self.terms = []
        for (j, k), items in sorted(system.transitions.items()):
            x = self.nodes[k]
            for transition in items:
                g = transition.element
                denom = np.abs(g.c * x + g.d)
                logw = -2.0 * np.log(denom)
                gx = (g.a * x + g.b) / (g.c * x + g.d)
                basis = self.scheme.basis(order, charts[j].toReference(gx))
                self.terms.append((self.position[k], self.position[j], logw, basis, transition))
        log.debug(f'Transfer operator on {len(self.indices)} charts, {len(self.terms)} terms, order {order}.')

    @property
    def size(self) -> int:
        return len(self.indices) * self.order

    def matrix(self, s: complex) -> TransferOperatorMatrix:
        n = self.order
        M = np.zeros((self.size, self.size), dtype=complex)
        for row, col, logw, basis, _ in self.terms:
            M[row * n:(row + 1) * n, col * n:(col + 1) * n] += np.exp(complex(s) * logw)[:, None] * basis
        return TransferOperatorMatrix(complex(s), n, self.indices, M)

    def determinant(self, s: complex) -> complex:
        return fredholmDet(self.matrix(s)).det

    def contraction(self, tol: float = 1e-9) -> dict:
        '''
        max |g'| over the source chart of every transition; above 1 + tol is a violation.
        '''
        rows, violations = [], []
        for (j, k), items in sorted(self.system.transitions.items()):
            chart = self.charts[k]
            x = np.linspace(chart.u, chart.v, 65)
            for transition in items:
                g = transition.element
                peak = float(np.max(1.0 / np.abs(g.c * x + g.d) ** 2))
                rows.append({ 'j': j, 'k': k, 'word': transition.describe(), 'max_derivative': peak })
                if peak > 1.0 + tol:
                    violations.append(rows[-1])
        if violations:
            log.warning(f'{len(violations)} transitions are not contracting on their source charts.')
        return check(not violations, transitions=rows, violations=violations)

def assemble(system: BranchSystem, s: complex, order: int = 16, limit_points: np.ndarray = None,
             charts: dict = None, padding: float = 1.2, min_halfwidth: float = 0.5,
             discretization: str = 'chebyshev') -> TransferOperatorMatrix:
    if charts is None:
        if limit_points is None:
            raise ValueError('Either charts or limit points are needed to build charts.')
        charts = chartIntervals(system, limit_points, padding, min_halfwidth)
    return TransferOperator(system, charts, order, discretization).matrix(s)

def fredholmDet(M: TransferOperatorMatrix, top: int = 5) -> FredholmResult:
    '''
    det(I - M) from a pivoted LU factorisation, with log|det| and the `top` largest eigenvalues of M.
    '''
    A = np.asarray(M.matrix, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return FredholmResult(1.0 + 0.0j, 0.0, ())
    lu, piv = linalg.lu_factor(np.eye(n) - A, check_finite=True)
    diag = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(n)))
    sign = -1.0 if swaps % 2 else 1.0
    with np.errstate(divide='ignore'):
        log_abs = float(np.sum(np.log(np.abs(diag))))
    det = complex(sign * np.prod(diag))
    eigenvalues = linalg.eigvals(A)
    order = np.argsort(-np.abs(eigenvalues), kind='stable')
    return FredholmResult(det, log_abs, tuple(complex(e) for e in eigenvalues[order[:top]]))

def spectralRadius(operator: TransferOperator, s: complex) -> float:
    M = operator.matrix(s).matrix
    if not M.size:
        return 0.0
    return float(np.max(np.abs(linalg.eigvals(M))))

def _evaluate(args) -> complex:
    operator, s = args
    return operator.determinant(s)

def _secant(operator: TransferOperator, seed: complex, step: complex, tol: float, max_iter: int) -> tuple:
    s0, s1 = seed, seed + step
    f0, f1 = operator.determinant(s0), operator.determinant(s1)
    for iteration in range(1, max_iter + 1):
        if f1 == f0:
            break
        s2 = s1 - f1 * (s1 - s0) / (f1 - f0)
        if not (math.isfinite(s2.real) and math.isfinite(s2.imag)):
            break
        s0, f0 = s1, f1
        s1, f1 = s2, operator.determinant(s2)
        if abs(s1 - s0) <= tol * max(1.0, abs(s1)):
            return s1, abs(f1), iteration
    raise NoConvergence(f'Secant iteration from {seed} did not settle in {max_iter} steps.')

def resonanceScan(operator: TransferOperator, rectangle: tuple, grid: int = 32, re_s_floor: float = 0.25,
                  tol: float = 1e-10, residual_tol: float = 1e-8, max_iter: int = 60, workers: int = 1) -> ScanResult:
    '''
    Zeros of s -> det(I - L_s) in rectangle (re_lo, re_hi, im_lo, im_hi): grid minima of |det|
    polished by the secant method. Polished points that leave the rectangle or keep a large residual
    are listed as failures.
    '''
    re_lo, re_hi, im_lo, im_hi = (float(v) for v in rectangle)
    if re_lo < re_s_floor:
        raise ValueError(f'Scan rectangle reaches Re s = {re_lo}, below the floor {re_s_floor}.')
    if not (re_lo < re_hi and im_lo <= im_hi):
        raise ValueError(f'Degenerate scan rectangle {rectangle}.')
    if not operator.terms:
        return ScanResult([], [], grid, (re_lo, re_hi, im_lo, im_hi))

    res = np.linspace(re_lo, re_hi, grid)
    ims = np.linspace(im_lo, im_hi, grid) if im_hi > im_lo else np.array([im_lo])
    points = [complex(r, i) for i in ims for r in res]
    jobs = [(operator, s) for s in points]
    if workers > 1:
        with mp.Pool(workers) as pool:
            values = list(pool.imap(_evaluate, jobs))
    else:
        values = [_evaluate(job) for job in jobs]
    magnitude = np.abs(np.array(values)).reshape(len(ims), len(res))

    seeds = []
    for a in range(magnitude.shape[0]):
        for b in range(magnitude.shape[1]):
            window = magnitude[max(0, a - 1):a + 2, max(0, b - 1):b + 2]
            if magnitude[a, b] <= window.min():
                seeds.append(complex(res[b], ims[a]))
    step = complex((re_hi - re_lo) / max(grid - 1, 1) * 0.1, 0.0)
    roots, failures = [], []
    for seed in seeds:
        try:
            s, residual, iterations = _secant(operator, seed, step, tol, max_iter)
        except NoConvergence as e:
            failures.append({ 'seed': seed, 'reason': str(e) })
            continue
        inside = re_lo - tol <= s.real <= re_hi + tol and im_lo - tol <= s.imag <= im_hi + tol
        if not inside or residual > residual_tol:
            failures.append({ 'seed': seed, 'reason': 'left the rectangle' if not inside else 'residual too large',
                              's': s, 'residual': residual })
            continue
        if any(abs(s - r.s) <= 1e-8 * max(1.0, abs(s)) for r in roots):
            continue
        roots.append(Resonance(s, residual, iterations))
    roots.sort(key=lambda r: (round(r.s.real, 9), round(r.s.imag, 9)))
    log.info(f'Resonance scan: {len(seeds)} seeds, {len(roots)} roots, {len(failures)} discarded.')
    return ScanResult(roots, failures, grid, (re_lo, re_hi, im_lo, im_hi))
