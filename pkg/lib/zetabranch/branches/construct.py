'''
Heuristic branch construction over the strip of an auxiliary group, pruning to the active branches
and first-return shooting for the transition sets.
'''

import math
import multiprocessing as mp
from typing import NamedTuple

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import (
    INFINITY, toImaginaryAxis, applyBoundaryArray, inverseEntries, circularContains
)
from zetabranch.group import WordBall, fixedPairs, limitPoints, formatWord
from zetabranch.geometry.auxiliary import AuxiliaryGroup
from zetabranch.branches.model import (
    Facing, Provenance, BranchSystem, FirstReturn, Transition, numberBranches
)
from zetabranch.errors import EmptyActiveSet

# Crossing times closer than this are treated as simultaneous.
TIME_TOL = 1e-7
JITTER_ATTEMPTS = 3

class Candidate(NamedTuple):
    x: float
    facings: frozenset

def candidateBasePoints(aux: AuxiliaryGroup) -> list:
    '''
    The strip walls, the points where ∂K meets the real line and the relevant centers, translated
    into [alpha', beta']. Walls and real endpoints face both ways, centers face right.
    '''
    lo, hi, lam = aux.alpha_prime, aux.beta_prime, aux.lam
    tol = 1e-9 * max(1.0, lam)
    both = frozenset((Facing.LEFT, Facing.RIGHT))
    found = []

    def add(x: float, facings: frozenset):
        while x < lo - tol:
            x += lam
        while x > hi + tol:
            x -= lam
        for i, (y, existing) in enumerate(found):
            if abs(x - y) <= tol * max(1.0, abs(x)):
                found[i] = (y, existing | facings)
                return
        found.append((x, facings))

    add(lo, both)
    add(hi, both)
    for x in aux.domain.realEndpoints():
        add(x, both)
    for sphere in aux.domain.relevantSpheres():
        add(sphere.center, frozenset((Facing.RIGHT,)))
    result = [Candidate(x, f) for x, f in sorted(found)]
    log.info(f'{len(result)} candidate base points carrying {sum(len(c.facings) for c in result)} branches.')
    return result

def initialSystem(aux: AuxiliaryGroup) -> BranchSystem:
    branches = numberBranches(candidateBasePoints(aux))
    return BranchSystem(tuple(branches), aux.base, {}, Provenance.CONSTRUCTED, { 'candidates': len(branches) })

def pruneToActive(system: BranchSystem, classes: list, pairs: list = None) -> BranchSystem:
    '''
    Keep branch j iff some hyperbolic fixed pair (f_plus, f_minus) lies in I_j x J_j. The pairs are
    those of the class representatives plus any extra `pairs` (typically every ball element's).
    '''
    candidates = [tuple(c.representative.fixedPoints()[:2]) for c in classes]
    candidates += list(pairs or [])
    if not candidates:
        raise EmptyActiveSet('No hyperbolic classes to test the branches against.')
    keep = []
    witnesses = {}
    for branch in system.branches:
        for f_plus, f_minus in candidates:
            if circularContains(branch.I, f_plus) and circularContains(branch.J, f_minus):
                keep.append(branch.index)
                witnesses[branch.index] = [f_plus, f_minus]
                break
    if not keep:
        raise EmptyActiveSet(f'No branch of {len(system.branches)} carries a periodic geodesic; the cutoff may be too small.')
    log.info(f'Active branches: {keep}')
    stats = dict(system.stats or {})
    stats['active'] = keep
    stats['active_witnesses'] = witnesses
    return system.restricted(keep)._replace(stats=stats)

class Shooter(object):
    '''
    Crossings of a geodesic with every ball translate g.C_k of the branch bases. The geodesic from
    y to x is moved onto the imaginary axis, where it reads t -> i e^t; a translate (p, q) meets it
    iff its images m1, m2 have opposite signs, at time log(-m1 m2) / 2.
    '''
    def __init__(self, system: BranchSystem, ball: WordBall, tol: float = TIME_TOL):
        self.system = system
        self.ball = ball
        self.tol = tol
        self.entries = ball.entries()
        self.inverse = inverseEntries(self.entries)
        self.branches = list(system.branches)
        self.starts = [applyBoundaryArray(self.entries, b.x) for b in self.branches]
        self.ends = applyBoundaryArray(self.entries, INFINITY)
        self.positions = { word: i for i, word in enumerate(ball.words) }

    def _axisMap(self, x: float, y: float) -> np.ndarray:
        return np.array([list(toImaginaryAxis(y, x))])

    def baseTime(self, j: int, x: float, y: float):
        branch = self.system.branch(j)
        M = self._axisMap(x, y)
        m1 = float(applyBoundaryArray(M, np.array([branch.x]))[0])
        m2 = float(applyBoundaryArray(M, np.array([INFINITY]))[0])
        if not (math.isfinite(m1) and math.isfinite(m2)) or m1 * m2 >= 0:
            return None
        return 0.5 * math.log(-m1 * m2)

    def crossings(self, x: float, y: float) -> tuple:
        '''
        Arrays (times, branch positions, element indices) of every facing-matched crossing.
        '''
        M = self._axisMap(x, y)
        pulled = applyBoundaryArray(self.inverse, x)
        q = applyBoundaryArray(M, self.ends)
        times, ks, idx = [], [], []
        for pos, branch in enumerate(self.branches):
            p = applyBoundaryArray(M, self.starts[pos])
            with np.errstate(invalid='ignore'):
                prod = p * q
                valid = np.isfinite(p) & np.isfinite(q) & (prod < 0)
                if branch.facing is Facing.RIGHT:
                    facing = np.isfinite(pulled) & (pulled > branch.x)
                else:
                    facing = np.isfinite(pulled) & (pulled < branch.x)
            hits = np.nonzero(valid & facing)[0]
            if len(hits):
                times.append(0.5 * np.log(-prod[hits]))
                ks.append(np.full(len(hits), pos))
                idx.append(hits)
        if not times:
            return np.zeros(0), np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        return np.concatenate(times), np.concatenate(ks), np.concatenate(idx)

    def firstReturn(self, j: int, x: float, y: float):
        '''
        ('ok', FirstReturn) for the first facing-matched crossing after the base crossing of
        branch j, ('ambiguous', None) on a tie between distinct translates, ('unresolved', None)
        when the ball holds no later crossing.
        '''
        t0 = self.baseTime(j, x, y)
        if t0 is None:
            return 'unresolved', None
        times, ks, idx = self.crossings(x, y)
        later = times > t0 + self.tol
        if not np.any(later):
            return 'unresolved', None
        times, ks, idx = times[later], ks[later], idx[later]
        order = np.lexsort((idx, ks, times))
        first = order[0]
        tmin = times[first]
        tied = order[np.abs(times[order] - tmin) <= self.tol]
        g0 = int(idx[first])
        p0, q0 = self.starts[ks[first]][g0], self.ends[g0]
        for other in tied[1:]:
            gi = int(idx[other])
            p1, q1 = self.starts[ks[other]][gi], self.ends[gi]
            if not (_sameEnd(p0, p1) and _sameEnd(q0, q1)):
                return 'ambiguous', None
        k = self.branches[int(ks[first])].index
        return 'ok', FirstReturn(float(tmin - t0), self.ball.elements[g0], k, self.ball.words[g0])

def _sameEnd(p: float, q: float) -> bool:
    if math.isinf(p) or math.isinf(q):
        return math.isinf(p) and math.isinf(q)
    return abs(p - q) <= 1e-8 * max(1.0, abs(p))

def samplePool(points: np.ndarray, interval, count: int, margin: float = 1e-9) -> np.ndarray:
    '''
    Up to `count` quantile-spread points of `points` inside the arc, away from its ends.
    '''
    inside = np.array([p for p in points if math.isfinite(p) and circularContains(interval, p, margin * max(1.0, abs(p)))])
    if len(inside) <= count:
        return inside
    picks = np.unique(np.round(np.linspace(0, len(inside) - 1, count)).astype(int))
    return inside[picks]

def _shootBranch(args) -> dict:
    shooter, j, xs, ys, seed = args
    rng = np.random.default_rng([seed, j])
    observed = {}
    stats = { 'samples': 0, 'resolved': 0, 'ambiguous': 0, 'unresolved': 0 }
    unresolved = []
    for x in xs:
        for y in ys:
            stats['samples'] += 1
            status, ret = shooter.firstReturn(j, float(x), float(y))
            attempt = 0
            sx, sy = float(x), float(y)
            while status == 'ambiguous' and attempt < JITTER_ATTEMPTS and (len(xs) > 1 or len(ys) > 1):
                attempt += 1
                sx = float(xs[rng.integers(len(xs))])
                sy = float(ys[rng.integers(len(ys))])
                status, ret = shooter.firstReturn(j, sx, sy)
            if status == 'ok':
                stats['resolved'] += 1
                observed.setdefault((j, ret.k_plus), set()).add(shooter.positions[ret.word])
            else:
                stats[status] += 1
                unresolved.append({ 'branch': j, 'x': sx, 'y': sy, 'reason': status })
    stats['coverage'] = stats['resolved'] / stats['samples'] if stats['samples'] else 0.0
    return { 'branch': j, 'observed': observed, 'stats': stats, 'unresolved': unresolved }

def computeTransitions(system: BranchSystem, ball: WordBall, grid: int = 32, limit_points: np.ndarray = None,
                       seed: int = 20240101, workers: int = 1) -> BranchSystem:
    '''
    Shoot the geodesics (y, x), x in I_j and y in J_j drawn from the enumerated limit points, and
    collect the observed first returns (k, g) into G(j, k). Unresolved samples are listed in the
    stats, never raised.
    '''
    if limit_points is None:
        limit_points = limitPoints(ball)
    shooter = Shooter(system, ball)
    jobs = []
    for branch in system.branches:
        xs = samplePool(limit_points, branch.I, grid, ball.group.epsilon)
        ys = samplePool(limit_points, branch.J, grid, ball.group.epsilon)
        jobs.append((shooter, branch.index, xs, ys, seed))
    if workers > 1 and len(jobs) > 1:
        with mp.Pool(workers) as pool:
            results = list(pool.imap(_shootBranch, jobs))
    else:
        results = [_shootBranch(job) for job in jobs]

    transitions = {}
    branch_stats = {}
    unresolved = []
    for result in results:
        for key, positions in sorted(result['observed'].items()):
            transitions[key] = [Transition(ball.elements[i], ball.words[i]) for i in sorted(positions)]
        branch_stats[result['branch']] = result['stats']
        unresolved.extend(result['unresolved'])
        if not result['stats']['samples']:
            log.warning(f'Branch {result["branch"]} has no limit points to shoot from.')
    if unresolved:
        log.warning(f'{len(unresolved)} shooting samples unresolved at word length {ball.cutoff}.')
    stats = dict(system.stats or {})
    stats.update({ 'grid': grid, 'cutoff': ball.cutoff, 'branches': branch_stats, 'unresolved': unresolved[:50],
                   'unresolved_count': len(unresolved) })
    log.info(f'{sum(len(v) for v in transitions.values())} transitions over {len(transitions)} branch pairs.')
    for (j, k), items in sorted(transitions.items()):
        log.debug(f'G({j},{k}) = {{{", ".join(formatWord(t.word) for t in items)}}}')
    return system._replace(transitions=transitions, stats=stats)

def constructBranchSystem(aux: AuxiliaryGroup, ball: WordBall, classes: list, grid: int = 32,
                          seed: int = 20240101, workers: int = 1) -> BranchSystem:
    '''
    Candidates over the strip, pruned against the ball's fixed pairs, with transitions shot on the
    pruned system.
    '''
    system = initialSystem(aux)
    pruned = pruneToActive(system, classes, fixedPairs(ball))
    return computeTransitions(pruned, ball, grid, limitPoints(ball), seed, workers)
