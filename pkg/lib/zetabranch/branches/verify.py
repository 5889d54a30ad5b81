'''
Sampled verification of the branch properties B1 to B7 at a word cutoff, and the checks that the
transitions of a pruned system descend to the base group.
'''

import math

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import (
    INFINITY, applyBoundaryArray, inverseEntries, circularContains, arcContains, imageInterval,
    toImaginaryAxis
)
from zetabranch.group import (
    GroupPresentation, WordBall, enumerateBall, containsUpTo, fixedPairs, limitPoints, formatWord
)
from zetabranch.branches.model import BranchSystem, Facing
from zetabranch.branches.construct import Shooter, samplePool, TIME_TOL
from zetabranch.report import check

def _containsArray(branch, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
    '''
    Vectorised strict membership of finite points in I of the branch.
    '''
    finite = np.isfinite(points)
    if branch.facing is Facing.RIGHT:
        return finite & (points > branch.x + margin)
    return finite & (points < branch.x - margin)

def _arcsDisjoint(first, second, eps: float = 1e-9) -> bool:
    return arcContains(first.complement(), second, eps)

def _crossTime(x: float, y: float, p: float, q: float):
    M = np.array([list(toImaginaryAxis(y, x))])
    m = applyBoundaryArray(M, np.array([p, q]))
    if not np.all(np.isfinite(m)) or m[0] * m[1] >= 0:
        return None
    return 0.5 * math.log(-m[0] * m[1])

def verifyBranchProperties(system: BranchSystem, ball: WordBall, classes: list, samples: int = 50,
                           seed: int = 20240101) -> dict:
    '''
    One named check per property, each quantified over the ball and its limit points.
    Failures carry witnesses; nothing here raises on a failed property.
    '''
    eps = system.group.epsilon
    rng = np.random.default_rng(seed)
    pairs = [tuple(c.representative.fixedPoints()[:2]) for c in classes] + fixedPairs(ball)
    points = limitPoints(ball)
    finite = points[np.isfinite(points)]
    entries = ball.entries()
    inverse = inverseEntries(entries)
    report = { 'cutoff': ball.cutoff, 'samples': samples, 'branches': system.indices() }

    # B1: a periodic geodesic through every branch
    missing = []
    witnesses = {}
    for branch in system.branches:
        hit = next(((fp, fm) for fp, fm in pairs if circularContains(branch.I, fp) and circularContains(branch.J, fm)), None)
        if hit is None:
            missing.append(branch.index)
        else:
            witnesses[str(branch.index)] = list(hit)
    report['B1'] = check(not missing, missing=missing, witnesses=witnesses)

    # B2: base endpoints avoid the limit set
    close = []
    for branch in system.branches:
        if len(finite) and np.min(np.abs(finite - branch.x)) <= eps * 10 * max(1.0, abs(branch.x)):
            close.append(branch.index)
    infinite_limit = bool(np.any(np.isinf(points)))
    report['B2'] = check(not close and not infinite_limit, near_base=close, infinity_is_limit_point=infinite_limit,
                         note=f'no witness found at word length {ball.cutoff}' if not close and not infinite_limit else None)

    report['B3'] = check(True, note='I_j and J_j are the two arcs cut by the base endpoints')

    # B4: translates of the I_j cover the limit set
    covered = np.zeros(len(finite), dtype=bool)
    for i in range(0, len(finite)):
        pulled = applyBoundaryArray(inverse, finite[i])
        covered[i] = any(np.any(_containsArray(branch, pulled)) for branch in system.branches)
    uncovered = finite[~covered].tolist()
    report['B4'] = check(not uncovered, limit_points=int(len(finite)), uncovered=uncovered[:10])

    report['B5'] = check(True, note='every branch is the full set of vectors over its base facing one side')

    # B6: translated bases never cross transversally; coincidences only as permitted
    crossings, coincidences = [], []
    ends = applyBoundaryArray(entries, INFINITY)
    for k_branch in system.branches:
        starts = applyBoundaryArray(entries, k_branch.x)
        for branch in system.branches:
            tol = 1e-9 * max(1.0, abs(branch.x))
            with np.errstate(invalid='ignore'):
                both_finite = np.isfinite(starts) & np.isfinite(ends)
                side = (starts - branch.x) * (ends - branch.x)
                transversal = both_finite & (side < 0) & (np.abs(starts - branch.x) > tol) & (np.abs(ends - branch.x) > tol)
            for gi in np.nonzero(transversal)[0][:5]:
                crossings.append({ 'j': branch.index, 'k': k_branch.index, 'word': formatWord(ball.words[gi]) })
            same = (np.abs(starts - branch.x) <= tol) & np.isinf(ends)
            flipped = np.isinf(starts) & (np.abs(ends - branch.x) <= tol)
            for gi in np.nonzero(same | flipped)[0]:
                image = imageInterval(ball.elements[gi], k_branch.I)
                if arcContains(image, branch.I) and arcContains(branch.I, image):
                    if not (branch.index == k_branch.index and not ball.words[gi]):
                        coincidences.append({ 'j': branch.index, 'k': k_branch.index, 'word': formatWord(ball.words[gi]) })
    report['B6'] = check(not crossings and not coincidences, transversal=crossings[:10], coincident=coincidences[:10])

    # B7a: images g.I_k nest disjointly in I_j and cover its limit points
    inclusion, overlap, gaps = [], [], []
    for branch in system.branches:
        images = []
        for k, transition in system.transitionsFrom(branch.index):
            image = imageInterval(transition.element, system.branch(k).I)
            if not arcContains(branch.I, image, 1e-9):
                inclusion.append({ 'j': branch.index, 'k': k, 'word': transition.describe() })
            images.append((k, transition, image))
        for a in range(len(images)):
            for b in range(a + 1, len(images)):
                if not _arcsDisjoint(images[a][2], images[b][2]):
                    overlap.append({ 'j': branch.index, 'first': images[a][1].describe(), 'second': images[b][1].describe() })
        inside = finite[_containsArray(branch, finite, 1e-9 * max(1.0, abs(branch.x)))]
        for p in inside:
            if not any(circularContains(image, float(p)) for _, _, image in images):
                gaps.append({ 'j': branch.index, 'point': float(p) })
    report['B7a'] = check(not inclusion and not overlap and not gaps,
                          inclusion=inclusion[:10], overlap=overlap[:10], uncovered=gaps[:10])

    # B7b: nothing of the branch union is crossed before the transition translate
    shooter = Shooter(system, ball)
    early, unmatched, tested = [], [], 0
    for branch in system.branches:
        xs = samplePool(finite, branch.I, samples, eps)
        ys = samplePool(finite, branch.J, samples, eps)
        if not len(xs) or not len(ys):
            continue
        for _ in range(samples):
            x = float(xs[rng.integers(len(xs))])
            y = float(ys[rng.integers(len(ys))])
            t0 = shooter.baseTime(branch.index, x, y)
            if t0 is None:
                continue
            target = None
            for k, transition in system.transitionsFrom(branch.index):
                g = transition.element
                image = imageInterval(g, system.branch(k).I)
                if circularContains(image, x):
                    target = (k, transition, _crossTime(x, y, g.applyBoundary(system.branch(k).x), g.applyBoundary(INFINITY)))
                    break
            tested += 1
            if target is None or target[2] is None or target[2] <= t0 + TIME_TOL:
                unmatched.append({ 'j': branch.index, 'x': x, 'y': y })
                continue
            times, _, idx = shooter.crossings(x, y)
            between = (times > t0 + TIME_TOL) & (times < target[2] - TIME_TOL)
            if np.any(between):
                gi = int(idx[np.nonzero(between)[0][0]])
                early.append({ 'j': branch.index, 'x': x, 'y': y, 'word': formatWord(ball.words[gi]),
                               'transition': target[1].describe() })
    report['B7b'] = check(not early and not unmatched, tested=tested, early_crossings=early[:10], unmatched=unmatched[:10])

    # B7c: each y in J_j reaches some J_k through a transition into j
    unreachable = []
    for branch in system.branches:
        ys = samplePool(finite, branch.J, samples, eps)
        incoming = system.transitionsInto(branch.index)
        for y in ys:
            if not any(circularContains(system.branch(k).J, t.element.applyBoundary(float(y))) for k, t in incoming):
                unreachable.append({ 'j': branch.index, 'y': float(y) })
    report['B7c'] = check(not unreachable, unreachable=unreachable[:10])

    # every periodic geodesic meets a translate of the branch union
    missed = []
    for cls in classes:
        f_plus, f_minus = cls.representative.fixedPoints()[:2]
        pulled_plus = applyBoundaryArray(inverse, f_plus)
        pulled_minus = applyBoundaryArray(inverse, f_minus)
        if not any(np.any(_containsArray(b, pulled_plus) & _containsArray(b._replace(facing=b.facing.opposite()), pulled_minus))
                   for b in system.branches):
            missed.append(formatWord(cls.word))
    report['periodic_geodesics_meet'] = check(not missed, classes=len(classes), missed=missed)

    failed = [k for k, v in report.items() if isinstance(v, dict) and v.get('passed') is False]
    if failed:
        log.warning(f'Branch properties failing at word length {ball.cutoff}: {", ".join(failed)}')
    else:
        log.info(f'All branch properties hold at word length {ball.cutoff}.')
    return report

def checkGroupDescent(system: BranchSystem, group: GroupPresentation, cutoff: int = 6, descent_cutoff: int = 2,
                      ball: WordBall = None, limit_points: np.ndarray = None) -> dict:
    '''
    Every transition element lies in the group (semi-decided up to `cutoff`), and two translates
    g.I_j, h.I_k of active intervals cover all enumerated limit points.
    '''
    if ball is None or ball.cutoff < cutoff:
        ball = enumerateBall(group, cutoff)
    words, unknown = [], []
    for (j, k), items in sorted(system.transitions.items()):
        for transition in items:
            membership = containsUpTo(group, transition.element, cutoff, ball)
            if membership:
                words.append({ 'j': j, 'k': k, 'word': formatWord(membership.word) })
            else:
                unknown.append({ 'j': j, 'k': k, 'element': transition.element.asList() })
    if unknown:
        log.warning(f'{len(unknown)} transition elements not found in the group at word length {cutoff}.')
    longest = max((len(w['word'].split('*')) if w['word'] != 'id' else 0 for w in words), default=0)
    report = {
        'cutoff': cutoff,
        'membership': check(not unknown, words=words, unknown=unknown, longest_word=longest),
    }

    if limit_points is None:
        limit_points = limitPoints(ball)
    finite = limit_points[np.isfinite(limit_points)]
    small = ball.restrict(descent_cutoff)
    translates, rows = [], []
    for branch in system.branches:
        for g, word in small:
            image = imageInterval(g, branch.I)
            translates.append({ 'branch': branch.index, 'word': formatWord(word) })
            rows.append([circularContains(image, float(p)) for p in finite])
    pair = None
    if rows and len(finite):
        uncovered = (~np.array(rows, dtype=bool)).astype(float)
        both = uncovered @ uncovered.T
        hits = np.argwhere(both == 0)
        if len(hits):
            a, b = hits[0]
            pair = [translates[int(a)], translates[int(b)]]
    report['two_translates_cover'] = check(pair is not None, pair=pair, limit_points=int(len(finite)),
                                           descent_cutoff=descent_cutoff)
    return report
