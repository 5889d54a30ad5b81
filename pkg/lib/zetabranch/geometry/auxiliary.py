'''
The auxiliary group: the generators of the relevant spheres of a funnel group together with a
translation t_lambda, whose fundamental domain W is K cut down to a vertical strip (alpha', beta').
'''

import math
from typing import NamedTuple

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import Moebius, Kind
from zetabranch.group import (
    GroupPresentation, WordBall, enumerateBall, containsUpTo, formatWord, limitPoints
)
from zetabranch.geometry.spheres import spheresOf
from zetabranch.geometry.ford import (
    FordDomain, upperEnvelope, relevantSet, vertexCycles, checkConditionA, sphereKeys
)
from zetabranch.errors import ParabolicDetected, ConditionStarFails, AmbiguousClassification, ZetaBranchError
from zetabranch.report import check

class AuxiliaryGroup(NamedTuple):
    base: GroupPresentation
    alpha: float
    beta: float
    alpha_prime: float
    beta_prime: float
    lam: float
    t_lambda: Moebius
    presentation_W: GroupPresentation
    domain: FordDomain
    domain_W: FordDomain
    relevant_stable: bool

def boundsAlphaBeta(domain: FordDomain) -> tuple:
    '''
    Tightest [alpha, beta] containing every relevant shadow.
    '''
    spheres = domain.relevantSpheres()
    return (min(s.center - s.radius for s in spheres), max(s.center + s.radius for s in spheres))

def _detectParabolics(ball: WordBall) -> list:
    found = []
    for g, word in ball.nonIdentity():
        try:
            kind = g.classify(ball.group.epsilon).kind
        except AmbiguousClassification:
            kind = Kind.PARABOLIC
        if kind is Kind.PARABOLIC:
            found.append(formatWord(word))
    return found

def _relevantGenerators(domain: FordDomain) -> list:
    '''
    One (label, element) per inverse pair of relevant side generators, shortest word first.
    '''
    chosen = []
    spheres = sorted(domain.relevantSpheres(), key=lambda s: (len(s.word), formatWord(s.word)))
    for sphere in spheres:
        g = sphere.generator
        if any(h.isClose(g) or h.isClose(g.inverse()) for _, h in chosen):
            continue
        word = sphere.word
        if len(word) == 1:
            label = word[0][0]
            element = g if word[0][1] == 1 else g.inverse()
        else:
            label = f'({formatWord(word)})'
            element = g
        chosen.append((label, element))
    return chosen

def buildAuxiliary(group: GroupPresentation, ball: WordBall = None, alpha_prime: float = None,
                   beta_prime: float = None, margin: float = None) -> AuxiliaryGroup:
    '''
    Build Γ_W = <Γ_REL, t_lambda> over the strip (alpha', beta'). Without an explicit strip the
    margin defaults to half the largest relevant radius on both sides.
    '''
    if ball is None:
        ball = enumerateBall(group)
    parabolic = _detectParabolics(ball)
    if parabolic:
        raise ParabolicDetected(f'Parabolic elements in the word ball: {", ".join(parabolic[:5])}')
    stabilizers = [formatWord(w) for g, w in ball.nonIdentity() if g.stabilizesInfinity(group.epsilon)]
    if stabilizers:
        raise ConditionStarFails(f'Elements fixing oo: {", ".join(stabilizers[:5])}; no neighbourhood of oo lies in K.')

    relevant = relevantSet(ball)
    domain = relevant.domain
    alpha, beta = boundsAlphaBeta(domain)
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ConditionStarFails('The relevant shadows are unbounded.')
    if margin is None:
        margin = max(s.radius for s in relevant.spheres) / 2.0
    if alpha_prime is None:
        alpha_prime = alpha - margin
    if beta_prime is None:
        beta_prime = beta + margin
    if not (alpha_prime < alpha and beta < beta_prime):
        raise ConditionStarFails(f'The strip ({alpha_prime}, {beta_prime}) must strictly contain [{alpha}, {beta}].')

    lam = beta_prime - alpha_prime
    t_lambda = Moebius.translation(lam)
    generators = _relevantGenerators(domain)
    labels = { label for label, _ in generators }
    t_label = 't' if 't' not in labels else 't_lambda'
    presentation = GroupPresentation.of(generators + [(t_label, t_lambda)], group.epsilon, group.word_cutoff,
                                        f'{group.name or "group"}_W')
    log.info(f'Auxiliary group on ({alpha_prime:.6g}, {beta_prime:.6g}), lambda = {lam:.6g}, '
             f'{len(generators)} relevant generators.')
    return AuxiliaryGroup(group, alpha, beta, alpha_prime, beta_prime, lam, t_lambda, presentation,
                          domain, domain._replace(strip=(alpha_prime, beta_prime)), relevant.stable)

def cuspHeight(aux: AuxiliaryGroup) -> float:
    '''
    Height M above which the strip part of W meets no isometric sphere.
    '''
    return max(s.radius for s in aux.domain.relevantSpheres())

def _stripDomain(ball: WordBall, aux: AuxiliaryGroup) -> FordDomain:
    spheres = spheresOf(ball)
    domain = upperEnvelope(spheres)
    lo, hi = aux.alpha_prime, aux.beta_prime
    sides = tuple(s for s in domain.sides if s.x_right > lo and s.x_left < hi)
    return domain._replace(sides=sides, strip=(lo, hi))

def verifyAuxiliary(aux: AuxiliaryGroup, cutoff: int = 4, samples: int = 200, seed: int = 20240101,
                    base_ball: WordBall = None) -> dict:
    '''
    Named checks on the auxiliary group at the given word cutoff: the stabiliser of oo, preservation
    of the relevant spheres, W as the strip part of a Ford domain, inheritance of condition (A),
    plus the cusp cycle, vertex cycles, Γ inside Γ_W, strip tiling and the extremal shadows.
    '''
    eps = aux.base.epsilon
    rng = np.random.default_rng(seed)
    ball = enumerateBall(aux.presentation_W, cutoff)
    report = { 'cutoff': cutoff, 'lambda': aux.lam, 'alpha_prime': aux.alpha_prime, 'beta_prime': aux.beta_prime }

    # (i) only powers of t_lambda fix oo
    offenders = []
    for g, word in ball.nonIdentity():
        if not g.stabilizesInfinity(eps):
            continue
        a, b, d = (g.a, g.b, g.d) if g.a > 0 else (-g.a, -g.b, -g.d)
        n = b / aux.lam if abs(a - 1.0) <= 1e-8 and abs(d - 1.0) <= 1e-8 else math.nan
        if not (math.isfinite(n) and abs(n - round(n)) <= 1e-8):
            offenders.append(formatWord(word))
    report['stabilizer'] = check(not offenders, offenders=offenders[:10])

    # (ii) relevant spheres inside the strip are those of Γ
    strip = _stripDomain(ball, aux)
    expected = sphereKeys(aux.domain.relevantSpheres())
    preserved = sphereKeys(strip.relevantSpheres()) == expected
    stable = False
    if cutoff >= 1:
        smaller = ball.restrict(cutoff - 1)
        if spheresOf(smaller):
            stable = sphereKeys(_stripDomain(smaller, aux).relevantSpheres()) == expected
    if not stable:
        log.warning(f'Relevant-sphere preservation is not stable at word length {cutoff}.')
    report['rel_preservation'] = check(preserved, stable=stable)

    # (iii) W equals the strip part of the common exterior of the Γ_W ball
    x = rng.uniform(aux.alpha_prime, aux.beta_prime, samples)
    height = cuspHeight(aux)
    y = height * np.exp(rng.uniform(math.log(0.02), math.log(2.0), samples))
    in_w = aux.domain_W.inInterior(x, y, 1e-7)
    in_kw = strip.inInterior(x, y, 1e-7)
    near = np.abs(y - aux.domain_W.heightAt(x)) <= 1e-6
    mismatches = int(np.sum((in_w != in_kw) & ~near))
    report['ford_type'] = check(mismatches == 0, samples=samples, mismatches=mismatches)

    # (iv) condition (A) passes on to W
    base_a = checkConditionA(aux.domain)['passed']
    strip_a = checkConditionA(strip)['passed']
    report['condition_A'] = check(strip_a or not base_a, base=base_a, auxiliary=strip_a)

    # cusp at oo: t_lambda pairs the walls and is parabolic
    t = aux.t_lambda
    wall_ok = abs(t.applyBoundary(aux.alpha_prime) - aux.beta_prime) <= 1e-9 * max(1.0, abs(aux.beta_prime))
    parabolic = t.classify(eps).kind is Kind.PARABOLIC and t.inverse().classify(eps).kind is Kind.PARABOLIC
    M = cuspHeight(aux)
    heights = M * (1.0 + rng.uniform(0.01, 2.0, 8))
    above = all(bool(aux.domain_W.inInterior(np.array([aux.alpha_prime + 1e-3 * aux.lam]), np.array([h]), 0.0)[0]) for h in heights)
    report['cusp_cycle'] = check(wall_ok and parabolic and above, cusp_height=M)

    # finite vertices of W
    try:
        cycles = vertexCycles(aux.domain)
        bad = [i for i, c in enumerate(cycles) if c.omega is None]
        report['vertex_cycles'] = check(not bad, cycles=len(cycles), omegas=[c.omega for c in cycles])
    except ZetaBranchError as e:
        report['vertex_cycles'] = check(False, error=str(e))

    # Γ inside Γ_W at generator level
    missing = []
    for gen in aux.base.generators:
        if not containsUpTo(aux.presentation_W, gen.element, cutoff, ball):
            missing.append(gen.label)
    report['contains_base'] = check(not missing, unknown=missing)

    # translates of W by nonzero powers of t_lambda leave its interior
    wx = rng.uniform(aux.alpha_prime, aux.beta_prime, samples)
    wy = aux.domain_W.heightAt(wx) + height * rng.uniform(0.05, 1.5, samples)
    inside = aux.domain_W.inInterior(wx, wy, 1e-7)
    overlaps = 0
    for q in (-2, -1, 1, 2):
        overlaps += int(np.sum(aux.domain_W.inInterior(wx[inside] + q * aux.lam, wy[inside], 1e-7)))
    report['strip_tiling'] = check(overlaps == 0, overlaps=overlaps)

    # hyperbolic fixed points under the two outermost relevant spheres
    if base_ball is None:
        base_ball = enumerateBall(aux.base, min(cutoff, aux.base.word_cutoff))
    points = limitPoints(base_ball)
    points = points[np.isfinite(points)]
    outer = [aux.domain.sides[0].sphere, aux.domain.sides[-1].sphere]
    report['extremal_shadows'] = [
        {
            'word': formatWord(s.word),
            'hyperbolic_points': int(np.sum((points > s.center - s.radius) & (points < s.center + s.radius))),
        }
        for s in outer
    ]
    log.info('Auxiliary group checks: ' + ', '.join(f'{k}={v["passed"]}' for k, v in report.items() if isinstance(v, dict) and 'passed' in v))
    return report
