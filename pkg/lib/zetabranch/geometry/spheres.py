'''
Isometric spheres iso(g) = {z in H : |g'(z)| = 1}, their summits and shadows, and the sampled
identity suite that every ball of spheres should satisfy.
'''

import math
from typing import NamedTuple

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import Moebius, HPoint, BoundaryInterval, EPSILON
from zetabranch.group import WordBall, formatWord, limitPoints
from zetabranch.errors import StabilizesInfinity
from zetabranch.report import check

class IsometricSphere(NamedTuple):
    center: float
    radius: float
    generator: Moebius
    word: tuple = ()

    def heightAt(self, x) -> np.ndarray:
        '''
        Height of the semicircle over x, zero outside the shadow.
        '''
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.clip(self.radius ** 2 - (x - self.center) ** 2, 0.0, None))

    def pointAt(self, angle: float) -> HPoint:
        return HPoint(self.center + self.radius * math.cos(angle), self.radius * math.sin(angle))

    def sameAs(self, other: 'IsometricSphere', eps: float = EPSILON) -> bool:
        scale = max(1.0, abs(self.center), abs(other.center))
        return abs(self.center - other.center) <= eps * scale and abs(self.radius - other.radius) <= eps * max(1.0, self.radius)

def sphereOf(g: Moebius, word: tuple = (), eps: float = EPSILON) -> IsometricSphere:
    '''
    Center g^-1.oo = -d/c and radius 1/|c|.
    '''
    if abs(g.c) < eps:
        raise StabilizesInfinity(f'{g} fixes oo and has no isometric sphere')
    return IsometricSphere(-g.d / g.c, 1.0 / abs(g.c), g, word)

def summit(sphere: IsometricSphere) -> HPoint:
    return HPoint(sphere.center, sphere.radius)

def shadow(sphere: IsometricSphere) -> BoundaryInterval:
    return BoundaryInterval(sphere.center - sphere.radius, sphere.center + sphere.radius)

def spheresOf(ball: WordBall) -> list:
    '''
    The distinct spheres of the ball's non-stabilisers, keeping the shortest word per sphere.
    '''
    eps = ball.group.epsilon
    seen = {}
    result = []
    for g, word in ball:
        if abs(g.c) < eps:
            continue
        sphere = sphereOf(g, word, eps)
        key = (round(sphere.center, 7) + 0.0, round(sphere.radius, 7) + 0.0)
        if key in seen:
            continue
        seen[key] = len(result)
        result.append(sphere)
    return result

def checkIsoIdentities(ball: WordBall, samples: int = 50, seed: int = 20240101, t_lambda: Moebius = None) -> dict:
    '''
    Sampled maximal violations of the isometric-sphere identities over the ball:
    g.iso(g) = iso(g^-1), height preservation on iso(g), |g'| = 1 on iso(g), the chain rule,
    g(int iso(g)) outside iso(g^-1), iso(g t^n) = t^-n.iso(g) when a parabolic t is designated,
    and the absence of distinct concentric spheres.
    '''
    rng = np.random.default_rng(seed)
    eps = ball.group.epsilon
    iso1 = iso2 = unit = interior = iso5 = chain = 0.0
    movers = [(g, w) for g, w in ball if abs(g.c) >= eps]
    for g, word in movers:
        sphere = sphereOf(g, word, eps)
        partner = sphereOf(g.inverse(), (), eps)
        angles = rng.uniform(0.05, math.pi - 0.05, samples)
        points = sphere.center + sphere.radius * np.exp(1j * angles)
        images = (g.a * points + g.b) / (g.c * points + g.d)
        iso1 = max(iso1, float(np.max(np.abs(np.abs(images - partner.center) - partner.radius)) / max(1.0, partner.radius)))
        iso2 = max(iso2, float(np.max(np.abs(images.imag - points.imag))))
        unit = max(unit, float(np.max(np.abs(1.0 / np.abs(g.c * points + g.d) ** 2 - 1.0))))
        inner = sphere.center + 0.5 * sphere.radius * np.exp(1j * angles)
        inner_images = (g.a * inner + g.b) / (g.c * inner + g.d)
        interior = max(interior, float(np.max(np.clip(partner.radius - np.abs(inner_images - partner.center), 0.0, None))))
        if t_lambda is not None:
            shift = t_lambda.b / t_lambda.d
            for n in (-1, 1):
                moved = sphereOf(g.compose(t_lambda.power(n)), (), eps)
                iso5 = max(iso5, abs(moved.center - (sphere.center - n * shift)), abs(moved.radius - sphere.radius))

    # chain rule on sampled pairs of ball elements at interior points
    elements = ball.elements
    if len(elements) > 1:
        for _ in range(samples):
            g = elements[int(rng.integers(len(elements)))]
            h = elements[int(rng.integers(len(elements)))]
            z = HPoint(float(rng.uniform(-5, 5)), float(rng.uniform(0.1, 3)))
            lhs = g.compose(h).derivMag(z)
            rhs = g.derivMag(h.applyInterior(z)) * h.derivMag(z)
            chain = max(chain, abs(lhs - rhs) / max(1.0, abs(rhs)))

    spheres = spheresOf(ball)
    centers = np.array([s.center for s in spheres]) if spheres else np.zeros(0)
    radii = np.array([s.radius for s in spheres]) if spheres else np.zeros(0)
    concentric = []
    if len(spheres) > 1:
        same_center = np.abs(centers[:, None] - centers[None, :]) <= eps * np.maximum(1.0, np.abs(centers[:, None]))
        other_radius = np.abs(radii[:, None] - radii[None, :]) > eps * np.maximum(1.0, radii[:, None])
        for i, j in zip(*np.nonzero(np.triu(same_center & other_radius, 1))):
            concentric.append([formatWord(spheres[i].word), formatWord(spheres[j].word)])

    # shadows meeting the limit set, for the spheres of the ball
    points = limitPoints(ball)
    finite = points[np.isfinite(points)] if len(points) else points
    meeting = 0
    for sphere in spheres:
        if len(finite) and np.any((finite > sphere.center - sphere.radius) & (finite < sphere.center + sphere.radius)):
            meeting += 1

    tol = 1e-8
    report = {
        'cutoff': ball.cutoff,
        'samples': samples,
        'spheres': len(spheres),
        'iso1_mapping': check(iso1 < tol, max_violation=iso1),
        'iso2_height': check(iso2 < tol, max_violation=iso2),
        'unit_derivative': check(unit < tol, max_violation=unit),
        'chain_rule': check(chain < tol, max_violation=chain),
        'interior_mapping': check(interior < tol, max_violation=interior),
        'concentric': check(not concentric, pairs=concentric),
        'shadows_meet_limit_set': {
            'spheres_meeting': meeting,
            'spheres_total': len(spheres),
            'limit_points': int(len(finite)),
        },
    }
    if t_lambda is not None:
        report['iso5_translation'] = check(iso5 < tol, max_violation=iso5)
    log.info(f'Isometric sphere identities checked on {len(movers)} elements.')
    return report
