'''
The common exterior K of a family of isometric spheres: its upper envelope, relevant spheres,
vertices and vertex cycles, condition (A) and sampled fundamental-domain checks.
'''

import math
from typing import NamedTuple, Optional

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import HPoint, EPSILON
from zetabranch.group import WordBall, formatWord, invertWord
from zetabranch.geometry.spheres import IsometricSphere, sphereOf, spheresOf, summit
from zetabranch.errors import EmptyInput, NoSpheres, PairingIncomplete
from zetabranch.report import check

# Geometric comparisons on the envelope tolerate more round-off than matrix equality.
GEOM_TOL = 1e-9

class EnvelopeSide(NamedTuple):
    '''
    A maximal arc of ∂K over [x_left, x_right], carried by `sphere`, paired by its generator.
    '''
    sphere: IsometricSphere
    x_left: float
    x_right: float

    @property
    def pairing(self):
        return self.sphere.generator

    def endpoints(self) -> tuple:
        return (
            (self.x_left, float(self.sphere.heightAt(self.x_left))),
            (self.x_right, float(self.sphere.heightAt(self.x_right))),
        )

class Vertex(NamedTuple):
    point: HPoint
    left_side: int
    right_side: int
    angle: float

class FordDomain(NamedTuple):
    sides: tuple
    alpha: float
    beta: float
    vertices: tuple
    gaps: tuple
    strip: Optional[tuple] = None

    def heightAt(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.sides:
            return np.zeros_like(x)
        heights = [side.sphere.heightAt(x) for side in self.sides]
        return np.max(np.stack(heights), axis=0)

    def inInterior(self, x, y, tol: float = 1e-9) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = y > self.heightAt(x) + tol
        if self.strip is not None:
            inside &= (x > self.strip[0] + tol) & (x < self.strip[1] - tol)
        return inside

    def inClosure(self, x, y, tol: float = 1e-9) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = y >= self.heightAt(x) - tol
        if self.strip is not None:
            inside &= (x >= self.strip[0] - tol) & (x <= self.strip[1] + tol)
        return inside

    def relevantSpheres(self) -> list:
        result = []
        for side in self.sides:
            if not any(side.sphere.sameAs(s) for s in result):
                result.append(side.sphere)
        return result

    def realEndpoints(self) -> list:
        '''
        The points where ∂K meets the real line, left to right.
        '''
        points = []
        for side in self.sides:
            for x, y in side.endpoints():
                if y <= 1e-7 * max(1.0, side.sphere.radius) and not any(abs(x - p) <= GEOM_TOL * max(1.0, abs(x)) for p in points):
                    points.append(x)
        return sorted(points)

    def sideOf(self, sphere: IsometricSphere) -> Optional[int]:
        for i, side in enumerate(self.sides):
            if side.sphere.sameAs(sphere, 1e-8):
                return i
        return None

def vertexAngle(point: HPoint, left: IsometricSphere, right: IsometricSphere) -> float:
    '''
    Interior angle of K at a vertex between the arc of `left` and the arc of `right`.
    '''
    x, y = point
    t_left = math.atan2(x - left.center, -y)
    t_right = math.atan2(-(x - right.center), y)
    return (t_left - t_right) % (2 * math.pi)

def _dedupSpheres(spheres: list) -> list:
    unique = []
    keys = set()
    for sphere in spheres:
        key = (round(sphere.center, 9) + 0.0, round(sphere.radius, 9) + 0.0)
        if key not in keys:
            keys.add(key)
            unique.append(sphere)
    return unique

def upperEnvelope(spheres: list, eps: float = EPSILON) -> FordDomain:
    '''
    Sweep the breakpoints (shadow ends and pairwise circle intersections) and assign each interval
    between them to the sphere that is highest at its midpoint. Runs of one owner become sides.
    '''
    if not spheres:
        raise EmptyInput('No isometric spheres to take the envelope of.')
    spheres = _dedupSpheres(spheres)
    centers = np.array([s.center for s in spheres])
    radii = np.array([s.radius for s in spheres])

    # drop spheres lying under the closed disk of another one
    dist = np.abs(centers[:, None] - centers[None, :])
    covered = (dist + radii[:, None] <= radii[None, :] + GEOM_TOL) & ~np.eye(len(spheres), dtype=bool)
    keep = ~np.any(covered, axis=1)
    spheres = [s for s, k in zip(spheres, keep) if k]
    centers, radii = centers[keep], radii[keep]

    breakpoints = [centers - radii, centers + radii]
    if len(spheres) > 1:
        ci, cj = centers[:, None], centers[None, :]
        ri, rj = radii[:, None], radii[None, :]
        with np.errstate(divide='ignore', invalid='ignore'):
            x = (ri ** 2 - rj ** 2 + cj ** 2 - ci ** 2) / (2.0 * (cj - ci))
        valid = np.isfinite(x) & (np.abs(x - ci) < ri) & (np.abs(x - cj) < rj)
        breakpoints.append(x[np.triu(valid, 1)])
    points = np.unique(np.concatenate(breakpoints))
    merged = [points[0]]
    for p in points[1:]:
        if p - merged[-1] > GEOM_TOL * max(1.0, abs(p)):
            merged.append(p)
    points = np.array(merged)

    mids = (points[:-1] + points[1:]) / 2.0
    heights = np.sqrt(np.clip(radii[None, :] ** 2 - (mids[:, None] - centers[None, :]) ** 2, 0.0, None))
    owners = np.argmax(heights, axis=1)
    owners = np.where(heights[np.arange(len(mids)), owners] > 0.0, owners, -1)

    sides, gaps = [], []
    start = 0
    for i in range(1, len(mids) + 1):
        if i < len(mids) and owners[i] == owners[start]:
            continue
        x_left, x_right = float(points[start]), float(points[i])
        if owners[start] >= 0:
            sides.append(EnvelopeSide(spheres[owners[start]], x_left, x_right))
        else:
            gaps.append((x_left, x_right))
        start = i

    vertices = []
    for i in range(len(sides) - 1):
        left, right = sides[i], sides[i + 1]
        if abs(left.x_right - right.x_left) > GEOM_TOL * max(1.0, abs(left.x_right)):
            continue
        x = left.x_right
        y = float(left.sphere.heightAt(x))
        if y <= 1e-7 * max(1.0, left.sphere.radius):
            continue
        point = HPoint(x, y)
        vertices.append(Vertex(point, i, i + 1, vertexAngle(point, left.sphere, right.sphere)))

    alpha = min(s.x_left for s in sides)
    beta = max(s.x_right for s in sides)
    log.debug(f'Envelope of {len(spheres)} spheres: {len(sides)} sides, {len(vertices)} vertices, {len(gaps)} gaps.')
    return FordDomain(tuple(sides), alpha, beta, tuple(vertices), tuple(gaps))

class RelevantSet(NamedTuple):
    spheres: list
    domain: FordDomain
    stable: bool
    cutoff: int

def sphereKeys(spheres: list) -> set:
    return { (round(s.center, 7) + 0.0, round(s.radius, 7) + 0.0) for s in spheres }

def relevantSet(ball: WordBall) -> RelevantSet:
    '''
    Relevant spheres of the ball, flagged stable when the ball one word shorter yields the same set.
    '''
    spheres = spheresOf(ball)
    if not spheres:
        raise NoSpheres('Every element of the ball fixes oo.')
    domain = upperEnvelope(spheres, ball.group.epsilon)
    relevant = domain.relevantSpheres()
    stable = False
    if ball.cutoff >= 1:
        smaller = spheresOf(ball.restrict(ball.cutoff - 1))
        if smaller:
            stable = sphereKeys(upperEnvelope(smaller).relevantSpheres()) == sphereKeys(relevant)
    if not stable:
        log.warning(f'Relevant spheres change between word length {ball.cutoff - 1} and {ball.cutoff}; the cutoff may be too small.')
    log.info(f'{len(relevant)} relevant spheres at word length {ball.cutoff}.')
    return RelevantSet(relevant, domain, stable, ball.cutoff)

class VertexCycle(NamedTuple):
    vertices: list
    angles: list
    omega: Optional[int]
    height_discrepancy: float
    transformation: tuple

    @property
    def angleSum(self) -> float:
        return float(sum(self.angles))

def _findVertex(domain: FordDomain, point: HPoint) -> Optional[int]:
    for i, vertex in enumerate(domain.vertices):
        if abs(vertex.point.x - point.x) <= 1e-7 * max(1.0, abs(point.x)) and abs(vertex.point.y - point.y) <= 1e-7 * max(1.0, point.y):
            return i
    return None

def vertexCycles(domain: FordDomain, ball: WordBall = None) -> list:
    '''
    Follow side pairings from each finite vertex until the cycle closes. `ball`, when given,
    supplies the words of the pairing transformations.
    '''
    seen = set()
    cycles = []
    for start in range(len(domain.vertices)):
        if start in seen:
            continue
        current, leaving = start, domain.vertices[start].right_side
        points, angles, discrepancy = [], [], 0.0
        word = ()
        for _ in range(2 * len(domain.vertices) + 2):
            vertex = domain.vertices[current]
            seen.add(current)
            points.append(vertex.point)
            angles.append(vertex.angle)
            side = domain.sides[leaving]
            g = side.pairing
            image = g.applyInterior(vertex.point)
            target = _findVertex(domain, image)
            if target is None:
                raise PairingIncomplete(f'{formatWord(side.sphere.word)} maps vertex {vertex.point} to {image}, which is not a vertex')
            arrival = domain.sideOf(sphereOf(g.inverse()))
            nxt = domain.vertices[target]
            if arrival not in (nxt.left_side, nxt.right_side):
                raise PairingIncomplete(f'The side paired with {formatWord(side.sphere.word)} is missing from the domain')
            discrepancy = max(discrepancy, abs(image.y - vertex.point.y), abs(image.y - nxt.point.y))
            word = side.sphere.word + word
            current = target
            leaving = nxt.left_side if arrival == nxt.right_side else nxt.right_side
            if current == start and leaving == domain.vertices[start].right_side:
                break
        else:
            raise PairingIncomplete(f'Vertex cycle through {domain.vertices[start].point} does not close')
        total = sum(angles)
        omega = int(round(2 * math.pi / total)) if total > 0 else 0
        if omega < 1 or abs(2 * math.pi / omega - total) / total > 1e-6:
            log.warning(f'Angle sum {total} of the cycle at {domain.vertices[start].point} is not 2π/ω.')
            omega = None
        cycles.append(VertexCycle(points, angles, omega, discrepancy, word))
    log.info(f'{len(cycles)} vertex cycles.')
    return cycles

def checkConditionA(domain: FordDomain) -> dict:
    '''
    Every relevant summit lies in the relative interior of its arc of ∂K.
    '''
    sides = []
    for side in domain.sides:
        top = summit(side.sphere)
        margin = GEOM_TOL * max(1.0, abs(top.x))
        inside = side.x_left + margin < top.x < side.x_right - margin
        sides.append(check(inside, word=formatWord(side.sphere.word), center=side.sphere.center,
                           radius=side.sphere.radius, arc=[side.x_left, side.x_right]))
    # a sphere cut into several arcs passes when one of them holds its summit
    by_sphere = {}
    for side, entry in zip(domain.sides, sides):
        key = (round(side.sphere.center, 9), round(side.sphere.radius, 9))
        by_sphere[key] = by_sphere.get(key, False) or entry['passed']
    return check(all(by_sphere.values()), sides=sides)

def checkThirdSphere(domain: FordDomain, cyclic: bool) -> dict:
    '''
    When the outermost spheres are iso(g) and iso(g^-1) of a non-cyclic group, some side has its
    summit on ∂K strictly between the two outermost summits.
    '''
    if len(domain.sides) < 2:
        return check(True, applicable=False)
    first, last = domain.sides[0].sphere, domain.sides[-1].sphere
    paired = sphereOf(first.generator.inverse()).sameAs(last, 1e-8)
    if cyclic or not paired:
        return check(True, applicable=False)
    for side in domain.sides[1:-1]:
        top = summit(side.sphere)
        on_boundary = top.y >= float(domain.heightAt(top.x)) - 1e-9
        if first.center < top.x < last.center and on_boundary and side.x_left < top.x < side.x_right:
            return check(True, applicable=True, witness=formatWord(side.sphere.word))
    return check(False, applicable=True, witness=None)

def _images(entries: np.ndarray, z: np.ndarray) -> np.ndarray:
    a, b, c, d = (entries[:, i][:, None] for i in range(4))
    denom = c * z[None, :] + d
    w = (a * z[None, :] + b) / denom
    # heights from Im z / |cz + d|^2 stay positive
    return w.real + 1j * (z.imag[None, :] / np.abs(denom) ** 2)

def spotcheckFundamental(domain: FordDomain, ball: WordBall, samples: int = 200, seed: int = 20240101,
                         points: list = None) -> dict:
    '''
    (a) no ball element other than the identity maps a sampled interior point of K into int K;
    (b) sampled points of H lie in some ball translate of the closure of K.
    With a strip on the domain both tests use K intersected with the strip.
    '''
    rng = np.random.default_rng(seed)
    radius = max(s.sphere.radius for s in domain.sides)
    lo, hi = domain.strip if domain.strip is not None else (domain.alpha - radius, domain.beta + radius)
    entries = ball.entries()
    moving = np.array([len(w) > 0 for w in ball.words])

    x = rng.uniform(lo, hi, samples)
    y = domain.heightAt(x) + radius * rng.uniform(0.05, 1.5, samples)
    inner = x + 1j * y
    inner = inner[domain.inInterior(inner.real, inner.imag, 1e-7)]
    images = _images(entries[moving], inner)
    hits = domain.inInterior(images.real, images.imag, 1e-7)
    moving_words = [w for w, m in zip(ball.words, moving) if m]
    pairs = []
    for gi, zi in zip(*np.nonzero(hits)):
        word = moving_words[gi]
        pairs.append({ 'point': [inner[zi].real, inner[zi].imag], 'word': formatWord(word) })

    if points is None:
        px = rng.uniform(lo - radius, hi + radius, samples)
        py = radius * np.exp(rng.uniform(math.log(0.05), math.log(2.0), samples))
        probe = px + 1j * py
    else:
        probe = np.array([complex(p.x, p.y) for p in points])
    images = _images(entries, probe)
    inside = domain.inClosure(images.real, images.imag, 1e-7)
    witnesses, uncovered = [], []
    for i in range(len(probe)):
        found = np.nonzero(inside[:, i])[0]
        if len(found):
            witnesses.append(formatWord(invertWord(ball.words[int(found[0])])))
        else:
            witnesses.append(None)
            uncovered.append([probe[i].real, probe[i].imag])
    if uncovered:
        log.warning(f'{len(uncovered)} of {len(probe)} sampled points are not covered at word length {ball.cutoff}.')
    return {
        'cutoff': ball.cutoff,
        'interior_equivalences': check(not pairs, samples=int(len(inner)), witnesses=pairs[:10]),
        'coverage': {
            'samples': int(len(probe)),
            'covered_fraction': float(1.0 - len(uncovered) / max(1, len(probe))),
            'uncovered': uncovered[:10],
            'translates': witnesses if points is not None else None,
        },
    }
