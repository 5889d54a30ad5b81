'''
PSL(2,R) acting on the upper half-plane H and on its boundary circle R u {oo}.

Boundary points are plain floats with `INFINITY` (math.inf) standing for the point oo; -inf is
folded onto the same point. Group elements are `Moebius` tuples normalised to determinant one
and to the canonical sign, so that equal transformations share one representative.
'''

import math
import cmath
import enum
from typing import NamedTuple, Optional, Union

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.errors import (
    PoleError, AmbiguousClassification, IdentityHasNoFixedPointSet, NotHyperbolic,
    CoincidentGeodesics, InvalidPoint, BadDeterminant
)

INFINITY = math.inf
EPSILON = 1e-9
# Traces this close to 2 are parabolic up to round-off; between this and epsilon we refuse to guess.
EXACT_TRACE_TOL = 1e-12

def boundaryPoint(x: float) -> float:
    '''
    Validate a boundary coordinate. Both infinities denote the single point oo.
    '''
    x = float(x)
    if math.isnan(x):
        raise InvalidPoint('Boundary point is NaN.')
    if math.isinf(x):
        return INFINITY
    return x

def pointsClose(p: float, q: float, eps: float = EPSILON) -> bool:
    '''
    Equality of boundary points within eps, relative for large coordinates.
    '''
    if math.isinf(p) or math.isinf(q):
        return math.isinf(p) and math.isinf(q)
    return abs(p - q) <= eps * max(1.0, abs(p), abs(q))

class HPoint(NamedTuple):
    '''
    A point x + iy of the upper half-plane.
    '''
    x: float
    y: float

    @classmethod
    def of(cls, x: float, y: float) -> 'HPoint':
        if not (y > 0) or math.isnan(x) or math.isinf(x) or math.isinf(y):
            raise InvalidPoint(f'Not a point of H: ({x}, {y})')
        return cls(float(x), float(y))

    @classmethod
    def fromComplex(cls, z: complex) -> 'HPoint':
        return cls.of(z.real, z.imag)

    def toComplex(self) -> complex:
        return complex(self.x, self.y)

    def isClose(self, other: 'HPoint', eps: float = EPSILON) -> bool:
        return abs(self.toComplex() - other.toComplex()) <= eps * max(1.0, abs(self.toComplex()))

class Geodesic(NamedTuple):
    '''
    Oriented complete geodesic from minus_end = gamma(-oo) to plus_end = gamma(+oo).
    '''
    minus_end: float
    plus_end: float

    @classmethod
    def of(cls, minus_end: float, plus_end: float, eps: float = EPSILON) -> 'Geodesic':
        minus_end, plus_end = boundaryPoint(minus_end), boundaryPoint(plus_end)
        if pointsClose(minus_end, plus_end, eps):
            raise InvalidPoint(f'Degenerate geodesic with both ends at {minus_end}')
        return cls(minus_end, plus_end)

    def reversed(self) -> 'Geodesic':
        return Geodesic(self.plus_end, self.minus_end)

class BoundaryInterval(NamedTuple):
    '''
    The open arc of the boundary circle traversed counterclockwise (increasing x, through oo) from
    left to right.
    '''
    left: float
    right: float

    @classmethod
    def of(cls, left: float, right: float, eps: float = EPSILON) -> 'BoundaryInterval':
        left, right = boundaryPoint(left), boundaryPoint(right)
        if pointsClose(left, right, eps):
            raise InvalidPoint('Boundary interval with coinciding ends.')
        return cls(left, right)

    def contains(self, p: float, eps: float = 0.0) -> bool:
        return circularContains(self, p, eps)

    def complement(self) -> 'BoundaryInterval':
        return BoundaryInterval(self.right, self.left)

class Kind(enum.Enum):
    IDENTITY = 'Identity'
    ELLIPTIC = 'Elliptic'
    PARABOLIC = 'Parabolic'
    HYPERBOLIC = 'Hyperbolic'

class Classification(NamedTuple):
    kind: Kind
    order: Optional[int] = None

    def __str__(self):
        if self.kind is Kind.ELLIPTIC and self.order:
            return f'{self.kind.value}({self.order})'
        return self.kind.value

def _canonicalSign(a: float, b: float, c: float, d: float, eps: float) -> tuple:
    entries = (a, b, c, d)
    biggest = max(abs(e) for e in entries)
    for e in entries:
        if abs(e) >= biggest - eps:
            if e < 0:
                entries = tuple(-x for x in entries)
            break
    # fold -0.0 onto 0.0 so rounded keys hash alike
    return tuple(x + 0.0 for x in entries)

class Moebius(NamedTuple):
    '''
    z -> (az + b)/(cz + d) with ad - bc = 1, stored with the canonical sign: the entry of largest
    magnitude is positive, ties broken in the order a, b, c, d.
    Build instances through `fromEntries` (or `identity`), never the bare constructor.
    '''
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def fromEntries(cls, a: float, b: float, c: float, d: float, eps: float = EPSILON) -> 'Moebius':
        '''
        Entries of any matrix with positive determinant; they are divided by sqrt(det) when det is
        not already one within eps.
        '''
        a, b, c, d = float(a), float(b), float(c), float(d)
        det = a * d - b * c
        if not det > eps:
            raise BadDeterminant(f'Determinant {det} of [[{a}, {b}], [{c}, {d}]] is not positive',
                                 { 'entries': [a, b, c, d], 'determinant': det })
        if abs(det - 1.0) > eps:
            norm = math.sqrt(det)
            a, b, c, d = a / norm, b / norm, c / norm, d / norm
        return cls(*_canonicalSign(a, b, c, d, eps))

    @classmethod
    def identity(cls) -> 'Moebius':
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, shift: float) -> 'Moebius':
        return cls.fromEntries(1.0, shift, 0.0, 1.0)

    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> 'Moebius':
        return Moebius.fromEntries(self.d, -self.b, -self.c, self.a)

    def compose(self, other: 'Moebius') -> 'Moebius':
        '''
        The matrix product self * other, i.e. apply `other` first.
        '''
        return Moebius.fromEntries(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __matmul__(self, other: 'Moebius') -> 'Moebius':
        return self.compose(other)

    def power(self, n: int) -> 'Moebius':
        base = self if n >= 0 else self.inverse()
        result = Moebius.identity()
        n = abs(n)
        while n:
            if n & 1:
                result = result.compose(base)
            base = base.compose(base)
            n >>= 1
        return result

    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def isClose(self, other: 'Moebius', eps: float = EPSILON) -> bool:
        tol = eps * max(1.0, self.scale(), other.scale())
        return all(abs(x - y) <= tol for x, y in zip(self, other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Moebius):
            return NotImplemented
        return self.isClose(other)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    # equality is within eps and so not transitive; key() is the hashable form
    __hash__ = None

    def key(self, digits: int = None) -> tuple:
        '''
        Rounded canonical entries, the dedup key of word enumeration.
        '''
        if digits is None:
            digits = keyDigits(EPSILON)
        return tuple(round(x, digits) + 0.0 for x in self)

    def isIdentity(self, eps: float = EPSILON) -> bool:
        return self.isClose(Moebius.identity(), eps)

    def stabilizesInfinity(self, eps: float = EPSILON) -> bool:
        return abs(self.c) <= eps

    def asList(self) -> list:
        return [self.a, self.b, self.c, self.d]

    def applyBoundary(self, p: float) -> float:
        '''
        Action on R u {oo}: g.oo = a/c, g.(-d/c) = oo, and oo is fixed when c = 0.
        '''
        p = boundaryPoint(p)
        if math.isinf(p):
            if self.stabilizesInfinity():
                return INFINITY
            return self.a / self.c
        denom = self.c * p + self.d
        if abs(denom) <= EPSILON * max(1.0, abs(p)):
            return INFINITY
        return (self.a * p + self.b) / denom

    def applyInterior(self, z: HPoint) -> HPoint:
        w = complex(z.x, z.y)
        denom = self.c * w + self.d
        image = (self.a * w + self.b) / denom
        # Im(g.z) = Im z / |cz + d|^2 keeps the height positive under cancellation
        return HPoint(image.real, z.y / abs(denom) ** 2)

    def applyInteriorComplex(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivMag(self, p: Union[HPoint, float]) -> float:
        '''
        |g'(p)| = 1/|cp + d|^2 for p in H or on the finite boundary.
        '''
        if isinstance(p, HPoint):
            denom = abs(self.c * complex(p.x, p.y) + self.d)
        else:
            p = boundaryPoint(p)
            if math.isinf(p):
                if self.stabilizesInfinity():
                    return 1.0 / self.d ** 2
                raise InvalidPoint('|g\'| at oo is only defined for stabilisers of oo.')
            denom = abs(self.c * p + self.d)
        if denom <= EPSILON:
            raise PoleError(f'{p} is the pole of {self}')
        return 1.0 / denom ** 2

    def classify(self, eps: float = EPSILON, max_order: int = 12) -> Classification:
        if self.isIdentity(eps):
            return Classification(Kind.IDENTITY)
        trace = abs(self.trace())
        gap = trace - 2.0
        if abs(gap) <= EXACT_TRACE_TOL:
            return Classification(Kind.PARABOLIC)
        if abs(gap) < eps:
            other = Kind.ELLIPTIC if gap < 0 else Kind.HYPERBOLIC
            raise AmbiguousClassification(
                f'|tr| = {trace!r} is within {eps} of 2 for {self}',
                [Kind.PARABOLIC.value, other.value]
            )
        if gap > 0:
            return Classification(Kind.HYPERBOLIC)
        order = None
        current = self
        for k in range(2, max_order + 1):
            current = current.compose(self)
            if current.isIdentity(max(eps, 1e-7)):
                order = k
                break
        return Classification(Kind.ELLIPTIC, order)

    def isHyperbolic(self, eps: float = EPSILON) -> bool:
        return abs(self.trace()) > 2.0 + eps

    def fixedPoints(self, eps: float = EPSILON) -> tuple:
        '''
        Hyperbolic: (f_plus, f_minus), attracting first. Parabolic: (f,). Elliptic: (HPoint,).
        '''
        a, b, c, d = self
        kind = self.classify(eps).kind
        if kind is Kind.IDENTITY:
            raise IdentityHasNoFixedPointSet(f'{self} is the identity')
        if kind is Kind.PARABOLIC:
            if self.stabilizesInfinity(eps):
                return (INFINITY,)
            return ((a - d) / (2.0 * c),)
        if kind is Kind.ELLIPTIC:
            root = math.sqrt(max(0.0, 4.0 - self.trace() ** 2))
            z = complex(a - d, root) / (2.0 * c)
            if z.imag < 0:
                z = z.conjugate()
            return (HPoint(z.real, z.imag),)
        if self.stabilizesInfinity(eps):
            finite = b / (d - a)
            # for c = 0, oo attracts iff |a| > |d|
            return (INFINITY, finite) if abs(a) > abs(d) else (finite, INFINITY)
        disc = math.sqrt(self.trace() ** 2 - 4.0)
        first = ((a - d) + disc) / (2.0 * c)
        second = ((a - d) - disc) / (2.0 * c)
        if abs(c * first + d) > abs(c * second + d):
            return (first, second)
        return (second, first)

    def translationLength(self, eps: float = EPSILON) -> float:
        if not self.isHyperbolic(eps):
            raise NotHyperbolic(f'{self} has |tr| = {abs(self.trace())}')
        return 2.0 * math.acosh(abs(self.trace()) / 2.0)

    def __str__(self):
        return f'[[{self.a:.6g}, {self.b:.6g}], [{self.c:.6g}, {self.d:.6g}]]'

def keyDigits(eps: float) -> int:
    return max(1, int(math.ceil(-math.log10(eps))))

def circularContains(interval: BoundaryInterval, p: float, eps: float = 0.0) -> bool:
    '''
    Strict membership in the counterclockwise arc; eps widens the excluded ends.
    '''
    left, right = interval
    p = boundaryPoint(p)
    if math.isinf(p):
        return not math.isinf(left) and not math.isinf(right) and left > right
    if math.isinf(left):
        return p < right - eps
    if math.isinf(right):
        return p > left + eps
    if left < right:
        return left + eps < p < right - eps
    return p > left + eps or p < right - eps

def arcPosition(p: float) -> float:
    '''
    Angle of p on the boundary circle, increasing counterclockwise; oo sits at pi.
    '''
    return math.pi if math.isinf(p) else 2.0 * math.atan(p)

def cyclicOrder(p: float, q: float, r: float) -> bool:
    '''
    True when p, q, r are distinct and met in this order going counterclockwise.
    '''
    tp, tq, tr = arcPosition(p), arcPosition(q), arcPosition(r)
    dq = (tq - tp) % (2 * math.pi)
    dr = (tr - tp) % (2 * math.pi)
    return 0 < dq < dr

def imageInterval(g: Moebius, interval: BoundaryInterval) -> BoundaryInterval:
    return BoundaryInterval(g.applyBoundary(interval.left), g.applyBoundary(interval.right))

def arcContains(outer: BoundaryInterval, inner: BoundaryInterval, eps: float = 1e-9) -> bool:
    '''
    inner is a sub-arc of the closure of outer.
    '''
    start = arcPosition(outer.left)
    span = (arcPosition(outer.right) - start) % (2 * math.pi)
    lo = (arcPosition(inner.left) - start) % (2 * math.pi)
    hi = (arcPosition(inner.right) - start) % (2 * math.pi)
    if lo > 2 * math.pi - eps:
        lo = 0.0
    if hi < eps:
        hi = 2 * math.pi if span > 2 * math.pi - eps else hi
    return lo <= hi + eps and hi <= span + eps and lo >= -eps

def toImaginaryAxis(p: float, q: float) -> Moebius:
    '''
    An orientation preserving M with M.p = 0 and M.q = oo.
    '''
    if math.isinf(q):
        return Moebius.fromEntries(1.0, -p, 0.0, 1.0)
    if math.isinf(p):
        return Moebius.fromEntries(0.0, -1.0, 1.0, -q)
    if q > p:
        a, b, c, d = 1.0, -p, -1.0, q
    else:
        a, b, c, d = 1.0, -p, 1.0, -q
    norm = math.sqrt(a * d - b * c)
    return Moebius.fromEntries(a / norm, b / norm, c / norm, d / norm)

def geodesicMeets(first: Geodesic, second: Geodesic, eps: float = EPSILON) -> Optional[HPoint]:
    '''
    The transversal intersection point in H, or None when the end pairs do not interlace.
    '''
    ends1 = (first.minus_end, first.plus_end)
    ends2 = (second.minus_end, second.plus_end)
    if (pointsClose(ends1[0], ends2[0], eps) and pointsClose(ends1[1], ends2[1], eps)) or \
       (pointsClose(ends1[0], ends2[1], eps) and pointsClose(ends1[1], ends2[0], eps)):
        raise CoincidentGeodesics(f'{first} and {second} share both ends')
    if any(pointsClose(p, q, eps) for p in ends1 for q in ends2):
        return None
    arc = BoundaryInterval(*ends1)
    if circularContains(arc, ends2[0]) == circularContains(arc, ends2[1]):
        return None
    M = toImaginaryAxis(*ends1)
    m1, m2 = M.applyBoundary(ends2[0]), M.applyBoundary(ends2[1])
    height = math.sqrt(-m1 * m2)
    return M.inverse().applyInterior(HPoint(0.0, height))

def hyperbolicDistance(z: HPoint, w: HPoint) -> float:
    return math.acosh(1.0 + ((z.x - w.x) ** 2 + (z.y - w.y) ** 2) / (2.0 * z.y * w.y))

def stackEntries(elements: list) -> np.ndarray:
    '''
    An (n, 4) array of the entries a, b, c, d of each element.
    '''
    if not elements:
        return np.zeros((0, 4))
    return np.array([list(g) for g in elements], dtype=float)

def applyBoundaryArray(entries: np.ndarray, x) -> np.ndarray:
    '''
    Vectorised boundary action of many elements on one point (or elementwise on an array).
    Poles map to +inf; oo maps to a/c, or stays at oo for stabilisers.
    '''
    a, b, c, d = entries[:, 0], entries[:, 1], entries[:, 2], entries[:, 3]
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        if x.ndim == 0 and math.isinf(float(x)):
            out = np.where(np.abs(c) <= EPSILON, np.inf, a / np.where(c == 0, 1.0, c))
            return out
        denom = c * x + d
        out = (a * x + b) / np.where(denom == 0, 1.0, denom)
        pole = np.abs(denom) <= EPSILON * np.maximum(1.0, np.abs(x))
        out = np.where(pole, np.inf, out)
        if x.ndim > 0:
            inf_in = np.isinf(x)
            if inf_in.any():
                out = np.where(inf_in, np.where(np.abs(c) <= EPSILON, np.inf, a / np.where(c == 0, 1.0, c)), out)
    return out

def inverseEntries(entries: np.ndarray) -> np.ndarray:
    return np.stack([entries[:, 3], -entries[:, 1], -entries[:, 2], entries[:, 0]], axis=1)
