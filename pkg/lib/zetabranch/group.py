'''
Finitely generated groups of Moebius transformations: word balls, approximate membership and
primitive hyperbolic conjugacy classes.

Words are tuples of (label, exponent) letters with exponent +1 or -1; `formatWord` renders them
as "h*s*h^-1" and the identity as "id".
'''

import math
import enum
from typing import NamedTuple, Optional

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import Moebius, EPSILON, keyDigits, stackEntries
from zetabranch.errors import BallTooLarge, IdentityGenerator, ParseError

class Generator(NamedTuple):
    label: str
    element: Moebius

class GroupPresentation(NamedTuple):
    '''
    Labelled generators with the tolerance and default word cutoff used to enumerate the group.
    '''
    generators: tuple
    epsilon: float = EPSILON
    word_cutoff: int = 6
    name: str = ''

    @classmethod
    def of(cls, generators: list, epsilon: float = EPSILON, word_cutoff: int = 6, name: str = '') -> 'GroupPresentation':
        gens = []
        seen = set()
        for item in generators:
            label, element = item if isinstance(item, (tuple, list)) else (item.label, item.element)
            if label in seen:
                raise ParseError(f'Duplicate generator label "{label}"')
            if element.isIdentity(epsilon):
                raise IdentityGenerator(f'Generator "{label}" is the identity')
            seen.add(label)
            gens.append(Generator(label, element))
        return cls(tuple(gens), epsilon, word_cutoff, name)

    def labels(self) -> list:
        return [g.label for g in self.generators]

    def element(self, label: str) -> Moebius:
        for g in self.generators:
            if g.label == label:
                return g.element
        raise KeyError(label)

    def letters(self) -> list:
        '''
        The alphabet in enumeration order: each generator followed by its inverse.
        '''
        result = []
        for g in self.generators:
            result.append(((g.label, 1), g.element))
            result.append(((g.label, -1), g.element.inverse()))
        return result

    def involutions(self) -> set:
        return { g.label for g in self.generators if g.element.compose(g.element).isIdentity(self.epsilon) }

    def evaluate(self, word: tuple) -> Moebius:
        result = Moebius.identity()
        for label, exp in word:
            result = result.compose(self.element(label).power(exp))
        return result

def formatWord(word: tuple) -> str:
    if not word:
        return 'id'
    return '*'.join(label if exp == 1 else f'{label}^{exp}' for label, exp in word)

def _splitFactors(text: str) -> list:
    factors, depth, current = [], 0, ''
    for char in text:
        if char == '(':
            depth += 1
        elif char == ')':
            depth -= 1
        if char == '*' and depth == 0:
            factors.append(current)
            current = ''
        else:
            current += char
    factors.append(current)
    return factors

def parseWord(text: str) -> tuple:
    '''
    Inverse of formatWord. Powers like "h^3" expand into repeated letters.
    '''
    text = text.strip()
    if text in ('', 'id'):
        return ()
    word = []
    for factor in _splitFactors(text):
        factor = factor.strip()
        label, exp = factor, 1
        if '^' in factor and not factor.endswith(')'):
            label, _, power = factor.rpartition('^')
            try:
                exp = int(power)
            except ValueError:
                raise ParseError(f'Bad exponent in word factor "{factor}"')
        if not label or exp == 0:
            raise ParseError(f'Bad word factor "{factor}"')
        word.extend([(label, 1 if exp > 0 else -1)] * abs(exp))
    return tuple(word)

def invertWord(word: tuple) -> tuple:
    return tuple((label, -exp) for label, exp in reversed(word))

class WordBall(object):
    '''
    Deduplicated elements of word length at most `cutoff`, each with its shortlex-least word,
    stored in enumeration order (length, then lexicographic in the alphabet order).
    '''
    def __init__(self, group: GroupPresentation, cutoff: int):
        self.group = group
        self.cutoff = cutoff
        self.elements = []
        self.words = []
        self._index = {}
        self._entries = None
        self._digits = keyDigits(group.epsilon)

    def _add(self, element: Moebius, word: tuple) -> bool:
        key = element.key(self._digits)
        if key in self._index:
            return False
        self._index[key] = len(self.elements)
        self.elements.append(element)
        self.words.append(word)
        self._entries = None
        return True

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.elements, self.words))

    def entries(self) -> np.ndarray:
        if self._entries is None:
            self._entries = stackEntries(self.elements)
        return self._entries

    def lookup(self, g: Moebius) -> Optional[tuple]:
        '''
        The stored word of an element equal to g within epsilon, or None.
        '''
        position = self._index.get(g.key(self._digits))
        if position is not None:
            return self.words[position]
        # rounding can split equal elements across a digit boundary
        entries = self.entries()
        if not len(entries):
            return None
        target = np.array(list(g))
        tol = self.group.epsilon * np.maximum(1.0, np.maximum(np.abs(entries).max(axis=1), np.abs(target).max()))
        hits = np.nonzero(np.all(np.abs(entries - target) <= tol[:, None], axis=1))[0]
        if len(hits):
            return self.words[int(hits[0])]
        return None

    def wordLength(self, position: int) -> int:
        return len(self.words[position])

    def nonIdentity(self) -> list:
        return [(g, w) for g, w in self if w]

    def traces(self) -> np.ndarray:
        entries = self.entries()
        return np.abs(entries[:, 0] + entries[:, 3])

    def restrict(self, cutoff: int) -> 'WordBall':
        '''
        The sub-ball of words no longer than cutoff, in the same order.
        '''
        ball = WordBall(self.group, cutoff)
        for g, w in self:
            if len(w) <= cutoff:
                ball._add(g, w)
        return ball

def _canonicalArray(products: np.ndarray, eps: float) -> np.ndarray:
    '''
    Row-wise canonical sign of an (n, 4) entry array.
    '''
    mags = np.abs(products)
    biggest = mags.max(axis=1, keepdims=True)
    first = np.argmax(mags >= biggest - eps, axis=1)
    signs = np.sign(products[np.arange(len(products)), first])
    signs[signs == 0] = 1.0
    return products * signs[:, None] + 0.0

def enumerateBall(group: GroupPresentation, cutoff: int = None, max_ball: int = 250000) -> WordBall:
    '''
    Breadth-first enumeration of every product of at most `cutoff` generators and inverses.
    Each frontier is expanded in shortlex order so the first word reaching an element is its
    shortlex-least word.
    '''
    if cutoff is None:
        cutoff = group.word_cutoff
    if cutoff < 0:
        raise ValueError(f'Word cutoff must be non-negative, got {cutoff}')
    ball = WordBall(group, cutoff)
    ball._add(Moebius.identity(), ())
    letters = group.letters()
    letter_mats = np.array([list(m) for _, m in letters], dtype=float).reshape(-1, 2, 2)
    frontier = [0]
    for length in range(1, cutoff + 1):
        if not frontier:
            break
        current = ball.entries()[frontier].reshape(-1, 2, 2)
        products = np.einsum('fij,ljk->flik', current, letter_mats).reshape(-1, 4)
        products = _canonicalArray(products, group.epsilon)
        next_frontier = []
        for row, entries in enumerate(products):
            parent = frontier[row // len(letters)]
            letter = letters[row % len(letters)][0]
            element = Moebius(*entries.tolist())
            if ball._add(element, ball.words[parent] + (letter,)):
                next_frontier.append(len(ball) - 1)
                if len(ball) > max_ball:
                    raise BallTooLarge(f'Word ball exceeds {max_ball} elements at length {length}')
        frontier = next_frontier
        log.debug(f'Word length {length}: {len(next_frontier)} new elements, {len(ball)} total.')
    log.info(f'Enumerated {len(ball)} elements of {group.name or "the group"} up to word length {cutoff}.')
    return ball

class MembershipStatus(enum.Enum):
    YES = 'Yes'
    UNKNOWN = 'Unknown'

class Membership(NamedTuple):
    status: MembershipStatus
    word: Optional[tuple] = None

    def __bool__(self):
        return self.status is MembershipStatus.YES

def containsUpTo(group: GroupPresentation, g: Moebius, cutoff: int = None, ball: WordBall = None) -> Membership:
    '''
    Semi-decide g in the group: Yes with a witness word when g is in the cutoff ball, else Unknown.
    '''
    if ball is None or (cutoff is not None and ball.cutoff < cutoff):
        ball = enumerateBall(group, cutoff)
    word = ball.lookup(g)
    if word is None:
        return Membership(MembershipStatus.UNKNOWN)
    if cutoff is not None and len(word) > cutoff:
        return Membership(MembershipStatus.UNKNOWN)
    return Membership(MembershipStatus.YES, word)

class ConjClass(NamedTuple):
    representative: Moebius
    word: tuple
    trace: float
    length: float
    primitive: bool
    # cyclically reduced, rotated to its least form; equal for conjugate words
    cyclic_word: tuple = ()

def _reduceCyclic(word: tuple, involutions: set) -> tuple:
    letters = [(label, 1) if label in involutions else (label, exp) for label, exp in word]
    def cancels(x, y):
        if x[0] != y[0]:
            return False
        return x[1] == -y[1] or x[0] in involutions
    changed = True
    while changed:
        changed = False
        stack = []
        for letter in letters:
            if stack and cancels(stack[-1], letter):
                stack.pop()
                changed = True
            else:
                stack.append(letter)
        while len(stack) > 1 and cancels(stack[0], stack[-1]):
            stack = stack[1:-1]
            changed = True
        letters = stack
    return tuple(letters)

def cyclicWord(word: tuple, group: GroupPresentation) -> tuple:
    '''
    Canonical rotation of the cyclically reduced word, least in the alphabet order.
    '''
    reduced = _reduceCyclic(word, group.involutions())
    if not reduced:
        return ()
    order = { letter: i for i, (letter, _) in enumerate(group.letters()) }
    rotations = [reduced[i:] + reduced[:i] for i in range(len(reduced))]
    return min(rotations, key=lambda w: [order.get(l, len(order)) for l in w])

def isProperPower(word: tuple) -> bool:
    n = len(word)
    for period in range(1, n // 2 + 1):
        if n % period == 0 and word[:period] * (n // period) == word:
            return True
    return False

def _conjugates(target: Moebius, candidate: Moebius, conjugators: np.ndarray, eps: float) -> bool:
    '''
    Some q with q.target.q^-1 equal to candidate.
    '''
    Q = conjugators.reshape(-1, 2, 2)
    Qinv = np.stack([conjugators[:, 3], -conjugators[:, 1], -conjugators[:, 2], conjugators[:, 0]], axis=1).reshape(-1, 2, 2)
    R = np.array(list(target)).reshape(2, 2)
    images = (Q @ R @ Qinv).reshape(-1, 4)
    goal = np.array(list(candidate))
    tol = eps * np.maximum(1.0, np.abs(images).max(axis=1)) * 1e2
    same = np.all(np.abs(images - goal) <= tol[:, None], axis=1)
    opposite = np.all(np.abs(images + goal) <= tol[:, None], axis=1)
    return bool(np.any(same | opposite))

def hyperbolicFixedPoints(entries: np.ndarray, eps: float = EPSILON) -> tuple:
    '''
    Vectorised (f_plus, f_minus) arrays for the rows of `entries` with |tr| > 2 + eps, with the
    boolean mask of those rows. oo appears as +inf.
    '''
    a, b, c, d = entries.T
    trace = a + d
    mask = np.abs(trace) > 2.0 + eps
    disc = np.sqrt(np.where(mask, trace ** 2 - 4.0, 0.0))
    stab = np.abs(c) <= eps
    safe_c = np.where(stab, 1.0, c)
    r1 = ((a - d) + disc) / (2.0 * safe_c)
    r2 = ((a - d) - disc) / (2.0 * safe_c)
    first_attracts = np.abs(c * r1 + d) > np.abs(c * r2 + d)
    f_plus = np.where(first_attracts, r1, r2)
    f_minus = np.where(first_attracts, r2, r1)
    # c = 0: z -> (a/d)z + b/d, oo attracts iff |a| > |d|
    with np.errstate(divide='ignore', invalid='ignore'):
        finite = b / np.where(d - a == 0, 1.0, d - a)
    inf_attracts = np.abs(a) > np.abs(d)
    f_plus = np.where(stab, np.where(inf_attracts, np.inf, finite), f_plus)
    f_minus = np.where(stab, np.where(inf_attracts, finite, np.inf), f_minus)
    return f_plus, f_minus, mask

def fixedPairs(ball: WordBall) -> list:
    '''
    Deduplicated (f_plus, f_minus) of every hyperbolic ball element, in ball order.
    '''
    eps = ball.group.epsilon
    f_plus, f_minus, mask = hyperbolicFixedPoints(ball.entries(), eps)
    digits = keyDigits(eps) - 2
    seen = set()
    result = []
    for i in np.nonzero(mask)[0]:
        pair = (float(f_plus[i]), float(f_minus[i]))
        key = tuple(round(p, digits) + 0.0 if math.isfinite(p) else p for p in pair)
        if key not in seen:
            seen.add(key)
            result.append(pair)
    return result

def limitPoints(ball: WordBall) -> np.ndarray:
    '''
    Sorted distinct hyperbolic fixed points of the ball; +inf sorts last when present.
    '''
    pairs = fixedPairs(ball)
    if not pairs:
        return np.zeros(0)
    points = np.sort(np.array(pairs, dtype=float).ravel())
    keep = np.ones(len(points), dtype=bool)
    finite = np.isfinite(points)
    gaps = np.diff(points)
    scale = np.maximum(1.0, np.abs(points[1:]))
    with np.errstate(invalid='ignore'):
        keep[1:] = ~((gaps <= ball.group.epsilon * 10 * scale) & finite[1:] & finite[:-1])
    keep[1:] &= ~(np.isinf(points[1:]) & np.isinf(points[:-1]))
    return points[keep]

def primitiveHyperbolicClasses(group: GroupPresentation, l_max: float, cutoff: int = None,
                               ball: WordBall = None, conjugator_cutoff: int = 3,
                               include_imprimitive: bool = False) -> list:
    '''
    One ConjClass per conjugacy class of hyperbolic elements with translation length at most l_max
    that the cutoff ball reaches. Classes merge when their cyclic words agree, or when traces agree
    and a conjugator of length at most conjugator_cutoff carries one onto the other.
    h and h^-1 stay distinct unless such a conjugator exists.
    '''
    if l_max <= 0:
        raise ValueError(f'l_max must be positive, got {l_max}')
    if ball is None:
        ball = enumerateBall(group, cutoff)
    eps = group.epsilon
    conjugators = enumerateBall(group, min(conjugator_cutoff, ball.cutoff)).entries()
    entries = ball.entries()
    f_plus, f_minus, mask = hyperbolicFixedPoints(entries, eps)
    traces = np.abs(entries[:, 0] + entries[:, 3])
    lengths = np.where(mask, 2.0 * np.arccosh(np.maximum(traces, 2.0) / 2.0), np.inf)
    # shortest translation length seen on each axis, for primitivity
    digits = keyDigits(eps) - 3
    axis_min = {}
    axis_keys = {}
    for i in np.nonzero(mask)[0]:
        ends = sorted((float(f_plus[i]), float(f_minus[i])))
        key = tuple(round(p, digits) + 0.0 if math.isfinite(p) else p for p in ends)
        axis_keys[i] = key
        axis_min[key] = min(axis_min.get(key, math.inf), lengths[i])

    classes = []
    by_cyclic = {}
    for i in np.nonzero(mask & (lengths <= l_max + eps))[0]:
        word = ball.words[i]
        cyc = cyclicWord(word, group)
        if cyc in by_cyclic:
            continue
        element = ball.elements[i]
        primitive = not isProperPower(cyc) and lengths[i] <= axis_min[axis_keys[i]] + 1e-7
        if not primitive and not include_imprimitive:
            by_cyclic[cyc] = None
            continue
        merged = False
        for idx, cls in enumerate(classes):
            if abs(cls.trace - traces[i]) > 1e-7 * max(1.0, traces[i]):
                continue
            if _conjugates(cls.representative, element, conjugators, eps):
                by_cyclic[cyc] = idx
                merged = True
                break
        if merged:
            continue
        by_cyclic[cyc] = len(classes)
        classes.append(ConjClass(element, word, float(traces[i]), float(lengths[i]), primitive, cyc))
    classes.sort(key=lambda c: (round(c.length, 9), round(c.trace, 9), formatWord(c.word)))
    log.info(f'Found {len(classes)} hyperbolic classes of length <= {l_max} at word length {ball.cutoff}.')
    return classes
