'''
Truncated Euler products Z(s) = prod_classes prod_{k=0..K} (1 - e^{-(s+k) l}) over enumerated
primitive hyperbolic classes, and the comparison against Fredholm determinants.
'''

import math
from typing import NamedTuple

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.group import formatWord
from zetabranch.spectral.transfer import TransferOperator, fredholmDet
from zetabranch.report import check

# Safety factor on the heuristic tail estimate.
TAIL_SAFETY = 2.0

class ZetaTruncation(NamedTuple):
    classes: tuple
    l_max: float
    cutoff: int
    depth: int
    s: complex
    value: complex
    bound: float

CONVENTIONS = {
    'distinct': lambda det, z: (det, z),
    'squared': lambda det, z: (det, z * z),
    'root': lambda det, z: (det * det, z),
}

def tailBound(lengths: list, s: complex, depth: int, l_max: float = None) -> float:
    '''
    Relative error estimate of the truncated product: the omitted factors k > K of the given
    classes, plus the classes longer than l_max extrapolated from the growth of the class count.
    '''
    sigma = complex(s).real
    lengths = [l for l in lengths if l > 0]
    tail = sum(math.exp(-(sigma + depth + 1) * l) / (1.0 - math.exp(-l)) for l in lengths)
    if l_max is not None and lengths:
        total = len(lengths)
        half = sum(1 for l in lengths if l <= l_max / 2.0)
        delta = math.log(total / half) / (l_max / 2.0) if half else 1.0
        delta = min(max(delta, 0.0), 1.0)
        if delta > 0:
            if sigma <= delta:
                return math.inf
            scale = total * math.exp(-delta * l_max)
            tail += scale * delta * math.exp((delta - sigma) * l_max) / (sigma - delta)
    return TAIL_SAFETY * tail

def selbergZetaTruncated(classes: list, s: complex, depth: int = 40, l_max: float = None,
                         cutoff: int = None) -> ZetaTruncation:
    s = complex(s)
    if s.real <= 0:
        raise ValueError(f'The truncated product needs Re s > 0, got {s}')
    imprimitive = [formatWord(c.word) for c in classes if not c.primitive]
    if imprimitive:
        log.warning(f'Imprimitive classes in the product: {", ".join(imprimitive[:5])}')
    ks = np.arange(depth + 1)
    total = 0.0 + 0.0j
    for cls in classes:
        total += np.sum(np.log1p(-np.exp(-(s + ks) * cls.length)))
    value = complex(np.exp(total))
    bound = tailBound([c.length for c in classes], s, depth, l_max)
    return ZetaTruncation(tuple(formatWord(c.word) for c in classes), l_max, cutoff, depth, s, value, bound)

def _relative(a: complex, b: complex) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a / b - 1.0)

def compareDetVsZeta(operator: TransferOperator, classes: list, s_values: list, depth: int = 40,
                     l_max: float = None, cutoff: int = None, tol: float = 1e-6) -> dict:
    '''
    Per s: det(I - L_s), the truncated product and their relative discrepancy. The counting
    convention (det = Z, det = Z^2 or det^2 = Z) is the one with the smallest worst-case
    discrepancy; a row passes when that discrepancy is within max(tol, tail bound). A row whose
    tail bound is infinite fails and is marked inconclusive.
    '''
    rows = []
    for s in s_values:
        det = fredholmDet(operator.matrix(s)).det
        zeta = selbergZetaTruncated(classes, s, depth, l_max, cutoff)
        rows.append((complex(s), det, zeta))
    scores = {}
    for name, convention in CONVENTIONS.items():
        errors = [_relative(*convention(det, zeta.value)) for _, det, zeta in rows]
        scores[name] = max(errors) if errors else 0.0
    best = min(CONVENTIONS, key=lambda name: (scores[name], name != 'distinct'))
    if best != 'distinct':
        log.warning(f'Determinant matches the zeta product under the "{best}" convention.')

    entries = []
    for s, det, zeta in rows:
        lhs, rhs = CONVENTIONS[best](det, zeta.value)
        rel = _relative(lhs, rhs)
        bound = zeta.bound * (2.0 if best != 'distinct' else 1.0)
        conclusive = math.isfinite(bound)
        entries.append(check(conclusive and rel <= max(tol, bound), inconclusive=not conclusive, s=s, det=det,
                             zeta=zeta.value, compared=rhs, abs_err=abs(lhs - rhs), rel_err=rel, tail_bound=bound))
        log.info(f's = {s}: det = {det:.12g}, Z = {zeta.value:.12g}, rel err {rel:.3g} (tail {bound:.3g})')
    return {
        'convention': best,
        'scores': scores,
        'classes': len(classes),
        'depth': depth,
        'l_max': l_max,
        'rows': entries,
    }

def csvRows(comparison: dict) -> list:
    '''
    zeta.csv rows: re_s, im_s, det_re, det_im, zeta_re, zeta_im, rel_err, tail_bound.
    '''
    result = []
    for row in comparison['rows']:
        result.append([row['s'].real, row['s'].imag, row['det'].real, row['det'].imag,
                       row['compared'].real, row['compared'].imag, row['rel_err'], row['tail_bound']])
    return result
