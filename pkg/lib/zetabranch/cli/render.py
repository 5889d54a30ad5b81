'''
SVG figures of Ford domains and branch systems.
'''

import drawsvg as draw

import kizano
log = kizano.getLogger(__name__)

from zetabranch.geometry.ford import FordDomain
from zetabranch.group import formatWord
from zetabranch.branches.model import BranchSystem, Facing
from zetabranch.report import writeAtomic

MARGIN = 40
AXIS_COLOR = '#222222'
SPHERE_COLOR = '#8a8a8a'
REGION_FILL = '#cfe3f5'
ACTIVE_COLOR = '#c0392b'
BRANCH_COLOR = '#2c3e50'
FONT = 'DejaVu Sans, sans-serif'

class Viewport(object):
    '''
    Uniform scaling of the window [x_min, x_max] x [0, y_max] onto the drawing, y up.
    '''
    def __init__(self, x_min: float, x_max: float, width: int, height: int):
        self.x_min = x_min
        self.x_max = x_max
        self.width = width
        self.height = height
        self.scale = (width - 2 * MARGIN) / (x_max - x_min)
        self.baseline = height - MARGIN

    def x(self, value: float) -> float:
        return MARGIN + (value - self.x_min) * self.scale

    def y(self, value: float) -> float:
        return self.baseline - value * self.scale

    @property
    def top(self) -> float:
        return MARGIN / 2

def _axis(d: draw.Drawing, view: Viewport):
    d.append(draw.Line(MARGIN / 2, view.baseline, view.width - MARGIN / 2, view.baseline,
                       stroke=AXIS_COLOR, stroke_width=1.2, class_='real-axis'))

def _window(points: list, pad: float = 0.1) -> tuple:
    if not points:
        return (-1.0, 1.0)
    lo, hi = min(points), max(points)
    span = max(hi - lo, 1.0)
    return (lo - pad * span, hi + pad * span)

def domainDrawing(domain: FordDomain, width: int = 900, height: int = 420, strip: tuple = None) -> draw.Drawing:
    '''
    The real axis, every relevant sphere as a half circle, and K (or W, with a strip) shaded above
    the envelope. Elements are emitted left to right.
    '''
    strip = strip or (domain.strip if domain else None)
    sides = sorted(domain.sides, key=lambda s: s.x_left) if domain else []
    ends = [x for side in sides for x in (side.sphere.center - side.sphere.radius, side.sphere.center + side.sphere.radius)]
    if strip:
        ends.extend(strip)
    view = Viewport(*_window(ends), width, height)
    d = draw.Drawing(width, height)
    d.append(draw.Rectangle(0, 0, width, height, fill='white'))

    if sides:
        lo, hi = strip if strip else (view.x_min, view.x_max)
        region = draw.Path(fill=REGION_FILL, stroke='none', class_='fundamental-region')
        region.M(view.x(lo), view.top)
        region.L(view.x(lo), view.y(float(domain.heightAt(lo))))
        for side in sides:
            left, right = max(side.x_left, lo), min(side.x_right, hi)
            if right <= left:
                continue
            region.L(view.x(left), view.y(float(side.sphere.heightAt(left))))
            r = side.sphere.radius * view.scale
            region.A(r, r, 0, 0, 1, view.x(right), view.y(float(side.sphere.heightAt(right))))
        region.L(view.x(hi), view.y(float(domain.heightAt(hi))))
        region.L(view.x(hi), view.top)
        region.Z()
        d.append(region)

    for sphere in sorted(domain.relevantSpheres() if domain else [], key=lambda s: (s.center, s.radius)):
        r = sphere.radius * view.scale
        arc = draw.Path(fill='none', stroke=SPHERE_COLOR, stroke_width=1.0, class_='isometric-sphere')
        arc.M(view.x(sphere.center - sphere.radius), view.baseline)
        arc.A(r, r, 0, 0, 1, view.x(sphere.center + sphere.radius), view.baseline)
        d.append(arc)
        d.append(draw.Text(formatWord(sphere.word), 11, view.x(sphere.center), view.baseline + 16,
                           text_anchor='middle', font_family=FONT, fill=AXIS_COLOR))

    if strip:
        for wall in strip:
            d.append(draw.Line(view.x(wall), view.baseline, view.x(wall), view.top, stroke=AXIS_COLOR,
                               stroke_width=1.0, stroke_dasharray='4,4', class_='strip-wall'))
    _axis(d, view)
    return d

def branchDrawing(system: BranchSystem, width: int = 900, height: int = 420, active: list = None,
                  window: tuple = None) -> draw.Drawing:
    '''
    One vertical line per distinct base point, one stripe per branch on its facing side and the
    label C_j. Active branches are drawn in the accent color.
    '''
    active = set(active or [])
    xs = sorted({ b.x for b in system.branches })
    view = Viewport(*(window or _window(xs)), width, height)
    d = draw.Drawing(width, height)
    d.append(draw.Rectangle(0, 0, width, height, fill='white'))
    top = view.top + 10
    for x in xs:
        d.append(draw.Line(view.x(x), view.baseline, view.x(x), top, stroke=BRANCH_COLOR,
                           stroke_width=1.2, class_='branch-base'))
    stripe = 10
    ordered = sorted(system.branches, key=lambda b: (b.x, b.facing.value))
    for branch in ordered:
        color = ACTIVE_COLOR if branch.index in active else BRANCH_COLOR
        px = view.x(branch.x)
        left = px if branch.facing is Facing.RIGHT else px - stripe
        level = view.baseline - (view.baseline - top) * (0.35 if branch.facing is Facing.RIGHT else 0.65)
        d.append(draw.Rectangle(left, top, stripe, view.baseline - top, fill=color, fill_opacity=0.25,
                                stroke='none', class_='branch-stripe'))
        anchor = 'start' if branch.facing is Facing.RIGHT else 'end'
        offset = stripe + 3 if branch.facing is Facing.RIGHT else -stripe - 3
        d.append(draw.Text(branch.label(), 12, px + offset, level, text_anchor=anchor, font_family=FONT,
                           fill=color, class_='branch-label'))
    _axis(d, view)
    return d

def renderDomain(domain: FordDomain, path: str, width: int = 900, height: int = 420, strip: tuple = None) -> str:
    d = domainDrawing(domain, width, height, strip)
    log.info(f'Writing {path}')
    return writeAtomic(path, d.as_svg())

def renderBranches(system: BranchSystem, path: str, width: int = 900, height: int = 420, active: list = None,
                   window: tuple = None) -> str:
    d = branchDrawing(system, width, height, active, window)
    log.info(f'Writing {path}')
    return writeAtomic(path, d.as_svg())
