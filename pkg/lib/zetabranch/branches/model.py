'''
Branches over vertical geodesics, branch systems with their transition sets, and the JSON
branch-system file format.
'''

import enum
import json
from typing import NamedTuple, Optional

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import Moebius, BoundaryInterval, Geodesic, INFINITY
from zetabranch.group import GroupPresentation, formatWord, parseWord
from zetabranch.errors import ParseError, BadDeterminant, IoError
from zetabranch.report import dumps, writeAtomic

class Facing(enum.Enum):
    LEFT = 'Left'
    RIGHT = 'Right'

    def opposite(self) -> 'Facing':
        return Facing.LEFT if self is Facing.RIGHT else Facing.RIGHT

class Provenance(enum.Enum):
    CONSTRUCTED = 'Constructed'
    USER_SUPPLIED = 'UserSupplied'

class Branch(NamedTuple):
    '''
    Unit tangent vectors on the vertical geodesic over x pointing into the half-plane on the
    `facing` side. I is the boundary arc of that half-plane, J the complementary arc.
    '''
    index: int
    x: float
    facing: Facing

    @property
    def I(self) -> BoundaryInterval:
        if self.facing is Facing.RIGHT:
            return BoundaryInterval(self.x, INFINITY)
        return BoundaryInterval(INFINITY, self.x)

    @property
    def J(self) -> BoundaryInterval:
        return self.I.complement()

    def base(self) -> Geodesic:
        return Geodesic(self.x, INFINITY)

    def label(self) -> str:
        return f'C{self.index}'

class Transition(NamedTuple):
    element: Moebius
    word: Optional[tuple] = None

    def describe(self) -> str:
        return formatWord(self.word) if self.word is not None else str(self.element)

class FirstReturn(NamedTuple):
    t_plus: float
    g_plus: Moebius
    k_plus: int
    word: tuple = ()

class BranchSystem(NamedTuple):
    branches: tuple
    group: GroupPresentation
    transitions: dict
    provenance: Provenance = Provenance.CONSTRUCTED
    stats: Optional[dict] = None

    def indices(self) -> list:
        return [b.index for b in self.branches]

    def branch(self, index: int) -> Branch:
        for b in self.branches:
            if b.index == index:
                return b
        raise KeyError(index)

    def transitionsFrom(self, j: int) -> list:
        '''
        (k, Transition) pairs of every g in G(j, k).
        '''
        return [(k, t) for (jj, k), items in sorted(self.transitions.items()) if jj == j for t in items]

    def transitionsInto(self, k: int) -> list:
        return [(j, t) for (j, kk), items in sorted(self.transitions.items()) if kk == k for t in items]

    def transitionCount(self) -> int:
        return sum(len(v) for v in self.transitions.values())

    def cardinalities(self) -> dict:
        return { f'{j},{k}': len(v) for (j, k), v in sorted(self.transitions.items()) }

    def restricted(self, keep: list) -> 'BranchSystem':
        keep = set(keep)
        branches = tuple(b for b in self.branches if b.index in keep)
        transitions = { key: list(v) for key, v in self.transitions.items() if key[0] in keep and key[1] in keep }
        return self._replace(branches=branches, transitions=transitions)

def numberBranches(candidates: list) -> list:
    '''
    Index branches from 1: right-facing ones left to right, then left-facing ones right to left.
    '''
    right = sorted(x for x, facings in candidates if Facing.RIGHT in facings)
    left = sorted((x for x, facings in candidates if Facing.LEFT in facings), reverse=True)
    branches = [Branch(i + 1, x, Facing.RIGHT) for i, x in enumerate(right)]
    branches += [Branch(len(right) + i + 1, x, Facing.LEFT) for i, x in enumerate(left)]
    return branches

def matrixFromEntries(entries, context: str, eps: float) -> Moebius:
    if not isinstance(entries, (list, tuple)) or len(entries) != 4:
        raise ParseError(f'{context}: expected a row-major list of four reals')
    try:
        a, b, c, d = (float(v) for v in entries)
    except (TypeError, ValueError):
        raise ParseError(f'{context}: matrix entries must be numbers')
    det = a * d - b * c
    if det <= eps:
        raise BadDeterminant(f'{context}: determinant {det} is not positive', { 'entries': entries, 'determinant': det })
    norm = det ** 0.5
    return Moebius.fromEntries(a / norm, b / norm, c / norm, d / norm)

def systemToDict(system: BranchSystem, group_ref: str = None) -> dict:
    return {
        'group_ref': group_ref or system.group.name,
        'provenance': system.provenance.value,
        'branches': [{ 'index': b.index, 'x': b.x, 'facing': b.facing.value } for b in system.branches],
        'transitions': {
            f'{j},{k}': [
                { 'matrix': t.element.asList(), 'word': formatWord(t.word) if t.word is not None else None }
                for t in items
            ]
            for (j, k), items in sorted(system.transitions.items())
        },
    }

def systemFromDict(data: dict, group: GroupPresentation) -> BranchSystem:
    '''
    Load a branch system. Transitions may be given as bare four-entry matrices or as objects with
    `matrix` and optional `word`; branches without an index are numbered in file order.
    '''
    eps = group.epsilon
    if not isinstance(data, dict) or 'branches' not in data:
        raise ParseError('Branch system needs a "branches" list')
    branches = []
    for i, item in enumerate(data['branches']):
        try:
            facing = Facing(str(item['facing']).capitalize())
            x = float(item['x'])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f'Branch {i + 1}: {e}')
        branches.append(Branch(int(item.get('index', i + 1)), x, facing))
    indices = { b.index for b in branches }
    transitions = {}
    for key, items in (data.get('transitions') or {}).items():
        try:
            j, k = (int(v) for v in str(key).split(','))
        except ValueError:
            raise ParseError(f'Transition key "{key}" is not "j,k"')
        if j not in indices or k not in indices:
            raise ParseError(f'Transition key "{key}" names an unknown branch')
        for n, item in enumerate(items):
            context = f'transition {key}[{n}]'
            if isinstance(item, dict):
                element = matrixFromEntries(item.get('matrix'), context, eps)
                word = parseWord(item['word']) if item.get('word') else None
            else:
                element, word = matrixFromEntries(item, context, eps), None
            transitions.setdefault((j, k), []).append(Transition(element, word))
    provenance = Provenance(data.get('provenance', Provenance.USER_SUPPLIED.value))
    log.debug(f'Loaded {len(branches)} branches with {sum(len(v) for v in transitions.values())} transitions.')
    return BranchSystem(tuple(branches), group, transitions, provenance, {})

def saveBranchSystem(system: BranchSystem, path: str, group_ref: str = None) -> str:
    return writeAtomic(path, dumps(systemToDict(system, group_ref)))

def loadBranchSystem(path: str, group: GroupPresentation) -> BranchSystem:
    try:
        with open(path, 'r') as handle:
            data = json.load(handle)
    except OSError as e:
        raise IoError(f'Cannot read {path}: {e}') from e
    except json.JSONDecodeError as e:
        raise ParseError(f'{path}: {e}') from e
    return systemFromDict(data, group)
