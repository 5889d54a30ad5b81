import json

import pytest

from zetabranch.moebius import Moebius
from zetabranch.group import enumerateBall, primitiveHyperbolicClasses, fixedPairs, formatWord
from zetabranch.geometry.auxiliary import buildAuxiliary
from zetabranch.branches.model import (
    Facing, Provenance, Branch, Transition, numberBranches, systemFromDict,
    saveBranchSystem, loadBranchSystem
)
from zetabranch.branches.construct import (
    candidateBasePoints, initialSystem, pruneToActive, constructBranchSystem, Shooter
)
from zetabranch.branches.verify import verifyBranchProperties, checkGroupDescent
from zetabranch.errors import EmptyActiveSet, ParseError, IoError, BadDeterminant

from conftest import BETA_PRIME_2, ROOT2, hecke

OUTER = 3.0 + 2.0 * ROOT2

@pytest.fixture(scope='module')
def hecke_classes(hecke_group, hecke_ball):
    return primitiveHyperbolicClasses(hecke_group, 6.0, ball=hecke_ball)

@pytest.fixture(scope='module')
def hecke_system(hecke_group, hecke_ball, hecke_classes):
    aux = buildAuxiliary(hecke_group, hecke_ball)
    return constructBranchSystem(aux, hecke_ball, hecke_classes, grid=8)

def test_candidates(hecke_group, hecke_ball):
    aux = buildAuxiliary(hecke_group, hecke_ball)
    candidates = candidateBasePoints(aux)
    assert [c.x for c in candidates] == pytest.approx([-BETA_PRIME_2, -OUTER, -3.0, 0.0, 3.0, OUTER, BETA_PRIME_2])
    both = frozenset((Facing.LEFT, Facing.RIGHT))
    assert [c.facings == both for c in candidates] == [True, True, False, False, False, True, True]

def test_branch_numbering(hecke_group, hecke_ball):
    system = initialSystem(buildAuxiliary(hecke_group, hecke_ball))
    assert len(system.branches) == 11
    right = [b for b in system.branches if b.facing is Facing.RIGHT]
    left = [b for b in system.branches if b.facing is Facing.LEFT]
    assert [b.index for b in right] == list(range(1, 8))
    assert [b.x for b in right] == sorted(b.x for b in right)
    assert [b.index for b in left] == list(range(8, 12))
    assert [b.x for b in left] == pytest.approx([BETA_PRIME_2, OUTER, -OUTER, -BETA_PRIME_2])
    assert system.branch(4).x == pytest.approx(0.0)
    assert system.branch(4).label() == 'C4'

def test_number_branches_orders_left_facing_descending():
    branches = numberBranches([(1.0, {Facing.LEFT}), (-1.0, {Facing.LEFT, Facing.RIGHT})])
    assert branches == [Branch(1, -1.0, Facing.RIGHT), Branch(2, 1.0, Facing.LEFT), Branch(3, -1.0, Facing.LEFT)]

def test_intervals_of_a_branch():
    right = Branch(1, 2.0, Facing.RIGHT)
    assert right.I.contains(5.0) and not right.I.contains(0.0)
    assert right.J.contains(0.0) and not right.J.contains(5.0)
    left = Branch(2, 2.0, Facing.LEFT)
    assert left.I.contains(0.0)
    assert Facing.LEFT.opposite() is Facing.RIGHT

def test_prune_to_active(hecke_system):
    assert hecke_system.indices() == [4]
    assert hecke_system.stats['active'] == [4]
    assert hecke_system.provenance is Provenance.CONSTRUCTED

def test_transitions_of_the_example(hecke_system):
    assert list(hecke_system.transitions.keys()) == [(4, 4)]
    (transition,) = hecke_system.transitions[(4, 4)]
    assert formatWord(transition.word) == 'h'
    assert transition.element.isClose(hecke())
    assert hecke_system.cardinalities() == { '4,4': 1 }
    assert hecke_system.stats['unresolved_count'] == 0

def test_cyclic_active_branches(cyclic_group, cyclic_ball):
    aux = buildAuxiliary(cyclic_group, cyclic_ball)
    classes = primitiveHyperbolicClasses(cyclic_group, 6.0, ball=cyclic_ball)
    system = pruneToActive(initialSystem(aux), classes, fixedPairs(cyclic_ball))
    inner = 3.0 - 2.0 * ROOT2
    assert len(system.branches) == 4
    assert sorted(b.x for b in system.branches) == pytest.approx([-inner, -inner, inner, inner])
    assert { b.facing for b in system.branches } == { Facing.LEFT, Facing.RIGHT }

def test_empty_active_set(hecke_group, hecke_ball):
    system = initialSystem(buildAuxiliary(hecke_group, hecke_ball))
    with pytest.raises(EmptyActiveSet):
        pruneToActive(system, [])
    far = system.restricted([1])
    with pytest.raises(EmptyActiveSet):
        pruneToActive(far, [], [(1.0, -1.0)])

def test_shooter_first_return(hecke_system, hecke_ball):
    shooter = Shooter(hecke_system, hecke_ball)
    assert shooter.baseTime(4, 1.0, -1.0) == pytest.approx(0.0)
    status, ret = shooter.firstReturn(4, 1.0, -1.0)
    assert status == 'ok'
    assert ret.k_plus == 4
    assert formatWord(ret.word) == 'h'
    # along the axis of h the return time is its translation length
    assert ret.t_plus == pytest.approx(hecke().translationLength())

def test_branch_properties_hold(hecke_system, hecke_ball, hecke_classes):
    report = verifyBranchProperties(hecke_system, hecke_ball, hecke_classes, samples=10)
    for name in ('B1', 'B2', 'B3', 'B4', 'B5', 'B6', 'B7a', 'B7b', 'B7c', 'periodic_geodesics_meet'):
        assert report[name]['passed'], name
    assert report['branches'] == [4]

def test_branch_properties_report_missing_transitions(hecke_system, hecke_ball, hecke_classes):
    bare = hecke_system._replace(transitions={})
    report = verifyBranchProperties(bare, hecke_ball, hecke_classes, samples=5)
    assert report['B1']['passed']
    assert not report['B7a']['passed']
    assert report['B7a']['uncovered'] == [{ 'j': 4, 'point': pytest.approx(1.0) }]
    assert not report['B7c']['passed']

def test_group_descent(hecke_system, hecke_group, hecke_ball):
    report = checkGroupDescent(hecke_system, hecke_group, cutoff=6, ball=hecke_ball)
    assert report['membership']['passed']
    assert report['membership']['words'] == [{ 'j': 4, 'k': 4, 'word': 'h' }]
    assert report['membership']['longest_word'] == 1
    assert report['two_translates_cover']['passed']

@pytest.fixture(scope='module')
def cyclic_deep(cyclic_group):
    ball = enumerateBall(cyclic_group, 8)
    classes = primitiveHyperbolicClasses(cyclic_group, 6.0, ball=ball)
    return ball, classes, buildAuxiliary(cyclic_group, ball)

def test_cyclic_branch_properties_at_grid_32(cyclic_deep):
    ball, classes, aux = cyclic_deep
    system = constructBranchSystem(aux, ball, classes, grid=32)
    assert len(system.branches) == 4
    report = verifyBranchProperties(system, ball, classes, samples=20)
    for name in ('B1', 'B2', 'B3', 'B4', 'B5', 'B6', 'B7a', 'B7b', 'B7c', 'periodic_geodesics_meet'):
        assert report[name]['passed'], name

def test_example_branch_properties_at_cutoff_8(hecke_group):
    ball = enumerateBall(hecke_group, 8)
    classes = primitiveHyperbolicClasses(hecke_group, 6.0, ball=ball)
    system = constructBranchSystem(buildAuxiliary(hecke_group, ball), ball, classes, grid=32)
    assert system.cardinalities() == { '4,4': 1 }
    report = verifyBranchProperties(system, ball, classes, samples=20)
    for name in ('B1', 'B2', 'B3', 'B4', 'B5', 'B6', 'B7a', 'B7b', 'B7c', 'periodic_geodesics_meet'):
        assert report[name]['passed'], name

def test_cardinalities_stable_from_grid_32_to_64(cyclic_deep, hecke_group, hecke_ball, hecke_classes):
    ball, classes, aux = cyclic_deep
    coarse = constructBranchSystem(aux, ball, classes, grid=32)
    fine = constructBranchSystem(aux, ball, classes, grid=64)
    assert coarse.cardinalities()
    assert coarse.cardinalities() == fine.cardinalities()
    assert all(n >= 1 for n in fine.cardinalities().values())
    hecke_aux = buildAuxiliary(hecke_group, hecke_ball)
    assert constructBranchSystem(hecke_aux, hecke_ball, hecke_classes, grid=64).cardinalities() == { '4,4': 1 }

def test_cyclic_group_descent(cyclic_deep, cyclic_group):
    ball, classes, aux = cyclic_deep
    system = constructBranchSystem(aux, ball, classes, grid=32)
    report = checkGroupDescent(system, cyclic_group, cutoff=8, ball=ball)
    assert report['membership']['passed']
    assert report['two_translates_cover']['passed']

def test_group_descent_unknown_element(hecke_system, hecke_group, hecke_ball):
    foreign = Moebius.fromEntries(3.0, 8.0, 1.0, 3.0)
    system = hecke_system._replace(transitions={ (4, 4): [Transition(foreign)] })
    report = checkGroupDescent(system, hecke_group, cutoff=6, ball=hecke_ball)
    assert not report['membership']['passed']
    assert report['membership']['unknown'][0]['element'] == pytest.approx([3.0, 8.0, 1.0, 3.0])

def test_save_and_load(tmp_path, hecke_system, hecke_group):
    path = saveBranchSystem(hecke_system, str(tmp_path / 'branches.json'))
    data = json.loads(open(path).read())
    assert data['provenance'] == 'Constructed'
    assert data['transitions']['4,4'][0]['word'] == 'h'
    loaded = loadBranchSystem(path, hecke_group)
    assert loaded.branches == hecke_system.branches
    assert loaded.transitions[(4, 4)][0].element.isClose(hecke())
    assert loaded.transitions[(4, 4)][0].word == (('h', 1),)

def test_load_bare_matrices(hecke_group):
    system = systemFromDict({
        'branches': [{ 'x': 0.0, 'facing': 'right' }],
        'transitions': { '1,1': [[3.0, 1.0, 1.0, 3.0]] },
    }, hecke_group)
    assert system.provenance is Provenance.USER_SUPPLIED
    (transition,) = system.transitions[(1, 1)]
    assert transition.word is None
    assert transition.element.isClose(hecke())

@pytest.mark.parametrize('data, error', [
    ({}, ParseError),
    ({ 'branches': [{ 'x': 0.0 }] }, ParseError),
    ({ 'branches': [{ 'x': 0.0, 'facing': 'Right' }], 'transitions': { '1': [] } }, ParseError),
    ({ 'branches': [{ 'x': 0.0, 'facing': 'Right' }], 'transitions': { '1,2': [] } }, ParseError),
    ({ 'branches': [{ 'x': 0.0, 'facing': 'Right' }], 'transitions': { '1,1': [[1.0, 2.0, 3.0]] } }, ParseError),
    ({ 'branches': [{ 'x': 0.0, 'facing': 'Right' }], 'transitions': { '1,1': [[1.0, 2.0, 2.0, 1.0]] } }, BadDeterminant),
])
def test_load_rejects(data, error, hecke_group):
    with pytest.raises(error):
        systemFromDict(data, hecke_group)

def test_load_missing_file(tmp_path, hecke_group):
    with pytest.raises(IoError):
        loadBranchSystem(str(tmp_path / 'missing.json'), hecke_group)
