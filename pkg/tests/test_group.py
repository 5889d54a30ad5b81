import math

import pytest
import numpy as np

from zetabranch.moebius import Moebius
from zetabranch.group import (
    GroupPresentation, enumerateBall, containsUpTo, MembershipStatus, formatWord, parseWord, invertWord,
    cyclicWord, isProperPower, fixedPairs, limitPoints, primitiveHyperbolicClasses
)
from zetabranch.errors import ParseError, IdentityGenerator, BallTooLarge

from conftest import hecke, S

def test_word_format_round_trip():
    word = (('h', 1), ('s', -1), ('h', 1))
    assert formatWord(word) == 'h*s^-1*h'
    assert parseWord('h*s^-1*h') == word
    assert formatWord(()) == 'id'
    assert parseWord('id') == ()
    assert parseWord('h^3') == (('h', 1),) * 3
    assert parseWord('h^-2*s') == (('h', -1), ('h', -1), ('s', 1))
    assert invertWord(word) == (('h', -1), ('s', 1), ('h', -1))

def test_parse_word_rejects_bad_factor():
    with pytest.raises(ParseError):
        parseWord('h^x')
    with pytest.raises(ParseError):
        parseWord('h^0')

def test_presentation_validation():
    with pytest.raises(ParseError):
        GroupPresentation.of([('h', hecke()), ('h', S)])
    with pytest.raises(IdentityGenerator):
        GroupPresentation.of([('e', Moebius.identity())])

def test_cyclic_ball(cyclic_ball):
    assert len(cyclic_ball) == 13
    assert cyclic_ball.words[0] == ()
    assert [len(w) for w in cyclic_ball.words] == sorted(len(w) for w in cyclic_ball.words)

def test_dihedral_ball(hecke_ball):
    # h^n for |n| <= 6 and h^n s for |n| <= 5
    assert len(hecke_ball) == 24
    assert hecke_ball.group.involutions() == { 's' }

def test_ball_words_evaluate_to_elements(hecke_ball):
    for g, word in hecke_ball:
        assert hecke_ball.group.evaluate(word).isClose(g, 1e-8)

def test_ball_limits(cyclic_group, schottky_group):
    with pytest.raises(ValueError):
        enumerateBall(cyclic_group, -1)
    with pytest.raises(BallTooLarge):
        enumerateBall(schottky_group, 6, max_ball=100)

def test_restrict(schottky_ball):
    small = schottky_ball.restrict(2)
    # 1 + 4 + 12 reduced words
    assert len(small) == 17
    assert all(len(w) <= 2 for w in small.words)

def test_contains_up_to(cyclic_group, cyclic_ball):
    found = containsUpTo(cyclic_group, hecke().power(3), 6, cyclic_ball)
    assert found
    assert found.word == (('h', 1),) * 3
    missing = containsUpTo(cyclic_group, hecke().power(7), 6, cyclic_ball)
    assert not missing
    assert missing.status is MembershipStatus.UNKNOWN
    assert not containsUpTo(cyclic_group, S, 6, cyclic_ball)

def test_cyclic_word(hecke_group, schottky_group):
    assert cyclicWord((('a', 1), ('b', 1), ('a', -1)), schottky_group) == (('b', 1),)
    assert cyclicWord((('b', 1), ('a', 1)), schottky_group) == (('a', 1), ('b', 1))
    assert cyclicWord((('s', 1), ('s', -1)), hecke_group) == ()
    assert isProperPower((('a', 1), ('b', 1), ('a', 1), ('b', 1)))
    assert not isProperPower((('a', 1), ('b', 1), ('b', 1)))

def test_limit_points_of_cyclic(cyclic_ball):
    pairs = fixedPairs(cyclic_ball)
    np.testing.assert_allclose(pairs, [(1.0, -1.0), (-1.0, 1.0)])
    np.testing.assert_allclose(limitPoints(cyclic_ball), [-1.0, 1.0])

def test_limit_points_of_dihedral(hecke_ball):
    np.testing.assert_allclose(limitPoints(hecke_ball), [-1.0, 1.0])

def test_classes_of_cyclic(cyclic_group, cyclic_ball):
    classes = primitiveHyperbolicClasses(cyclic_group, 6.0, ball=cyclic_ball)
    assert len(classes) == 2
    assert { formatWord(c.word) for c in classes } == { 'h', 'h^-1' }
    for c in classes:
        assert c.length == pytest.approx(math.log(2.0))
        assert c.primitive

def test_classes_of_dihedral_merge_inverse(hecke_group, hecke_ball):
    classes = primitiveHyperbolicClasses(hecke_group, 6.0, ball=hecke_ball)
    assert len(classes) == 1
    assert classes[0].length == pytest.approx(math.log(2.0))

def test_classes_of_schottky(schottky_group, schottky_ball):
    classes = primitiveHyperbolicClasses(schottky_group, 6.0, ball=schottky_ball)
    lengths = [c.length for c in classes]
    assert lengths == sorted(lengths)
    assert all(c.primitive and c.length <= 6.0 for c in classes)
    words = { formatWord(c.word) for c in classes }
    assert { 'a', 'a^-1', 'b', 'b^-1' } <= words
    assert min(lengths) == pytest.approx(2.0 * math.acosh(2.0))

def test_classes_carry_their_cyclic_word(cyclic_group, cyclic_ball, schottky_group, schottky_ball):
    for c in primitiveHyperbolicClasses(schottky_group, 6.0, ball=schottky_ball):
        assert c.cyclic_word == cyclicWord(c.word, schottky_group)
        assert c.cyclic_word
        assert not isProperPower(c.cyclic_word)
    classes = primitiveHyperbolicClasses(cyclic_group, 6.0, ball=cyclic_ball)
    assert { formatWord(c.cyclic_word) for c in classes } == { 'h', 'h^-1' }

def test_classes_invariant_under_conjugation(schottky_group, schottky_ball):
    q = Moebius.fromEntries(1.0, 0.5, 0.0, 1.0).compose(Moebius.fromEntries(2.0, 0.0, 0.0, 0.5))
    conjugated = GroupPresentation.of(
        [(g.label, q.compose(g.element).compose(q.inverse())) for g in schottky_group.generators])
    base = primitiveHyperbolicClasses(schottky_group, 6.0, ball=schottky_ball)
    other = primitiveHyperbolicClasses(conjugated, 6.0, ball=enumerateBall(conjugated, 6))
    np.testing.assert_allclose([c.length for c in base], [c.length for c in other], rtol=1e-9)

def test_l_max_must_be_positive(cyclic_group):
    with pytest.raises(ValueError):
        primitiveHyperbolicClasses(cyclic_group, 0.0)
