import pytest

from milnorcycles import randgen
from milnorcycles.errors import GhostUndefined, PreconditionError
from milnorcycles.scalars import FieldCtx, parse_series
from milnorcycles.witt import (WittVector, ghost, split_unit, vanishing_level,
                               witt_add, witt_factor, witt_neg, witt_restrict,
                               witt_star, witt_sub)


def W(text, ctx, m):
    return WittVector(parse_series(text, ctx, m + 1))


def test_constant_term_must_be_one(Q):
    with pytest.raises(PreconditionError):
        W('2+t', Q, 2)


def test_star_of_teichmuller_factors(F5):
    assert witt_star(W('1-2*t', F5, 3), W('1-3*t', F5, 3)).render() == '1+4*t'


def test_star_same_index(Q):
    x = W('1-t^2', Q, 6)
    assert witt_star(x, x).render() == '1-2*t^2+t^4'


def test_star_beyond_length_is_zero(Q):
    x = W('1-t^2', Q, 4)
    y = W('1-t^3', Q, 4)
    assert witt_star(x, y) == WittVector.zero(Q, 4)


def test_factor(Q):
    alphas = witt_factor(W('1+t+t^2', Q, 2))
    assert [Q.render(a) for a in alphas] == ['-1', '-1']
    x = W('1+2*t-t^3', Q, 5)
    assert WittVector.from_factors(Q, witt_factor(x)) == x


def test_ghost(Q):
    assert ghost(W('1-t^2', Q, 4)).render() == '(0, 2, 0, 2)'
    x, y = W('1+t-3*t^2', Q, 4), W('1/(1-2*t)', Q, 4)
    assert ghost(witt_add(x, y)) == ghost(x) + ghost(y)
    assert ghost(witt_star(x, y)) == ghost(x) * ghost(y)


def test_ghost_small_characteristic():
    F3 = FieldCtx(3)
    with pytest.raises(GhostUndefined):
        ghost(W('1+t', F3, 5))
    assert ghost(W('1+t', F3, 2)).render() == '(2, 1)'


def test_vanishing_level(Q):
    assert vanishing_level(W('1+t^3', Q, 4)) == 3
    assert vanishing_level(W('1', Q, 4)) == 5


def test_identities(field):
    m = 4
    rng = randgen.default_rng(7)
    x, y, z = (randgen.witt_vector(rng, field, m) for _ in range(3))
    one = WittVector.one(field, m)
    assert witt_star(x, one) == x
    assert witt_star(x, y) == witt_star(y, x)
    assert witt_star(x, witt_add(y, z)) == witt_add(witt_star(x, y), witt_star(x, z))
    assert witt_add(x, witt_neg(x)) == WittVector.zero(field, m)
    assert witt_sub(witt_add(x, y), y) == x


def test_restrict_is_a_ring_map(Q):
    x, y = W('1+t-t^3+t^4', Q, 5), W('1-2*t^2+t^5', Q, 5)
    assert witt_restrict(witt_star(x, y), 3) == witt_star(witt_restrict(x, 3), witt_restrict(y, 3))
    with pytest.raises(PreconditionError):
        witt_restrict(x, 6)


def test_split_unit(F5):
    c0, w = split_unit(parse_series('2+t', F5, 3))
    assert F5.render(c0) == '2'
    assert w.render() == '1+3*t'
    with pytest.raises(PreconditionError):
        split_unit(parse_series('t', F5, 3))
