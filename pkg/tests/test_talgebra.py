import pytest

from milnorcycles.errors import (NonUnit, NonUnitCoordinate,
                                 PreconditionError, ReducibleExtension)
from milnorcycles.mpoly import MPoly, parse_mpoly
from milnorcycles.scalars import LocalScalar, parse_local
from milnorcycles.talgebra import (Extension, PointRep, TriangularSystem,
                                   alg_inv, base_change_point, normal_form,
                                   structural_violation, triangularize)


def system(ctx, *texts):
    n = len(texts)
    return TriangularSystem(ctx, [parse_mpoly(s, ctx, n) for s in texts])


def test_normal_form(Q):
    R = system(Q, 'y1^2-2')
    assert normal_form(R, parse_mpoly('y1^3', Q, 1)) == R.element(parse_mpoly('2*y1', Q, 1))
    R2 = system(Q, 'y1^2-2', 'y2^2-y1')
    assert R2.element(parse_mpoly('y2^2', Q, 2)) == R2.var(0)
    assert R2.element(parse_mpoly('y2^4', Q, 2)).value == parse_mpoly('2', Q, 2)
    assert R2.rank == 4
    assert R2.basis() == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_structural_violations(Q):
    assert structural_violation([parse_mpoly('2*y1^2-1', Q, 1)])[0] == 1
    assert structural_violation([parse_mpoly('y1^2-2', Q, 2),
                                 parse_mpoly('y2-y1^2', Q, 2)])[0] == 2
    assert structural_violation([parse_mpoly('y1-y2', Q, 2),
                                 parse_mpoly('y2-3', Q, 2)])[0] == 1
    with pytest.raises(PreconditionError):
        system(Q, 'y1^2-2', 'y1*y2-1')


def test_from_polys_makes_levels_monic(Q):
    R = TriangularSystem.from_polys(Q, [parse_mpoly('2*y1^2-4', Q, 1)])
    assert R == system(Q, 'y1^2-2')
    R2 = TriangularSystem.from_polys(Q, [parse_mpoly('y1^2-2', Q, 2),
                                         parse_mpoly('y1*y2-1', Q, 2)])
    assert R2.polys[1] == parse_mpoly('y2-y1/2', Q, 2)


def test_inverse(Q):
    R = system(Q, 'y1^2-(1+t)')
    y1 = R.var(0)
    assert alg_inv(y1) == R.element(parse_mpoly('y1/(1+t)', Q, 1))
    assert y1.is_unit()
    assert (y1 * y1.inverse()).is_one()


def test_inverse_needs_t(Q):
    y1 = system(Q, 'y1^2-t^2').var(0)
    assert not y1.is_unit()
    assert y1.is_generic_unit()
    with pytest.raises(NonUnit):
        alg_inv(y1)


def test_zero_divisor(Q):
    e = system(Q, 'y1^2-1').var(0) - 1
    assert not e.is_generic_unit()
    with pytest.raises(NonUnit):
        e.inverse()


def test_constant_term(Q):
    R = system(Q, 'y1^2-2', 'y2^2-(1+t)*y1')
    c = R.constant_term(2)
    assert c.owner == system(Q, 'y1^2-2')
    assert c == R.prefix(1).element(parse_mpoly('-(1+t)*y1', Q, 1))


def test_extension(Q, F5):
    ext = Extension.parse(Q, 'x^2-2')
    assert ext.degree() == 2
    assert ext.height == 1
    assert ext.base() is None
    ext.check_irreducible()
    with pytest.raises(ReducibleExtension):
        Extension.parse(F5, 'x^2-4').check_irreducible()
    with pytest.raises(PreconditionError):
        Extension.parse(Q, 'x^2-t')


def test_tower(F5):
    ext = Extension.parse(F5, ['x1^2-2', 'x2^2-x1'])
    ext.check_irreducible()
    assert ext.degree() == 4
    assert ext.base() == Extension.parse(F5, 'x^2-2')
    x2 = ext.parse_element('x2')
    assert x2 ** 4 == ext.parse_element('2')


def test_triangularize_simple(F5):
    ext = Extension.parse(F5, 'x^2-2')
    point = base_change_point([ext.parse_element('x*(1+t)'), ext.parse_element('2')], ext)
    sys_, mult = triangularize(point)
    assert mult == 1
    assert sys_.polys[0] == parse_mpoly('y1^2-2*(1+t)^2', F5, 2)
    assert sys_.polys[1] == parse_mpoly('y2-2', F5, 2)


def test_triangularize_constant_point(Q):
    ext = Extension.parse(Q, 'x^2-2')
    point = base_change_point([ext.parse_element('3+t'), ext.parse_element('5')], ext)
    sys_, mult = triangularize(point)
    assert mult == 2
    assert sys_ == system(Q, 'y1-(3+t)', 'y2-5')


def test_triangularize_without_extension(Q):
    point = base_change_point([parse_local('2+t', Q), LocalScalar.constant(Q, 3)], None)
    sys_, mult = triangularize(point)
    assert (sys_, mult) == (system(Q, 'y1-(2+t)', 'y2-3'), 1)


def test_point_coordinates_must_be_units(Q):
    ext = Extension.parse(Q, 'x^2-2')
    with pytest.raises(NonUnitCoordinate):
        base_change_point([ext.parse_element('t*x')], ext)
    with pytest.raises(PreconditionError):
        PointRep(ext.algebra(), [system(Q, 'y1^2-3').var(0)])


def test_algebra_arithmetic(F3):
    R = system(F3, 'y1^2+1')
    i = R.var(0)
    assert i * i == R.element(MPoly.constant(F3, 1, -1))
    assert (i + 1) ** 2 == i * 2
    assert (i ** -1) == -i
