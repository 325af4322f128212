import pytest

from milnorcycles import randgen
from milnorcycles.scalars import FieldCtx


@pytest.fixture
def Q():
    return FieldCtx()


@pytest.fixture
def F2():
    return FieldCtx(2)


@pytest.fixture
def F3():
    return FieldCtx(3)


@pytest.fixture
def F5():
    return FieldCtx(5)


@pytest.fixture(params=['Q', 'Fp:2', 'Fp:3', 'Fp:5', 'Fp:7'])
def field(request):
    return FieldCtx.from_tag(request.param)


@pytest.fixture
def rng():
    return randgen.default_rng(20240601)
