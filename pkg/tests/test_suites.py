import pytest

from milnorcycles import randgen, suites
from milnorcycles.cycles import check_admissible
from milnorcycles.errors import PropertyFailure
from milnorcycles.suites import (CASES, case_seeds, expect, reproduce,
                                 run_case, run_suite)
from milnorcycles.talgebra import Extension

SMALL = randgen.GeneratorCaps(n=2, d=2, deg_g=2, m=3, deg_t=1)


def test_expect():
    expect(True, 'anything')
    with pytest.raises(PropertyFailure) as info:
        expect(False, 'star-identity', 'x')
    assert info.value.prop == 'star-identity'


def test_case_seeds_are_stable():
    first = [s.generate_state(1)[0] for s in case_seeds(42, 4)]
    again = [s.generate_state(1)[0] for s in case_seeds(42, 6)[:4]]
    assert first == again
    assert len(set(first)) == 4


@pytest.mark.parametrize('tag', ['Fp:2', 'Fp:5', 'Q'])
def test_witt_suite(tag):
    from milnorcycles.scalars import FieldCtx
    report = run_suite('witt', FieldCtx.from_tag(tag), 3, 5, seed=1)
    assert report.ok, report.reproducer
    assert report.passed == 5


@pytest.mark.parametrize('suite', ['cycles', 'witness', 'norms'])
def test_small_suites(suite, F5):
    report = run_suite(suite, F5, 2, 2, seed=3, caps=SMALL)
    assert report.ok, report.reproducer


def test_bad_arguments(F5):
    with pytest.raises(ValueError):
        run_suite('nope', F5, 2, 1, seed=0)
    with pytest.raises(ValueError):
        run_suite('witt', F5, 2, 0, seed=0)


def test_cases_are_reproducible(monkeypatch, F5):
    draws = []

    def record_draw(rng, ctx, m, caps):
        draws.append(int(rng.integers(0, 1 << 30)))

    monkeypatch.setitem(CASES, 'witt', record_draw)
    run_suite('witt', F5, 2, 4, seed=9)
    run_suite('witt', F5, 2, 4, seed=9)
    assert draws[:4] == draws[4:]
    child = case_seeds(9, 3)[2]
    assert run_case('witt', F5, 2, child) is None
    assert draws[-1] == draws[2]


def test_failure_is_minimized(monkeypatch, F5):
    def fails_from_two(rng, ctx, m, caps):
        expect(m < 2, 'made-up', f'm = {m}')

    monkeypatch.setitem(CASES, 'witt', fails_from_two)
    report = run_suite('witt', F5, 5, 3, seed=0)
    assert not report.ok
    assert report.passed == 0
    assert report.reproducer['m'] == 2
    assert report.reproducer['property'] == 'made-up'
    assert report.reproducer['case'] == 0
    assert reproduce(report.reproducer) == ('made-up', 'made-up: m = 2')
    assert report.to_record()['ok'] is False


def test_library_errors_count_as_failures(monkeypatch, F5):
    def raises(rng, ctx, m, caps):
        raise ArithmeticError('boom')

    monkeypatch.setattr(suites, 'CASES', {'witt': raises})
    report = run_suite('witt', F5, 1, 2, seed=0)
    assert report.reproducer['property'] == 'ArithmeticError'


def test_random_cycles_have_moving_constant_terms(F5):
    rng = randgen.default_rng(5)
    caps = randgen.GeneratorCaps(n=2, d=2, deg_t=1)
    cycles = [randgen.cycle(rng, F5, caps, n=2) for _ in range(20)]
    assert all(check_admissible(Z.sys).accepted for Z in cycles)
    assert any(not Z.polys[1].constant_coeff(1).restrict(1).is_constant() for Z in cycles)


def test_norm_symbol_entries_move(F5, rng):
    ext = Extension.parse(F5, 'x^2-2')
    entries = randgen.norm_symbol_entries(rng, ext, 2, 3)
    assert len(entries) == 2
    assert not any(e.value.is_constant() for e in entries)
    assert all(e.is_unit() for e in entries)
    assert len(randgen.norm_symbol_entries(rng, ext, 1, 3)) == 1
