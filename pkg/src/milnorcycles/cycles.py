r"""
Admissible Milnor-range cycles presented by monic triangular systems.

A :py:class:`TriangularCycle` is the cycle :math:`V(P_1, \dots, P_n) \cap \square^n`
over :math:`A`, where every level has a unit constant term in the prefix
quotient. Formal sums of cycles are :py:class:`CycleSum` objects keyed by the
canonical text of the system, optionally with coefficients truncated modulo
:math:`t^N`.

:py:func:`normalize_system` is the face normalizer shared by the witness
boundaries and the reduction: it turns a list of polynomials into a
triangular cycle, or proves that their zero set in :math:`\square^n` is empty.
"""
import logging
import math
import warnings
from dataclasses import dataclass

from milnorcycles.errors import PreconditionError, UnhandledFaceShape
from milnorcycles.mpoly import MPoly, parse_mpoly
from milnorcycles.scalars import LocalScalar
from milnorcycles.talgebra import (TriangularSystem, alg_inv,
                                   structural_violation)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of :py:func:`check_admissible`"""

    accepted: bool
    """whether every condition holds"""
    level: int = None
    """1-based level of the first violation"""
    reason: str = None
    """what failed"""


def check_admissible(system):
    """Check the monic, degree-bound and unit-constant-term conditions

    :param system: a :py:class:`TriangularSystem` or a list of :py:class:`MPoly`
    :rtype: AdmissibilityReport
    """
    if not isinstance(system, TriangularSystem):
        polys = list(system)
        bad = structural_violation(polys)
        if bad is not None:
            return AdmissibilityReport(False, bad[0], bad[1])
        system = TriangularSystem(polys[0].ctx if polys else None, polys)
    for i in range(1, system.n + 1):
        c = system.constant_term(i)
        if not c.is_unit():
            return AdmissibilityReport(False, i, f'constant term {c.render()} of P_{i} is not a unit')
    return AdmissibilityReport(True)


class TriangularCycle:
    """An admissible cycle given by a monic triangular system"""

    sys: TriangularSystem = None
    """the presenting system"""

    def __init__(self, system):
        """
        :param TriangularSystem system: the system
        :raises PreconditionError: when the system is not admissible
        """
        report = check_admissible(system)
        if not report.accepted:
            raise PreconditionError(f'not admissible at level {report.level}: {report.reason}')
        self.sys = system

    @classmethod
    def from_polys(cls, ctx, polys):
        """Canonicalize ``polys`` (normal-form coefficients, monic levels)"""
        return cls(TriangularSystem.from_polys(ctx, polys))

    @classmethod
    def parse(cls, ctx, texts):
        """Parse ``["y1^2-(3+t)*y1+1+t", ...]``"""
        n = len(texts)
        return cls.from_polys(ctx, [parse_mpoly(text, ctx, n) for text in texts])

    @classmethod
    def graph(cls, ctx, entries):
        """The graph cycle :math:`\\{y_i - a_i\\}` of unit scalars"""
        return cls(TriangularSystem(ctx, graph_polys(ctx, entries)))

    @property
    def ctx(self):
        return self.sys.ctx

    @property
    def n(self):
        return self.sys.n

    @property
    def degrees(self):
        return self.sys.degrees

    @property
    def polys(self):
        return self.sys.polys

    def is_graph(self):
        return all(d == 1 for d in self.degrees)

    def graph_entries(self):
        """:math:`(a_1, \\dots, a_n)` of a degree-:math:`(1, \\dots, 1)` cycle"""
        if not self.is_graph():
            raise PreconditionError(f'degree vector {self.degrees} is not (1,...,1)')
        return [-P.constant_coeff(i).constant_value() for i, P in enumerate(self.polys)]

    def key(self, N=None):
        return self.sys.key(N)

    def render(self, N=None):
        return self.sys.render(N)

    def __eq__(self, other):
        return isinstance(other, TriangularCycle) and self.sys == other.sys

    def __hash__(self):
        return hash(self.sys)

    def __repr__(self):
        return f'TriangularCycle({self.render()})'


def graph_polys(ctx, entries):
    """The polynomials :math:`y_i - a_i`"""
    n = len(entries)
    polys = []
    for i, a in enumerate(entries):
        if not isinstance(a, LocalScalar):
            a = LocalScalar.constant(ctx, a)
        polys.append(MPoly.var(ctx, n, i) - a)
    return polys


# -- numerical invariants ------------------------------------------------------------

def vanishing_order(Z, m):
    """Order of vanishing of ``Z`` along :math:`\\{\\prod (y_i - 1) = 0\\}`

    Level ``i`` contributes the :math:`t`-adic valuation of
    :math:`P_i - (y_i - 1)^{d_i}`; the order is the largest contribution,
    capped at ``m + 1``.

    :param TriangularCycle Z: the cycle
    :param int m: truncation level
    :rtype: int
    """
    ctx, n = Z.ctx, Z.n
    best = 0
    for i, P in enumerate(Z.polys):
        shifted = (MPoly.var(ctx, n, i) - 1) ** Z.degrees[i]
        val = (P - shifted).valuation()
        order = m + 1 if val is None else min(val, m + 1)
        best = max(best, order)
    return best


def is_pre_vanishing(Z):
    """Whether :math:`\\prod_i (y_i - 1)` is nilpotent in the special fiber"""
    special = TriangularSystem(Z.ctx, [P.at_t_zero() for P in Z.polys])
    e = special.one()
    for i in range(Z.n):
        e = e * (special.var(i) - 1)
    for _ in range(max(1, math.ceil(math.log2(max(special.rank, 2))))):
        if e.is_zero():
            return True
        e = e * e
    return e.is_zero()


def specialize(Z):
    """The special fiber of ``Z`` as a cycle sum at precision 1

    Components on :math:`\\{y_i = 1\\}` are removed by exact factor stripping.

    :param TriangularCycle Z: the cycle
    :rtype: CycleSum
    """
    special = normalize_system(Z.ctx, [P.at_t_zero() for P in Z.polys], Z.n)
    result = CycleSum(Z.ctx, N=1)
    if special is None:
        return result
    if special.degrees != Z.degrees:
        warnings.warn(f'special fiber of {Z.render()} meets y_i = 1 partially; '
                      f'degrees {Z.degrees} -> {special.degrees}')
    return result + CycleSum.single(special, N=1)


def mod_equiv(Z1, Z2, N):
    """Coefficientwise equality after truncation modulo :math:`t^N`"""
    if Z1.n != Z2.n:
        raise PreconditionError(f'cycles of different sizes: {Z1.n} vs {Z2.n}')
    return Z1.key(N) == Z2.key(N)


def compact_project(Z, i):
    """The prefix cycle :math:`(P_1, \\dots, P_i)`"""
    if not 1 <= i <= Z.n:
        raise PreconditionError(f'projection index {i} outside 1..{Z.n}')
    if i == Z.n:
        return Z
    return TriangularCycle(Z.sys.prefix(i))


# -- formal sums ------------------------------------------------------------------------

class CycleSum:
    """Formal integer combination of triangular cycles

    Terms are keyed by the canonical text of the cycle; with a precision ``N``
    coefficients are compared modulo :math:`t^N`.
    """

    ctx = None
    """the residue field"""
    N: int = None
    """precision, ``None`` for exact keys"""

    def __init__(self, ctx, N=None, terms=()):
        self.ctx = ctx
        self.N = N
        self.n = None
        self._terms = {}
        for mult, cycle in terms:
            self._accumulate(cycle, mult)

    @classmethod
    def single(cls, cycle, mult=1, N=None):
        return cls(cycle.ctx, N, [(mult, cycle)])

    def _accumulate(self, cycle, mult):
        if mult == 0:
            return
        if self.n is None:
            self.n = cycle.n
        elif cycle.n != self.n:
            raise PreconditionError(f'cycle sum mixes n = {self.n} and n = {cycle.n}')
        key = cycle.key(self.N)
        if key in self._terms:
            total = self._terms[key][0] + mult
            if total:
                self._terms[key][0] = total
            else:
                del self._terms[key]
        else:
            self._terms[key] = [mult, cycle]

    def _check(self, other):
        if not isinstance(other, CycleSum):
            raise PreconditionError(f'expected a CycleSum, got {type(other).__name__}')
        if self.N != other.N:
            raise PreconditionError(f'precision mismatch: {self.N} vs {other.N}')
        if self.n is not None and other.n is not None and self.n != other.n:
            raise PreconditionError(f'cycle sum mixes n = {self.n} and n = {other.n}')

    def items(self):
        """``(mult, cycle)`` pairs in canonical key order"""
        return [tuple(self._terms[key]) for key in sorted(self._terms)]

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def coefficient(self, cycle):
        """Multiplicity of ``cycle``, 0 when absent"""
        entry = self._terms.get(cycle.key(self.N))
        return 0 if entry is None else entry[0]

    def __add__(self, other):
        self._check(other)
        return CycleSum(self.ctx, self.N, self.items() + other.items())

    def __sub__(self, other):
        self._check(other)
        return CycleSum(self.ctx, self.N, self.items() + [(-k, c) for k, c in other.items()])

    def __neg__(self):
        return CycleSum(self.ctx, self.N, [(-k, c) for k, c in self.items()])

    def __mul__(self, k):
        return CycleSum(self.ctx, self.N, [(k * mult, c) for mult, c in self.items()])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CycleSum):
            return NotImplemented
        if self.N != other.N:
            return False
        return {key: v[0] for key, v in self._terms.items()} == \
            {key: v[0] for key, v in other._terms.items()}

    def __hash__(self):
        return hash(tuple(sorted((key, v[0]) for key, v in self._terms.items())))

    def truncated(self, N):
        """The same sum keyed modulo :math:`t^N`"""
        if self.N is not None and N > self.N:
            raise PreconditionError(f'cannot raise precision from {self.N} to {N}')
        return CycleSum(self.ctx, N, self.items())

    def box(self, tail):
        """Append graph coordinates :math:`y_{n+j} = b_j` to every term"""
        tail = [b if isinstance(b, LocalScalar) else LocalScalar.constant(self.ctx, b) for b in tail]
        out = CycleSum(self.ctx, self.N)
        for mult, cycle in self.items():
            n = cycle.n + len(tail)
            polys = [P.pad(n) for P in cycle.polys]
            polys += [MPoly.var(self.ctx, n, cycle.n + j) - b for j, b in enumerate(tail)]
            out._accumulate(TriangularCycle(TriangularSystem(self.ctx, polys)), mult)
        return out

    def to_records(self):
        return [{'mult': mult, 'polys': cycle.render(self.N)} for mult, cycle in self.items()]

    @classmethod
    def from_records(cls, ctx, records, N=None):
        terms = [(int(rec['mult']), TriangularCycle.parse(ctx, rec['polys'])) for rec in records]
        return cls(ctx, N, terms)

    def render(self):
        if not self._terms:
            return '0'
        parts = []
        for mult, cycle in self.items():
            parts.append(f'{mult}*[{", ".join(cycle.render(self.N))}]')
        return ' + '.join(parts).replace('+ -', '- ')

    def __repr__(self):
        return f'CycleSum({self.render()}, N={self.N})'


def cycle_sum_ops(a, b, op):
    """Multiplicity arithmetic on cycle sums

    :param CycleSum a: left operand
    :param CycleSum b: right operand
    :param str op: ``add``, ``sub`` or ``eq``
    """
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'eq':
        a._check(b)
        return a == b
    raise PreconditionError(f'unknown cycle_sum_ops op {op!r}')


# -- face normalization -----------------------------------------------------------------

def _strip_ones(prefix, F, level):
    """Divide out exact factors :math:`y_{level} - 1` modulo the prefix"""
    stripped = 0
    while F.degree(level) > 0:
        q, r = F.div_linear(level)
        if not prefix.normal_form(r).is_zero():
            break
        F = prefix.normal_form(q)
        stripped += 1
    return F, stripped


def _make_monic(prefix, F, level):
    """``F`` scaled to a monic polynomial, ``None`` when its leading coefficient
    is not a unit of the prefix algebra"""
    lc = F.leading_coeff(level)
    if lc.is_constant():
        c = lc.constant_value()
        return F * c.inverse() if c.is_unit() else None
    e = prefix.element(lc.restrict(level))
    if not e.is_unit():
        return None
    inv = alg_inv(e)
    return prefix.normal_form(F * inv.value.pad(F.nvars))


def normalize_system(ctx, polys, nvars):
    """Normalize the zero set of ``polys`` in :math:`\\square^{nvars}`

    Polynomials are grouped by main variable. At every level the candidates are
    reduced modulo the levels below and stripped of exact factors
    :math:`y - 1`; the first candidate with a unit leading coefficient defines
    the level, the others must then vanish. Zero sets are read on the generic
    fiber: a residual that becomes a unit once :math:`t` is inverted proves the
    set empty, so components inside :math:`\\{t = 0\\}` are dropped.

    :param FieldCtx ctx: the residue field
    :param list polys: polynomials in ``nvars`` variables
    :param int nvars: number of variables
    :return: the cycle, or ``None`` when the set is empty
    :rtype: TriangularCycle
    :raises UnhandledFaceShape: when neither outcome can be established
    """
    deferred = []
    by_level = {j: [] for j in range(nvars)}
    for F in polys:
        F = F.pad(nvars) if F.nvars < nvars else F
        if F.is_zero():
            continue
        j = F.main_var()
        if j < 0:
            # a nonzero constant has no zeros off the special fiber
            return None
        by_level[j].append(F)

    defining = []
    for level in range(nvars):
        prefix = TriangularSystem(ctx, defining)
        chosen, sides = None, []
        for F in by_level[level]:
            F, _ = _strip_ones(prefix, prefix.normal_form(F), level)
            if F.degree(level) <= 0:
                if F.is_zero():
                    continue
                e = prefix.element(F.restrict(level))
                if e.is_generic_unit():
                    return None
                if not e.is_zero():
                    deferred.append(f'{F.render()} is a zero divisor at level {level + 1}')
                continue
            if chosen is None:
                chosen = _make_monic(prefix, F, level)
                if chosen is not None:
                    continue
            sides.append(F)
        if chosen is None:
            reasons = '; '.join(deferred) or 'no candidate'
            raise UnhandledFaceShape(f'no defining polynomial with unit leading coefficient '
                                     f'at level {level + 1} ({reasons})')
        defining.append(chosen)
        upto = TriangularSystem(ctx, defining)
        for F in sides:
            R = upto.normal_form(F)
            if R.is_zero():
                continue
            e = upto.element(R.restrict(level + 1))
            if e.is_generic_unit():
                return None
            deferred.append(f'side condition {R.render()} is a zero divisor at level {level + 1}')

    system = TriangularSystem(ctx, defining)
    report = check_admissible(system)
    if not report.accepted:
        deferred.append(report.reason)
    if deferred:
        raise UnhandledFaceShape('; '.join(deferred))
    return TriangularCycle(system)
