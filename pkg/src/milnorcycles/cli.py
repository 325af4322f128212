"""
Command line front end ``milnorcycles``.

Subcommands ``witt``, ``norm``, ``reduce``, ``verify`` and ``check``. Payloads
are given inline in the polynomial grammar or as UTF-8 JSON files. Exit code
0 means success, 1 a failed verification or property, 2 an input error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

from milnorcycles.cycles import TriangularCycle
from milnorcycles.errors import PreconditionError, VerificationFailed
from milnorcycles.kgroups import (MilnorSymbol, SymbolSum, norm,
                                  reduce_to_graphs, trace_relative)
from milnorcycles.scalars import FieldCtx, parse_series
from milnorcycles.suites import CASES, run_suite
from milnorcycles.talgebra import Extension
from milnorcycles.witness import from_record, verify
from milnorcycles.witt import (WittVector, ghost, split_unit,
                               vanishing_level, witt_add, witt_factor,
                               witt_neg, witt_star)

LOGGER = logging.getLogger(__name__)

WITT_OPS = ('add', 'star', 'ghost', 'factor', 'level', 'neg', 'split')

DEFAULT_FIELD = 'Q'
DEFAULT_M = 2


@dataclass
class RunConfig:
    """Everything a command run depends on"""

    command: str
    """subcommand name"""
    field: str = None
    """field tag ``Fp:<p>`` or ``Q``, ``None`` until a flag or an input file sets it"""
    m: int = None
    """truncation level, ``None`` until a flag or an input file sets it"""
    seed: int = 0
    """master seed of randomized suites, 64 bit"""
    iters: int = 100
    """number of suite cases"""
    suite: str = None
    """suite name for ``check``"""
    op: str = None
    """operation for ``witt``"""
    payload: dict = dc_field(default_factory=dict)
    """command-specific inputs (``x``, ``y``, ``ext``, ``symbol``, ``cycle``, ``witness``, ``trace_level``)"""
    out: str = None
    """path of the JSON record to write"""

    @classmethod
    def from_args(cls, args):
        payload = {key: getattr(args, key) for key in
                   ('x', 'y', 'ext', 'symbol', 'cycle', 'witness', 'trace_level')
                   if getattr(args, key, None) is not None}
        return cls(command=args.command, field=args.field, m=args.m,
                   seed=getattr(args, 'seed', 0), iters=getattr(args, 'iters', 100),
                   suite=getattr(args, 'suite', None), op=getattr(args, 'op', None),
                   payload=payload, out=getattr(args, 'out', None))

    def merged(self, record=None):
        """This config with ``field`` and ``m`` taken from an input record, then the defaults

        :param dict record: the JSON input, ``None`` for inline input
        :raises PreconditionError: when a flag disagrees with the record
        """
        record = record if isinstance(record, dict) else {}
        stored = record.get('field')
        tag = _agree('field', self.field and FieldCtx.from_tag(self.field).tag,
                     stored and FieldCtx.from_tag(stored).tag)
        m = _agree('m', self.m, record.get('m'))
        return replace(self, field=tag or DEFAULT_FIELD, m=DEFAULT_M if m is None else int(m))

    def ctx(self):
        return FieldCtx.from_tag(self.field or DEFAULT_FIELD)


def _agree(name, given, stored):
    if given is not None and stored is not None and given != stored:
        raise PreconditionError(f'--{name} {given} disagrees with {name} = {stored} in the input file')
    return given if given is not None else stored


# -- payloads ----------------------------------------------------------------------------

def _load_json(path):
    with open(path, encoding='utf-8') as fh:
        return json.load(fh)


def _is_file(text):
    return not text.lstrip().startswith('{') and Path(text).is_file()


def _read_payload(text):
    """The JSON behind a file argument, ``None`` for inline text"""
    return _load_json(text) if _is_file(text) else None


def _write(path, record):
    if path is None:
        return
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write('\n')


def _symbol_texts(text, data):
    """Symbol entries from ``{a, b}``, or a JSON ``entries`` list or ``symbol`` string"""
    if data is None:
        return text
    if isinstance(data, dict):
        return data['entries'] if 'entries' in data else data['symbol']
    return data


def _extension(ctx, flags, data):
    """The extension from ``--ext`` or the input file, which must agree"""
    ext = Extension.parse(ctx, flags) if flags else None
    stored = data.get('ext') if isinstance(data, dict) else None
    if stored:
        from_file = Extension.parse(ctx, stored)
        if ext is not None and ext != from_file:
            raise PreconditionError(f'--ext {ext.render()} disagrees with ext = {from_file.render()} '
                                    f'in the input file')
        ext = from_file
    return ext


def _cycle_terms(text, data):
    """``(mult, polys)`` pairs from ``P1; P2``, a JSON ``polys`` list or a JSON ``terms`` sum"""
    if data is None:
        return [(1, [part.strip() for part in text.split(';') if part.strip()])]
    if isinstance(data, list):
        return [(1, data)]
    if 'terms' in data:
        return [(int(term.get('mult', 1)), term['polys']) for term in data['terms']]
    return [(1, data['polys'])]


# -- commands ------------------------------------------------------------------------------

def cmd_witt(config):
    config = config.merged()
    ctx, m = config.ctx(), config.m
    p = config.payload
    if 'x' not in p:
        raise ValueError('witt needs --x')
    x_series = parse_series(p['x'], ctx, m + 1)
    if config.op == 'split':
        c0, w = split_unit(x_series)
        print(f'{ctx.render(c0)}, {w.render()}')
        return 0
    x = WittVector(x_series)
    if config.op in ('add', 'star'):
        if 'y' not in p:
            raise ValueError(f'witt {config.op} needs --y')
        y = WittVector(parse_series(p['y'], ctx, m + 1))
        print((witt_add(x, y) if config.op == 'add' else witt_star(x, y)).render())
    elif config.op == 'neg':
        print(witt_neg(x).render())
    elif config.op == 'ghost':
        print(ghost(x).render())
    elif config.op == 'factor':
        print('[' + ', '.join(ctx.render(a) for a in witt_factor(x)) + ']')
    elif config.op == 'level':
        print(vanishing_level(x))
    return 0


def _witnesses_ok(witnesses):
    return all(verify(W) for W in witnesses)


def cmd_norm(config):
    p = config.payload
    if 'symbol' not in p:
        raise ValueError('norm needs --symbol')
    data = _read_payload(p['symbol'])
    config = config.merged(data)
    ctx, m = config.ctx(), config.m
    ext = _extension(ctx, p.get('ext'), data)
    s = MilnorSymbol.parse(ctx, _symbol_texts(p['symbol'], data), m, ext)
    if p.get('trace_level') is not None:
        result = trace_relative(s, ext, m, p['trace_level'])
    else:
        result = norm(s, ext, m)
    print(result.outputs.render())
    ok = _witnesses_ok(result.witnesses)
    record = result.to_record()
    record.update({'field': ctx.tag, 'm': m, 'symbol': s.render(), 'verified': ok})
    if ext is not None:
        record['ext'] = ext.render()
    _write(config.out, record)
    if not ok:
        raise VerificationFailed('a witness of the norm chain does not verify')
    return 0


def cmd_reduce(config):
    if 'cycle' not in config.payload:
        raise ValueError('reduce needs --cycle')
    text = config.payload['cycle']
    data = _read_payload(text)
    config = config.merged(data)
    ctx, m = config.ctx(), config.m
    results = [(mult, reduce_to_graphs(TriangularCycle.parse(ctx, polys), m))
               for mult, polys in _cycle_terms(text, data)]
    total = SymbolSum(ctx, m)
    for mult, result in results:
        total = total + result.graphs * mult
    print(total.render())
    ok = all(_witnesses_ok(result.witnesses) for _, result in results)
    if len(results) == 1 and results[0][0] == 1:
        record = results[0][1].to_record()
    else:
        record = {'terms': [dict(result.to_record(), mult=mult) for mult, result in results],
                  'outputs': total.to_records()}
    record.update({'field': ctx.tag, 'm': m, 'verified': ok})
    _write(config.out, record)
    if not ok:
        raise VerificationFailed('a witness of the reduction does not verify')
    return 0


def _witness_records(data):
    if isinstance(data, list):
        return data
    if 'kind' in data:
        return [data]
    if 'terms' in data:
        return [record for term in data['terms'] for record in term.get('witnesses', [])]
    return data.get('witnesses', [])


def cmd_verify(config):
    path = config.payload.get('witness')
    if path is None:
        raise ValueError('verify needs --witness')
    records = _witness_records(_load_json(path))
    failed = 0
    for j, record in enumerate(records):
        ok = verify(from_record(record))
        print(f'{j}: {record["kind"]} {"ok" if ok else "FAILED"}')
        failed += not ok
    if failed:
        raise VerificationFailed(f'{failed} of {len(records)} witnesses failed')
    return 0


def cmd_check(config):
    config = config.merged()
    report = run_suite(config.suite, config.ctx(), config.m, config.iters, config.seed)
    print(f'{config.suite}: {report.passed}/{config.iters} passed')
    _write(config.out, report.to_record())
    if not report.ok:
        print(json.dumps(report.reproducer, indent=2, sort_keys=True))
        raise VerificationFailed(f'property {report.reproducer["property"]} failed')
    return 0


COMMANDS = {'witt': cmd_witt, 'norm': cmd_norm, 'reduce': cmd_reduce,
            'verify': cmd_verify, 'check': cmd_check}


# -- parser --------------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog='milnorcycles',
        description='Cycle computations for Milnor K-groups of k[t]/(t^(m+1)).')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log INFO (-v) or DEBUG (-vv) messages')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p):
        p.add_argument('--field', help="Fp:<p> or Q, default Q or the input file's field")
        p.add_argument('--m', type=int, help="truncation level, default 2 or the input file's level")
        p.add_argument('--out', help='write a JSON result record here')

    p = sub.add_parser('witt', help='big Witt vector arithmetic')
    p.add_argument('op', choices=WITT_OPS)
    common(p)
    p.add_argument('--x', required=True, help='series with constant term 1')
    p.add_argument('--y', help='second operand of add and star')

    p = sub.add_parser('norm', help='norm of a Milnor symbol along a finite extension')
    common(p)
    p.add_argument('--ext', action='append',
                   help='extension polynomial in x, or tower steps in x1, x2, ... (repeat)')
    p.add_argument('--symbol', required=True, help='inline {a, b, ...} or a JSON file')
    p.add_argument('--trace-level', dest='trace_level', type=int,
                   help='check that the outputs vanish to this order')

    p = sub.add_parser('reduce', help='reduce a triangular cycle to graph cycles')
    common(p)
    p.add_argument('--cycle', required=True, help='"P1; P2; ..." in y1, y2, ... or a JSON file')

    p = sub.add_parser('verify', help='re-verify witness records')
    common(p)
    p.add_argument('--witness', required=True, help='JSON record or result log')

    p = sub.add_parser('check', help='deterministic randomized property suite')
    common(p)
    p.add_argument('--suite', required=True, choices=sorted(CASES))
    p.add_argument('--iters', type=int, default=100)
    p.add_argument('--seed', type=int, default=0)
    return parser


def _setup_logging(verbose):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    """Entry point of the ``milnorcycles`` console script

    :param list argv: arguments, default ``sys.argv[1:]``
    :return: the exit code
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    config = RunConfig.from_args(args)
    if config.command == 'check' and config.iters <= 0:
        print(f'error: --iters must be positive, got {config.iters}', file=sys.stderr)
        return 2
    try:
        return COMMANDS[config.command](config)
    except VerificationFailed as exc:
        print(f'verification failed: {exc}', file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f'error: {type(exc).__name__}: {exc}', file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f'error: {type(exc).__name__}: {exc}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
