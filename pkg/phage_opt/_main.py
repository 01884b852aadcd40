from __future__ import annotations

import argparse
import json
import os.path
import sys
from collections.abc import Sequence

from phage_opt._errors import PhageError
from phage_opt._phase_poly import format_poly
from phage_opt._phase_poly import mask
from phage_opt._pipeline import emit_qc
from phage_opt._pipeline import Options
from phage_opt._pipeline import run_pipeline
from phage_opt._pipeline import RunReport
from phage_opt._qc import parse_qc
from phage_opt._spidernest import gen_nest
from phage_opt._verify import MAX_SIM_WIRES


def _read(filename: str) -> str:
    if filename == '-':
        contents_bytes = sys.stdin.buffer.read()
    else:
        with open(filename, 'rb') as fb:
            contents_bytes = fb.read()
    try:
        return contents_bytes.decode()
    except UnicodeDecodeError:
        raise PhageError('non-utf-8 input (not supported)')


def _write(filename: str, contents: str) -> None:
    print(f'Writing {filename}', file=sys.stderr)
    with open(filename, 'w') as f:
        f.write(contents)


def _name(filename: str) -> str:
    return os.path.splitext(os.path.basename(filename))[0]


def _options(args: argparse.Namespace) -> Options:
    return Options(
        passes=args.passes,
        family=args.family,
        skip_stomp5=args.skip_stomp5,
        post_pass=args.post_pass,
        verify=getattr(args, 'verify', False),
        max_sim_wires=args.max_sim_wires,
    )


def _stages(report: RunReport) -> list[tuple[str, int]]:
    ret = [
        ('input', report.t_count_initial),
        ('fusion', report.t_after_fusion),
        ('stomp', report.t_after_stomp),
    ]
    if report.t_after_post_pass is not None:
        ret.append(('post-pass', report.t_after_post_pass))
    return ret


def reduce_file(filename: str, args: argparse.Namespace) -> int:
    options = _options(args)
    try:
        c = parse_qc(_read(filename))
        form, report = run_pipeline(c, options, _name(filename))
    except PhageError as e:
        print(f'{filename}: {e}', file=sys.stderr)
        return 1

    if args.verbose:
        for stage, count in _stages(report):
            print(
                f'phage-opt: {report.circuit_name}: {stage} t-count {count}',
                file=sys.stderr,
            )

    if args.out is None:
        print(emit_qc(form), end='')
    else:
        _write(args.out, emit_qc(form))
    if args.stats is not None:
        _write(args.stats, json.dumps(report.to_json(), indent=2) + '\n')
    if args.dump_poly is not None:
        _write(args.dump_poly, format_poly(form.body))

    if not options.verify:
        return 0
    elif report.verified is None:
        print(
            f'{filename}: verify skipped '
            f'({form.width} wires > {options.max_sim_wires})',
            file=sys.stderr,
        )
        return 1
    else:
        result = 'PASS' if report.verified else 'FAIL'
        print(
            f'{filename}: verify {result} '
            f'(max deviation {report.max_deviation:.3g})',
            file=sys.stderr,
        )
        return int(not report.verified)


def _regressions(report: RunReport, expected: dict[str, int]) -> list[str]:
    ret = []
    for key, actual in (
            ('extraQubits', report.extra_qubits),
            ('tAfterFusion', report.t_after_fusion),
    ):
        if key in expected and actual != expected[key]:
            ret.append(f'{key} {actual} != {expected[key]}')
    if 'tAfterStomp' in expected and report.t_after_stomp > expected['tAfterStomp'] + 1:
        ret.append(f'tAfterStomp {report.t_after_stomp} > {expected["tAfterStomp"]} + 1')
    return ret


def bench(args: argparse.Namespace) -> int:
    expectations = {}
    if args.expect is not None:
        with open(args.expect) as f:
            expectations = json.load(f)

    try:
        names = os.listdir(args.directory)
    except OSError as e:
        print(f'{args.directory}: {e.strerror}', file=sys.stderr)
        return 1
    filenames = sorted(
        os.path.join(args.directory, name)
        for name in names
        if name.endswith('.qc')
    )
    options = _options(args)
    ret = 0
    for filename in filenames:
        name = _name(filename)
        try:
            _, report = run_pipeline(parse_qc(_read(filename)), options, name)
        except PhageError as e:
            print(f'{filename}: {e}', file=sys.stderr)
            ret = 1
            continue

        line = (
            f'{name}: extra={report.extra_qubits} '
            f'fusion={report.t_after_fusion} stomp={report.t_after_stomp}'
        )
        if name in expectations:
            problems = _regressions(report, expectations[name])
            if problems:
                line += f' FAIL ({"; ".join(problems)})'
                ret = 1
            else:
                line += ' OK'
        print(line)
    return ret


def emit_identity(args: argparse.Namespace) -> int:
    try:
        identity = gen_nest(mask(range(args.n)))
    except PhageError as e:
        print(f'emit-identity: {e}', file=sys.stderr)
        return 1
    print(format_poly(identity.poly), end='')
    return 0


def _add_strategy_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--passes', type=int, default=1,
        help='STOMP passes; 0 repeats until no rewrite applies',
    )
    parser.add_argument('--skip-stomp5', action='store_true')
    parser.add_argument('--family', choices=('63', '58'), default='63')
    parser.add_argument(
        '--post-pass', metavar='CMD',
        help='external optimiser reading and writing the polynomial format',
    )
    parser.add_argument('--max-sim-wires', type=int, default=MAX_SIM_WIRES)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog='phage-opt')
    subparsers = parser.add_subparsers(dest='command', required=True)

    reduce_parser = subparsers.add_parser('reduce')
    reduce_parser.add_argument('filename')
    reduce_parser.add_argument('--out')
    reduce_parser.add_argument('--stats')
    reduce_parser.add_argument('--dump-poly')
    reduce_parser.add_argument('--verify', action='store_true')
    reduce_parser.add_argument('--verbose', action='store_true')
    _add_strategy_options(reduce_parser)

    bench_parser = subparsers.add_parser('bench')
    bench_parser.add_argument('directory')
    bench_parser.add_argument('--expect')
    _add_strategy_options(bench_parser)

    identity_parser = subparsers.add_parser('emit-identity')
    identity_parser.add_argument('n', type=int)

    args = parser.parse_args(argv)

    if args.command == 'reduce':
        return reduce_file(args.filename, args)
    elif args.command == 'bench':
        return bench(args)
    else:
        return emit_identity(args)


if __name__ == '__main__':
    raise SystemExit(main())
