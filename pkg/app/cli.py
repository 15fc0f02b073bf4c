"""
Command-line front end: every verification as a reproducible command.

Exit codes: 0 success, 1 verified negative finding, 2 usage or input error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import VerificationError
from app.models.schemas import ActionRequest, RunRecord, WitnessRequest
from app.services import runs
from app.services.report_writer import ReportWriter
from app.utils.encoding import read_json_file
from app.utils.log_handler import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_spec_options(cmd: argparse.ArgumentParser, with_n: bool = True):
    group = cmd.add_argument_group('Action specification')
    which = group.add_mutually_exclusive_group(required=True)
    which.add_argument('--row', type=int, choices=range(1, 8), metavar='1..7',
                       help='Bielliptic row: g(e, f) = (e + 1/d, xi*f + z).')
    which.add_argument('--lieberman', action='store_true',
                       help='Lieberman involution (b, b\') -> (-b + a, b\' + a\').')
    group.add_argument('--z', metavar='point', help='Translation z on F, e.g. "1/2", "(1+tau)/3".')
    group.add_argument('--a', metavar='point', help='Translation a on E (Lieberman).')
    group.add_argument('--a-prime', metavar='point', help='Order-two point a\' on E\' (default 1/2).')
    group.add_argument('--levels', type=_int_list, metavar='E,F', help='Model levels for brute force.')
    if with_n:
        group.add_argument('--n', type=int, required=True, help='Half-dimension; cycles have length n+1.')


def _spec_fields(opts) -> Dict:
    return {
        "row": opts.row,
        "lieberman": opts.lieberman,
        "z": opts.z,
        "a": opts.a,
        "a_prime": opts.a_prime,
        "levels": opts.levels,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='python -m app.cli',
        description='Verify invariants and group actions behind Enriques manifolds.')

    parser.add_argument('--format', choices=['json', 'csv', 'text', 'xlsx'], default='json',
                        help='Output format (xlsx needs --output). Default: %(default)s.')
    parser.add_argument('-o', '--output', metavar='path', help='Write output to a file instead of stdout.')
    parser.add_argument('--log-level', default=None, help=f'Logging level (default: {settings.LOG_LEVEL}).')
    parser.add_argument('--level-multiplier', type=int, metavar='k',
                        help='Multiply default brute-force levels by k.')
    parser.add_argument('--max-enumeration', type=int, metavar='count',
                        help='Cap on nodes visited by exhaustive enumeration.')
    parser.add_argument('--workers', type=int, metavar='count', help='Worker threads for scans.')

    cmds = parser.add_subparsers(title='Commands', dest='call', required=True)

    cmd = cmds.add_parser('indices', help='Possible indices d from n, b2 or a known family.')
    cmd.add_argument('--n', type=int)
    cmd.add_argument('--b2', type=int)
    cmd.add_argument('--family', choices=['hilb_k3', 'kummer', 'ogrady6', 'ogrady10'])

    cmd = cmds.add_parser('hodge', help='Hodge numbers h^{p,0} and chi(O) of an Enriques manifold.')
    cmd.add_argument('--n', type=int, required=True)
    cmd.add_argument('--d', type=int, required=True)

    cmd = cmds.add_parser('families', help='Invariants and index candidates of the known families.')
    cmd.add_argument('--n', type=int, default=1, help='Parameter of the Hilbert scheme and Kummer series.')

    cmd = cmds.add_parser('action', help='Invariance and freeness of a group action on Km^n(A).')
    _add_spec_options(cmd)
    cmd.add_argument('--mode', choices=['criterion', 'bruteforce', 'scan', 'invariance', 'coherence'],
                     default='criterion')
    cmd.add_argument('--with-bruteforce', action='store_true',
                     help='In scan mode, run brute force for every value free by criterion.')
    cmd.add_argument('--expect-free', action='store_true',
                     help='Exit with 1 when the action turns out not free.')

    cmd = cmds.add_parser('fixed-lengths', help='Lengths of G-fixed cycles on a small model.')
    _add_spec_options(cmd, with_n=False)
    cmd.add_argument('--max-len', type=int, default=6)

    cmd = cmds.add_parser('verify-witness', help='Re-check a fixed zero-sum cycle.')
    cmd.add_argument('--record', metavar='path', help='RunRecord JSON whose witnesses are re-checked.')
    cmd.add_argument('--row', type=int, choices=range(1, 8), metavar='1..7')
    cmd.add_argument('--lieberman', action='store_true')
    cmd.add_argument('--z', metavar='point')
    cmd.add_argument('--a', metavar='point')
    cmd.add_argument('--a-prime', metavar='point')
    cmd.add_argument('--n', type=int)
    cmd.add_argument('--element-power', type=int, default=1)
    cmd.add_argument('--points', nargs='+', metavar='e;f', help='Cycle points as "e;f".')

    cmd = cmds.add_parser('lattice', help='Gram matrix, signature and discriminant group.')
    cmd.add_argument('name', choices=runs.LATTICE_NAMES)
    cmd.add_argument('--gram-file', metavar='path', help='JSON Gram matrix (with name "file").')
    cmd.add_argument('--roots-bound', type=int, metavar='b',
                     help=f'Count norm -2 vectors with coordinates in [-b, b] (default box {settings.ROOT_BOX_BOUND}).')

    cmd = cmds.add_parser('mukai', help='Admissibility of a Mukai vector (r, l, chi - r).')
    cmd.add_argument('--r', type=int, default=1)
    cmd.add_argument('--l', type=_int_list, metavar='x1,...,x10',
                     help='Coordinates in the Neron-Severi model; a bare 0 means the zero vector.')
    cmd.add_argument('--chi', type=int, help='Euler characteristic chi.')
    cmd.add_argument('--hilb-n', type=int, metavar='n', help='Shortcut for v = (1, 0, 1 - n).')

    cmd = cmds.add_parser('q2hilb', help='Freeness of the induced involution on multisets.')
    cmd.add_argument('--set-size', type=int, required=True)
    cmd.add_argument('--n', type=int, required=True)

    return parser


def _record_rows(record: RunRecord) -> List[Dict]:
    if isinstance(record.result, list):
        return record.result
    if record.verdicts:
        return [v.model_dump() for v in record.verdicts]
    if isinstance(record.result, dict):
        return [{k: v for k, v in record.result.items() if not isinstance(v, (dict,))}]
    return [{"command": record.command, "result": record.result}]


def render(record: RunRecord, fmt: str) -> str:
    if fmt == 'json':
        return record.model_dump_json(indent=2) + "\n"
    rows = _record_rows(record)
    if fmt == 'csv':
        return ReportWriter.to_csv(rows)
    return ReportWriter.to_text(rows)


def _witness_requests(opts) -> List[WitnessRequest]:
    if not opts.record:
        if opts.n is None or not opts.points:
            raise VerificationError("verify-witness needs --record, or --n and --points")
        return [WitnessRequest(row=opts.row, lieberman=opts.lieberman, z=opts.z, a=opts.a,
                               a_prime=opts.a_prime, n=opts.n, points=opts.points,
                               element_power=opts.element_power)]
    record = RunRecord.model_validate(read_json_file(Path(opts.record)))
    keys = ("row", "lieberman", "z", "a", "a_prime")
    spec = {k: record.parameters[k] for k in keys if k in record.parameters}
    requests = [WitnessRequest(**spec, n=v.n, points=v.witness, element_power=v.element_power or 1)
                for v in record.verdicts if v.witness]
    if not requests:
        raise VerificationError(f"{opts.record} carries no witness")
    return requests


def dispatch(opts) -> RunRecord:
    call = opts.call
    if call == 'indices':
        return runs.run_indices(opts.n, opts.b2, opts.family)
    if call == 'hodge':
        return runs.run_hodge(opts.n, opts.d)
    if call == 'families':
        return runs.run_families(opts.n)
    if call == 'action':
        request = ActionRequest(**_spec_fields(opts), n=opts.n, mode=opts.mode,
                                with_bruteforce=opts.with_bruteforce)
        return runs.run_action(request, expect_free=opts.expect_free)
    if call == 'fixed-lengths':
        # n only fixes the record shape; fixed cycles of every length are counted
        return runs.run_fixed_lengths(ActionRequest(**_spec_fields(opts), n=1), opts.max_len)
    if call == 'verify-witness':
        records = [runs.run_verify_witness(request) for request in _witness_requests(opts)]
        if len(records) == 1:
            return records[0]
        return RunRecord(command='verify-witness', parameters={"record": opts.record},
                         result=[r.result for r in records],
                         negative_finding=any(r.negative_finding for r in records))
    if call == 'lattice':
        gram = read_json_file(Path(opts.gram_file)) if opts.gram_file else None
        return runs.run_lattice(opts.name, opts.roots_bound, gram)
    if call == 'mukai':
        if opts.hilb_n is not None:
            return runs.run_mukai(1, 2 - opts.hilb_n, None)
        if opts.chi is None:
            raise VerificationError("mukai needs --chi or --hilb-n")
        l = None if opts.l in (None, [0]) else opts.l
        return runs.run_mukai(opts.r, opts.chi, l)
    if call == 'q2hilb':
        return runs.run_q2hilb(opts.set_size, opts.n)
    raise VerificationError(f"Unknown command {call}")


def main(args=None) -> int:
    parser = build_parser()
    opts = parser.parse_args(sys.argv[1:] if args is None else args)

    configure_logging(opts.log_level)
    if opts.level_multiplier:
        settings.LEVEL_MULTIPLIER = opts.level_multiplier
    if opts.max_enumeration:
        settings.MAX_ENUMERATION = opts.max_enumeration
    if opts.workers:
        settings.MAX_WORKERS = opts.workers
    if opts.format == 'xlsx' and not opts.output:
        parser.error('--format xlsx needs --output')

    try:
        record = dispatch(opts)
    except (VerificationError, ValidationError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if opts.format == 'xlsx':
        ReportWriter.write_workbook({record.command: _record_rows(record)}, Path(opts.output))
    elif opts.output:
        Path(opts.output).write_text(render(record, opts.format), encoding='utf-8')
    else:
        sys.stdout.write(render(record, opts.format))

    return EXIT_NEGATIVE if record.negative_finding else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
