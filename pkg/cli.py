from __future__ import print_function
import argparse
import hashlib
import io
import json
import logging
import sys

import numpy as np
import pyparsing
import scipy
import sympy

from analysis import eta_sweep, fit_fringe, lossy_table, mixture_deposition_pattern
from base_engine import init_logging
from circuit_parser import ParseError, load_circuit, angle as angle_grammar
from circuits import NAMED_CIRCUITS, CircuitError, build_named, dump_circuit, format_state, run_circuit
from elements import ElementError
from fock_core import DimensionError, ZeroProbabilityError
from measurement import MeasurementError
from oracle import OracleError, compare_results, dense_reference_run, prefix_circuit, symbolic_prefix_state


VERSION = '1.0.0'

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SEMANTIC = 2
EXIT_ZERO_PROBABILITY = 3
EXIT_ORACLE_MISMATCH = 4


class OracleMismatch(Exception):
    pass


def amplitudes_json(state):
    return [
        {'ket': list(ket), 're': float(a.real), 'im': float(a.imag)}
        for ket, a in state.items()
    ]


def metadata(path):
    with io.open(path, 'rb') as f:
        digest = hashlib.sha256(f.read()).hexdigest()
    return {
        'circuit_hash': digest,
        'source': path,
        'versions': {
            'fockline': VERSION,
            'numpy': np.__version__,
            'pyparsing': pyparsing.__version__,
            'scipy': scipy.__version__,
            'sympy': sympy.__version__,
        },
    }


def run_report(result):
    report = {
        'probability': float(result.probability),
        'modes': list(result.modes),
        'branches': [
            {'label': list(label), 'weight': float(weight), 'amplitudes': amplitudes_json(state)}
            for (weight, state), label in zip(result.output.branches, result.per_branch_labels)
        ],
    }
    if result.fidelity is not None:
        report['fidelity'] = float(result.fidelity)
    return report


def table_report(report):
    return {
        'eta2': float(report.eta2),
        'fidelity': float(report.fidelity),
        'raw_fidelity': float(report.raw_fidelity),
        'click_probability': float(report.click_probability),
        'rows': [
            {'arrival': list(row.arrival), 'weight': float(row.weight), 'amplitudes': amplitudes_json(row.state)}
            for row in report.rows
        ],
    }


def print_run(circuit, report):
    print('circuit: {} ({} modes, {} elements)'.format(circuit.name, circuit.mode_count, len(circuit.elements)))
    print('probability: {!r}'.format(report['probability']))
    if 'fidelity' in report:
        print('fidelity: {!r}'.format(report['fidelity']))
    for branch in report['branches']:
        print('branch {} weight {!r}'.format(tuple(branch['label']), branch['weight']))
        _print_amplitudes(branch['amplitudes'])


def _print_amplitudes(amplitudes):
    for entry in amplitudes:
        print('  |{}>  {!r} {!r}i'.format(','.join(str(n) for n in entry['ket']), entry['re'], entry['im']))


def print_table(report):
    print('eta2: {!r}'.format(report['eta2']))
    print('click probability: {!r}'.format(report['click_probability']))
    print('fidelity: {!r} (raw {!r})'.format(report['fidelity'], report['raw_fidelity']))
    for row in report['rows']:
        print('arrival {} weight {!r}'.format(tuple(row['arrival']), row['weight']))
        _print_amplitudes(row['amplitudes'])


def parse_range(text):
    """a:b:step -> inclusive list of values"""
    try:
        start, stop, step = [float(part) for part in text.split(':')]
    except ValueError:
        raise argparse.ArgumentTypeError('expected a:b:step, got {!r}'.format(text))
    if step == 0 or (stop - start) * step < 0:
        raise argparse.ArgumentTypeError('step {} does not lead from {} to {}'.format(step, start, stop))
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_angle(text):
    try:
        return angle_grammar.parse_string(text, parse_all=True)[0]
    except pyparsing.ParseBaseException:
        raise argparse.ArgumentTypeError('not an angle: {!r}'.format(text))


def check_oracle(circuit, result):
    dense = dense_reference_run(circuit)
    symbolic = (run_circuit(prefix_circuit(circuit)).state, symbolic_prefix_state(circuit))
    diff = compare_results(result, dense, symbolic=symbolic)
    report = {
        'probability': float(result.probability),
        'dense_probability': float(dense.probability),
        'probability_delta': float(diff.probability_delta),
        'weight_delta': float(diff.weight_delta),
        'state_delta': float(diff.state_delta),
        'symbolic_delta': float(diff.symbolic_delta),
        'matches': diff.matches,
    }
    return diff, report


def main(args=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='print the report as JSON')
    common.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    common.add_argument('--log-dir', default=None, help='also write a dated log file here')

    parser = argparse.ArgumentParser(description='Exact few-photon simulator for linear-optical circuits.')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run = commands.add_parser('run', parents=[common], help='execute a circuit file')
    run.add_argument('file')
    run.add_argument('--oracle', action='store_true', help='also diff against the dense reference')

    table = commands.add_parser('table', parents=[common], help='lossy-detector table of a two-detector scheme')
    table.add_argument('file')
    table.add_argument('--eta2', type=float, required=True)

    sweep = commands.add_parser('sweep', parents=[common], help='fidelity over a range of detector efficiencies')
    sweep.add_argument('file')
    sweep.add_argument('--eta2', type=parse_range, required=True, help='a:b:step')

    pattern = commands.add_parser('pattern', parents=[common], help='deposition pattern of the output state')
    pattern.add_argument('file')
    pattern.add_argument('--grid', type=int, default=360)

    oracle = commands.add_parser('oracle', parents=[common], help='diff against the dense and symbolic references')
    oracle.add_argument('file')

    build = commands.add_parser('build', parents=[common], help='print a named scheme as a circuit file')
    build.add_argument('name', choices=NAMED_CIRCUITS)
    build.add_argument('--extra-phase', type=parse_angle, default=None)
    build.add_argument('--eta2', type=float, default=1.0)

    args = parser.parse_args(args)
    init_logging(getattr(logging, args.log_level), args.log_dir)
    source = getattr(args, 'file', args.command)

    try:
        return execute(args)
    except ParseError as e:
        print(str(e), file=sys.stderr)
        return EXIT_PARSE
    except CircuitError as e:
        location = '{}:{}'.format(source, e.line) if e.line is not None else source
        print('{}: {}'.format(location, e.message), file=sys.stderr)
        return EXIT_SEMANTIC
    except (ElementError, MeasurementError, DimensionError, OracleError, IOError) as e:
        print('{}: {}'.format(source, e), file=sys.stderr)
        return EXIT_SEMANTIC
    except ZeroProbabilityError as e:
        print('{}: zero-probability outcome: {}'.format(source, e), file=sys.stderr)
        return EXIT_ZERO_PROBABILITY
    except OracleMismatch as e:
        print('{}: oracle mismatch: {}'.format(source, e), file=sys.stderr)
        return EXIT_ORACLE_MISMATCH


def emit(args, report, printer):
    if args.json:
        report['metadata'] = metadata(args.file)
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        printer(report)


def execute(args):
    if args.command == 'build':
        circuit = build_named(args.name, extra_phase=args.extra_phase, eta2=args.eta2)
        print(dump_circuit(circuit), end='')
        return EXIT_OK

    circuit = load_circuit(args.file)

    if args.command == 'run':
        result = run_circuit(circuit)
        report = run_report(result)
        mismatch = None
        if args.oracle:
            diff, report['oracle'] = check_oracle(circuit, result)
            mismatch = None if diff.matches else 'probability delta {}, state delta {}'.format(
                diff.probability_delta, diff.state_delta)
        emit(args, report, lambda r: print_run(circuit, r))
        if mismatch:
            raise OracleMismatch(mismatch)

    elif args.command == 'table':
        report = table_report(lossy_table(circuit, args.eta2))
        emit(args, report, print_table)

    elif args.command == 'sweep':
        points = eta_sweep(circuit, args.eta2)
        report = {'points': [
            {'eta2': float(p.eta2), 'fidelity': float(p.fidelity), 'click_probability': float(p.click_probability)}
            for p in points
        ]}

        def printer(r):
            print('{:>8} {:>22} {:>22}'.format('eta2', 'fidelity', 'click probability'))
            for p in r['points']:
                print('{:>8} {:>22} {:>22}'.format(repr(p['eta2']), repr(p['fidelity']), repr(p['click_probability'])))
        emit(args, report, printer)

    elif args.command == 'pattern':
        result = run_circuit(circuit)
        output = result.output
        photons = max([n for state in output.states for n in state.photon_numbers()] or [0])
        grid = [2 * np.pi * k / args.grid for k in range(args.grid)]
        points = mixture_deposition_pattern(output, grid, photons)
        fit = fit_fringe(points, photons)
        report = {
            'photons': photons,
            'branches': [
                {'label': list(label), 'weight': float(weight), 'state': format_state(state)}
                for (weight, state), label in zip(output.branches, result.per_branch_labels)
            ],
            'fit': dict(fit._asdict()),
            'points': [{'phi': phi, 'intensity': value} for phi, value in points],
        }

        def printer(r):
            for branch in r['branches']:
                print('branch {} weight {!r}: {}'.format(tuple(branch['label']), branch['weight'], branch['state']))
            print('fit: {!r} + {!r} cos({}phi) + {!r} sin({}phi), visibility {!r}, residual {!r}'.format(
                fit.offset, fit.cosine, photons, fit.sine, photons, fit.visibility, fit.residual))
            for p in r['points']:
                print('{!r} {!r}'.format(p['phi'], p['intensity']))
        emit(args, report, printer)

    elif args.command == 'oracle':
        result = run_circuit(circuit)
        diff, report = check_oracle(circuit, result)

        def printer(r):
            for key in sorted(r):
                print('{}: {!r}'.format(key, r[key]))
        emit(args, report, printer)
        if not diff.matches:
            raise OracleMismatch('probability delta {}, state delta {}'.format(diff.probability_delta, diff.state_delta))

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
