"""Commandline interface entry points."""

import argparse
import logging
import pathlib
import sys
import typing

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_UNVERIFIABLE = 3

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='qsynth',
        description='Synthesizes state preparation, controlled state preparation and '
                    'unitary circuits over single-qubit gates and CNOT.')
    parser.add_argument('-c', '--config', type=pathlib.Path,
                        help='Load this configuration file instead of the default files.')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Show the effective configuration before starting.')
    parser.add_argument('-V', '--version', action='store_true',
                        help='Show the version of qsynth and stop.')
    parser.add_argument('-d', '--debug', action='store_true',
                        help="Enables debug logging for qsynth's own log entries. "
                             "Edit the logging config in qsynth.cfg for more powerful options.")
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')

    def synthesis_command(name: str, help_text: str, methods: typing.Sequence[str]):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--ancilla', type=int, default=0, metavar='M',
                         help='Number of ancillary qubits the circuit may use.')
        sub.add_argument('--method', choices=methods, default='auto')
        sub.add_argument('--out', type=pathlib.Path, default=pathlib.Path('circuit.json'),
                         help='Circuit JSON file to write.')
        sub.add_argument('--metrics', type=pathlib.Path, default=pathlib.Path('metrics.json'),
                         help='Metrics JSON file to write.')
        sub.add_argument('--tol', type=float, default=None,
                         help='Verification tolerance; defaults to the configured one.')
        sub.add_argument('--no-verify', action='store_true',
                         help='Skip the simulator check of the synthesized circuit.')
        return sub

    sub = synthesis_command('qsp', 'Prepare a state from |0...0>.',
                            ['auto', 'cascade', 'rosenthal'])
    sub.add_argument('--state', type=pathlib.Path, required=True)
    sub.set_defaults(func=cmd_qsp)

    sub = synthesis_command('cqsp', 'Prepare one state per index value, coherently.',
                            ['auto', 'case1', 'controlled_layers', 'two_stage'])
    sub.add_argument('--spec', type=pathlib.Path, required=True)
    sub.set_defaults(func=cmd_cqsp)

    sub = synthesis_command('unitary', 'Implement a unitary matrix.', ['auto', 'csd'])
    sub.add_argument('--matrix', type=pathlib.Path, required=True)
    sub.set_defaults(func=cmd_unitary)

    sub = synthesis_command('oracle', 'Load the columns of a unitary: |x>|0> -> |x>|u_x>.',
                            ['auto', 'case1', 'controlled_layers', 'two_stage'])
    sub.add_argument('--matrix', type=pathlib.Path, required=True)
    sub.add_argument('--inverse', action='store_true',
                     help='Write the inverse oracle instead.')
    sub.set_defaults(func=cmd_oracle)

    sub = subparsers.add_parser('verify', help='Check a circuit file with the simulator.')
    sub.add_argument('--circuit', type=pathlib.Path, required=True)
    target = sub.add_mutually_exclusive_group(required=True)
    target.add_argument('--state', type=pathlib.Path)
    target.add_argument('--spec', type=pathlib.Path)
    target.add_argument('--matrix', type=pathlib.Path)
    sub.add_argument('--tol', type=float, default=None)
    sub.set_defaults(func=cmd_verify)

    sub = subparsers.add_parser('bench', help='Sweep random instances into a CSV file.')
    sub.add_argument('--task', choices=['qsp', 'cqsp', 'unitary'], required=True)
    sub.add_argument('--n', required=True, metavar='A:B', help='Range of target widths.')
    sub.add_argument('--k', default='0', metavar='A:B', help='Range of index widths (cqsp).')
    sub.add_argument('--ancilla', default='0', metavar='LIST',
                     help='Comma-separated ancilla budgets.')
    sub.add_argument('--csv', type=pathlib.Path, required=True)
    sub.add_argument('--seed', type=int, default=None)
    sub.add_argument('--jobs', type=int, default=None)
    sub.add_argument('--no-verify', action='store_true')
    sub.set_defaults(func=cmd_bench)

    return parser


def main(argv: typing.Sequence[str] = None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        from . import __version__
        print(__version__)
        raise SystemExit()

    if not args.command:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)

    from . import config
    confparser = config.load_config(args.config, args.verbose)
    config.configure_logging(confparser, enable_debug=args.debug)
    log_startup()

    raise SystemExit(run_command(args, confparser))


def run_command(args: argparse.Namespace, confparser) -> int:
    """Runs the selected subcommand, mapping input errors to their exit status."""

    from . import circuit, documents, linalg

    try:
        return args.func(args, confparser)
    except OSError as ex:
        log.error('Unable to access file: %s', ex)
    except (documents.InvalidDocument, linalg.DecompositionError, circuit.CircuitError) as ex:
        log.error('Invalid input: %s', ex)
    except ValueError as ex:
        log.error('Invalid argument: %s', ex)
    return EXIT_INPUT_ERROR


def _exit_status(verdict) -> int:
    from . import verification

    return {
        verification.OK: EXIT_OK,
        verification.FAIL: EXIT_VERIFICATION_FAILED,
        verification.UNVERIFIABLE: EXIT_UNVERIFIABLE,
    }[verdict.status]


def _synthesize(args: argparse.Namespace, confparser, method: str, build, check,
                analytic_depth: float, tolerance_key: str, extra=None) -> int:
    """Builds, verifies and writes the circuit and its metrics."""

    from . import documents, timing, verification

    sim = confparser.simulator()
    tol = args.tol if args.tol is not None else confparser.value(tolerance_key, float)
    durations = timing.Timing()

    with durations.record_duration(timing.SYNTHESIS):
        c = build()
    log.info('Synthesized with method %s: %d gates on %d qubits', method, c.size, c.num_qubits)

    verdict = None
    if not args.no_verify:
        with durations.record_duration(timing.VERIFICATION):
            verdict = check(sim, c, tol)
        if verdict.status == verification.UNVERIFIABLE:
            log.warning('Circuit not verified: %s', verdict.reason)
        else:
            print(verdict.line())

    verified = None if verdict is None or verdict.status == verification.UNVERIFIABLE \
        else verdict.ok
    metrics = documents.MetricsDocument.for_circuit(
        c, method, analytic_depth, verified=verified, timing=durations.to_json_compat(),
        **(extra(c) if extra else {}))
    documents.save_circuit(args.out, c)
    documents.write_json(args.metrics, metrics.to_dict())

    if verified is False:
        log.error('Verification failed: %s', verdict.reason)
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_qsp(args: argparse.Namespace, confparser) -> int:
    from . import documents, qsp, verification

    state = documents.load_state(args.state)
    v = state.amplitudes
    method = qsp.select_method(state.num_qubits, args.ancilla, args.method)
    return _synthesize(
        args, confparser, method,
        build=lambda: qsp.build_qsp(v, args.ancilla, method),
        check=lambda sim, c, tol: verification.check_state_preparation(sim, c, v, tol),
        analytic_depth=qsp.analytic_depth(state.num_qubits, args.ancilla),
        tolerance_key='fidelity_tolerance')


def cmd_cqsp(args: argparse.Namespace, confparser) -> int:
    from . import cqsp, documents, verification

    spec = documents.load_cqsp_spec(args.spec)
    method = cqsp.resolve_method(spec.k, spec.n, args.ancilla, args.method)
    log.info('Method for k=%d, n=%d, m=%d: %s (requested %s)',
             spec.k, spec.n, args.ancilla, method, args.method)
    return _synthesize(
        args, confparser, method,
        build=lambda: cqsp.build_cqsp(spec, args.ancilla, method),
        check=lambda sim, c, tol: verification.check_cqsp(sim, c, spec, tol),
        analytic_depth=cqsp.analytic_depth(spec.k, spec.n, args.ancilla),
        tolerance_key='fidelity_tolerance')


def cmd_unitary(args: argparse.Namespace, confparser) -> int:
    from . import documents, unitary, verification

    u = documents.load_matrix(args.matrix)
    n = len(u).bit_length() - 1
    bound = unitary.cnot_lower_bound(n)

    def lower_bound(c) -> dict:
        ratio = c.cnot_count / bound if bound else None
        log.info('CNOT count %d against the lower bound %d', c.cnot_count, bound)
        return {'lower_bound': bound, 'lower_bound_ratio': ratio}

    return _synthesize(
        args, confparser, 'csd',
        build=lambda: unitary.build_unitary_csd(u, args.ancilla),
        check=lambda sim, c, tol: verification.check_unitary(sim, c, u, tol),
        analytic_depth=unitary.analytic_depth(n, args.ancilla),
        tolerance_key='unitary_tolerance',
        extra=lower_bound)


def cmd_oracle(args: argparse.Namespace, confparser) -> int:
    from . import circuit, cqsp, documents, unitary, verification

    u = documents.load_matrix(args.matrix)
    spec = unitary.OracleSpec(u)
    method = cqsp.resolve_method(spec.n, spec.n, args.ancilla, args.method)

    def build():
        c = unitary.build_oracle(spec, args.ancilla, method)
        return circuit.adjoint(c) if args.inverse else c

    def check(sim, c, tol):
        # The inverse is checked through its adjoint, the forward oracle.
        forward = circuit.adjoint(c) if args.inverse else c
        return verification.check_cqsp(sim, forward, spec.as_cqsp(), tol)

    return _synthesize(
        args, confparser, method, build, check,
        analytic_depth=cqsp.analytic_depth(spec.n, spec.n, args.ancilla),
        tolerance_key='fidelity_tolerance')


def cmd_verify(args: argparse.Namespace, confparser) -> int:
    from . import documents, unitary, verification

    sim = confparser.simulator()
    c = documents.load_circuit(args.circuit)

    if args.state:
        v = documents.load_state(args.state).amplitudes
        tol = args.tol if args.tol is not None else confparser.value('fidelity_tolerance', float)
        verdict = verification.check_state_preparation(sim, c, v, tol)
    elif args.spec:
        spec = documents.load_cqsp_spec(args.spec)
        tol = args.tol if args.tol is not None else confparser.value('fidelity_tolerance', float)
        verdict = verification.check_cqsp(sim, c, spec, tol)
    else:
        u = documents.load_matrix(args.matrix)
        working = c.num_qubits - len(c.ancillas)
        if 1 << working == len(u) ** 2:
            tol = args.tol if args.tol is not None \
                else confparser.value('fidelity_tolerance', float)
            verdict = verification.check_cqsp(sim, c, unitary.OracleSpec(u).as_cqsp(), tol)
        else:
            tol = args.tol if args.tol is not None \
                else confparser.value('unitary_tolerance', float)
            verdict = verification.check_unitary(sim, c, u, tol)

    print(verdict.line())
    log.info('Verification of %s: %s', args.circuit, verdict.line())
    return _exit_status(verdict)


def cmd_bench(args: argparse.Namespace, confparser) -> int:
    from . import bench

    seed = args.seed if args.seed is not None else confparser.value('seed', int)
    jobs = args.jobs if args.jobs is not None else confparser.value('bench_jobs', int)
    if jobs < 1:
        raise ValueError(f'--jobs should be at least 1, got {jobs}')

    instances = bench.sweep(args.task, bench.parse_range(args.n), bench.parse_range(args.k),
                            bench.parse_list(args.ancilla))
    runner = bench.Bench(
        sim=confparser.simulator(),
        seed=seed,
        verify=not args.no_verify,
        fidelity_tolerance=confparser.value('fidelity_tolerance', float),
        unitary_tolerance=confparser.value('unitary_tolerance', float),
    )
    log.info('Running %d %s instances with seed %d on %d threads',
             len(instances), args.task, seed, jobs)
    rows = runner.run(instances, jobs=jobs)
    bench.write_csv(args.csv, rows)
    log.info('Sweep timing: %s', runner.durations.to_json_compat())
    return EXIT_OK


def log_startup():
    """Log the version of qsynth."""

    from . import __version__

    old_level = log.level
    try:
        log.setLevel(logging.INFO)
        log.info('Starting qsynth %s', __version__)
    finally:
        log.setLevel(old_level)


if __name__ == '__main__':
    main()
