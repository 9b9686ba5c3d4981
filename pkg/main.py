#!/usr/bin/env python3
"""
FiltraLab - Hilbert Coefficients of Monomial Filtrations
Command-line entry point: per-task subcommands, `run` and `corpus`
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# Add current directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.modules_config import TOOL_NAME, TOOL_VERSION, THEOREM_CHECKERS, apply_overrides, get_enabled_tasks
from modules.cli.emitter import OUTPUT_FORMATS, emit
from modules.cli.instance_parser import TaskDecl, parse_instance
from modules.cli.runner import ReportDocument, corpus_run, run_instance
from shared.errors import FiltralabError
from shared.help_text import EPILOG, TARGET_USAGE, get_checker_help, get_help

logger = logging.getLogger(TOOL_NAME)


def _add_common_options(parser):
    parser.add_argument('--window', type=int, help=get_help('window'))
    parser.add_argument('--kmax', type=int, help=get_help('kmax'))
    parser.add_argument('--format', choices=OUTPUT_FORMATS, default='json', help=get_help('format'))
    parser.add_argument('--jobs', type=int, help=get_help('jobs'))
    parser.add_argument('--output', help=get_help('output'))
    parser.add_argument('--timing', action='store_true', help=get_help('timing'))
    parser.add_argument('--verbose', action='store_true', help=get_help('verbose'))


def build_parser():
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description='Hilbert functions, coefficients and theorem checks for monomial filtrations',
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--version', action='version', version=f"{TOOL_NAME} {TOOL_VERSION}")
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help=get_help('run'))
    run.add_argument('instance')
    _add_common_options(run)

    corpus = commands.add_parser('corpus', help=get_help('corpus'))
    corpus.add_argument('directory')
    _add_common_options(corpus)

    for key in get_enabled_tasks():
        if key == 'expect':
            continue
        epilog = f"checkers:\n{get_checker_help()}" if key == 'verify' else None
        sub = commands.add_parser(key, help=get_help(key), epilog=epilog,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
        sub.add_argument('instance')
        sub.add_argument('targets', nargs='*', metavar=TARGET_USAGE[key], help=get_help('targets'))
        sub.add_argument('--n', help=get_help('n'))
        sub.add_argument('--candidates', help=get_help('candidates'))
        _add_common_options(sub)
    return parser


def _task_from_arguments(args) -> TaskDecl:
    """The synthetic task a per-task subcommand stands for"""
    options = {}
    if args.window is not None:
        options['window'] = str(args.window)
    if args.n:
        options['n'] = args.n
    if args.kmax is not None:
        options['kmax'] = str(args.kmax)
    if args.candidates:
        options['candidates'] = args.candidates
    return TaskDecl(args.command, tuple(args.targets), options, line=0, column=0)


def run_subcommand(args) -> ReportDocument:
    try:
        text = Path(args.instance).read_text(encoding='utf-8')
        instance = parse_instance(text, path=args.instance)
    except FiltralabError as exc:
        return ReportDocument(args.instance, error=exc.to_issue(), include_timing=args.timing)
    except OSError as exc:
        return ReportDocument(args.instance, include_timing=args.timing,
                              error={'line': 0, 'column': 0, 'type': 'File Error', 'token': '',
                                     'message': f"could not read {args.instance}: {exc}"})
    if args.command == 'run':
        return run_instance(instance, args.timing)
    if args.targets:
        if args.command == 'verify' and args.targets[0] not in THEOREM_CHECKERS:
            return ReportDocument(instance.path, instance.digest, include_timing=args.timing,
                                  error={'line': 0, 'column': 0, 'type': 'Input Error',
                                         'token': args.targets[0],
                                         'message': f"unknown checker '{args.targets[0]}'"})
        tasks = [_task_from_arguments(args)]
    else:
        tasks = [t for t in instance.tasks if t.command == args.command]
    return run_instance(instance, args.timing, only=tasks)


def _footer(report) -> str:
    counts = report.verdict_counts()
    parts = [f"{counts.get(k, 0)} {k}" for k in ('verified', 'conditional', 'inapplicable', 'violated', 'error')]
    return f"{TOOL_NAME}: {', '.join(parts)} (exit {report.exit_code})"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    logger.debug("%s %s", TOOL_NAME, args.command)
    apply_overrides(rr_kmax=args.kmax, reduction_window=args.window,
                    itoh_window=args.window, jobs=args.jobs)

    if args.command == 'corpus':
        if not Path(args.directory).is_dir():
            sys.stderr.write(f"{TOOL_NAME}: {args.directory} is not a directory\n")
            return 1
        report = corpus_run(args.directory, include_timing=args.timing)
    else:
        report = run_subcommand(args)

    payload = emit(report, args.format)
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    sys.stderr.write(_footer(report) + '\n')
    if report.exit_code == 2 and args.command == 'corpus':
        for violation in report.violations():
            sys.stderr.write(f"  violated: {violation['instance']} :: {violation['task']}\n")
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
