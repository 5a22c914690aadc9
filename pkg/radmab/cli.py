#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Command-line interface for radmab. Run `radmab -h` in terminal for help.

Subcommands:
    - run             one experiment, CSVs and report under --out
    - sweep           one experiment per value of the config sweep section
    - calibrate-cfar  Monte Carlo OS-CFAR scale for a false-alarm rate
"""

import argparse
import logging
import os
import sys
from radmab import __version__
from radmab.core import ExperimentReport
from radmab.harness import run_experiment, run_sweep
from radmab.io import emit_csv, load_config, parse_config
from radmab.radar_rx import CfarParams, calibrate_cfar, false_alarm_rate, os_cfar_scale
from radmab.utils import derive_rng, greeting


def configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)-7s %(name)s: %(message)s')


def _config(args):
    overrides = dict(seed=args.seed, trials=args.trials, workers=args.workers,
                     timeseries_every=args.timeseries,
                     algorithms=args.algorithms.split(',') if args.algorithms else None)
    if args.config is None:
        return parse_config({}, **overrides)
    return load_config(args.config, **overrides)


def _finish(result, config, args):
    paths = emit_csv(result, args.out)
    if not args.no_report:
        report_cfg = config.report
        html = args.html or report_cfg.get('html', False)
        template = args.template or report_cfg.get('template')
        rendered = ExperimentReport(result).report(template=template, process_markdown=html)
        path = os.path.join(args.out, 'report.html' if html else 'report.md')
        with open(path, 'w') as f:
            f.write(rendered)
        paths.append(path)
    for path in paths:
        print(path)


def run(args):
    config = _config(args)
    _finish(run_experiment(config), config, args)


def sweep(args):
    config = _config(args)
    _finish(run_sweep(config), config, args)


def calibrate(args):
    params = CfarParams(num_training=args.training, num_guard=args.guard, os_rank=args.rank)
    scale = calibrate_cfar(args.pfa, params, int(args.cells), derive_rng(args.seed, 'calibrate'),
                           num_integrated=args.integrated)
    analytic = os_cfar_scale(args.pfa, params, args.integrated)
    rate = false_alarm_rate(CfarParams(args.training, args.guard, args.rank, scale), int(args.cells),
                            derive_rng(args.seed, 'check'), num_integrated=args.integrated)
    print('pfa             {:g}'.format(args.pfa))
    print('scale (MC)      {!r}'.format(scale))
    print('scale (exact)   {!r}'.format(analytic))
    print('empirical pfa   {:g} over {:d} fresh cells'.format(rate, int(args.cells)))


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog='radmab',
        description='Radar-gated bandit beam selection at a joint radar-communication '
                    'base station.')
    parser.add_argument('--version', action='version', version='%(prog)s v{}'.format(__version__))
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    for name, func, help_ in (('run', run, 'Run one experiment.'),
                              ('sweep', sweep, 'Run the sweep section of a config.')):
        p = subparsers.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument('-c', '--config', type=str, default=None,
                       help='YAML configuration file. The baseline scene if omitted.')
        p.add_argument('-o', '--out', type=str, required=True,
                       help='Output directory for the CSV files and the report.')
        p.add_argument('--seed', type=int, default=None, help='Override the base seed.')
        p.add_argument('--trials', type=int, default=None, help='Override the number of trials.')
        p.add_argument('--algorithms', type=str, default=None,
                       help='Comma separated algorithms: ucb, ucb-ag, ucb-dg, random, lucb, dbf.')
        p.add_argument('--workers', type=int, default=None,
                       help='Processes running trials in parallel. Results do not depend on it.')
        p.add_argument('--timeseries', type=int, default=None, metavar='N',
                       help='Also write timeseries.csv with aggregates every N slots.')
        p.add_argument('-t', '--template', type=str, default=None,
                       help='Jinja template for the report (builtin: default.md, sweep.md).')
        p.add_argument('--html', action='store_true', help='Write the report as HTML.')
        p.add_argument('--no-report', action='store_true', help='Only write the CSV files.')
        p.add_argument('-v', '--verbose', action='count', default=0,
                       help='Log progress (-v) or debugging details (-vv).')
        p.add_argument('-q', '--quiet', action='store_true', help='Do not print the greeting.')

    p = subparsers.add_parser('calibrate-cfar', help='Monte Carlo OS-CFAR scale calibration.')
    p.set_defaults(func=calibrate)
    p.add_argument('--pfa', type=float, default=1e-3, help='Target per-cell false-alarm rate.')
    p.add_argument('--cells', type=float, default=1e6, help='Noise cells to simulate.')
    p.add_argument('--integrated', type=int, default=1,
                   help='Packets integrated non-coherently per cell.')
    p.add_argument('--training', type=int, default=16)
    p.add_argument('--guard', type=int, default=2)
    p.add_argument('--rank', type=int, default=12)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('-v', '--verbose', action='count', default=0)
    p.add_argument('-q', '--quiet', action='store_true', help='Do not print the greeting.')
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    configure_logging(args.verbose)
    if not args.quiet:
        print(greeting())
    try:
        args.func(args)
    except (ValueError, OSError) as e:
        sys.exit('ERROR! {}'.format(e))


if __name__ == '__main__':
    main()
