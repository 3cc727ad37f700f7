"""
Spectral Decomposition Checker
Numerical verification of the unramified Eisenstein spectral decomposition
for split groups of rank at most two.

Subcommands:
- roots: root data, heights and exponents
- orbits: the nilpotent orbit catalog with centralizer data
- measure: spectral supports and orbit densities
- verify: identity suites (main, structural, g2, cohomology, positivity, all)
- limit: the q -> 1 bridge between the two modes
"""

from typing import List, Optional
import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from core.errors import ConfigError, SpectralError
from features.commands import COMMANDS, EXIT_CONFIG, EXIT_FAIL
from features.suites import SUITES
from utils.config import config_from_dict, load_config

logger = logging.getLogger(__name__)


def setup_logging():
    """Configure logging from SPECTRAL_LOG_FILE and SPECTRAL_LOG_LEVEL."""
    level = getattr(logging, os.getenv('SPECTRAL_LOG_LEVEL', 'INFO').upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.getenv('SPECTRAL_LOG_FILE', 'spectral_checker.log')),
            logging.StreamHandler()
        ]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='spectral-checker', description=__doc__.strip().splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON config file (schema version 1)')
    common.add_argument('--group', help='root system type: A1, A1xA1, A2, B2, C2, G2')
    common.add_argument('--lattice', choices=['adjoint', 'simply_connected'], default=None)
    common.add_argument('--q', type=float, default=None)
    common.add_argument('--nodes', type=int, default=None, help='quadrature nodes per torus dimension')
    common.add_argument('--shift', type=float, default=None, help='contour shift kappa in q^(kappa rho^vee)')
    common.add_argument('--offset', type=float, default=None, help='node phase offset')
    common.add_argument('--trunc-height', type=float, default=None)
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--json', action='store_true', help='print JSON instead of a table')

    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('roots', parents=[common], help='root data')
    sub.add_parser('orbits', parents=[common], help='nilpotent orbit catalog')
    measure = sub.add_parser('measure', parents=[common], help='spectral supports and densities')
    measure.add_argument('--samples', type=int, default=8)
    verify = sub.add_parser('verify', parents=[common], help='run identity suites')
    verify.add_argument('--suite', default='main', choices=sorted(SUITES) + ['all'])
    verify.add_argument('--json-out', default=None)
    verify.add_argument('--csv-out', default=None)
    limit = sub.add_parser('limit', parents=[common], help='q -> 1 bridge')
    limit.add_argument('--deltas', type=float, nargs='+', default=None)
    return parser


def _overrides(args) -> dict:
    overrides = {}
    if args.group:
        overrides['groups'] = [{'type': args.group, 'lattice': args.lattice or 'adjoint'}]
    if args.q is not None:
        overrides['q'] = args.q
    if args.seed is not None:
        overrides['seed'] = args.seed
    quadrature = {key: value for key, value in (('nodes', args.nodes), ('shift', args.shift),
                                                ('offset', args.offset), ('trunc_height', args.trunc_height))
                  if value is not None}
    if quadrature:
        overrides['quadrature'] = quadrature
    return overrides


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Parse argv, resolve the config and dispatch; returns the exit code."""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        config = config_from_dict(_overrides(args), config)
    except ConfigError as e:
        logger.error(f"Configuration error at {e.path}: {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        logger.info(f"Running {args.command} for {[g['type'] for g in config.groups]}")
        return COMMANDS[args.command](args, config)
    except SpectralError as e:
        logger.error(f"Command {args.command} failed: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


def main():
    """Main application entry point."""
    setup_logging()
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
