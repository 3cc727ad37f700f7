"""
Subcommand handlers for the command-line interface.
Each handler takes the parsed arguments and the resolved config, prints its
output and returns an exit code.
"""

import json
import logging

import numpy as np
import pandas as pd

from core.closed_forms import genus_mode_bridge
from core.errors import SpectralError
from core.genus import ExpPolynomial, check_hypotheses
from core.liealg import record_to_dict
from core.rootsys import root_datum_to_dict
from core.spectral import measure_conversion_factor, orbit_density, spectral_support
from features.suites import BRIDGE_DELTAS, additive_context, case_context, group_data, run_suite
from utils.report import encode_value

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def cmd_roots(args, config) -> int:
    """Root data per group: roots, coroots, heights, exponents, center."""
    payload = []
    for group in config.groups:
        rd, _, _ = group_data(group['type'], group['lattice'])
        payload.append(root_datum_to_dict(rd))
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for entry in payload:
            print(f"{entry['type']}/{entry['lattice']}: heights {entry['heights']}, "
                  f"exponents {entry['exponents']}, |W| = {entry['weyl_order']}")
            frame = pd.DataFrame([{'root': r['root'], 'coroot': r['coroot'], 'height': r['height']}
                                  for r in entry['positive_roots']])
            print(frame.to_string(index=False))
    return EXIT_OK


def cmd_orbits(args, config) -> int:
    """The nilpotent orbit catalog per group."""
    payload = []
    for group in config.groups:
        _, _, catalog = group_data(group['type'], group['lattice'])
        payload.extend(record_to_dict(record) for record in catalog)
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        frame = pd.DataFrame([{
            'orbit': r['name'],
            'h': ','.join(r['h']),
            'dim': r['orbit_dim'],
            'dim c_e': r['c_e_dim'],
            'dim c_phi': r['c_phi_dim'],
            'classes': len(r['component_classes']),
            '|W(e)|': len(r['w_of_e']),
        } for r in payload])
        print(frame.to_string(index=False))
    return EXIT_OK


def cmd_measure(args, config) -> int:
    """Spectral supports and orbit densities on a small grid per component class."""
    ctx = additive_context(config) if config.additive else case_context(config)
    rows = []
    for group in config.groups:
        rd, _, catalog = group_data(group['type'], group['lattice'])
        for orbit in catalog:
            points = spectral_support(ctx, orbit, samples=args.samples)
            for point in points:
                cls = orbit.class_by_label(point.component_class)
                u = np.array([point.u], dtype=complex).reshape(1, orbit.torus_rank)
                try:
                    density = complex(orbit_density(rd, ctx, orbit, u, cls)[0])
                except SpectralError as e:
                    logger.warning(f"Density unavailable at {point.point}: {e}")
                    density = complex('nan')
                rows.append({
                    'group': rd.label,
                    'orbit': orbit.name,
                    'class': cls.label,
                    'point': encode_value(point.point),
                    'density': encode_value(density),
                    'support': point.support,
                })
        logger.info(f"{rd.label}: measure conversion factor {measure_conversion_factor(rd, ctx):.10g}")
    if args.json:
        print(json.dumps({'context': ctx.describe(), 'hypotheses': check_hypotheses(ctx).to_dict(),
                          'points': rows}, sort_keys=True, indent=2))
    else:
        print(pd.DataFrame(rows).to_string(index=False))
    return EXIT_OK


def cmd_verify(args, config) -> int:
    """Run a suite; exit 1 when any case fails."""
    report = run_suite(args.suite, config)
    print(report.to_table())
    counts = report.counts
    print(f"\n{report.suite}: {counts['pass']} passed, {counts['fail']} failed, {counts['skip']} skipped")
    report.write(json_path=args.json_out, csv_path=args.csv_out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_limit(args, config) -> int:
    """The q -> 1 bridge for A1 with f(s) = (1 + s^2) exp(s^2)."""
    rd, _, _ = group_data('A1', 'adjoint')
    f = ExpPolynomial({(0,): 1.0, (2,): 1.0}, rank=1)
    c = additive_context(config).genus.params['c']
    deltas = args.deltas or list(BRIDGE_DELTAS)
    points = genus_mode_bridge(rd, f, deltas, c=c)
    frame = pd.DataFrame([{
        'delta': p.delta,
        'q': p.q,
        'rescaled': p.rescaled.real,
        'additive': p.additive.real,
        'error': p.error,
    } for p in points])
    if args.json:
        print(json.dumps({'c': c, 'points': encode_value(frame.to_dict(orient='records'))}, sort_keys=True, indent=2))
    else:
        print(frame.to_string(index=False))
    return EXIT_OK


COMMANDS = {
    'roots': cmd_roots,
    'orbits': cmd_orbits,
    'measure': cmd_measure,
    'verify': cmd_verify,
    'limit': cmd_limit,
}
