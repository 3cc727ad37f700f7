"""
Configuration loading for the spectral checker.
Environment defaults come from .env (python-dotenv); a JSON config file and CLI
flags override them. Validation errors carry the dotted path of the bad key.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional
import json
import logging
import os

from dotenv import load_dotenv

from constants.constants import (
    ADDITIVE_C,
    CANONICAL_C_OFFSET,
    CANONICAL_C_SLOPE,
    DEFAULT_DEGREE,
    DEFAULT_NODES,
    DEFAULT_PAIRS,
    DEFAULT_Q_RANK_ONE,
    DEFAULT_SEED,
    DEFAULT_SHIFT,
    DEFAULT_TIMEZONE,
    LINE_NODES,
    POSITIVITY_SAMPLES,
    TRUNC_HEIGHT,
)
from core.errors import ConfigError, UnsupportedTypeError
from core.rootsys import normalize_type

logger = logging.getLogger(__name__)

GENUS_KINDS = ('one_minus_c_over_x', 'function_field', 'constant', 's_plus_c', 'bridge')
LATTICES = ('adjoint', 'simply_connected')


@dataclass
class QuadratureConfig:
    nodes: int = DEFAULT_NODES
    offset: Optional[float] = None
    shift: float = DEFAULT_SHIFT
    trunc_height: float = TRUNC_HEIGHT
    line_nodes: int = LINE_NODES


@dataclass
class CheckerConfig:
    q: float = DEFAULT_Q_RANK_ONE
    groups: List[Dict[str, str]] = field(default_factory=lambda: [{'type': 'A1', 'lattice': 'adjoint'}])
    genus: Dict[str, Any] = field(default_factory=dict)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    pairs: int = DEFAULT_PAIRS
    positivity_samples: int = POSITIVITY_SAMPLES
    seed: int = DEFAULT_SEED
    degree: int = DEFAULT_DEGREE
    tolerance: Optional[float] = None
    density_perturbation: Optional[Dict[str, Any]] = None
    timezone: str = DEFAULT_TIMEZONE

    @property
    def additive(self) -> bool:
        return self.genus.get('kind') == 's_plus_c'

    def genus_spec(self) -> Dict[str, Any]:
        """The genus entry with the canonical c filled in for the given q."""
        spec = dict(self.genus) if self.genus else {'kind': 'one_minus_c_over_x'}
        if spec['kind'] == 'one_minus_c_over_x' and spec.get('c') is None:
            spec['c'] = CANONICAL_C_SLOPE / self.q + CANONICAL_C_OFFSET
        if spec['kind'] == 's_plus_c' and spec.get('c') is None:
            spec['c'] = ADDITIVE_C
        return spec

    def to_dict(self) -> Dict[str, Any]:
        return {
            'q': self.q,
            'groups': [dict(g) for g in self.groups],
            'genus': self.genus_spec(),
            'quadrature': vars(self.quadrature).copy(),
            'pairs': self.pairs,
            'positivity_samples': self.positivity_samples,
            'seed': self.seed,
            'degree': self.degree,
            'tolerance': self.tolerance,
            'density_perturbation': self.density_perturbation,
        }


def _number(value, path: str, positive: bool = False, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _validate_genus(raw: Any) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigError('genus', "expected an object")
    kind = raw.get('kind')
    if kind not in GENUS_KINDS:
        raise ConfigError('genus.kind', f"unknown genus kind {kind!r}")
    spec: Dict[str, Any] = {'kind': kind}
    if 'c' in raw and raw['c'] is not None:
        spec['c'] = _number(raw['c'], 'genus.c')
    if 'value' in raw:
        spec['value'] = _number(raw['value'], 'genus.value')
    if 'scale' in raw:
        spec['scale'] = _number(raw['scale'], 'genus.scale', positive=True)
    if kind == 'function_field':
        alphas = raw.get('alphas', [])
        if not isinstance(alphas, list):
            raise ConfigError('genus.alphas', "expected a list of [re, im] pairs")
        for i, pair in enumerate(alphas):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f'genus.alphas[{i}]', f"expected [re, im], got {pair!r}")
            for j, part in enumerate(pair):
                _number(part, f'genus.alphas[{i}][{j}]')
        spec['alphas'] = [[float(a), float(b)] for a, b in alphas]
    return spec


def _validate_groups(raw: Any) -> List[Dict[str, str]]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError('groups', "expected a non-empty list")
    groups = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f'groups[{i}]', "expected an object")
        try:
            label = normalize_type(str(entry.get('type', '')))
        except UnsupportedTypeError:
            raise ConfigError(f'groups[{i}].type', f"unsupported type {entry.get('type')!r}")
        lattice = entry.get('lattice', 'adjoint')
        if lattice not in LATTICES:
            raise ConfigError(f'groups[{i}].lattice', f"unknown lattice {lattice!r}")
        groups.append({'type': label, 'lattice': lattice})
    return groups


def _validate_quadrature(raw: Any, base: QuadratureConfig) -> QuadratureConfig:
    if not isinstance(raw, dict):
        raise ConfigError('quadrature', "expected an object")
    known = set(vars(base))
    for key in raw:
        if key not in known:
            raise ConfigError(f'quadrature.{key}', "unknown key")
    updates = {}
    if 'nodes' in raw:
        updates['nodes'] = _number(raw['nodes'], 'quadrature.nodes', positive=True, integer=True)
    if raw.get('offset') is not None:
        updates['offset'] = _number(raw['offset'], 'quadrature.offset')
    if 'shift' in raw:
        updates['shift'] = _number(raw['shift'], 'quadrature.shift', positive=True)
    if 'trunc_height' in raw:
        updates['trunc_height'] = _number(raw['trunc_height'], 'quadrature.trunc_height', positive=True)
    if 'line_nodes' in raw:
        updates['line_nodes'] = _number(raw['line_nodes'], 'quadrature.line_nodes', positive=True, integer=True)
    return replace(base, **updates)


def config_from_dict(raw: Dict[str, Any], base: Optional[CheckerConfig] = None) -> CheckerConfig:
    """
    Validate a parsed config document against schema version 1.

    Args:
        raw: parsed JSON object
        base: defaults to overlay (environment defaults when None)

    Returns:
        CheckerConfig

    Raises:
        ConfigError: with the dotted path of the first offending key
    """
    config = base or env_defaults()
    if not isinstance(raw, dict):
        raise ConfigError('<root>', "config must be a JSON object")
    known = {'q', 'groups', 'genus', 'quadrature', 'pairs', 'positivity_samples', 'seed', 'degree', 'tolerance',
             'density_perturbation', 'schema_version'}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown key")
    if raw.get('schema_version', 1) != 1:
        raise ConfigError('schema_version', f"unsupported version {raw['schema_version']!r}")

    updates: Dict[str, Any] = {}
    if 'q' in raw:
        updates['q'] = _number(raw['q'], 'q', positive=True)
    if 'groups' in raw:
        updates['groups'] = _validate_groups(raw['groups'])
    if 'genus' in raw:
        updates['genus'] = _validate_genus(raw['genus'])
    if 'quadrature' in raw:
        updates['quadrature'] = _validate_quadrature(raw['quadrature'], config.quadrature)
    for key in ('pairs', 'positivity_samples', 'seed', 'degree'):
        if key in raw:
            updates[key] = _number(raw[key], key, positive=(key != 'seed'), integer=True)
    if raw.get('tolerance') is not None:
        updates['tolerance'] = _number(raw['tolerance'], 'tolerance', positive=True)
    if raw.get('density_perturbation') is not None:
        dp = raw['density_perturbation']
        if not isinstance(dp, dict) or 'orbit' not in dp:
            raise ConfigError('density_perturbation.orbit', "expected {orbit, factor}")
        updates['density_perturbation'] = {
            'orbit': str(dp['orbit']),
            'factor': _number(dp.get('factor', 1.01), 'density_perturbation.factor'),
        }

    config = replace(config, **updates)
    q = config.q
    if not config.additive and q <= 1.0:
        raise ConfigError('q', f"|q| must exceed 1 in multiplicative mode, got {q}")
    return config


def env_defaults() -> CheckerConfig:
    """Defaults from the environment (SPECTRAL_* variables)."""
    load_dotenv()
    config = CheckerConfig()
    try:
        if os.getenv('SPECTRAL_Q'):
            config.q = float(os.getenv('SPECTRAL_Q'))
        if os.getenv('SPECTRAL_NODES'):
            config.quadrature = replace(config.quadrature, nodes=int(os.getenv('SPECTRAL_NODES')))
        if os.getenv('SPECTRAL_SEED'):
            config.seed = int(os.getenv('SPECTRAL_SEED'))
        if os.getenv('SPECTRAL_REPORT_TZ'):
            config.timezone = os.getenv('SPECTRAL_REPORT_TZ')
    except ValueError as e:
        logger.error(f"Bad SPECTRAL_* environment value: {e}", exc_info=True)
        raise ConfigError('env', str(e))
    return config


def load_config(path: Optional[str] = None) -> CheckerConfig:
    """Environment defaults overlaid with the JSON file at path, when given."""
    config = env_defaults()
    if not path:
        return config
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        raise ConfigError('<file>', f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError('<file>', f"invalid JSON at line {e.lineno}: {e.msg}")
    logger.info(f"Loaded config from {path}")
    return config_from_dict(raw, config)
