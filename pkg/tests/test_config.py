import json

import pytest

from core.errors import ConfigError
from utils.config import CheckerConfig, config_from_dict, env_defaults, load_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ('SPECTRAL_Q', 'SPECTRAL_NODES', 'SPECTRAL_SEED', 'SPECTRAL_REPORT_TZ'):
        monkeypatch.delenv(key, raising=False)


def test_defaults():
    config = config_from_dict({}, CheckerConfig())
    assert config.q == pytest.approx(1.7)
    assert config.groups == [{'type': 'A1', 'lattice': 'adjoint'}]
    assert config.positivity_samples == 100
    assert not config.additive
    assert config.genus_spec()['c'] == pytest.approx(0.8 / 1.7 + 0.2)


def test_full_document():
    config = config_from_dict({
        'schema_version': 1,
        'q': 1.5,
        'groups': [{'type': 'g2'}, {'type': 'A2', 'lattice': 'simply_connected'}],
        'genus': {'kind': 'function_field', 'alphas': [[1.0, 1.0], [1.0, -1.0]]},
        'quadrature': {'nodes': 128, 'shift': 2.0},
        'pairs': 4,
        'positivity_samples': 20,
        'tolerance': 1e-6,
        'density_perturbation': {'orbit': 'subregular', 'factor': 1.05},
    }, CheckerConfig())
    assert config.groups[0] == {'type': 'G2', 'lattice': 'adjoint'}
    assert config.quadrature.nodes == 128
    assert config.quadrature.trunc_height == 8
    assert config.genus_spec()['alphas'] == [[1.0, 1.0], [1.0, -1.0]]
    assert config.density_perturbation == {'orbit': 'subregular', 'factor': 1.05}
    assert config.to_dict()['pairs'] == 4
    assert config.positivity_samples == 20


def test_group_aliases():
    config = config_from_dict({'groups': [{'type': 'a1+a1'}, {'type': ' c2 '}]}, CheckerConfig())
    assert [g['type'] for g in config.groups] == ['A1xA1', 'C2']


def test_additive_genus_allows_q_one():
    config = config_from_dict({'q': 1.0, 'genus': {'kind': 's_plus_c'}}, CheckerConfig())
    assert config.additive
    assert config.genus_spec()['c'] == pytest.approx(0.4)


@pytest.mark.parametrize('raw, path', [
    ({'q': 0.5}, 'q'),
    ({'q': 'big'}, 'q'),
    ({'colour': 'red'}, 'colour'),
    ({'schema_version': 2}, 'schema_version'),
    ({'groups': []}, 'groups'),
    ({'groups': [{'type': 'E8'}]}, 'groups[0].type'),
    ({'groups': [{'type': 'A2', 'lattice': 'spin'}]}, 'groups[0].lattice'),
    ({'genus': {'kind': 'hyperbolic'}}, 'genus.kind'),
    ({'genus': {'kind': 'function_field', 'alphas': [[1.0]]}}, 'genus.alphas[0]'),
    ({'quadrature': {'nodes': 12.5}}, 'quadrature.nodes'),
    ({'quadrature': {'step': 1}}, 'quadrature.step'),
    ({'pairs': 0}, 'pairs'),
    ({'positivity_samples': 0}, 'positivity_samples'),
    ({'density_perturbation': {'factor': 2}}, 'density_perturbation.orbit'),
])
def test_errors_name_the_offending_key(raw, path):
    with pytest.raises(ConfigError) as info:
        config_from_dict(raw, CheckerConfig())
    assert info.value.path == path


def test_environment_defaults(monkeypatch):
    monkeypatch.setenv('SPECTRAL_Q', '2.5')
    monkeypatch.setenv('SPECTRAL_SEED', '9')
    config = env_defaults()
    assert config.q == 2.5
    assert config.seed == 9
    monkeypatch.setenv('SPECTRAL_NODES', 'many')
    with pytest.raises(ConfigError):
        env_defaults()


def test_load_config_file(tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'q': 1.5, 'groups': [{'type': 'B2'}]}))
    config = load_config(str(path))
    assert config.q == 1.5
    assert config.groups[0]['type'] == 'B2'

    broken = tmp_path / 'broken.json'
    broken.write_text('{"q": ')
    with pytest.raises(ConfigError) as info:
        load_config(str(broken))
    assert info.value.path == '<file>'
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'missing.json'))
