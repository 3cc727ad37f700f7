import json

import pytest

from app import build_parser, cli_main
from features.commands import EXIT_CONFIG, EXIT_FAIL, EXIT_OK


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ('SPECTRAL_Q', 'SPECTRAL_NODES', 'SPECTRAL_SEED', 'SPECTRAL_REPORT_TZ'):
        monkeypatch.delenv(key, raising=False)


def test_roots_json(capsys):
    assert cli_main(['roots', '--group', 'G2', '--json']) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload[0]['heights'] == [1, 1, 2, 3, 4, 5]
    assert payload[0]['exponents'] == [1, 5]


def test_g2_orbits_json(capsys):
    assert cli_main(['orbits', '--group', 'G2', '--json']) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload) == 5
    assert payload[3]['name'] == 'subregular'


def test_orbits_table(capsys):
    assert cli_main(['orbits', '--group', 'A2']) == EXIT_OK
    out = capsys.readouterr().out
    for name in ('zero', 'minimal', 'regular'):
        assert name in out


def test_measure_json(capsys):
    assert cli_main(['measure', '--group', 'A1', '--samples', '4', '--json']) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload['hypotheses']['conditions']['positive_z1']
    assert {p['orbit'] for p in payload['points']} == {'zero', 'regular'}


def test_bad_config_exits_with_two(tmp_path, capsys):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'groups': [{'type': 'A2', 'lattice': 'spin'}]}))
    assert cli_main(['verify', '--config', str(path)]) == EXIT_CONFIG
    assert 'groups[0].lattice' in capsys.readouterr().err


def test_q_below_one_is_a_config_error():
    assert cli_main(['roots', '--q', '0.5']) == EXIT_CONFIG


def test_verify_writes_reports(tmp_path, capsys):
    json_out = tmp_path / 'report.json'
    csv_out = tmp_path / 'report.csv'
    code = cli_main(['verify', '--suite', 'structural', '--group', 'A1', '--nodes', '128',
                     '--json-out', str(json_out), '--csv-out', str(csv_out)])
    assert code in (EXIT_OK, EXIT_FAIL)
    document = json.loads(json_out.read_text())
    assert document['suite'] == 'structural'
    assert (code == EXIT_OK) == document['passed']
    assert 'passed' in capsys.readouterr().out


def test_parser_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['verify', '--suite', 'everything'])
