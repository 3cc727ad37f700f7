import json

import numpy as np
import pandas as pd

from core.errors import DivergenceError
from core.spectral import OrbitContribution
from utils.report import FAIL, PASS, SKIP, VerificationReport, contributions_frame, encode_value


def test_encode_value():
    assert encode_value(1 + 2j) == [1.0, 2.0]
    assert encode_value({'a': np.float64(0.5), 2: (np.int64(3),)}) == {'a': 0.5, '2': [3]}
    assert encode_value(np.array([1j])) == [[0.0, 1.0]]


def test_compare_uses_the_relative_error():
    report = VerificationReport(suite='demo')
    ok = report.compare('close', 'anchor', 100.0 + 1e-8, 100.0, 1e-9)
    bad = report.compare('far', 'anchor', 1.0, 1.1, 1e-9)
    absolute = report.compare('absolute', 'anchor', 100.0 + 1e-8, 100.0, 1e-9, relative=False)
    undefined = report.compare('undefined', 'anchor', None, 1.0, 1e-9)
    assert ok.status == PASS
    assert bad.status == FAIL
    assert absolute.status == FAIL
    assert undefined.status == SKIP
    assert report.counts == {PASS: 1, FAIL: 2, SKIP: 1}
    assert not report.passed


def test_errors_and_merging():
    first = VerificationReport(suite='main')
    first.check('ok', 'anchor', True)
    second = VerificationReport(suite='g2')
    second.error('broken', 'anchor', DivergenceError('no limit'))
    first.extend(second)
    assert [c.name for c in first.cases] == ['ok', 'g2/broken']
    assert 'DivergenceError' in first.cases[1].message


def test_payload_is_deterministic():
    report = VerificationReport(suite='main', environment={'q': 1.7})
    report.compare('case', 'anchor', 1 + 1j, 1 + 1j, 1e-9, inputs={'f': [1, 0]})
    assert report.payload() == report.payload()
    document = json.loads(report.to_json())
    assert document['schema_version'] == 1
    assert document['cases'][0]['lhs'] == [1.0, 1.0]
    assert 'finished_at' in document['run']
    assert 'run' not in json.loads(report.to_json(with_run_info=False))


def test_frames_and_files(tmp_path):
    report = VerificationReport(suite='main')
    report.compare('case', 'anchor', 2.0, 2.0, 1e-9)
    frame = report.to_frame()
    assert list(frame['status']) == [PASS]
    assert 'case' in report.to_table()
    report.write(json_path=str(tmp_path / 'r.json'), csv_path=str(tmp_path / 'r.csv'))
    assert pd.read_csv(tmp_path / 'r.csv')['case'].tolist() == ['case']
    assert json.loads((tmp_path / 'r.json').read_text())['passed']
    assert VerificationReport(suite='empty').to_table() == 'empty: no cases'


def test_contributions_frame():
    frame = contributions_frame([OrbitContribution(orbit='zero', value=1 + 0.5j, nodes=16),
                                 OrbitContribution(orbit='regular', skipped=True)])
    assert frame['orbit'].tolist() == ['zero', 'regular']
    assert frame['skipped'].tolist() == [False, True]
