"""
Verification reports: per-case records, JSON payloads and pandas tables.
The JSON payload is deterministic for a fixed config; wall-clock stamps are kept
in a separate `run` block.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import json
import logging
import math
import time

import numpy as np
import pandas as pd

from constants.constants import DEFAULT_TIMEZONE, REPORT_SCHEMA_VERSION
from utils.helpers import format_timestamp, get_report_time

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
SKIP = 'skip'


def encode_value(value: Any) -> Any:
    """JSON-ready form: complex numbers become [re, im], numpy scalars become Python scalars."""
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [encode_value(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    return value


@dataclass
class CaseRecord:
    name: str
    anchor: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    lhs: Any = None
    rhs: Any = None
    tolerance: Optional[float] = None
    status: str = PASS
    message: str = ''
    runtime: float = 0.0

    @property
    def abs_error(self) -> Optional[float]:
        if self.lhs is None or self.rhs is None:
            return None
        try:
            return float(abs(complex(self.lhs) - complex(self.rhs)))
        except (TypeError, ValueError):
            return None

    @property
    def rel_error(self) -> Optional[float]:
        err = self.abs_error
        if err is None:
            return None
        return err / (1.0 + abs(complex(self.rhs)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'anchor': self.anchor,
            'inputs': encode_value(self.inputs),
            'lhs': encode_value(self.lhs),
            'rhs': encode_value(self.rhs),
            'abs_error': self.abs_error,
            'rel_error': self.rel_error,
            'tolerance': self.tolerance,
            'status': self.status,
            'message': self.message,
        }


@dataclass
class VerificationReport:
    suite: str
    environment: Dict[str, Any] = field(default_factory=dict)
    cases: List[CaseRecord] = field(default_factory=list)
    timezone: str = DEFAULT_TIMEZONE

    def add(self, case: CaseRecord) -> CaseRecord:
        self.cases.append(case)
        level = logging.WARNING if case.status == FAIL else logging.INFO
        logger.log(level, f"[{self.suite}] {case.name}: {case.status} {case.message}".rstrip())
        return case

    def compare(self, name: str, anchor: str, lhs, rhs, tolerance: float, inputs: Optional[Dict] = None,
                relative: bool = True, started: Optional[float] = None) -> CaseRecord:
        """Record lhs vs rhs; the error is relative to 1 + |rhs| unless relative is False."""
        case = CaseRecord(name=name, anchor=anchor, inputs=inputs or {}, lhs=lhs, rhs=rhs, tolerance=tolerance)
        if lhs is None or rhs is None:
            case.status = SKIP
            case.message = 'a side is undefined'
        else:
            err = case.rel_error if relative else case.abs_error
            if err is None or not math.isfinite(err) or err > tolerance:
                case.status = FAIL
                case.message = f"error {err:.3e} above {tolerance:.1e}" if err is not None else 'not comparable'
        if started is not None:
            case.runtime = time.perf_counter() - started
        return self.add(case)

    def check(self, name: str, anchor: str, ok: bool, inputs: Optional[Dict] = None, message: str = '',
              started: Optional[float] = None) -> CaseRecord:
        case = CaseRecord(name=name, anchor=anchor, inputs=inputs or {}, status=PASS if ok else FAIL,
                          message=message)
        if started is not None:
            case.runtime = time.perf_counter() - started
        return self.add(case)

    def skip(self, name: str, anchor: str, message: str, inputs: Optional[Dict] = None) -> CaseRecord:
        return self.add(CaseRecord(name=name, anchor=anchor, inputs=inputs or {}, status=SKIP, message=message))

    def error(self, name: str, anchor: str, exc: Exception, inputs: Optional[Dict] = None) -> CaseRecord:
        return self.add(CaseRecord(name=name, anchor=anchor, inputs=inputs or {}, status=FAIL,
                                   message=f"{type(exc).__name__}: {exc}"))

    def extend(self, other: 'VerificationReport') -> None:
        for case in other.cases:
            case.name = f"{other.suite}/{case.name}"
            self.cases.append(case)

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.cases)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.cases:
            counts[c.status] += 1
        return counts

    def payload(self) -> Dict[str, Any]:
        """Deterministic part of the report."""
        return {
            'schema_version': REPORT_SCHEMA_VERSION,
            'suite': self.suite,
            'environment': encode_value(self.environment),
            'cases': [c.to_dict() for c in self.cases],
            'summary': self.counts,
            'passed': self.passed,
        }

    def to_json(self, with_run_info: bool = True) -> str:
        document = self.payload()
        if with_run_info:
            document['run'] = {
                'finished_at': format_timestamp(get_report_time(self.timezone)),
                'runtime': {c.name: c.runtime for c in self.cases},
            }
        return json.dumps(document, sort_keys=True, indent=2)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for c in self.cases:
            rows.append({
                'case': c.name,
                'status': c.status,
                'abs_error': c.abs_error,
                'rel_error': c.rel_error,
                'tolerance': c.tolerance,
                'anchor': c.anchor,
                'message': c.message,
            })
        return pd.DataFrame(rows, columns=['case', 'status', 'abs_error', 'rel_error', 'tolerance', 'anchor',
                                           'message'])

    def to_table(self) -> str:
        frame = self.to_frame()
        if frame.empty:
            return f"{self.suite}: no cases"
        return frame.to_string(index=False, float_format=lambda v: f"{v:.3e}")

    def write(self, json_path: Optional[str] = None, csv_path: Optional[str] = None) -> None:
        try:
            if json_path:
                with open(json_path, 'w', encoding='utf-8') as handle:
                    handle.write(self.to_json())
                logger.info(f"Report written to {json_path}")
            if csv_path:
                self.to_frame().to_csv(csv_path, index=False)
                logger.info(f"Case table written to {csv_path}")
        except OSError as e:
            logger.error(f"Error writing report: {e}", exc_info=True)
            raise


def contributions_frame(contributions) -> pd.DataFrame:
    """Table of (orbit, contribution, error) rows."""
    rows = []
    for c in contributions:
        rows.append({
            'orbit': c.orbit,
            're': c.value.real,
            'im': c.value.imag,
            'error_estimate': c.error_estimate,
            'nodes': c.nodes,
            'skipped': c.skipped,
        })
    return pd.DataFrame(rows, columns=['orbit', 're', 'im', 'error_estimate', 'nodes', 'skipped'])
