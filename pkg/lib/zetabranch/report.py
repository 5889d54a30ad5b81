'''
Report records shared by every verifier, plus the JSON encoding and atomic writes of results.
A check is a dict with a `passed` flag and whatever quantitative detail the check produced.
'''

import os
import math
import json
import enum
import tempfile

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.errors import IoError

def check(passed: bool, **detail) -> dict:
    result = { 'passed': bool(passed) }
    result.update(detail)
    return result

def failures(report, waive: list = (), prefix: str = '') -> list:
    '''
    Dotted paths of every check in the nested report with passed == False, minus waived names.
    A waiver matches the full path or its last component.
    '''
    found = []
    if isinstance(report, dict):
        if report.get('passed') is False:
            name = prefix.rsplit('.', 1)[-1]
            if prefix not in waive and name not in waive:
                found.append(prefix or '<root>')
        for key in sorted(report.keys(), key=str):
            value = report[key]
            if isinstance(value, (dict, list)):
                found.extend(failures(value, waive, f'{prefix}.{key}' if prefix else str(key)))
    elif isinstance(report, list):
        for i, value in enumerate(report):
            if isinstance(value, (dict, list)):
                found.extend(failures(value, waive, f'{prefix}[{i}]'))
    return found

def encode(value):
    '''
    Plain JSON values: complex numbers become [re, im], infinities the strings "inf"/"-inf".
    '''
    if isinstance(value, dict):
        return { str(k): encode(v) for k, v in value.items() }
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [encode(float(value.real)), encode(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if math.isnan(value):
            return 'nan'
        return value
    if isinstance(value, np.ndarray):
        return encode(value.tolist())
    return value

def dumps(report: dict) -> str:
    return json.dumps(encode(report), sort_keys=True, indent=2) + '\n'

def writeAtomic(path: str, content: str) -> str:
    '''
    Write through a temporary file in the target directory, then rename over the target.
    '''
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix='.zb-', suffix='.tmp')
        with os.fdopen(fd, 'w') as handle:
            handle.write(content)
        os.replace(tmp, path)
    except OSError as e:
        raise IoError(f'Cannot write {path}: {e}') from e
    log.debug(f'Wrote {path}')
    return path
