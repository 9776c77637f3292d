#!/usr/bin/env python3

'''
JSON Lines logit records, one per line:

....
{"id": "a", "label": 3, "logits": [1, 4, 3, 2]}
....

Files are UTF-8 with LF line endings. Numbers are written with 17
significant digits in float syntax, which round-trips every float64
exactly, the sign of zero included.
'''

import dataclasses
import json
import math

import numpy as np

from sortkd.core import ValidationError

class RecordFormatError(ValidationError):
    def __init__(self, path, line_number, message):
        super().__init__('{}:{}: {}'.format(path, line_number, message))
        self.path = path
        self.line_number = line_number

@dataclasses.dataclass(frozen=True)
class LogitRecord:
    id: str
    label: int
    logits: np.ndarray

    @property
    def num_classes(self):
        return self.logits.shape[0]

    def replace_logits(self, logits):
        return LogitRecord(self.id, self.label, np.asarray(logits, dtype=np.float64))

def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)

def parse_record(line, num_classes=None):
    '''
    :param num_classes: class count fixed by the previous records, if any.
    :raise ValueError: with a message, the caller adds the location.
    '''
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ValueError('malformed JSON: {}'.format(e))
    if not isinstance(obj, dict):
        raise ValueError('expected a JSON object, got {}'.format(type(obj).__name__))
    for key in ('id', 'label', 'logits'):
        if key not in obj:
            raise ValueError('missing key: {}'.format(key))
    record_id, label, logits = obj['id'], obj['label'], obj['logits']
    if not isinstance(record_id, str):
        raise ValueError('id must be a string, got {!r}'.format(record_id))
    if not isinstance(label, int) or isinstance(label, bool):
        raise ValueError('label must be an integer, got {!r}'.format(label))
    if not isinstance(logits, list) or not all(_is_number(v) for v in logits):
        raise ValueError('logits must be an array of numbers')
    if len(logits) < 2:
        raise ValueError('logits need at least 2 classes, got {}'.format(len(logits)))
    values = np.array(logits, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError('logits must be finite')
    if num_classes is not None and values.shape[0] != num_classes:
        raise ValueError('expected {} logits, got {}'.format(num_classes, values.shape[0]))
    if not 0 <= label < values.shape[0]:
        raise ValueError('label {} out of range for {} classes'.format(label, values.shape[0]))
    return LogitRecord(record_id, label, values)

def parse_records(path):
    '''
    Stream the records of a file in order, one line at a time.

    The first record fixes the class count of the file. Blank lines are skipped.

    :raise RecordFormatError: with the 1-based line number of the offending line.
    '''
    num_classes = None
    with open(path, 'r', encoding='utf-8', newline='\n') as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = parse_record(line, num_classes)
            except ValueError as e:
                raise RecordFormatError(path, line_number, str(e))
            num_classes = record.num_classes
            yield record

def format_number(value):
    '''
    JSON number text with 17 significant digits, always in float syntax.

    Integral values get a trailing .0 so that JSON readers parse them back as
    floats, -0.0 included.
    '''
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError('cannot serialize non-finite value: {!r}'.format(value))
    text = '{:.17g}'.format(value)
    if '.' not in text and 'e' not in text:
        text += '.0'
    return text

def emit_record(record):
    '''
    :return: one JSON line, newline included.
    '''
    return '{{"id": {}, "label": {}, "logits": [{}]}}\n'.format(
        json.dumps(record.id, ensure_ascii=False),
        int(record.label),
        ', '.join(format_number(v) for v in record.logits),
    )

def write_records(path, records):
    '''
    :return: number of records written
    '''
    count = 0
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(emit_record(record))
            count += 1
    return count
