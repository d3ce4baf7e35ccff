"""
Tabular output of envelope, prox, projection and sweep results.

Rows are flat dictionaries with a fixed key order: point coordinates,
gamma, side, value, prox coordinates, gradient coordinates, branch,
residual, iterations and, when something went wrong, a reason.
"""
import csv
import json
import math

import numpy as np

try:
    import pandas as pd
except ImportError:
    # pandas is only needed for records_dataframe
    pd = None


def format_number(value):
    """
    Deterministic text for CSV cells.

    >>> format_number(1 / 3)
    '0.333333333333'
    >>> format_number(float('-inf'))
    '-inf'
    >>> format_number(None)
    ''
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return '%d' % value
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if value == 0:
            return '0'
        return '%.12g' % value
    return str(value)


def _coordinates(prefix, values, n):
    if values is None:
        return [('%s_%d' % (prefix, i + 1), None) for i in range(n)]
    return [('%s_%d' % (prefix, i + 1), float(v))
            for i, v in enumerate(np.atleast_1d(values))]


def _row(point, gamma, side, value, prox=None, gradient=None, branch=None,
         residual=None, iterations=None, reason=None, extra=()):
    point = np.atleast_1d(point)
    n = len(point)
    row = _coordinates('point', point, n)
    row += [('gamma', gamma), ('side', side), ('value', value)]
    row += _coordinates('prox', prox, n)
    row += _coordinates('gradient', gradient, n)
    row += [('branch', branch), ('residual', residual),
            ('iterations', iterations)]
    row += list(extra)
    row.append(('reason', reason))
    return dict(row)


def envelope_row(sample):
    """ Row of an EnvelopeSample. """
    return _row(sample.point, sample.gamma, sample.side, sample.value,
                prox=sample.prox_point, gradient=sample.gradient,
                branch=sample.branch, residual=sample.residual,
                iterations=sample.iterations, reason=sample.reason)


def prox_row(outcome, gradient=None):
    """ Row of a ProxOutcome; value is the envelope value. """
    return _row(outcome.base, outcome.gamma, outcome.side,
                outcome.envelope_value, prox=outcome.point,
                gradient=gradient, branch=outcome.branch,
                residual=outcome.residual, iterations=outcome.iterations)


def sweep_row(record):
    """ Row of a SweepRecord; value is the envelope value. """
    return _row(record.point, record.gamma, record.side, record.envelope,
                prox=record.prox, branch=record.branch, extra=(
                    ('theta_at_prox', record.theta_at_prox),
                    ('bregman_term', record.bregman_term),
                    ('scaled_term', record.scaled_term),
                ))


def projection_row(point, side, projection, distance):
    """ Row of a projection; value is the distance to the projection. """
    return _row(point, None, side, distance, prox=projection)


def trajectory_row(point, gamma, side, value, iteration, residual=None):
    """ Row of a proximal point iterate; value is theta(point). """
    return _row(point, gamma, side, value, iterations=iteration,
                residual=residual)


def check_row(point, check):
    """ Row of one LimitCheck of a sweep at `point`. """
    row = _coordinates('point', point, len(np.atleast_1d(point)))
    row += [('check', check.name), ('passed', check.passed),
            ('gap', check.gap), ('detail', check.detail)]
    return dict(row)


def reference_row(point, value):
    """ Row of theta itself, the gamma -> 0 reference curve (gamma = 0). """
    return _row(point, 0.0, 'theta', value, branch='reference')


def error_row(point, gamma, side, exc):
    """ Row for a point where the solve raised; value is nan. """
    return _row(point, gamma, side, float('nan'),
                reason='%s: %s' % (type(exc).__name__, exc))


def _columns(rows):
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def write_csv(rows, stream, columns=None):
    """
    Writes rows as CSV with "\\n" line endings; missing cells stay empty.
    """
    columns = columns or _columns(rows)
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.get(c)) for c in columns])


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def json_row(row):
    """
    Non-finite numbers become null and are explained in `reason`.

    >>> json_row({'value': float('inf'), 'reason': None})
    {'value': None, 'reason': 'value is inf'}
    """
    out = {}
    missing = []
    for key, value in row.items():
        converted = _json_value(value)
        if converted is None and value is not None and key != 'reason':
            missing.append('%s is %s' % (key, format_number(value)))
        out[key] = converted
    if missing and not out.get('reason'):
        out['reason'] = ', '.join(missing)
    return out


def write_json(rows, stream, summary=None):
    """
    Writes {"rows": [...]} (plus an optional "summary" list of rows) as
    indented JSON.
    """
    payload = {'rows': [json_row(row) for row in rows]}
    if summary is not None:
        payload['summary'] = [json_row(row) for row in summary]
    json.dump(payload, stream, indent=2, allow_nan=False)
    stream.write('\n')


def records_dataframe(rows):
    """
    Returns the rows as a pandas.DataFrame, columns in output order.
    """
    if pd is None:
        raise ImportError(
            "Pandas is not installed, please install it in your "
            "environment to use this function."
        )
    return pd.DataFrame(list(rows), columns=_columns(rows))
