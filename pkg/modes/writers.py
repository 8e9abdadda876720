"""CSV and JSON rendering of command results; stdout carries nothing else."""

import csv
import io

from rest_framework.renderers import JSONRenderer

FLOAT_FORMAT = '%.9e'


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def render_csv(result):
    buffer = io.StringIO()
    for comment in result.comments:
        buffer.write(f'# {comment}\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def render_json(result):
    return JSONRenderer().render(result.payload).decode('utf-8') + '\n'


def render(result, output_format):
    if output_format == 'json':
        return render_json(result)
    return render_csv(result)
