"""
Tabular output of experiment results: CSV and JSON files and the summary
tables printed by the command line.
"""
import json
import logging

import numpy as np
import pandas as pd

from . import __version__
from .errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'


def discrete_frame(pattern, units='absolute'):
    frame = pd.DataFrame({
        'detector': pattern.detectors,
        'probability': pattern.counts,
    })
    if units == 'paper':
        frame['probability_paper_units'] = pattern.in_paper_units()
    return frame


def continuous_frame(pattern):
    """ ``x2,density`` for a slice, ``x1,x2,density`` for the full pattern """
    if pattern.is_slice:
        return pd.DataFrame({'x2': pattern.grid, 'density': pattern.density})
    x1, x2 = np.meshgrid(pattern.grid, pattern.grid, indexing='ij')
    return pd.DataFrame({
        'x1': x1.ravel(),
        'x2': x2.ravel(),
        'density': pattern.density.ravel(),
    })


def convergence_frame(results):
    return pd.DataFrame(results, columns=['bins', 'max_relative_deviation'])


def metadata(config, overlap):
    return {
        'schema_version': SCHEMA_VERSION,
        'engine_version': __version__,
        'experiment': config.experiment,
        'parameters': config.parameters(),
        'overlap': float(overlap),
    }


def write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info("Wrote %d rows to %s", len(frame), path)


def write_json(frame, meta, path):
    document = {
        'metadata': meta,
        'data': {column: frame[column].tolist() for column in frame.columns},
    }
    with open(path, 'w', encoding='utf-8') as stream:
        json.dump(document, stream, indent=2, sort_keys=True)
        stream.write('\n')
    logger.info("Wrote %d rows to %s", len(frame), path)


def read_json(path):
    """ :return: ``(metadata, frame)`` of a file written by :func:`write_json` """
    with open(path, 'r', encoding='utf-8') as stream:
        document = json.load(stream)
    return document['metadata'], pd.DataFrame(document['data'])


def write(frame, meta, output):
    if output.path is None:
        return
    try:
        if output.format == 'json':
            write_json(frame, meta, output.path)
        else:
            write_csv(frame, output.path)
    except OSError as error:
        raise ConfigError("Cannot write output file {}: {}".format(output.path, error)) from error


def summary(frame):
    return frame.to_string(index=False)
