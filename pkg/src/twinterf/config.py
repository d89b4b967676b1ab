"""
Experiment configuration: YAML files merged with command-line flags and
validated into :class:`ExperimentConfig`.
"""
import logging
from pathlib import Path
from typing import Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .hbt import GridSpec

logger = logging.getLogger(__name__)

EXPERIMENTS = ('hom', 'extended-hom', 'nport', 'hbt', 'network', 'convergence')
DISCRETE_EXPERIMENTS = ('hom', 'extended-hom', 'nport', 'network')

_REQUIRED = {
    'nport': ('n',),
    'hbt': ('x0', 'wavelength', 'L', 'sigma', 'grid'),
    'convergence': ('x0', 'wavelength', 'L', 'sigma', 'grid'),
    'network': ('network',),
}

_GEOMETRY = ('x0', 'wavelength', 'L', 'sigma', 'center', 'grid', 'slice_x1', 'sampling')

# Keys describing a run of each experiment in the output metadata.
_PARAMETERS = {
    'hom': ('reference',),
    'extended-hom': ('reference', 'topology', 'relabel'),
    'nport': ('n', 'reference'),
    'network': ('network', 'reference', 'allow_nonphysical'),
    'hbt': _GEOMETRY + ('engine',),
    'convergence': _GEOMETRY + ('bins',),
}


def load_hparam(filename):
    """ Reads every YAML document in ``filename`` into one flat dict """
    try:
        with open(filename, 'r', encoding='utf-8') as stream:
            docs = list(yaml.safe_load_all(stream))
    except OSError as error:
        raise ConfigError("Cannot read config file {}: {}".format(filename, error)) from error
    except yaml.YAMLError as error:
        raise ConfigError("Malformed YAML in {}: {}".format(filename, error)) from error
    hparam_dict = dict()
    for doc in docs:
        if doc is None:
            continue
        if not isinstance(doc, dict):
            raise ConfigError("Config documents must be mappings, {} holds a {}".format(
                filename, type(doc).__name__))
        for k, v in doc.items():
            hparam_dict[k] = v
    return hparam_dict


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    format: Literal['csv', 'json'] = 'csv'
    path: Optional[str] = None
    units: Literal['absolute', 'paper'] = 'absolute'


class ExperimentConfig(BaseModel):
    """
    One validated experiment run. Only the parameters of the selected
    ``experiment`` are required; lengths are in metres.
    """
    model_config = ConfigDict(extra='forbid', frozen=True)

    experiment: Literal['hom', 'extended-hom', 'nport', 'hbt', 'network', 'convergence']

    # discrete
    n: Optional[int] = Field(None, ge=2)
    reference: int = Field(1, ge=1)
    topology: Literal['eq6', 'fig5', 'fig6'] = 'eq6'
    relabel: bool = False
    network: Optional[str] = None
    allow_nonphysical: bool = False
    verify: bool = False

    # continuous
    x0: Optional[float] = Field(None, gt=0)
    wavelength: Optional[float] = Field(None, gt=0)
    L: Optional[float] = Field(None, gt=0)
    sigma: Optional[float] = Field(None, gt=0)
    center: float = 0.0
    grid: Optional[str] = None
    slice_x1: Optional[float] = None
    engine: Literal['closed-form', 'nport'] = 'closed-form'
    sampling: Literal['cell', 'point'] = 'cell'
    bins: Tuple[int, ...] = (128, 256, 512, 1024)

    output: OutputConfig = OutputConfig()

    @model_validator(mode='after')
    def _complete(self):
        missing = [key for key in _REQUIRED.get(self.experiment, ())
                   if getattr(self, key) is None]
        if missing:
            raise ValueError("experiment {} requires {}".format(
                self.experiment, ', '.join(missing)))

        if self.experiment == 'nport':
            if self.n % 2:
                raise ValueError("n must be even, got {}".format(self.n))
            if self.reference > self.n:
                raise ValueError("reference detector {} outside 1..{}".format(
                    self.reference, self.n))
        elif self.experiment in ('hom', 'extended-hom'):
            dim = 2 if self.experiment == 'hom' else 4
            if self.reference > dim:
                raise ValueError("reference detector {} outside 1..{}".format(
                    self.reference, dim))
        elif self.experiment == 'network':
            if not Path(self.network).is_file():
                raise ValueError("network file {} does not exist".format(self.network))

        if self.experiment not in DISCRETE_EXPERIMENTS:
            if self.verify:
                raise ValueError("verify applies to discrete experiments only")
            if self.output.units == 'paper':
                raise ValueError("paper units apply to discrete experiments only")
            GridSpec.parse(self.grid)
            if any(b < 2 for b in self.bins):
                raise ValueError("bins must all be at least 2, got {}".format(self.bins))
        return self

    def grid_spec(self):
        return GridSpec.parse(self.grid)

    def parameters(self):
        """ The experiment name and the parameters that apply to it """
        keys = {'experiment'}.union(_PARAMETERS[self.experiment])
        return self.model_dump(mode='json', include=keys, exclude_none=True)


def _describe(error):
    parts = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item['loc'])
        parts.append("{}: {}".format(location, item['msg']) if location else item['msg'])
    return '; '.join(parts)


def _merge(file_values, flags, prefix=''):
    merged = dict(file_values)
    for key, value in flags.items():
        if isinstance(value, dict):
            merged[key] = _merge(merged.get(key) or {}, value, prefix + key + '.')
            continue
        if key in merged and merged[key] != value:
            logger.warning("Flag value %s=%r overrides config file value %r",
                           prefix + key, value, merged[key])
        merged[key] = value
    return merged


def parse_config(path=None, flags=None):
    """
    Builds an :class:`ExperimentConfig` from an optional YAML file and
    command-line ``flags``. Flags take precedence; each overridden file value
    is logged as a warning. Flags set to None are ignored.

    :raises ConfigError: naming the offending key
    """
    file_values = load_hparam(path) if path is not None else {}
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    if isinstance(flags.get('output'), dict):
        flags['output'] = {k: v for k, v in flags['output'].items() if v is not None}
    try:
        return ExperimentConfig.model_validate(_merge(file_values, flags))
    except ValidationError as error:
        raise ConfigError(_describe(error)) from None
