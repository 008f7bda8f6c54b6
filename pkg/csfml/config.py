"""
Run configuration for the csfml command line.
Values come from (lowest to highest precedence) built-in defaults, an
optional YAML file given with --config, and explicit command line flags.
"""

import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional, Union

import yaml

from csfml.data.cohort import Scheme, Task
from csfml.data.synth import PRESETS
from csfml.learners.base import Hyperparameters, ModelKind, ModelSpec
from csfml.utils.errors import ConfigError

OUT_DIR_ENV = 'CSFML_OUT_DIR'
DEFAULT_OUT_DIR = 'results'

COMMANDS = ('stage', 'summarize', 'correlate', 'evaluate', 'compare', 'synth')
# commands that read the two cohort csv files
COHORT_COMMANDS = ('stage', 'summarize', 'correlate', 'evaluate', 'compare')

HYPERPARAMETER_KEYS = ('C', 'lam', 'k', 'rounds', 'max_depth', 'min_leaf')
# execution-only options, left out of the config embedded in result files
EXECUTION_KEYS = ('out_dir', 'num_cpu', 'plots')


@dataclass(frozen=True)
class RunConfig:
    command: str
    biomarkers: Optional[str] = None
    assessments: Optional[str] = None
    scheme: str = Scheme.MMSE.value
    task: str = Task.BINARY.value
    model: Optional[str] = None
    folds: int = 5
    seed: int = 0
    stratified: bool = True
    balance: bool = False
    C: Optional[float] = None
    lam: Optional[float] = None
    k: Optional[int] = None
    rounds: Optional[int] = None
    max_depth: Optional[int] = None
    min_leaf: Optional[int] = None
    num_cpu: Union[int, str] = 1
    plots: bool = False
    out_dir: Optional[str] = None
    preset: Optional[str] = 'table1'
    spec: Optional[str] = None
    scale: float = 1.0

    def to_dict(self):
        return asdict(self)

    def provenance(self):
        """Options that can change results; identical runs on 1 or many cpus share it."""
        return {key: value for key, value in asdict(self).items() if key not in EXECUTION_KEYS}

    def hyperparameters(self):
        overrides = {key: getattr(self, key) for key in HYPERPARAMETER_KEYS if getattr(self, key) is not None}
        return Hyperparameters(**overrides)

    def model_spec(self, kind=None):
        kind = self.model if kind is None else kind
        return ModelSpec(ModelKind.from_token(kind) if not isinstance(kind, ModelKind) else kind,
                         self.hyperparameters(), seed=self.seed)

    def validate(self):
        """Raises ConfigError / ModelSpecError / FileNotFoundError; called before anything is written."""
        if self.command not in COMMANDS:
            raise ConfigError("unknown command '%s'" % self.command)
        if self.scheme not in {s.value for s in Scheme}:
            raise ConfigError("scheme must be one of mmse|cdr, got '%s'" % self.scheme)
        if self.task not in {t.value for t in Task}:
            raise ConfigError("task must be one of binary|multi, got '%s'" % self.task)
        if self.balance and self.task != Task.MULTI.value:
            raise ConfigError("--balance is only valid with --task multi")
        if not isinstance(self.folds, int) or self.folds < 2:
            raise ConfigError("folds must be an integer >= 2, got %r" % (self.folds,))
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer, got %r" % (self.seed,))
        if self.num_cpu != 'max' and (not isinstance(self.num_cpu, int) or self.num_cpu < 1):
            raise ConfigError("num_cpu must be a positive integer or 'max', got %r" % (self.num_cpu,))
        if not self.out_dir:
            raise ConfigError("no output directory")

        if self.command == 'evaluate':
            if self.model is None:
                raise ConfigError("evaluate needs --model")
            self.model_spec()
        elif self.command == 'compare':
            self.hyperparameters()

        if self.command in COHORT_COMMANDS:
            for name in ('biomarkers', 'assessments'):
                path = getattr(self, name)
                if path is None:
                    raise ConfigError("missing --%s" % name)
                if not os.path.isfile(path):
                    raise FileNotFoundError("%s file not found: %s" % (name, path))

        if self.command == 'synth':
            if not self.scale > 0:
                raise ConfigError("scale must be positive, got %r" % (self.scale,))
            if self.spec is not None:
                if not os.path.isfile(self.spec):
                    raise FileNotFoundError("group spec file not found: %s" % self.spec)
            elif self.preset not in PRESETS:
                raise ConfigError("unknown preset '%s' (choose from %s)" % (self.preset, '|'.join(PRESETS)))
        return self


def load_config_file(path):
    if not os.path.isfile(path):
        raise FileNotFoundError("config file not found: %s" % path)
    with open(path) as f:
        try:
            values = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError("%s: invalid yaml (%s)" % (path, e))
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise ConfigError("%s: expected a mapping of option: value" % path)
    known = {f.name for f in fields(RunConfig)} - {'command'}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError("%s: unknown option(s) %s" % (path, ', '.join(map(str, unknown))))
    return values


def resolve_config(command, cli_values, config_path=None, environ=None):
    """
    :param command:     subcommand name
    :param cli_values:  flags given on the command line (None = not given)
    :param config_path: optional YAML file
    :param environ:     environment mapping (default: os.environ)
    :return:            validated RunConfig
    """
    environ = os.environ if environ is None else environ
    config = RunConfig(command=command, out_dir=environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    file_values = load_config_file(config_path) if config_path else {}
    given = {key: value for key, value in cli_values.items() if value is not None}
    try:
        config = replace(config, **file_values)
        config = replace(config, **given)
    except TypeError as e:
        raise ConfigError(str(e))
    return config.validate()
