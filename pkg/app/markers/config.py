"""
Analysis configuration: defaults from Django settings, flat key = value files.
"""
from dataclasses import asdict, dataclass, fields
import logging
from pathlib import Path

from django.conf import settings

from .exceptions import ConfigurationError
from .series import Alphabet
from .walk import WindowScheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnalysisConfig:
    alphabet_size: int = 4
    differencing: bool = True
    window_kind: str = 'overlapping'
    window_length: int = 350
    window_step: int = 52
    window_count: int = 4
    window_seed: int = 0
    word_length: int = 12
    equivalence: str = 'composition'
    rare_threshold: float = 0.01
    sparsity_delta: float = 0.25
    symbolization_mode: str = 'global'

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def alphabet(self):
        return Alphabet(self.alphabet_size)

    def window_scheme(self):
        return WindowScheme(
            kind=self.window_kind,
            length=self.window_length,
            step=self.window_step,
            count=self.window_count,
            seed=self.window_seed,
        )

    def echo(self):
        return asdict(self)

    def updated(self, **overrides):
        """A validated copy with some fields replaced (None values are ignored)."""
        overrides = {key: value for key, value in overrides.items() if value is not None}
        if not overrides:
            return self
        return validate_config({**self.echo(), **overrides})

    @property
    def differencing_offset(self):
        return 1 if self.differencing else 0


def validate_config(data):
    """Build an AnalysisConfig from raw values, raising ConfigurationError with field errors."""
    from .serializers import AnalysisConfigSerializer

    unknown = sorted(set(data) - set(AnalysisConfig.field_names()))
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")
    serializer = AnalysisConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigurationError("invalid analysis configuration", errors=serializer.errors)
    return serializer.save()


def default_config():
    """AnalysisConfig from settings.MARKERS (environment overridable)."""
    return validate_config(dict(getattr(settings, 'MARKERS', {})))


def parse_config_text(text):
    values = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ConfigurationError(f"line {line_number}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in values:
            raise ConfigurationError(f"line {line_number}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def load_config(path=None, base=None):
    """Defaults (or `base`) overlaid with the keys of a config file."""
    base = base or default_config()
    if path is None:
        return base
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}")
    values = parse_config_text(text)
    logger.info(f"Loaded {len(values)} configuration key(s) from {path}")
    return validate_config({**base.echo(), **values})


def format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config):
    return ''.join(f"{key} = {format_value(value)}\n" for key, value in config.echo().items())

