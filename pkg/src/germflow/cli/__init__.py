from .config import SCHEMA, validate
from .runner import ConfigError, NumericFailure, run
