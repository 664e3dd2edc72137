"""Global Agricultural Competitiveness Index: pillar construction, scoring and validation."""

__version__ = "0.1.0"

from .errors import GaciError, NumericError, SchemaError
from .model import CountryId, PillarMatrix, RegressionFit, ScoreBoard

__all__ = ["CountryId", "GaciError", "NumericError", "PillarMatrix", "RegressionFit",
           "SchemaError", "ScoreBoard", "__version__"]
