"""Pattern spec files: built-in references or parity-rule documents."""

from pathlib import Path
from typing import Union
import logging

from pydantic import TypeAdapter, ValidationError

from src.core.errors import ConfigError
from src.graph.lattice import Graph
from src.mbqc.builtins import builtin_pattern
from src.mbqc.pattern import MeasurementPattern, ParityChoice, parity_pattern
from src.models.specs import BuiltinPatternSpec, ParityBasisSpec, PatternFileSpec, PatternSpec

logger = logging.getLogger(__name__)

_pattern_adapter: TypeAdapter = TypeAdapter(PatternSpec)


def pattern_from_spec(spec: PatternSpec, g: Graph) -> MeasurementPattern:
    """
    Build the pattern a spec describes.

    Raises:
        PatternError: If a built-in name is unknown or does not apply to g
    """
    if isinstance(spec, BuiltinPatternSpec):
        return builtin_pattern(spec.builtin, g)

    if not isinstance(spec, PatternFileSpec):
        raise ConfigError(f"Unsupported pattern spec {spec!r}")
    bases = {
        v: ParityChoice(tuple(rule.parity), rule.even, rule.odd) if isinstance(rule, ParityBasisSpec) else rule
        for v, rule in spec.basis.items()
    }
    result_vertices = spec.order if spec.result.parity == "all" else spec.result.parity
    return parity_pattern(
        spec.name,
        order=spec.order,
        bases=bases,
        default=spec.default,
        result_vertices=result_vertices,
        result_equals=spec.result.equals,
        honest_acceptance=spec.honest_acceptance,
    )


def parse_pattern_spec(text: str, source: str = "<string>") -> PatternSpec:
    try:
        return _pattern_adapter.validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"Invalid pattern spec {source}: {e}") from e


def load_pattern(path: Union[str, Path], g: Graph) -> MeasurementPattern:
    """
    Load a pattern spec file.

    Raises:
        ConfigError: If the file is missing or invalid
    """
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as e:
        raise ConfigError(f"Pattern file not found: {path}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read pattern file {path}: {e}") from e
    pattern = pattern_from_spec(parse_pattern_spec(text, str(path)), g)
    logger.info(f"Loaded pattern {pattern.name!r} from {path}")
    return pattern
