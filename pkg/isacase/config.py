"""Run configuration loaded from one YAML document.

Every section and every key is optional; anything missing takes the default of the matching
dataclass. Unknown keys are rejected at every level.
"""

import dataclasses
import hashlib
import json
import types
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Union, get_args, get_origin, get_type_hints

import yaml

from isacase.exceptions import ConfigError, DomainError
from isacase.mathkern import QuadratureSpec
from isacase.mcsim import McConfig
from isacase.netmodel import FormulaVariant, NetworkParams, ResourceAllocation

_TOP_LEVEL_KEYS = frozenset(
    {
        "network",
        "allocation",
        "quadrature",
        "mc",
        "formula_variant",
        "output_dir",
        "cache_dir",
        "workers",
    }
)


@dataclass(frozen=True)
class RunConfig:
    network: NetworkParams = NetworkParams()
    allocation: ResourceAllocation | None = None
    quadrature: QuadratureSpec = QuadratureSpec()
    mc: McConfig = McConfig()
    formula_variant: FormulaVariant = FormulaVariant.REDERIVED
    output_dir: Path = Path("results")
    cache_dir: Path | None = None
    workers: int = 1

    def with_overrides(
        self,
        *,
        seed: int | None = None,
        trials: int | None = None,
        variant: FormulaVariant | None = None,
        output_dir: Path | None = None,
        workers: int | None = None,
    ) -> "RunConfig":
        mc = self.mc
        try:
            if seed is not None:
                mc = replace(mc, seed=seed)
            if trials is not None:
                mc = replace(mc, trials=trials)
        except DomainError as error:
            raise ConfigError(None, error.format_message()) from error

        if workers is not None and workers < 1:
            raise ConfigError(None, f"workers must be at least 1, got {workers}")

        return replace(
            self,
            mc=mc,
            formula_variant=variant or self.formula_variant,
            output_dir=output_dir or self.output_dir,
            workers=workers or self.workers,
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "network": dataclasses.asdict(self.network),
            "allocation": dataclasses.asdict(self.allocation) if self.allocation else None,
            "quadrature": dataclasses.asdict(self.quadrature),
            "mc": dataclasses.asdict(self.mc),
            "formula_variant": self.formula_variant.value,
        }

    def fingerprint(self) -> str:
        """Short content hash of every setting that can change a numeric result."""
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _coerce(path: Path | None, name: str, value: Any, hint: Any) -> Any:
    if get_origin(hint) in (Union, types.UnionType):
        if value is None:
            return None
        hint = next(arg for arg in get_args(hint) if arg is not type(None))

    if hint is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if hint is float and isinstance(value, int | float) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(path, f"{name} must be of type {hint.__name__}, got {value!r}")


def _section[T](path: Path | None, name: str, cls: type[T], raw: Any) -> T:
    if not isinstance(raw, dict):
        raise ConfigError(path, f"section {name} must be a mapping")

    hints = get_type_hints(cls)
    unknown = sorted(set(raw) - set(hints))
    if unknown:
        raise ConfigError(path, f"unknown key(s) in {name}: {', '.join(map(str, unknown))}")

    values = {key: _coerce(path, f"{name}.{key}", value, hints[key]) for key, value in raw.items()}
    try:
        return cls(**values)
    except TypeError as error:
        raise ConfigError(path, f"section {name}: {error}") from error
    except DomainError as error:
        raise ConfigError(path, f"section {name}: {error.format_message()}") from error


def parse_config(document: Any, path: Path | None = None) -> RunConfig:
    if document is None:
        return RunConfig()
    if not isinstance(document, dict):
        raise ConfigError(path, "top level must be a mapping")

    unknown = sorted(set(document) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(path, f"unknown key(s): {', '.join(map(str, unknown))}")

    config = RunConfig()
    changes: dict[str, Any] = {}
    if "network" in document:
        changes["network"] = _section(path, "network", NetworkParams, document["network"])
    if document.get("allocation") is not None:
        changes["allocation"] = _section(
            path, "allocation", ResourceAllocation, document["allocation"]
        )
    if "quadrature" in document:
        changes["quadrature"] = _section(path, "quadrature", QuadratureSpec, document["quadrature"])
    if "mc" in document:
        changes["mc"] = _section(path, "mc", McConfig, document["mc"])

    if "formula_variant" in document:
        try:
            changes["formula_variant"] = FormulaVariant(document["formula_variant"])
        except ValueError as error:
            choices = ", ".join(variant.value for variant in FormulaVariant)
            message = f"formula_variant must be one of {choices}"
            raise ConfigError(path, message) from error

    for key in ("output_dir", "cache_dir"):
        if document.get(key) is not None:
            if not isinstance(document[key], str):
                raise ConfigError(path, f"{key} must be a path string")
            changes[key] = Path(document[key])

    if "workers" in document:
        workers = _coerce(path, "workers", document["workers"], int)
        if workers < 1:
            raise ConfigError(path, f"workers must be at least 1, got {workers}")
        changes["workers"] = workers

    return replace(config, **changes)


def load_config(path: Path | None) -> RunConfig:
    if path is None:
        return RunConfig()

    try:
        document = yaml.safe_load(path.read_text())
    except OSError as error:
        raise ConfigError(path, f"cannot read config: {error.strerror}") from error
    except yaml.YAMLError as error:
        raise ConfigError(path, f"malformed YAML: {error}") from error

    return parse_config(document, path)
