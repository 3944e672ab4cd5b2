import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from isacase.exceptions import CacheError

CACHE_VERSION = "isacase-rates-1"
CACHE_FILE = "rates.json"


def cache_key(kind: str, args: tuple[int, ...], fingerprint: str) -> str:
    """Content hash of a rate evaluation: its kind, integer arguments and model fingerprint."""
    payload = json.dumps([CACHE_VERSION, kind, list(args), fingerprint], separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class RateCache:
    rates: dict[str, float] = field(default_factory=dict)
    path: Path | None = None

    def define(self, key: str, value: float) -> None:
        previous = self.rates.get(key)
        if previous is not None and previous != value:
            raise CacheError(self.path, f"{key} already cached as {previous!r}, got {value!r}")

        self.rates[key] = value

    def lookup(self, key: str) -> float | None:
        return self.rates.get(key)

    @classmethod
    def open(cls, directory: Path) -> "RateCache":
        path = directory / CACHE_FILE
        if not path.exists():
            return cls(path=path)

        try:
            document = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as error:
            raise CacheError(path, f"unreadable cache: {error}") from error

        if not isinstance(document, dict) or document.get("version") != CACHE_VERSION:
            return cls(path=path)
        rates = document.get("rates", {})
        return cls(rates={str(key): float(value) for key, value in rates.items()}, path=path)

    def save(self) -> None:
        if self.path is None:
            return

        self.path.parent.mkdir(parents=True, exist_ok=True)
        staging = self.path.with_suffix(".tmp")
        document = {"version": CACHE_VERSION, "rates": dict(sorted(self.rates.items()))}
        staging.write_text(json.dumps(document, indent=1))
        staging.replace(self.path)
