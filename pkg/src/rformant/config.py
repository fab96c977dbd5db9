"""Analysis parameters, their defaults, and the config-file format.

Plain `key = value` lines, `#` starts a comment, unknown keys are
rejected outright so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class AnalysisConfig:
    trim_s: float = 5.0
    resample_hz: float = 200.0
    band_lo_hz: float = 1.0
    band_hi_hz: float = 10.0
    n_peaks: int = 6
    n_bars: int = 16
    n_bins: int = 10
    envelope_window_ms: float = 20.0
    envelope_hop_ms: float = 5.0
    f0_min_hz: float = 60.0
    f0_max_hz: float = 400.0
    f0_frame_ms: float = 40.0
    f0_hop_ms: float = 10.0
    voicing_ratio: float = 0.35
    mantel_permutations: int = 9999
    seed: int = 0
    # experimental switches; both off reproduces the standard pipeline
    peak_local_max: bool = False
    f0_log_hz: bool = False

    def __post_init__(self):
        if not self.band_lo_hz < self.band_hi_hz:
            raise ValueError(
                f"band_lo_hz must be below band_hi_hz, got "
                f"{self.band_lo_hz}:{self.band_hi_hz}"
            )
        if self.band_lo_hz < 0:
            raise ValueError("band_lo_hz must be nonnegative")
        positive = (
            "trim_s", "resample_hz", "envelope_window_ms", "envelope_hop_ms",
            "f0_min_hz", "f0_max_hz", "f0_frame_ms", "f0_hop_ms", "voicing_ratio",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("n_peaks", "n_bars", "seed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.n_bins < 1:
            raise ValueError("n_bins must be at least 1")
        if self.mantel_permutations < 99:
            raise ValueError("mantel_permutations must be at least 99")
        if not self.f0_min_hz < self.f0_max_hz:
            raise ValueError("f0_min_hz must be below f0_max_hz")

    @property
    def band(self) -> tuple[float, float]:
        return (self.band_lo_hz, self.band_hi_hz)

    def replace(self, **kwargs) -> "AnalysisConfig":
        return dataclasses.replace(self, **kwargs)

    @classmethod
    def from_file(cls, path) -> "AnalysisConfig":
        path = Path(path)
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse(key, text, known[key], path, lineno)
        return cls(**values)


def _parse(key, text, type_name, path, lineno):
    try:
        if type_name == "bool":
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if type_name == "int":
            return int(text)
        return float(text)
    except ValueError:
        raise ValueError(
            f"{path}:{lineno}: cannot parse {text!r} as {type_name} for {key}"
        ) from None
