"""Per-utterance analysis pipeline: WAV in, rhythm report out.

Chains the stages in the canonical order: load and trim, rectify, three
demodulation branches (decimated rectified signal, peak-picked envelope,
continuized F0), a long-term spectrum per branch, detrending over the
analysis band, and R-formant profile extraction. An utterance with no
voiced frames simply has no FM branch; the report marks FEMS absent
rather than failing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import SignalBuffer, load_wav, resample
from .config import AnalysisConfig
from .demodulation import (
    F0_RAW,
    Track,
    amdf_f0,
    continuize_f0,
    envelope_peak_pick,
    rectify,
)
from .lts import AEMS, AMS, DOMAINS, FEMS, LongTermSpectrum, long_term_spectrum, normalize_log_detrend
from .profiles import (
    RFormantProfile,
    local_maximum_mask,
    rhythm_bars,
    top_n_frequencies,
    weighted_bins,
)
from .stats import pearson_r

PAIRS = ("AMS:AEMS", "AMS:FEMS", "AEMS:FEMS")


@dataclass
class UtteranceReport:
    """Everything the reporting layer needs about one analyzed clip."""

    label: str
    duration_s: float
    band: tuple[float, float]
    n_bins: int
    spectra: dict[str, LongTermSpectrum]
    profiles: dict[str, RFormantProfile]
    bars: dict[str, list[float]]
    pearson: dict[str, float | None]
    signal: SignalBuffer | None = None
    envelope: Track | None = None
    f0_track: Track | None = None

    @property
    def fems_absent(self) -> bool:
        return FEMS not in self.profiles

    def to_json_dict(self) -> dict:
        domains = {}
        for domain in DOMAINS:
            if domain not in self.profiles:
                domains[domain] = {"present": False}
                continue
            prof = self.profiles[domain]
            spec = self.spectra[domain]
            domains[domain] = {
                "present": True,
                "delta_f": spec.delta_f,
                "peaks": [[f, w] for f, w in prof.peaks],
                "bars": list(self.bars[domain]),
                "bins": [float(b) for b in prof.bins],
            }
        return {
            "schema": 1,
            "label": self.label,
            "duration_s": self.duration_s,
            "band": [self.band[0], self.band[1]],
            "n_bins": self.n_bins,
            "domains": domains,
            "pearson": dict(self.pearson),
        }


def _log_hz(track: Track) -> Track:
    """Voiced F0 values to log scale; unvoiced markers stay 0."""
    values = np.where(track.values > 0, np.log(np.maximum(track.values, 1e-12)), 0.0)
    return Track(values=values, rate=track.rate, kind=F0_RAW)


def analyze_signal(sig: SignalBuffer, config: AnalysisConfig | None = None) -> UtteranceReport:
    """Run the full per-clip pipeline on an in-memory signal."""
    cfg = config or AnalysisConfig()
    rect = rectify(sig)

    series = {AMS: resample(rect, cfg.resample_hz)}
    envelope = envelope_peak_pick(rect, cfg.envelope_window_ms, cfg.envelope_hop_ms)
    series[AEMS] = envelope

    f0 = amdf_f0(
        sig,
        f0_min=cfg.f0_min_hz,
        f0_max=cfg.f0_max_hz,
        frame_ms=cfg.f0_frame_ms,
        hop_ms=cfg.f0_hop_ms,
        voicing_ratio=cfg.voicing_ratio,
    )
    try:
        series[FEMS] = continuize_f0(_log_hz(f0) if cfg.f0_log_hz else f0)
    except ValueError:
        pass  # no voiced frames: FM branch absent

    spectra, profs, bars = {}, {}, {}
    for domain, s in series.items():
        spec = normalize_log_detrend(long_term_spectrum(s, domain, sig.label), cfg.band)
        spectra[domain] = spec
        n_peaks = cfg.n_peaks
        if cfg.peak_local_max:
            # the restricted candidate pool may be smaller than n_peaks;
            # taking every local maximum is the best available answer
            n_peaks = min(n_peaks, int(local_maximum_mask(spec.residual).sum()))
        peaks = top_n_frequencies(spec, n_peaks, local_maxima=cfg.peak_local_max)
        profs[domain] = RFormantProfile(
            label=sig.label,
            domain=domain,
            peaks=peaks,
            bins=weighted_bins(peaks, cfg.band, cfg.n_bins),
            band=cfg.band,
            n_bins=cfg.n_bins,
        )
        # bars are a display element; a short clip may not have n_bars samples
        bars[domain] = rhythm_bars(spec, min(cfg.n_bars, spec.freqs.size))

    pearson: dict[str, float | None] = {}
    for pair in PAIRS:
        da, db = pair.split(":")
        if da in profs and db in profs:
            try:
                pearson[pair] = pearson_r(profs[da].bins, profs[db].bins)
            except ValueError:
                pearson[pair] = None  # degenerate all-zero bins
        else:
            pearson[pair] = None

    return UtteranceReport(
        label=sig.label,
        duration_s=sig.duration,
        band=cfg.band,
        n_bins=cfg.n_bins,
        spectra=spectra,
        profiles=profs,
        bars=bars,
        pearson=pearson,
        signal=sig,
        envelope=envelope,
        f0_track=f0,
    )


def analyze_clip(path, config: AnalysisConfig | None = None) -> UtteranceReport:
    """Load a WAV, trim it, and analyze it."""
    cfg = config or AnalysisConfig()
    return analyze_signal(load_wav(path, trim_s=cfg.trim_s), cfg)
