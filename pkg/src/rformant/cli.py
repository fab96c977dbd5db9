"""Command-line front end.

Subcommands: analyze (WAV clips to reports, spectra, bins, and figure
panels), compare (Pearson and Mantel tables across reports), cluster
(UPGMA dendrogram over reports), pvi (variability indices from an
annotation file), calibrate (annotation-predicted vs measured rhythm
zone). All CSV/JSON output is byte-identical across reruns with the same
inputs, config, and seed.

Exit codes: 0 success, 1 partial (some clips failed but at least one
succeeded), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .audio_io import AudioFileError
from .cluster import to_newick, upgma
from .config import AnalysisConfig
from .isochrony import (
    AnnotationTier,
    PAUSE_LABELS,
    npvi,
    predict_formant_range,
    rates_from_annotation,
    read_annotation_csv,
    rpvi,
    wagner_pairs,
)
from .lts import AEMS, AMS, DOMAINS, FEMS
from .pipeline import PAIRS, analyze_clip
from .plots import clip_figure, dendrogram_figure
from .profiles import RFormantProfile
from .stats import correlation_summary, distance_matrix, mantel, significance_code

DOMAIN_FLAGS = {"ams": AMS, "aems": AEMS, "fems": FEMS}


def _num(x) -> str:
    """Full-precision, locale-independent numeric cell."""
    return repr(float(x))


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="config file (key = value lines); falls back to $RFORMANT_CONFIG")
    common.add_argument("--out", metavar="DIR", default="rformant_out", help="output directory (default: %(default)s)")
    common.add_argument("--trim", type=float, metavar="S", help="keep at most S seconds from each clip")
    common.add_argument("--band", metavar="LO:HI", help="analysis band in Hz, e.g. 1:10")
    common.add_argument("--peaks", type=int, metavar="N", help="dominant frequencies per spectrum")
    common.add_argument("--bins", type=int, metavar="N", help="histogram bins over the band")
    common.add_argument("--metric", choices=("manhattan", "hamming"), default="manhattan", help="profile distance (default: %(default)s)")
    common.add_argument("--permutations", type=int, metavar="N", help="Mantel permutation count")
    common.add_argument("--seed", type=int, metavar="N", help="random seed for permutation tests")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="clips analyzed concurrently (default: 1)")
    common.add_argument("--domain", choices=sorted(DOMAIN_FLAGS), default="ams", help="domain for combined outputs and clustering (default: %(default)s)")

    parser = argparse.ArgumentParser(
        prog="rformant",
        description="Low-frequency rhythm spectrum analysis of speech recordings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze WAV clips")
    p.add_argument("wavs", nargs="+", metavar="WAV")

    p = sub.add_parser("compare", parents=[common], help="correlation tables across reports")
    p.add_argument("reports", nargs="+", metavar="REPORT_JSON")

    p = sub.add_parser("cluster", parents=[common], help="UPGMA dendrogram over reports")
    p.add_argument("reports", nargs="+", metavar="REPORT_JSON")

    p = sub.add_parser("pvi", parents=[common], help="variability indices from an annotation CSV")
    p.add_argument("annotation", metavar="ANNOTATION_CSV")
    p.add_argument("--unit", choices=("s", "ms"), default="s", help="duration unit for the raw index (default: s)")

    p = sub.add_parser("calibrate", parents=[common], help="predicted vs measured rhythm zone")
    p.add_argument("wav", metavar="WAV")
    p.add_argument("words", metavar="WORDS_CSV")
    p.add_argument("syllables", metavar="SYLLABLES_CSV")
    return parser


def load_config(args) -> AnalysisConfig:
    path = args.config or os.environ.get("RFORMANT_CONFIG")
    cfg = AnalysisConfig.from_file(path) if path else AnalysisConfig()
    over = {}
    if args.trim is not None:
        over["trim_s"] = args.trim
    if args.band is not None:
        lo, sep, hi = args.band.partition(":")
        if not sep:
            raise ValueError(f"--band expects LO:HI, got {args.band!r}")
        over["band_lo_hz"], over["band_hi_hz"] = float(lo), float(hi)
    if args.peaks is not None:
        over["n_peaks"] = args.peaks
    if args.bins is not None:
        over["n_bins"] = args.bins
    if args.permutations is not None:
        over["mantel_permutations"] = args.permutations
    if args.seed is not None:
        over["seed"] = args.seed
    return cfg.replace(**over) if over else cfg


# ---- analyze ----


def _spectra_csv(report) -> str:
    lines = ["domain,freq_hz,magnitude,residual"]
    for domain in DOMAINS:
        spec = report.spectra.get(domain)
        if spec is None:
            continue
        for f, m, r in zip(spec.freqs, spec.magnitude, spec.residual):
            lines.append(f"{domain},{_num(f)},{_num(m)},{_num(r)}")
    return "\n".join(lines) + "\n"


def _bins_csv(report) -> str:
    head = "domain," + ",".join(f"bin_{i}" for i in range(report.n_bins))
    lines = [head]
    for domain in DOMAINS:
        prof = report.profiles.get(domain)
        if prof is None:
            continue
        lines.append(domain + "," + ",".join(_num(b) for b in prof.bins))
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    cfg = load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = list(args.wavs)

    def run(path):
        # short-clip warnings go to stderr; output files are unaffected
        return analyze_clip(path, cfg)

    reports, failures = [], []
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(p, pool.submit(run, p)) for p in paths]
            outcomes = [(p, f) for p, f in futures]
    else:
        outcomes = None

    for i, path in enumerate(paths):
        try:
            rep = outcomes[i][1].result() if outcomes else run(path)
            reports.append(rep)
        except (AudioFileError, ValueError) as exc:
            failures.append((path, exc))

    reports.sort(key=lambda r: r.label)
    labels = [r.label for r in reports]
    if len(set(labels)) != len(labels):
        print("error: duplicate clip labels in batch", file=sys.stderr)
        return 2

    for rep in reports:
        _write(out / f"{rep.label}_report.json",
               json.dumps(rep.to_json_dict(), indent=2, sort_keys=True) + "\n")
        _write(out / f"{rep.label}_spectra.csv", _spectra_csv(rep))
        _write(out / f"{rep.label}_bins.csv", _bins_csv(rep))
        _write(out / f"{rep.label}_panels.svg", clip_figure(rep, cfg))

    domain = DOMAIN_FLAGS[args.domain]
    head = "label," + ",".join(f"bin_{i}" for i in range(cfg.n_bins))
    rows = [head]
    for rep in reports:
        prof = rep.profiles.get(domain)
        if prof is not None:
            rows.append(rep.label + "," + ",".join(_num(b) for b in prof.bins))
    if reports:
        _write(out / "combined_bins.csv", "\n".join(rows) + "\n")

    for rep in reports:
        note = " [FEMS absent]" if rep.fems_absent else ""
        print(f"{rep.label}: {rep.duration_s:.2f} s{note}")
    for path, exc in failures:
        print(f"failed: {path}: {exc}", file=sys.stderr)

    if not reports:
        return 2
    return 1 if failures else 0


# ---- compare / cluster ----


def _load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema") != 1:
        raise ValueError(f"{path}: unsupported report schema {data.get('schema')!r}")
    return data


def _profiles_from(reports, domain) -> list[RFormantProfile]:
    out = []
    for rep in reports:
        dom = rep["domains"].get(domain)
        if dom and dom["present"]:
            out.append(
                RFormantProfile(
                    label=rep["label"],
                    domain=domain,
                    peaks=(),
                    bins=np.asarray(dom["bins"], dtype=np.float64),
                    band=(rep["band"][0], rep["band"][1]),
                    n_bins=rep["n_bins"],
                )
            )
    return sorted(out, key=lambda p: p.label)


def cmd_compare(args) -> int:
    cfg = load_config(args)
    reports = [_load_report(p) for p in args.reports]
    labels = [rep["label"] for rep in reports]
    if len(set(labels)) != len(labels):
        print("error: duplicate labels across reports", file=sys.stderr)
        return 2
    if len(reports) < 3:
        print("error: compare needs at least 3 reports", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["pair,mean_r,min_label,min_r,max_label,max_r"]
    for pair in PAIRS:
        values = {
            rep["label"]: rep["pearson"][pair]
            for rep in reports
            if rep["pearson"].get(pair) is not None
        }
        if not values:
            continue
        s = correlation_summary(values, pair)
        lines.append(
            f"{pair},{_num(s['mean_r'])},{s['min_label']},{_num(s['min_r'])},"
            f"{s['max_label']},{_num(s['max_r'])}"
        )
    _write(out / "pearson_summary.csv", "\n".join(lines) + "\n")

    lines = ["pair,r,p,significance"]
    for pair in PAIRS:
        da, db = pair.split(":")
        pa = {p.label: p for p in _profiles_from(reports, da)}
        pb = {p.label: p for p in _profiles_from(reports, db)}
        shared = sorted(set(pa) & set(pb))
        if len(shared) < 3:
            print(f"note: {pair}: fewer than 3 utterances share both domains; skipped",
                  file=sys.stderr)
            continue
        try:
            ma = distance_matrix([pa[l] for l in shared], args.metric)
            mb = distance_matrix([pb[l] for l in shared], args.metric)
            result = mantel(ma, mb, cfg.mantel_permutations, cfg.seed)
        except ValueError as exc:
            print(f"note: {pair}: {exc}; skipped", file=sys.stderr)
            continue
        lines.append(
            f"{pair},{_num(result['r'])},{_num(result['p'])},"
            f"{significance_code(result['p'])}"
        )
        print(f"{pair}: r={result['r']:.3f} p={result['p']:.4f} "
              f"{significance_code(result['p'])}")
    _write(out / "mantel.csv", "\n".join(lines) + "\n")
    return 0


def cmd_cluster(args) -> int:
    args_metric = args.metric
    reports = [_load_report(p) for p in args.reports]
    labels = [rep["label"] for rep in reports]
    if len(set(labels)) != len(labels):
        print("error: duplicate labels across reports", file=sys.stderr)
        return 2
    domain = DOMAIN_FLAGS[args.domain]
    profiles = _profiles_from(reports, domain)
    included = {p.label for p in profiles}
    for rep in reports:
        if rep["label"] not in included:
            print(f"warning: {rep['label']}: no {domain} profile; excluded",
                  file=sys.stderr)
    if len(profiles) < 2:
        print(f"error: need at least 2 reports with a {domain} profile",
              file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    dm = distance_matrix(profiles, args_metric)
    tree = upgma(dm)

    lines = ["label," + ",".join(dm.labels)]
    for i, label in enumerate(dm.labels):
        lines.append(label + "," + ",".join(_num(v) for v in dm.values[i]))
    _write(out / "distance_matrix.csv", "\n".join(lines) + "\n")

    newick = to_newick(tree)
    _write(out / "dendrogram.nwk", newick + "\n")
    band = profiles[0].band
    bins_by_label = {p.label: p.bins for p in profiles}
    _write(out / "dendrogram.svg", dendrogram_figure(tree, bins_by_label, band))
    print(newick)
    return 0


# ---- pvi / calibrate ----


def cmd_pvi(args) -> int:
    tier = read_annotation_csv(args.annotation)
    durations = tier.durations()  # pause intervals excluded
    if durations.size < 2:
        print("error: need at least 2 non-pause intervals", file=sys.stderr)
        return 2
    scale = 1000.0 if args.unit == "ms" else 1.0
    d = durations * scale
    raw, norm = rpvi(d), npvi(d)
    count = int(durations.size)
    total = float(durations.sum())
    mean = total / count
    rate = count / total

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.annotation).stem

    try:
        wagner = wagner_pairs(d)
        q = wagner["quadrant_counts"]
        q_cells = ",".join(str(c) for c in q)
        scatter = ["z_a,z_b"] + [f"{_num(a)},{_num(b)}" for a, b in wagner["pairs"]]
        _write(out / f"{stem}_wagner.csv", "\n".join(scatter) + "\n")
    except ValueError:
        q = None
        q_cells = ",,,"

    head = ("rpvi,npvi,count,total_s,mean_s,rate_hz,"
            "q_minus_minus,q_minus_plus,q_plus_minus,q_plus_plus")
    row = (f"{_num(raw)},{_num(norm)},{count},{_num(total)},{_num(mean)},"
           f"{_num(rate)},{q_cells}")
    _write(out / f"{stem}_pvi.csv", head + "\n" + row + "\n")

    print(f"rPVI ({args.unit}): {raw:.2f}")
    print(f"nPVI: {norm:.2f}")
    print(f"count: {count}  total: {total:.3f} s  mean: {mean:.3f} s  rate: {rate:.2f} Hz")
    if q is not None:
        print(f"quadrants (-,-) {q[0]}  (-,+) {q[1]}  (+,-) {q[2]}  (+,+) {q[3]}")
    return 0


def _filter_pauses(tier: AnnotationTier) -> AnnotationTier:
    kept = tuple(iv for iv in tier.intervals if iv[2] not in PAUSE_LABELS)
    return AnnotationTier(kept, tier.tier_name)


def cmd_calibrate(args) -> int:
    cfg = load_config(args)
    words = _filter_pauses(read_annotation_csv(args.words))
    syllables = _filter_pauses(read_annotation_csv(args.syllables))
    word_rates = rates_from_annotation(words)
    syll_rates = rates_from_annotation(syllables)
    lo, hi, center = predict_formant_range(word_rates["rate_hz"], syll_rates["rate_hz"])

    report = analyze_clip(args.wav, cfg)
    peaks = [f for f, _ in report.profiles[AMS].peaks]
    if not peaks:
        print("error: no spectral peaks to calibrate against", file=sys.stderr)
        return 2
    measured_lo, measured_hi = min(peaks), max(peaks)
    measured_center = (measured_lo + measured_hi) / 2.0
    err = abs(center - measured_center)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema": 1,
        "label": report.label,
        "word_rate_hz": word_rates["rate_hz"],
        "syllable_rate_hz": syll_rates["rate_hz"],
        "predicted": {"lo_hz": lo, "hi_hz": hi, "center_hz": center},
        "measured": {
            "peaks_hz": peaks,
            "lo_hz": measured_lo,
            "hi_hz": measured_hi,
            "center_hz": measured_center,
        },
        "center_error_hz": err,
    }
    _write(out / "calibration.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(f"word rate: {word_rates['rate_hz']:.2f} Hz  "
          f"syllable rate: {syll_rates['rate_hz']:.2f} Hz")
    print(f"predicted zone: {lo:.2f}-{hi:.2f} Hz, center {center:.2f} Hz")
    print(f"measured peaks: {measured_lo:.2f}-{measured_hi:.2f} Hz, "
          f"center {measured_center:.2f} Hz")
    print(f"center error: {err:.2f} Hz")
    return 0


_HANDLERS = {
    "analyze": cmd_analyze,
    "compare": cmd_compare,
    "cluster": cmd_cluster,
    "pvi": cmd_pvi,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (AudioFileError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
