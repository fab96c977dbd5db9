"""Acceptance gate: one test per release criterion.

Each test emits a single `[criterion N] ... PASS/FAIL` line and then
asserts, so a red criterion fails the suite at the stated tolerance.
The lines are collected in CRITERION_LINES and echoed after the run by
the terminal-summary hook in conftest, so they survive output capture.
"""

import json
import time
import xml.etree.ElementTree as ET

import numpy as np
from scipy.signal import sawtooth

from conftest import am_tone, autocorr_f0_oracle, pulse_train, write_wav
from rformant.audio_io import SignalBuffer
from rformant.cli import main
from rformant.cluster import cophenetic_matrix, to_newick, upgma
from rformant.demodulation import amdf_f0
from rformant.isochrony import canberra, manhattan, npvi, rpvi, shifted_subvectors
from rformant.lts import AEMS, AMS
from rformant.pipeline import analyze_clip
from rformant.stats import DistanceMatrix, mantel, pearson_r


CRITERION_LINES = []


def _criterion(num, name, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    line = f"[criterion {num}] {name}: {'PASS' if ok else 'FAIL'}{tail}"
    CRITERION_LINES.append(line)
    print(line)
    assert ok, f"criterion {num} ({name}) failed{tail}"


def _point_cloud_distances(rng, m, labels=None):
    pts = rng.random((m, 3)) * 10.0
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0
    labels = labels or [chr(ord("a") + i) for i in range(m)]
    return DistanceMatrix(labels=tuple(labels), values=d)


def test_criterion_1_pvi_reference_values():
    alternating = (2.0, 4.0, 2.0, 4.0, 2.0, 4.0)
    doubling = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    ramp = (2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    npvi(alternating)  # warm-up outside the timed region
    t0 = time.perf_counter()
    n1, n2 = npvi(alternating), npvi(doubling)
    r1, r2 = rpvi(alternating), rpvi(ramp)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(n1 - 66.67) <= 0.01
        and abs(n2 - 66.67) <= 0.01
        and r1 == 200.0
        and r2 == 200.0
        and elapsed < 1e-3
    )
    _criterion(
        1, "PVI reference values", ok,
        f"nPVI {n1:.4f}/{n2:.4f}, rPVI {r1}/{r2}, {elapsed * 1e6:.0f} us",
    )


def test_criterion_2_pvi_distance_identities():
    rng = np.random.default_rng(42)
    worst = 0.0
    bounded = True
    for _ in range(1000):
        n = int(rng.integers(2, 51))
        d = rng.random(n) * 10.0 + 0.01
        da, db = shifted_subvectors(d)
        r_direct = rpvi(d)
        r_dist = 100.0 * manhattan(da, db) / (n - 1)
        n_direct = npvi(d)
        n_dist = 200.0 * canberra(da, db) / (n - 1)
        for direct, via in ((r_direct, r_dist), (n_direct, n_dist)):
            rel = abs(direct - via) / max(abs(via), 1e-300)
            worst = max(worst, rel)
        bounded &= 0.0 <= n_direct < 200.0
    ok = worst <= 1e-9 and bounded
    _criterion(
        2, "PVI = scaled distance on shifted subvectors", ok,
        f"worst relative error {worst:.2e}, nPVI in [0, 200): {bounded}",
    )


def test_criterion_3_am_tone_peak_and_domain_agreement(tmp_path):
    rate = 16000
    x = 0.98 * am_tone(440.0, 4.0, 5.0, rate)
    wav = tmp_path / "am4.wav"
    write_wav(wav, rate, x)  # the product reads 16-bit WAV clips
    t0 = time.perf_counter()
    rep = analyze_clip(wav)
    elapsed = time.perf_counter() - t0
    ams_f = rep.profiles[AMS].peaks[0][0]
    aems_f = rep.profiles[AEMS].peaks[0][0]
    r = pearson_r(rep.profiles[AMS].bins, rep.profiles[AEMS].bins)
    ok = (
        abs(ams_f - 4.0) <= 0.25
        and abs(aems_f - 4.0) <= 0.25
        and abs(rep.spectra[AMS].delta_f - 0.2) <= 1e-9
        and r >= 0.8
        and elapsed < 2.0
    )
    _criterion(
        3, "4 Hz AM tone recovered in both amplitude domains", ok,
        f"AMS {ams_f:.2f} Hz, AEMS {aems_f:.2f} Hz, r = {r:.3f}, {elapsed:.2f} s",
    )


def test_criterion_4_annotation_calibration(tmp_path):
    rate = 16000
    x = pulse_train(4.35, 6.0, rate)
    x = 0.9 * x / np.max(np.abs(x))
    wav = tmp_path / "count.wav"
    write_wav(wav, rate, x)
    words = tmp_path / "words.csv"
    sylls = tmp_path / "sylls.csv"
    words.write_text(
        "".join(f"{k / 3.1!r},{(k + 1) / 3.1!r},w{k}\n" for k in range(10)))
    sylls.write_text(
        "".join(f"{k / 6.21!r},{(k + 1) / 6.21!r},s{k}\n" for k in range(20)))

    out = tmp_path / "cal"
    t0 = time.perf_counter()
    rc = main(["calibrate", str(wav), str(words), str(sylls), "--out", str(out)])
    elapsed = time.perf_counter() - t0
    cal = json.loads((out / "calibration.json").read_text())
    center = cal["predicted"]["center_hz"]
    err = cal["center_error_hz"]
    ok = (
        rc == 0
        and round(center, 2) == 4.66
        and err <= 0.45
        and elapsed < 2.0
    )
    _criterion(
        4, "annotation rates predict the measured rhythm zone", ok,
        f"predicted center {center:.3f} Hz, |error| {err:.3f} Hz, {elapsed:.2f} s",
    )


def test_criterion_5_f0_tracking_accuracy():
    rate = 16000
    t = np.arange(5 * rate) / rate
    results = []
    agree = True
    # half-sample phase offset keeps the jump between samples, where the
    # waveform value is actually defined
    saw = 0.9 * sawtooth(2 * np.pi * 200 * t + np.pi / 80)
    for name, x, target, tol in (
        ("sawtooth 200 Hz", saw, 200.0, 2.0),
        ("sine 100 Hz", 0.9 * np.sin(2 * np.pi * 100 * t), 100.0, 1.0),
    ):
        sig = SignalBuffer(samples=x, rate=rate, label="f0")
        track = amdf_f0(sig)
        voiced = track.values[track.values > 0]
        hit = np.mean(np.abs(voiced - target) <= tol)
        results.append((name, float(hit)))
        oracle = autocorr_f0_oracle(x, float(rate))
        both = (track.values > 0) & (oracle > 0)
        agree &= bool(np.all(np.abs(track.values[both] - oracle[both]) <= 3.0))
    ok = all(hit >= 0.9 for _, hit in results) and agree
    detail = ", ".join(f"{name} {hit:.1%}" for name, hit in results)
    _criterion(5, "F0 tracked within tolerance", ok,
               f"{detail}, oracle agreement {agree}")


def test_criterion_6_mantel_determinism_and_false_positives():
    rng = np.random.default_rng(7)
    a = _point_cloud_distances(rng, 8)
    first = mantel(a, a, permutations=999, seed=0)
    second = mantel(a, a, permutations=999, seed=0)
    self_ok = (
        first["r"] == 1.0
        and first["p"] <= 0.05
        and first == second
    )
    hits = 0
    for _ in range(20):
        x = _point_cloud_distances(rng, 6)
        y = _point_cloud_distances(rng, 6)
        if mantel(x, y, permutations=999, seed=0)["p"] < 0.05:
            hits += 1
    ok = self_ok and hits <= 4
    _criterion(
        6, "Mantel self-test exact and false positives bounded", ok,
        f"r = {first['r']}, p = {first['p']:.4f}, identical reruns {first == second}, "
        f"false positives {hits}/20",
    )


def test_criterion_7_upgma_reference_tree():
    d = DistanceMatrix(
        labels=("A", "B", "C"),
        values=np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 5.0], [4.0, 5.0, 0.0]]),
    )
    tree = upgma(d)
    newick = to_newick(tree)
    exact = (
        [mg[:3] for mg in tree.merges] == [("A", "B", 1.0), ("AB", "C", 4.5)]
        and newick == "((A:0.5,B:0.5):1.75,C:2.25);"
    )
    rng = np.random.default_rng(11)
    structural = True
    for _ in range(25):
        m = _point_cloud_distances(rng, 5)
        t = upgma(m)
        heights = [mg[2] for mg in t.merges]
        structural &= all(a <= b + 1e-9 for a, b in zip(heights, heights[1:]))
        coph = cophenetic_matrix(t).values
        for i in range(5):
            for j in range(5):
                for k in range(5):
                    structural &= coph[i, j] <= max(coph[i, k], coph[j, k]) + 1e-9
    ok = exact and structural
    _criterion(
        7, "UPGMA merges, Newick, and ultrametric structure", ok,
        f"3-leaf exact {exact}, 5-leaf structure {structural}",
    )


def test_criterion_8_analyze_reruns_byte_identical(tmp_path):
    rate = 8000
    x = 0.9 * am_tone(220.0, 3.0, 3.5, rate)
    wav = tmp_path / "clip.wav"
    write_wav(wav, rate, x)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    rc1 = main(["analyze", str(wav), "--out", str(out1)])
    rc2 = main(["analyze", str(wav), "--out", str(out2)])
    names = sorted(p.name for p in out1.iterdir())
    identical = bool(names) and all(
        (out1 / n).read_bytes() == (out2 / n).read_bytes() for n in names
    )
    ok = rc1 == 0 and rc2 == 0 and identical
    _criterion(8, "repeated analysis is byte-identical", ok,
               f"{len(names)} files compared")


def test_criterion_9_report_table_and_figure_formats(tmp_path):
    """Corpus tables and figures are format-checked only.

    The published numbers come from audio that is not distributed, so
    this asserts column structure and document shape, never values.
    """
    rate = 8000
    wavs = []
    for i, mod in enumerate((2.5, 4.0, 6.5)):
        # matched amplitude and pitch modulation so every domain is populated
        t = np.arange(int(3.5 * rate)) / rate
        env = 0.5 * (1.0 + np.sin(2 * np.pi * mod * t))
        phase = 2 * np.pi * (200.0 + 30 * i) * t - (25.0 / mod) * np.cos(2 * np.pi * mod * t)
        x = 0.9 * env * np.sin(phase)
        p = tmp_path / f"u{i}.wav"
        write_wav(p, rate, x)
        wavs.append(str(p))
    out = tmp_path / "out"
    assert main(["analyze", *wavs, "--out", str(out)]) == 0
    reports = [str(out / f"u{i}_report.json") for i in range(3)]
    assert main(["compare", *reports, "--out", str(out), "--permutations", "99"]) == 0
    assert main(["cluster", *reports, "--out", str(out)]) == 0

    man = (out / "mantel.csv").read_text().splitlines()
    table1 = man[0] == "pair,r,p,significance" and all(
        len(l.split(",")) == 4 and l.split(",")[3] in ("**", "*", "ns")
        for l in man[1:]
    )
    summ = (out / "pearson_summary.csv").read_text().splitlines()
    table2 = (
        summ[0] == "pair,mean_r,min_label,min_r,max_label,max_r"
        and len(summ) == 4
        and all(len(l.split(",")) == 6 for l in summ[1:])
    )

    figures = True
    for svg_path in [out / "u0_panels.svg", out / "dendrogram.svg"]:
        root = ET.fromstring(svg_path.read_text())
        figures &= root.tag.endswith("svg")
        figures &= len(list(root.iter())) > 10
    panel_svg = (out / "u0_panels.svg").read_text()
    figures &= "AMS" in panel_svg and "polyline" in panel_svg
    dendro_svg = (out / "dendrogram.svg").read_text()
    figures &= all(f"u{i}" in dendro_svg for i in range(3))

    ok = table1 and table2 and figures
    _criterion(
        9, "table and figure formats reproduced (values are corpus-bound)", ok,
        f"mantel table {table1}, summary table {table2}, figures {figures}",
    )
