"""End-to-end scenarios: each takes a resolved config dict and returns a RunResult.

A RunResult holds a JSON-able summary plus the tables, JSON documents and
waveforms that the CLI writes to disk. Nothing here touches the filesystem.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import PathSet
from .config import set_key
from .delay import (
    Candidate,
    FractionalDelayBank,
    SegmentPlan,
    amplitude_from_power,
    build_segmented_reference,
    segment_powers,
    segmented_search,
    separated_rough_delay,
    xcorr_rough_delay,
)
from .ga import GaConfig, SearchSpace, SegmentedFitness, ga_run, stage1_ranges, stage3_refine
from .link import LinkConfig, SimulatedLink, make_soi, make_tx
from .ls import construct_reference, default_order, if_to_rf, ls_estimate
from .metrics import BandSpec, Genie, band_power, demod_and_evm, mismatch_depth_curve, sic_depth, symbol_errors
from .photonics import ModulatorConfig
from .signals import OfdmConfig, RealSignal, SoiConfig, digital_if, fractional_delay, qpsk_symbols, to_dac, tone

__all__ = ["RunResult", "run_config", "PIPELINES", "link_config", "paths_of", "tx_signals"]


@dataclass
class RunResult:
    summary: dict
    tables: dict = field(default_factory=dict)
    documents: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    constellations: dict = field(default_factory=dict)


# ---------------------------------------------------------------- helpers


def link_config(cfg, carrier_hz=None, lo_hz=None):
    m = cfg.get("modulator") or {}
    fib = cfg.get("fiber") or {}
    snr = cfg.get("snr_db")
    return LinkConfig(
        gen_rate_hz=cfg["rates"]["generation_hz"],
        capture_rate_hz=cfg["rates"]["capture_hz"],
        carrier_hz=cfg["carrier_hz"] if carrier_hz is None else carrier_hz,
        lo_hz=cfg["lo_hz"] if lo_hz is None else lo_hz,
        lo_amplitude_v=m.get("lo_amplitude_v", 1.0),
        modulator=ModulatorConfig(v_pi_volts=m.get("v_pi_volts", 4.0), bias_offset_rad=m.get("bias_offset_rad", 0.0)),
        fiber_km=fib.get("length_km", 0.0),
        fiber_atten_db_per_km=fib.get("atten_db_per_km", 0.1825),
        fiber_delay_per_km_s=fib.get("delay_per_km_s", 4.9e-6),
        snr_db=math.inf if snr is None else snr,
        noise_seed=cfg["seed"] + 7,
    )


def ofdm_config(cfg, antenna=0, **over):
    si = dict(cfg["si"])
    si.pop("waveform", None)
    seed = si.pop("seed", 1)
    si.update(over)
    return OfdmConfig(seed=seed + antenna, **si)


def paths_of(cfg):
    return PathSet.from_dict(cfg["paths"])


def tx_signals(cfg, link: LinkConfig, **over):
    n = len(cfg["paths"]["antennas"])
    if cfg["si"].get("waveform", "ofdm") == "tone":
        n_s = int(round(cfg["si"]["frame_duration_s"] * link.gen_rate_hz))
        return [tone(link.carrier_hz, link.gen_rate_hz, n_s, 0.5) for _ in range(n)]
    return [make_tx(ofdm_config(cfg, j, **over), link) for j in range(n)]


def soi_config(cfg):
    s = cfg["soi"]
    return SoiConfig(s["baud_rate_hz"], s.get("rolloff", 0.35), s.get("seed", 100), cfg["si"]["frame_duration_s"])


def build_link(cfg, link=None, **over):
    link = link or link_config(cfg)
    tx = tx_signals(cfg, link, **over)
    soi = sir = None
    if cfg.get("soi"):
        soi = make_soi(soi_config(cfg), link)
        sir = cfg["soi"]["sir_db"]
    return SimulatedLink(tx, paths_of(cfg), link, soi=soi, sir_db=sir or 0.0), tx


def si_band(cfg, link: LinkConfig):
    if cfg["si"].get("waveform", "ofdm") == "tone":
        return BandSpec(link.if_hz, 50e6)
    return link.band(cfg["si"]["baud_rate_hz"])


def db(x):
    return float(10 * np.log10(x)) if x > 0 else -math.inf


def whole_frame(banks, cands):
    return build_segmented_reference(banks, SegmentPlan(0.0, 1, 0), cands)


class _Evaluator:
    """Adapter fixing whether the SOI is on for every capture."""

    def __init__(self, link: SimulatedLink, include_soi: bool):
        self.link = link
        self.include_soi = include_soi

    def submit(self, frame):
        return self.link.submit(frame, include_soi=self.include_soi)


def _finish(link, reference, band, result: RunResult, cfg):
    """Depth, spectra and (with SOI) EVM for a final reference frame."""
    has_soi = bool(cfg.get("soi"))
    before = link.baseline(include_soi=False)
    after = link.submit(reference, include_soi=False)
    rep = sic_depth(before, after, band)
    out = {"depth": rep.to_dict(), "depth_db": rep.depth_db}
    result.spectra["psd_without_sic"] = link.baseline(include_soi=has_soi)
    result.spectra["psd_with_sic"] = link.submit(reference, include_soi=has_soi)
    if has_soi:
        b_soi = result.spectra["psd_without_sic"]
        a_soi = result.spectra["psd_with_sic"]
        out["depth_with_soi_db"] = db(band_power(b_soi, band) / band_power(a_soi, band))
        scfg = soi_config(cfg)
        genie = Genie(link.cfg.if_hz)
        ref = qpsk_symbols(scfg)
        rx0, evm0 = demod_and_evm(b_soi, scfg, genie)
        rx1, evm1 = demod_and_evm(a_soi, scfg, genie)
        out.update(
            evm_without_sic_percent=evm0,
            evm_with_sic_percent=evm1,
            symbol_errors_without_sic=symbol_errors(rx0, ref),
            symbol_errors_with_sic=symbol_errors(rx1, ref),
        )
        result.constellations["constellation_without_sic"] = rx0
        result.constellations["constellation_with_sic"] = rx1
    out["if_power_db"] = db(band_power(before, band))
    return out


# ------------------------------------------------------------- pipelines


def run_mismatch_sweep(cfg):
    """Closed-form and simulated depth versus reference delay error.

    Tone curves for every carrier; OFDM curves (if ``baud_rates_hz`` is
    given) at the first carrier. The LO sits ``if_hz`` below each carrier.
    """
    s = cfg["search"]
    carriers = s.get("carriers_hz", [cfg["carrier_hz"]])
    taus = s.get("delta_tau_ps", [0.5, 1, 2, 5, 10, 20, 50])
    rho = s.get("rho", 1.0)
    if_hz = s.get("if_hz", 2e9)
    bauds = s.get("baud_rates_hz", [])
    tau0, gain = 1e-9, 0.5
    rows = []
    jobs = [(fc, None) for fc in carriers] + [(carriers[0], b) for b in bauds]
    for fc, baud in jobs:
        sub = copy.deepcopy(cfg)
        sub["si"]["waveform"] = "tone" if baud is None else "ofdm"
        if baud is not None:
            sub["si"]["baud_rate_hz"] = baud
        sub["paths"] = PathSet.direct_only([tau0], [gain]).to_dict()
        sub["soi"] = None
        link_cfg = link_config(sub, fc, fc - if_hz)
        link, tx = build_link(sub, link_cfg)
        band = si_band(sub, link_cfg)
        before = link.baseline()
        closed = mismatch_depth_curve(fc, np.array(taus) * 1e-12, rho)
        for dt, cf in zip(taus, closed):
            ref = RealSignal(tx[0].sample_rate_hz, rho * gain * fractional_delay(tx[0], tau0 + dt * 1e-12).samples)
            rep = sic_depth(before, link.submit(ref), band)
            rows.append((fc, 0.0 if baud is None else baud, dt, cf, rep.depth_db))
    res = RunResult({"points": len(rows), "rho": rho, "if_hz": if_hz})
    res.tables["mismatch_sweep"] = (
        ["carrier_hz", "baud_rate_hz", "delta_tau_ps", "closed_form_depth_db", "pipeline_depth_db"],
        rows,
    )
    res.summary["anchor"] = [
        {"carrier_hz": r[0], "delta_tau_ps": r[2], "closed_form_db": r[3], "pipeline_db": r[4]}
        for r in rows
        if r[1] == 0.0 and abs(r[2] - 0.5) < 1e-12
    ]
    return res


def _stage1_xcorr(link, tx, mode, baud_rate_hz, capture="combined"):
    """Rough delay per antenna from the unattenuated zero-delay reference and the SI.

    ``combined`` correlates one capture holding both; ``separate`` captures
    the reference and the SI on their own and differences the peak lags.
    """
    cfg = link.cfg
    out = []
    si_cap = link.baseline() if capture == "separate" else None
    for t in tx:
        known = digital_if(t, cfg.lo_hz, cfg.capture_rate_hz)
        if capture == "separate":
            ref_cap = link.submit(t, include_si=False, include_soi=False)
            out.append(separated_rough_delay(known, ref_cap, si_cap, 1.0 / baud_rate_hz, mode, if_hz=cfg.if_hz))
        else:
            cap = link.submit(t, include_soi=False)
            out.append(xcorr_rough_delay(known, cap, 1.0 / baud_rate_hz, mode, if_hz=cfg.if_hz))
    return out


def _pooled_powers(link, tx, band):
    si = band_power(link.baseline(), band)
    ref = sum(band_power(link.submit(t, include_si=False, include_soi=False), band) for t in tx)
    return si, ref


def _grid(spec):
    lo, hi, step = spec
    n = int(round((hi - lo) / step))
    return [lo + k * step for k in range(n)]


def run_segmented(cfg):
    """Rough delay by cross-correlation, amplitude from powers, segmented delay grid."""
    s = cfg["search"]
    link, tx = build_link(cfg)
    band = si_band(cfg, link.cfg)
    mode = s.get("xcorr_mode", "carrier")
    xc = _stage1_xcorr(link, tx[:1], mode, cfg["si"]["baud_rate_hz"])[0]
    rough = xc.rough_delay_s
    p_si, p_ref = _pooled_powers(link, tx[:1], band)
    amp = round(amplitude_from_power(p_si, p_ref), 2)
    plan = SegmentPlan(cfg["si"]["frame_duration_s"], s.get("segments", 400), s.get("guard_segments", 0))
    bank = FractionalDelayBank(tx[0])
    base = segment_powers(link.baseline(), plan, band)
    center_ps = round(rough * 1e12 / 100) * 100
    grids = {"full": s.get("grid_ps") or [center_ps - 200, center_ps + 200, 1]}
    if s.get("restricted_grid_ps"):
        grids["restricted"] = s["restricted_grid_ps"]
    res = RunResult({
        "rough_delay_ps": rough * 1e12,
        "xcorr_peaks_ps": [p * 1e12 for p in xc.peak_lags_s[:4]],
        "amplitude_estimate": amp,
        "amplitude_raw": amplitude_from_power(p_si, p_ref),
    })
    res.tables["xcorr"] = (["lag_ns", "correlation"], _xcorr_window(xc))
    captures = 0
    for name, g in grids.items():
        cands = [Candidate([d * 1e-12], [amp]) for d in _grid(g)]
        sr = segmented_search(_Evaluator(link, False), cands, plan, [bank], band, baseline=base)
        captures += sr.captures
        ref = whole_frame([bank], [sr.best])
        rep = sic_depth(link.baseline(), link.submit(ref), band)
        res.summary[name] = {
            "grid_ps": list(g),
            "best_delay_ps": sr.best.delays_s[0] * 1e12,
            "depth_db": rep.depth_db,
            "depth": rep.to_dict(),
            "captures": sr.captures,
        }
        res.tables[f"search_curve_{name}"] = (
            ["delay_ps", "segment_depth_db"],
            [(c.delays_s[0] * 1e12, sr.depths_db[c]) for c in cands],
        )
        if name == "full":
            res.summary.update(_finish(link, ref, band, res, cfg))
    res.summary["captures"] = captures
    return res


def _xcorr_window(xc, span_s=20e-9):
    sel = np.abs(xc.lags_s) <= span_s
    return list(zip(xc.lags_s[sel] * 1e9, xc.values[sel]))


def run_fixed(cfg):
    """Simultaneous cancellation with fixed per-antenna reference settings."""
    s = cfg["search"]
    link, tx = build_link(cfg)
    band = si_band(cfg, link.cfg)
    cand = Candidate([d * 1e-12 for d in s["delays_ps"]], s["amplitudes"])
    if len(cand.delays_s) != len(tx):
        raise ValueError("need one fixed delay and amplitude per antenna")
    ref = whole_frame([FractionalDelayBank(t) for t in tx], [cand])
    res = RunResult({"candidate": cand.to_dict()})
    res.summary.update(_finish(link, ref, band, res, cfg))
    return res


def _spawn(seed, n):
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


def run_ga(cfg):
    """Stage 1 ranges, Stage 2 GA, Stage 3 refined GA, full-frame check."""
    s = cfg["search"]
    link, tx = build_link(cfg)
    band = si_band(cfg, link.cfg)
    xcs = _stage1_xcorr(link, tx, s.get("xcorr_mode", "carrier"), cfg["si"]["baud_rate_hz"],
                        s.get("xcorr_capture", "combined"))
    p_si, p_ref = _pooled_powers(link, tx, band)
    space = stage1_ranges(xcs, p_si, p_ref)
    if s.get("delay_ranges_ps") or s.get("amplitude_ranges"):
        space = SearchSpace(
            tuple((a * 1e-12, b * 1e-12) for a, b in s["delay_ranges_ps"]) if s.get("delay_ranges_ps") else space.delay_ranges_s,
            tuple(map(tuple, s["amplitude_ranges"])) if s.get("amplitude_ranges") else space.amplitude_ranges,
        )
    plan = SegmentPlan(cfg["si"]["frame_duration_s"], s.get("segments", 160), s.get("guard_segments", 8))
    banks = [FractionalDelayBank(t) for t in tx]
    seeds = _spawn(cfg["seed"], 2)
    base_kw = dict(
        population=s.get("population", 152),
        mutation_rate=s.get("mutation_rate", 0.1),
        iterations=s.get("iterations", 11),
        elite_fraction=s.get("elite_fraction", 0.5),
    )
    ev = _Evaluator(link, bool(cfg.get("soi")))
    fit2 = SegmentedFitness(ev, plan, banks, band)
    best2, hist2 = ga_run(fit2, space, GaConfig(seed=seeds[0], **base_kw))
    space3 = stage3_refine(space, hist2)
    fit3 = SegmentedFitness(ev, plan, banks, band, baseline=fit2.baseline)
    best3, hist3 = ga_run(fit3, space3, GaConfig(seed=seeds[1], **base_kw))
    ref2 = whole_frame(banks, [best2])
    depth2 = sic_depth(link.baseline(), link.submit(ref2), band).depth_db
    ref3 = whole_frame(banks, [best3])
    n_iter = len(hist2.iterations) + len(hist3.iterations)
    res = RunResult({
        "stage1": {
            "rough_delays_ps": [x.rough_delay_s * 1e12 for x in xcs],
            "pooled_amplitude_raw": amplitude_from_power(p_si, p_ref),
            "space": space.to_dict(),
        },
        "stage2": {"best": best2.to_dict(), "fitness_db": hist2.best_fitness, "depth_db": depth2,
                   "captures": fit2.captures, "iterations": len(hist2.iterations)},
        "stage3": {"best": best3.to_dict(), "fitness_db": hist3.best_fitness, "space": space3.to_dict(),
                   "captures": fit3.captures, "iterations": len(hist3.iterations)},
        "captures_per_iteration": (fit2.captures + fit3.captures) / n_iter,
        "population": base_kw["population"],
    })
    res.documents["ga_history"] = {"stage2": hist2.to_dict(), "stage3": hist3.to_dict()}
    res.tables["ga_convergence"] = (
        ["stage", "iteration", "best_fitness_db", "best_delays_ps", "best_amplitudes"],
        [(st, it.iteration, it.best_fitness, " ".join(f"{d * 1e12:.1f}" for d in it.best.delays_s),
          " ".join(f"{a:.3f}" for a in it.best.amplitudes))
         for st, h in (("2", hist2), ("3", hist3)) for it in h.iterations],
    )
    res.summary.update(_finish(link, ref3, band, res, cfg))
    return res


def _coarse_to_fine(ev, bank, amp, band, captures):
    """Global delay then amplitude with one candidate per frame."""
    one = SegmentPlan(0.0, 1, 0)
    r1 = segmented_search(ev, [Candidate([d * 1e-12], [amp]) for d in range(-200, 201, 10)], one, [bank], band)
    c = r1.best.delays_s[0] * 1e12
    r2 = segmented_search(ev, [Candidate([(c + d) * 1e-12], [amp]) for d in range(-10, 11)], one, [bank], band)
    d0 = r2.best.delays_s[0]
    amps = [a for a in (round(amp + 0.01 * k, 2) for k in range(-5, 6)) if 0 <= a <= 1]
    r3 = segmented_search(ev, [Candidate([d0], [a]) for a in amps], one, [bank], band)
    captures.append(r1.captures + r2.captures + r3.captures)
    return r3.best


def run_ls(cfg):
    """LS channel estimate, composite reference, global delay/amplitude fit."""
    s = cfg["search"]
    has_soi = bool(cfg.get("soi"))
    link, tx = build_link(cfg)
    lc = link.cfg
    band = si_band(cfg, lc)
    # estimation capture: reference arm muted, SOI (if any) present
    y = link.baseline(include_soi=has_soi)
    order = s.get("order") or default_order(max(max(_max_multipath(cfg)), 17e-9), lc.capture_rate_hz)
    precursor = s.get("precursor_s", 2e-9)
    xif, bulk = [], []
    for t in tx:
        known = digital_if(t, lc.lo_hz, lc.capture_rate_hz)
        xc = xcorr_rough_delay(known, y, 1.0 / cfg["si"]["baud_rate_hz"])
        d = max(0.0, xc.peak_lags_s[0] - precursor)
        bulk.append(d)
        xif.append(digital_if(fractional_delay(t, d) if d else t, lc.lo_hz, lc.capture_rate_hz))
    model = ls_estimate(y, xif, order, s.get("n_samples"))
    y_hat = construct_reference(model, xif)
    rf = to_dac(if_to_rf(y_hat, lc.lo_hz, lc.gen_rate_hz))
    p_ref = band_power(link.submit(rf, include_si=False, include_soi=False), band)
    amp_raw = amplitude_from_power(band_power(y_hat, band), p_ref)
    amp = round(amp_raw, 2)
    bank = FractionalDelayBank(rf)
    mode = s.get("global_mode", "auto")
    if mode == "auto":
        mode = "full-frame" if has_soi else "segmented"
    ev = _Evaluator(link, has_soi)
    captures = []
    if mode == "segmented":
        plan = SegmentPlan(cfg["si"]["frame_duration_s"], s.get("segments", 400), s.get("guard_segments", 0))
        base = segment_powers(ev.submit(link.silence), plan, band)
        grid = [Candidate([d * 1e-12], [amp]) for d in range(-200, 201)]
        sr = segmented_search(ev, grid, plan, [bank], band, baseline=base)
        captures.append(sr.captures)
        best = sr.best
    else:
        best = _coarse_to_fine(ev, bank, amp, band, captures)
    ref = whole_frame([bank], [best])
    res = RunResult({
        "order": order,
        "n_samples": s.get("n_samples") or len(y),
        "bulk_delays_ps": [b * 1e12 for b in bulk],
        "condition_number": model.condition_number,
        "ridge": model.ridge,
        "amplitude_raw": amp_raw,
        "global_mode": mode,
        "best": best.to_dict(),
        "captures": sum(captures),
    })
    res.documents["ls_model"] = model.to_dict()
    res.summary.update(_finish(link, ref, band, res, cfg))
    return res


def _max_multipath(cfg):
    for a in cfg["paths"]["antennas"]:
        yield max([m["delay_s"] for m in a.get("multipaths", [])] + [0.0])


def run_xcorr(cfg):
    """Rough-delay accuracy of cross-correlation versus baud rate and delay."""
    s = cfg["search"]
    bauds = s.get("baud_rates_hz", [0.25e9, 0.5e9, 1e9, 2e9])
    delays = s.get("true_delays_ps", [500, 1000, 2000, 4900, 10000])
    mode = s.get("xcorr_mode", "envelope")
    rows = []
    for b in bauds:
        for d in delays:
            sub = copy.deepcopy(cfg)
            sub["si"]["baud_rate_hz"] = b
            sub["soi"] = None
            sub["paths"] = PathSet.direct_only([d * 1e-12], [0.51]).to_dict()
            lc = link_config(sub)
            link, tx = build_link(sub, lc)
            xc = _stage1_xcorr(link, tx, mode, b)[0]
            est = xc.rough_delay_s * 1e12
            rows.append((b, d, est, abs(est - d), abs(est - d) <= 1e12 / lc.capture_rate_hz))
    res = RunResult({"points": len(rows), "within_one_sample": sum(r[4] for r in rows)})
    res.tables["xcorr_resolution"] = (
        ["baud_rate_hz", "true_delay_ps", "estimated_delay_ps", "abs_error_ps", "within_one_sample"],
        [(r[0], r[1], r[2], r[3], int(r[4])) for r in rows],
    )
    return res


def run_zero_padding(cfg):
    """Segmented search quality versus the silent fraction of the SI frame.

    For each padding fraction the search grid is swept, and one probe
    candidate (true delay + ``probe_offset_ps``) is replicated over every
    segment to measure the spread of per-segment depth readings.
    """
    s = cfg["search"]
    fracs = s.get("padding_fractions", [0.0, 0.25, 0.5])
    probe = s.get("probe_offset_ps", 3.0)
    rows = []
    curves = []
    for zp in fracs:
        sub = copy.deepcopy(cfg)
        sub["si"]["zero_padding_fraction"] = zp
        link, tx = build_link(sub)
        band = si_band(sub, link.cfg)
        plan = SegmentPlan(sub["si"]["frame_duration_s"], s.get("segments", 400), s.get("guard_segments", 0))
        bank = FractionalDelayBank(tx[0])
        true = paths_of(sub).antennas[0].direct
        base = segment_powers(link.baseline(), plan, band)
        amp = round(true.amplitude, 2)
        g = s.get("grid_ps") or [4700, 5100, 1]
        cands = [Candidate([d * 1e-12], [amp]) for d in _grid(g)]
        sr = segmented_search(_Evaluator(link, False), cands, plan, [bank], band, baseline=base)
        probe_cand = Candidate([true.delay_s + probe * 1e-12], [amp])
        p = segment_powers(link.submit(build_segmented_reference([bank], plan, [probe_cand] * plan.usable)), plan, band)
        valid = base >= 1e-3 * np.median(base)
        seg_depth = 10 * np.log10(base[valid] / p[valid])
        ref = whole_frame([bank], [sr.best])
        depth = sic_depth(link.baseline(), link.submit(ref), band).depth_db
        curve = np.array([sr.depths_db[c] for c in cands])
        finite = np.isfinite(curve)
        rows.append((zp, sr.best.delays_s[0] * 1e12, depth, float(np.std(seg_depth)), int((~valid).sum()), int((~finite).sum())))
        curves.extend((zp, c.delays_s[0] * 1e12, sr.depths_db[c]) for c in cands)
    res = RunResult({"points": len(rows)})
    res.tables["zero_padding"] = (
        ["zero_padding_fraction", "best_delay_ps", "depth_db", "probe_depth_std_db", "invalid_segments", "invalid_candidates"],
        rows,
    )
    res.tables["search_curves"] = (["zero_padding_fraction", "delay_ps", "segment_depth_db"], curves)
    return res


PIPELINES = {
    "mismatch-sweep": run_mismatch_sweep,
    "segmented": run_segmented,
    "fixed": run_fixed,
    "ga": run_ga,
    "ls": run_ls,
    "xcorr": run_xcorr,
    "zero-padding": run_zero_padding,
}


def _scalars(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_scalars(v, key + "."))
        elif isinstance(v, (int, float, bool, np.floating, np.integer)) and not isinstance(v, bool):
            out[key] = float(v)
    return out


def run_config(cfg) -> RunResult:
    """Run one scenario, or every point of its ``sweep``."""
    fn = PIPELINES[cfg["algorithm"]]
    sweep = cfg.get("sweep")
    if not sweep:
        return fn(cfg)
    keys = sweep.get("keys") or [sweep["key"]]
    points, rows, cols = [], [], None
    for val in sweep["values"]:
        vals = val if len(keys) > 1 else [val]
        sub = copy.deepcopy(cfg)
        sub["sweep"] = None
        for k, v in zip(keys, vals):
            set_key(sub, k, v)
        r = fn(sub)
        flat = _scalars(r.summary)
        if cols is None:
            cols = sorted(flat)
        rows.append(list(vals) + [flat.get(c, math.nan) for c in cols])
        points.append({"values": dict(zip(keys, vals)), "summary": r.summary})
    res = RunResult({"sweep_keys": keys, "points": points})
    res.tables["sweep"] = (keys + cols, rows)
    return res
