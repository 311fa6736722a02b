import pytest

from photonic_sic.config import load_preset, resolve
from photonic_sic.pipelines import run_config


def _run(name, **over):
    raw, _ = load_preset(name)
    return run_config(resolve(raw, list(over.items())))


def test_zero_padding_makes_search_noisier():
    header, rows = _run("zero-padding").tables["zero_padding"]
    col = header.index("probe_depth_std_db")
    spread = [float(r[col]) for r in rows]
    assert [float(r[0]) for r in rows] == [0.0, 0.25, 0.5]
    assert all(b >= a for a, b in zip(spread, spread[1:]))


@pytest.mark.slow
def test_half_gbaud_stage1_ranges_cover_true_delays():
    s = _run("ga-500mbaud").summary
    for (lo, hi), true_ps in zip(s["stage1"]["space"]["delay_ranges_ps"], (4768, 3828)):
        assert lo <= true_ps <= hi
    assert s["captures_per_iteration"] == 1


def test_fig3_table_contains_anchor():
    header, rows = _run("fig3-sweep").tables["mismatch_sweep"]
    anchor = [r for r in rows if float(r[0]) == 10e9 and float(r[1]) == 0 and float(r[2]) == 0.5]
    assert len(anchor) == 1
    assert float(anchor[0][header.index("pipeline_depth_db")]) == pytest.approx(30.1, abs=0.3)


def test_xcorr_resolution_improves_with_baud():
    header, rows = _run("xcorr-resolution").tables["xcorr_resolution"]
    err = {}
    for r in rows:
        err.setdefault(float(r[0]), []).append(float(r[header.index("abs_error_ps")]))
    mean = [sum(v) / len(v) for _, v in sorted(err.items())]
    assert mean[-1] < mean[0]
