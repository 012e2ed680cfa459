import numpy as np
import pytest

from rfshaper.errors import ConfigurationError
from rfshaper.experiments import run_experiment


def test_unknown_preset_rejected():
    with pytest.raises(ConfigurationError, match="unknown experiment"):
        run_experiment("warp_drive")


def test_unknown_option_rejected():
    with pytest.raises(ConfigurationError, match="does not accept"):
        run_experiment("im2pm", {"bogus_knob": 1.0})


def test_im2pm_extinction():
    result = run_experiment("im2pm", {"sweep": (1.0, 30.0, 0.25)})
    assert result.summary["extinction_db"] >= 15.0
    high = result.traces["im_like"]
    low = result.traces["pm_like"]
    mask = (high.rf_freqs_ghz >= 15.0) & (high.rf_freqs_ghz <= 25.0)
    assert np.min(high.mag_db[mask] - low.mag_db[mask]) >= 15.0


def test_pm2im_extinction_and_recorded_targets():
    result = run_experiment("pm2im", {"sweep": (1.0, 30.0, 0.25)})
    assert result.summary["extinction_db"] >= 15.0
    assert result.summary["target_extinction_alt_db"] == 20.0


def test_ssb_notch_depth_tracks_optical_rejection():
    result = run_experiment("ssb_notch", {"sweep": (6.0, 14.0, 0.01)})
    assert result.summary["notch_depth_db"] == pytest.approx(7.0, abs=1.0)
    assert result.summary["notch_freq_ghz"] == pytest.approx(10.0, abs=0.05)


def test_cancel_notch_enhancement():
    result = run_experiment("cancel_notch", {"sweep": (6.0, 14.0, 0.01)})
    assert result.summary["notch_depth_db"] >= 38.0
    assert result.summary["enhancement_db"] >= 30.0
    assert "ssb_reference" in result.traces


def test_cancel_notch_seed_deterministic():
    a = run_experiment("cancel_notch", {"sweep": (8.0, 12.0, 0.01)}, seed=5)
    b = run_experiment("cancel_notch", {"sweep": (8.0, 12.0, 0.01)}, seed=5)
    assert a.summary == b.summary
    np.testing.assert_array_equal(a.traces["cancel"].mag_db,
                                  b.traces["cancel"].mag_db)


def test_bandpass_peaks_match_detunes():
    result = run_experiment("bandpass_tune")
    step = result.summary["sweep_step_ghz"]
    for d in (8.0, 12.0, 16.0, 20.0):
        assert result.summary[f"peak_freq_ghz_{d:g}"] == pytest.approx(d, abs=step)


def test_deint_phase_probe_ports():
    result = run_experiment("deint_phase_probe", {"sweep": (1.0, 29.0, 0.25)})
    assert set(result.traces) == {"bar", "cross"}
    bar = result.traces["bar"]
    mask = (bar.rf_freqs_ghz >= 5.0) & (bar.rf_freqs_ghz <= 25.0)
    # phase response is smooth across the passband interior
    assert np.max(np.abs(np.diff(bar.phase_rad[mask]))) < 0.5


def test_amplitude_tuning_compensation_behaviour():
    result = run_experiment("amplitude_tuning")
    assert result.summary["uncompensated_offset_steps"] > 1
    assert result.summary["compensated_offset_steps"] <= 1
    headers, rows = result.tables["uncompensated"]
    assert headers[0] == "heater_power_mw"
    arr = np.asarray(rows)
    # carrier power stays fixed while the upper sideband swings
    assert np.ptp(arr[:, 4]) / np.mean(arr[:, 4]) < 0.01
    assert np.ptp(arr[:, 2]) / np.max(arr[:, 2]) > 0.9


def test_coupling_sweep_states():
    result = run_experiment("coupling_sweep")
    kc = result.summary["critical_kappa"]
    assert result.summary[f"kappa_{kc:.4f}_state"] == "critical"
    assert result.summary[f"kappa_{kc:.4f}_depth_db"] > 60.0
    assert result.summary["kappa_0.0500_state"] == "under"
    assert result.summary["kappa_0.4000_state"] == "over"
    assert len(result.optical) == 5


def test_heater_override_accepted():
    result = run_experiment("ssb_notch", {"sweep": (8.0, 12.0, 0.01),
                                          "heaters": {"ps_bar.phase": 0.3}})
    assert result.summary["notch_depth_db"] == pytest.approx(7.0, abs=1.0)
