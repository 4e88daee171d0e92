import math

import numpy as np
import pytest

import polent


def test_rotation_roundtrip():
    r = polent.rotation_matrix([0.0, 0.0, 1.0], 0.7)
    assert np.allclose(r @ r.T, np.eye(3))
    assert polent.rotation_angle(r) == pytest.approx(0.7)
    est = polent.estimate_rotation(r.T)  # rows: responses to H, D, R
    assert np.allclose(est, r)


def test_one_sided_fidelity():
    r = polent.rotation_matrix([1.0, 2.0, -1.0], 1.1)
    rho = polent.apply_one_sided(polent.bell_phi_plus(), r)
    assert polent.fidelity_to_phi_plus(rho) == pytest.approx(math.cos(0.55) ** 2, abs=1e-12)
    assert polent.fidelity_to_phi_plus(polent.werner_state(0.9)) == pytest.approx(0.925, abs=1e-12)


def test_source_model():
    assert polent.gsi_at_rate(2e5) == pytest.approx(28.5)
    assert polent.fidelity_from_gsi(1.0) == 0.25
    assert polent.transmission(17.46) == pytest.approx(0.01795, abs=1e-5)
    assert polent.deployed_loss_db() == pytest.approx(17.47)


def test_counts_and_bounds():
    counts = polent.simulate_counts(1e4, seed=3, efficiencies=(1.0, 1.0))
    assert set(counts) == {"HH", "HV", "VH", "VV", "DD", "DA", "AD", "AA"}
    report = polent.bounds_from_counts(counts, bootstrap=100, seed=1)
    assert 0.0 <= report["lower"] <= report["upper"] <= 1.0
    assert report["sigma_lower"] > 0.0
    perfect = {"HH": 5000, "HV": 0, "VH": 0, "VV": 5000, "DD": 5000, "DA": 0, "AD": 0, "AA": 5000}
    assert polent.bounds_from_counts(perfect)["lower"] == 1.0
    with pytest.raises(ValueError):
        polent.bounds_from_counts({"HH": 1})


def test_degenerate_estimate_raises():
    with pytest.raises(polent.EstimationError):
        polent.estimate_rotation(np.array([[1.0, 0, 0], [1.0, 0, 0], [0, 0, 1.0]]))


def test_analyze_sweep(tmp_path):
    lines = ["timestamp_s,wavelength_nm,probe,s1,s2,s3,dop"]
    for nm in range(1290, 1311):
        r = polent.rotation_matrix([0.0, 1.0, 0.0], 0.05 * (nm - 1290))
        for probe, col in zip("HDR", r.T):
            lines.append(f"0,{nm},{probe},{col[0]:.17g},{col[1]:.17g},{col[2]:.17g},1")
    path = tmp_path / "sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    report = polent.analyze_sweep(path, 1300.0, (0.0, 5.0))
    per_nm = [p["angle_rad_per_nm"] for p in report["rotation_per_nm"]]
    assert np.allclose(per_nm, 0.05)
    assert report["spectral_fidelity"][0]["fidelity"] == 1.0


def test_bad_sweep_raises(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(polent.SweepError):
        polent.analyze_sweep(path)


def test_long_run_summary():
    s = polent.run_long_term(duration_days=0.5, seed=2, drift=False)
    assert s["optimizations"] == 0
    assert s["uptime"] == pytest.approx(1 - 0.03 / 20.03, abs=1e-4)
