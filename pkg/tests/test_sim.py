import numpy as np
import pytest

from cycloc.locosd import spc_structure_for
from cycloc.sim import (CSV_COLUMNS, ConfigError, SimRecord, SimSpec, load_sim, records_csv,
                        run_sim, spec_from_json, trial_noise, wilson_interval)

from conftest import SPECS


@pytest.fixture(scope="module")
def small_spec(c63_36):
    return SimSpec(c63_36, "locosd", (3.0, 4.0), order=1,
                   structure=spc_structure_for(c63_36, 7), max_trials=600,
                   max_frame_errors=None, seed=5)


def test_per_trial_noise_is_order_free():
    a = trial_noise(3, 1, range(10), 7, 0.5)
    b = trial_noise(3, 1, [7, 8, 9], 7, 0.5)
    assert (a[7:] == b).all()
    assert not (trial_noise(3, 2, [7], 7, 0.5) == b[:1]).all()


def test_csv_is_byte_identical(small_spec):
    a = records_csv(run_sim(small_spec), timing=False)
    b = records_csv(run_sim(small_spec), timing=False)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "# cycloc-sim v1"
    assert lines[1].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 4 and lines[2].endswith(",")


def test_workers_match_serial(small_spec):
    serial = records_csv(run_sim(small_spec, block=128), timing=False)
    parallel = records_csv(run_sim(small_spec, workers=2, block=128), timing=False)
    assert serial == parallel


def test_noiseless_proxy_has_no_errors(c63_36):
    spec = SimSpec(c63_36, "osd", (60.0,), max_trials=300)  # N0 = 1e-6
    (rec,) = run_sim(spec)
    assert rec.trials == 300 and rec.frame_errs == 0 and rec.fer == 0.0


def test_early_stop_counts_actual_trials(hamming7):
    spec = SimSpec(hamming7, "viterbi", (-5.0,), max_trials=5000, max_frame_errors=20)
    (rec,) = run_sim(spec, block=64)
    assert rec.frame_errs >= 20 and rec.trials % 64 == 0 and rec.trials < 5000
    assert rec.fer == rec.frame_errs / rec.trials


def test_qmld_scheme_rate(c63_36):
    spec = SimSpec(c63_36, "qmld", (4.5,), structure=spc_structure_for(c63_36, 7),
                   max_trials=4000, max_frame_errors=None)
    (rec,) = run_sim(spec)
    lo, hi = wilson_interval(rec.qmld_successes, rec.trials, z=4)
    assert lo <= 0.9388 <= hi


def test_record_fields():
    r = SimRecord(63, 4.0, "es", 200, 10, 25, 150, 400, 1.0)
    assert r.fer == 0.05 and r.ber == 25 / (200 * 63)
    assert r.qmld_rate == 0.75 and r.mean_candidates == 2.0
    lo, hi = r.fer_interval()
    assert lo < 0.05 < hi
    assert wilson_interval(0, 100)[0] == 0.0


def test_config_errors(c63_36, hamming7):
    with pytest.raises(ConfigError):
        SimSpec(c63_36, "ldpc", (1.0,))
    with pytest.raises(ConfigError):
        SimSpec(c63_36, "osd", ())
    with pytest.raises(ConfigError):
        SimSpec(c63_36, "osd", (1.0,), max_trials=0)
    with pytest.raises(ConfigError):
        SimSpec(c63_36, "locosd", (1.0,))
    with pytest.raises(ConfigError):
        SimSpec(hamming7, "locosd", (1.0,), structure=spc_structure_for(c63_36, 7))
    with pytest.raises(ConfigError):
        spec_from_json({"scheme": "osd", "snr_db": [1]})
    with pytest.raises(ConfigError):
        spec_from_json({"code": {"n": 63, "zero_representatives": [1, 3]}, "scheme": "locosd",
                        "snr_db": 2.0, "structure": {"variant": "spc", "n1": 7}})


def test_load_sim_file():
    spec = load_sim(SPECS / "sim_c63_36_locosd.json")
    assert spec.code.k == 36 and spec.structure.variant == "spc"
    assert spec.snr_db == (3.5, 4.5) and spec.order == 1 and spec.seed == 7
    assert spec.n0(4.5) == pytest.approx(10 ** -0.45)


def test_eb_convention(c63_36):
    spec = SimSpec(c63_36, "osd", (3.0,), convention="eb")
    assert spec.n0(3.0) == pytest.approx(1 / (36 / 63 * 10 ** 0.3))
    assert np.isclose(spec.rate, 36 / 63)
