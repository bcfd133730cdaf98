"""Acceptance criteria, one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`. Criteria 5-7 run
Monte-Carlo simulations and CNN trainings at desk scale and dominate the
suite's wall clock; everything else finishes in seconds.
"""

import math
import time

import numpy as np
import pytest

from conftest import naive_dft
from gradcheck import check_layer_gradients, check_loss_gradient
from radarmit.chain import doppler_dft, hann_window, range_dft
from radarmit.config import ScenarioRanges, TrainParams, VictimRadarConfig, default_config
from radarmit.denoise import (
    PRESETS, TARGET_OBJECTS, build_split, param_count, save_checkpoint, train_model,
)
from radarmit.metrics import CellSets, evm_rd, sinr_as, sinr_rd
from radarmit.nn import (
    BatchNorm2d, Conv2d, ReLU, mse_loss, sinr_loss, weighted_mse_loss,
)
from radarmit.pipeline import run_eval
from radarmit.sim import IfFrame, ObjectParams, Scenario


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    mark = "PASS" if ok else "FAIL"
    print(f"[{mark}] {criterion}" + (f" -- {detail}" if detail else ""))
    assert ok, f"{criterion}: {detail}"


class TestCriterion1ParamCounts:
    def test_published_parameter_counts(self):
        t0 = time.time()
        published = {
            "model-a": 160, "model-b": 3898, "model-c": 5298, "model-d": 10002,
            "model-e": 14706, "model-f": 38434, "model-d-lms": 9713, "rpd-ref": 17210,
        }
        got = {name: param_count(PRESETS[name]) for name in published}
        elapsed = time.time() - t0
        _report(
            "criterion 1: exact parameter counts for all eight architectures",
            got == published and elapsed < 1.0,
            f"{got}, {elapsed:.3f}s",
        )


class TestCriterion2DftOracle:
    def test_both_stages_match_naive_dft(self):
        t0 = time.time()
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(4, 65))
            m = int(rng.integers(4, 65))
            # powers of two for the frame config; oracle runs on raw matrices
            n = 1 << int(np.log2(n))
            m = 1 << int(np.log2(m))
            cfg = VictimRadarConfig(n_fast=n, m_slow=m, n_ant=1)
            samples = (rng.normal(size=(n, m, 1)) + 1j * rng.normal(size=(n, m, 1)))
            sc = Scenario((ObjectParams(1.0, 0.0, 0.0),), (), math.inf, math.inf, 0)
            frame = IfFrame(samples, np.zeros((n, m), bool), samples.copy(),
                            samples.copy(), sc, cfg)
            rp = range_dft(frame)[0]
            w_n = hann_window(n)
            for j in range(m):
                worst = max(worst, float(np.abs(rp.values[:, j]
                                                - naive_dft(w_n * samples[:, j, 0])).max()))
            rd = doppler_dft(rp)
            w_m = hann_window(m)
            for i in range(n):
                oracle = np.fft.fftshift(naive_dft(w_m * rp.values[i, :]))
                worst = max(worst, float(np.abs(rd.values[i, :] - oracle).max()))
        elapsed = time.time() - t0
        _report(
            "criterion 2: range/Doppler DFT match naive O(N^2) oracle on 100 inputs",
            worst < 1e-9 and elapsed < 10.0,
            f"max abs err {worst:.2e}, {elapsed:.1f}s",
        )


class TestCriterion3GradientSuite:
    def test_all_layers_and_losses(self):
        t0 = time.time()
        rng = np.random.default_rng(7)
        for i in range(20):  # 2-D conv
            layer = Conv2d(int(rng.integers(1, 4)), int(rng.integers(1, 4)),
                           (int(rng.choice([1, 3, 5])),) * 2, rng)
            x = rng.normal(size=(int(rng.integers(1, 3)), layer.in_ch,
                                 int(rng.integers(2, 6)), int(rng.integers(2, 6))))
            check_layer_gradients(layer, x, rng, tol=1e-3)
        for i in range(20):  # 1-D conv
            layer = Conv2d(int(rng.integers(1, 3)), int(rng.integers(1, 3)),
                           (1, int(rng.choice([1, 3, 7]))), rng)
            x = rng.normal(size=(int(rng.integers(1, 3)), layer.in_ch, 1,
                                 int(rng.integers(4, 12))))
            check_layer_gradients(layer, x, rng, tol=1e-3)
        for i in range(20):  # batchnorm
            ch = int(rng.integers(1, 4))
            bn = BatchNorm2d(ch)
            bn.gamma.data = rng.normal(1.0, 0.2, size=ch)
            bn.beta.data = rng.normal(0.0, 0.2, size=ch)
            x = rng.normal(size=(int(rng.integers(2, 4)), ch,
                                 int(rng.integers(2, 5)), int(rng.integers(2, 5))))
            check_layer_gradients(bn, x, rng, tol=1e-3)
        for i in range(20):  # relu, away from the kink
            x = rng.normal(size=(2, 2, 3, 4))
            x[np.abs(x) < 1e-2] = 0.3
            check_layer_gradients(ReLU(), x, rng, tol=1e-3)
        for i in range(20):  # losses
            shape = (2, 2, int(rng.integers(3, 7)), int(rng.integers(3, 7)))
            pred = rng.normal(size=shape)
            target = rng.normal(size=shape)
            pm = np.zeros((2,) + shape[2:], bool)
            nm = np.ones((2,) + shape[2:], bool)
            for b in range(2):
                i0, j0 = int(rng.integers(shape[2])), int(rng.integers(shape[3]))
                pm[b, i0, j0] = True
                nm[b, max(0, i0 - 1) : i0 + 2, max(0, j0 - 1) : j0 + 2] = False
            check_loss_gradient(lambda p: mse_loss(p, target), pred.copy(), tol=1e-3)
            check_loss_gradient(lambda p: sinr_loss(p, pm, nm), pred.copy() + 0.3,
                                tol=1e-3)
            check_loss_gradient(lambda p: weighted_mse_loss(p, target, pm),
                                pred.copy(), tol=1e-3)
        elapsed = time.time() - t0
        _report(
            "criterion 3: finite-difference gradient suite (conv 1D/2D, BN, ReLU, losses)",
            elapsed < 60.0,
            f"{elapsed:.1f}s",
        )


class TestCriterion4MetricOracles:
    def test_formula_equivalence_and_closed_forms(self):
        rng = np.random.default_rng(11)
        from radarmit.chain import RANGE_DOPPLER, AngularSpectrum, SpectrumMatrix

        worst = 0.0
        for _ in range(20):
            vals = rng.normal(size=(32, 16)) + 1j * rng.normal(size=(32, 16))
            peaks = [(int(rng.integers(4, 28)), int(rng.integers(4, 12)))]
            noise = np.ones((32, 16), bool)
            rb, db = peaks[0]
            noise[rb - 2 : rb + 3, db - 2 : db + 3] = False
            cells = CellSets(peaks, noise, (2, 2))
            sm = SpectrumMatrix(vals, RANGE_DOPPLER, 0, 0.15, 0.32)
            lit = 10 * math.log10(
                (sum(abs(vals[c]) ** 2 for c in peaks) / len(peaks))
                / (sum(abs(vals[tuple(c)]) ** 2 for c in np.argwhere(noise)) / noise.sum())
            )
            worst = max(worst, abs(sinr_rd(sm, cells) - lit))
            den = vals + 0.1 * (rng.normal(size=vals.shape) + 1j * rng.normal(size=vals.shape))
            dm = SpectrumMatrix(den, RANGE_DOPPLER, 0, 0.15, 0.32)
            lit_evm = sum(abs(vals[c] - den[c]) / abs(vals[c]) for c in peaks) / len(peaks)
            worst = max(worst, abs(evm_rd(sm, dm, cells) - lit_evm))
            asv = rng.normal(size=64) + 1j * rng.normal(size=64)
            spec = AngularSpectrum(asv, (0, 0))
            noise_idx = [i for i in range(64) if abs(i - 20) > 2]
            lit_as = 10 * math.log10(abs(asv[20]) ** 2 /
                                     (sum(abs(asv[i]) ** 2 for i in noise_idx) / len(noise_idx)))
            worst = max(worst, abs(sinr_as(spec, 20, 2) - lit_as))

        # closed forms
        vals = np.ones((32, 16), complex)
        vals[16, 8] = 10.0
        noise = np.ones((32, 16), bool)
        noise[12:21, 4:13] = False
        closed = sinr_rd(SpectrumMatrix(vals, RANGE_DOPPLER, 0, 0.15, 0.32),
                         CellSets([(16, 8)], noise, (4, 4)))
        cells1 = CellSets([(5, 5)], np.zeros((32, 16), bool), (1, 1))
        sm = SpectrumMatrix(vals, RANGE_DOPPLER, 0, 0.15, 0.32)
        evm_zero = evm_rd(sm, SpectrumMatrix(vals.copy(), RANGE_DOPPLER, 0, 0.15, 0.32), cells1)
        _report(
            "criterion 4: SINR/EVM match literal formula oracles and closed forms",
            worst < 1e-12 and abs(closed - 20.0) < 1e-12 and evm_zero == 0.0,
            f"max |diff| {worst:.2e}",
        )


class TestCriterion8AxisCalibration:
    def test_rd_axis_extents(self):
        cfg = VictimRadarConfig()
        lo, hi = cfg.velocity_extent_mps
        ok = (
            abs(cfg.max_range_m - 153.42) / 153.42 < 0.005
            and abs(lo - (-20.545)) / 20.545 < 0.005
            and abs(hi - 20.224) / 20.224 < 0.005
        )
        _report(
            "criterion 8: RD axis extents match the published map within 0.5%",
            ok,
            f"range {cfg.max_range_m:.3f} m, velocity [{lo:.4f}, {hi:.4f}] m/s",
        )


@pytest.fixture(scope="module")
def desk_config():
    return default_config("desk")


@pytest.mark.slow
class TestCriterion5ClassicalOrderings:
    def test_method_orderings_100_scenarios(self, desk_config):
        t0 = time.time()
        seeds = list(range(5000, 5100))
        rep = run_eval(seeds, ["interfered", "noisy", "zeroing", "rfmin", "imat"],
                       desk_config, {}, jobs=1)
        s = {m: rep.mean(m, "sinr_rd_db") for m in rep.methods()}
        e = {m: rep.mean(m, "evm_rd") for m in rep.methods()}
        elapsed = time.time() - t0
        ok = (
            s["zeroing"] > s["interfered"]
            and s["rfmin"] >= s["zeroing"]
            and e["imat"] < e["zeroing"]
            and e["noisy"] <= min(e.values())
            and elapsed < 600.0
        )
        _report(
            "criterion 5: classical-method orderings on 100 desk-scale scenarios",
            ok,
            "SINR " + " ".join(f"{k}={v:.2f}" for k, v in s.items())
            + " | EVM " + " ".join(f"{k}={v:.4f}" for k, v in e.items())
            + f" | {elapsed:.0f}s",
        )


def _desk_split(config, seeds, target=TARGET_OBJECTS):
    return build_split(seeds, "rdd", "ris", config.victim, config.ranges,
                       guard=config.metrics.guard, target_kind=target,
                       config_dict=config.to_dict())


@pytest.mark.slow
class TestCriterion6CnnEndToEnd:
    def test_model_a_beats_baselines(self, desk_config, tmp_path):
        """Published learning rate (5e-5), 400-epoch budget; the targets are
        the object-only reference (see the noise-free-target requirement in
        the notes: zeroing sits at the noisy reference's SINR here, so the
        bar is unreachable for a noise-preserving target)."""
        t0 = time.time()
        train = _desk_split(desk_config, range(200))
        val = _desk_split(desk_config, range(200, 225))
        gen_elapsed = time.time() - t0
        assert gen_elapsed < 300.0, f"dataset generation took {gen_elapsed:.0f}s"

        t1 = time.time()
        res = train_model(
            PRESETS["model-a"], train, val, loss_kind="mse", scaler_kind="css",
            params=TrainParams(max_epochs=400, patience=400), seed=0,
        )
        train_elapsed = time.time() - t1
        ckpt = tmp_path / "model_a.ckpt"
        save_checkpoint(res.model, ckpt)

        method = "cnn:model-a"
        rep = run_eval(list(range(225, 250)), ["interfered", "zeroing", method],
                       desk_config, {method: str(ckpt)}, jobs=1)
        cnn = rep.mean(method, "sinr_rd_db")
        intf = rep.mean("interfered", "sinr_rd_db")
        zero = rep.mean("zeroing", "sinr_rd_db")
        ok = cnn >= intf + 10.0 and cnn >= zero and train_elapsed < 3600.0
        _report(
            "criterion 6: trained Model A clears interfered+10 dB and zeroing",
            ok,
            f"cnn {cnn:.2f} dB vs interfered {intf:.2f} (+10 bar {intf + 10:.2f}) "
            f"and zeroing {zero:.2f}; train {train_elapsed:.0f}s",
        )

    def test_single_sample_overfit(self, desk_config):
        cfg = VictimRadarConfig(n_fast=64, m_slow=16, n_ant=4, b_if=1.25e6)
        ranges = ScenarioRanges(distance_m=(0.5, 9.0), n_objects=(1, 4))
        tr = build_split([0], "rdd", "ris", cfg, ranges)
        va = build_split([5], "rdd", "ris", cfg, ranges)
        params = TrainParams(learning_rate=5e-3, batch_size=1, max_epochs=500,
                             patience=10_000)
        res = train_model(PRESETS["model-a"], tr, va, loss_kind="mse",
                          scaler_kind="css", params=params, seed=0)
        ratio = res.log[-1].train_loss / res.log[0].train_loss
        _report(
            "criterion 6b: single-sample overfit cuts training loss >= 90% in 500 steps",
            ratio <= 0.10,
            f"loss ratio {ratio:.4f}",
        )


@pytest.mark.slow
class TestCriterion7TrendChecks:
    """Direction checks over 3 fixed seeds, trained toward the objects+noise
    reference (where the MSE-vs-SINR-loss tradeoff is structural: the MSE
    optimum is the noisy reference, the ratio loss is unbounded above it).

    The CSS-vs-ZMUVS gap has no structural counterpart here: per-sample
    re/im covariances of these spectra are near-circular, so complex
    whitening nearly coincides with scalar standardization and the check
    compares two statistically equivalent pipelines (see notes).
    """

    def test_scaler_and_loss_directions(self, desk_config, tmp_path):
        from radarmit.denoise import TARGET_WITH_NOISE

        train = _desk_split(desk_config, range(120), target=TARGET_WITH_NOISE)
        val = _desk_split(desk_config, range(200, 215), target=TARGET_WITH_NOISE)
        test_seeds = list(range(225, 245))
        params = TrainParams(learning_rate=2e-4, max_epochs=150, patience=150)

        results: dict[tuple[str, str], list[tuple[float, float]]] = {}
        for seed in (0, 1, 2):
            for loss, scaler in (("mse", "css"), ("mse", "zmuvs"), ("sinr", "zmuvs")):
                res = train_model(PRESETS["model-a"], train, val, loss_kind=loss,
                                  scaler_kind=scaler, params=params, seed=seed)
                ckpt = tmp_path / f"{loss}_{scaler}_{seed}.ckpt"
                save_checkpoint(res.model, ckpt)
                method = f"cnn:{loss}-{scaler}"
                rep = run_eval(test_seeds, [method], desk_config,
                               {method: str(ckpt)}, jobs=1)
                results.setdefault((loss, scaler), []).append(
                    (rep.mean(method, "sinr_rd_db"), rep.mean(method, "evm_rd"))
                )

        mean = {k: tuple(np.mean(v, axis=0)) for k, v in results.items()}
        css_sinr = mean[("mse", "css")][0]
        zmu_sinr, zmu_evm = mean[("mse", "zmuvs")]
        sl_sinr, sl_evm = mean[("sinr", "zmuvs")]
        ok_scaler = css_sinr >= zmu_sinr
        ok_loss = sl_sinr > zmu_sinr and sl_evm > zmu_evm
        _report(
            "criterion 7: CSS >= ZMUVS (MSE) and SINR-loss trades EVM for SINR, 3 seeds",
            ok_scaler and ok_loss,
            f"SINR css {css_sinr:.2f} vs zmuvs {zmu_sinr:.2f}; "
            f"sinr-loss SINR {sl_sinr:.2f} EVM {sl_evm:.3f} vs mse EVM {zmu_evm:.3f}",
        )


@pytest.mark.slow
class TestCriterion9EvalDeterminism:
    def test_serial_vs_parallel_byte_identical(self, desk_config, tmp_path):
        import json
        from radarmit.cli import main

        cfg_path = tmp_path / "config.json"
        d = desk_config.to_dict()
        d["splits"] = [3, 2, 6]
        cfg_path.write_text(json.dumps(d))
        data = tmp_path / "data"
        assert main(["gen", "--config", str(cfg_path), "--out", str(data)]) == 0
        methods = "interfered,noisy,zeroing,rfmin,imat"
        out1, out2 = tmp_path / "serial", tmp_path / "parallel"
        assert main(["eval", "--data", str(data), "--methods", methods,
                     "--out", str(out1), "--jobs", "1"]) == 0
        assert main(["eval", "--data", str(data), "--methods", methods,
                     "--out", str(out2), "--jobs", "4"]) == 0
        same = all(
            (out1 / n).read_bytes() == (out2 / n).read_bytes()
            for n in ("metrics.csv", "cdf_sinr_rd.csv", "cdf_evm_rd.csv",
                      "cdf_sinr_as.csv", "summary.json")
        )
        _report("criterion 9: eval outputs byte-identical, serial vs --jobs 4", same)
