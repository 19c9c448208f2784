"""End-to-end smoke tests for the compiled extension."""

import math

import numpy as np
import pytest

import resdiff


@pytest.fixture(scope="module")
def schedule():
    return resdiff.build_schedule(1000)


def test_schedule_values(schedule):
    assert schedule.steps == 1000
    assert schedule.beta[0] == 1e-4
    assert schedule.beta[-1] == 2e-2
    assert schedule.t_prime == 368
    bar = np.asarray(schedule.alpha_bar)
    assert (np.diff(bar) < 0).all()
    assert abs(schedule.sqrt_alpha_bar[schedule.t_prime - 1] - 0.5) < 1e-3
    assert resdiff.acceleration_bias(schedule) < 1e-2


def test_forward_forms_agree(schedule):
    rng = np.random.default_rng(0)
    x0 = rng.standard_normal((16, 16))
    x_hat0 = rng.standard_normal((16, 16))
    eps = rng.standard_normal((16, 16))
    r = resdiff.residual(x_hat0, x0)
    np.testing.assert_allclose(r, x_hat0 - x0, rtol=0, atol=0)
    for t in (1, 200, schedule.t_prime, 1000):
        closed, target = resdiff.q_sample_closed(x0, r, t, eps, schedule)
        simplified = resdiff.q_sample_simplified(x0, x_hat0, t, eps, schedule)
        np.testing.assert_allclose(closed, simplified, rtol=0, atol=1e-12)
        want = eps + (resdiff.resnoise_coeff(t, schedule) * r)
        np.testing.assert_allclose(target, want, rtol=0, atol=1e-12)
    # Zero residual collapses the target to the plain noise.
    zero = np.zeros_like(x0)
    _, target = resdiff.q_sample_closed(x0, zero, 100, eps, schedule)
    assert (target == eps).all()


def test_posterior_routes_agree(schedule):
    rng = np.random.default_rng(1)
    x0 = rng.standard_normal(32)
    x_hat0 = rng.standard_normal(32)
    eps = rng.standard_normal(32)
    r = x_hat0 - x0
    for t in (2, 150, schedule.t_prime):
        x_t, target = resdiff.q_sample_closed(x0, r, t, eps, schedule)
        mu_a = resdiff.posterior_mean(x_t, x0, r, t, schedule)
        mu_b = resdiff.mu_from_resnoise(x_t, target, t, schedule)
        np.testing.assert_allclose(mu_a, mu_b, rtol=0, atol=1e-12)


def test_shape_errors_are_value_errors(schedule):
    with pytest.raises(ValueError):
        resdiff.build_schedule(1)
    with pytest.raises(ValueError):
        resdiff.residual(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        resdiff.posterior_mean(np.zeros(3), np.zeros(3), np.zeros(3), 1, schedule)


def test_rng_reproducible():
    a = resdiff.Rng(7)
    b = resdiff.Rng(7)
    ga = a.gaussian([4, 4])
    gb = b.gaussian([4, 4])
    assert (ga == gb).all()
    assert ga.shape == (4, 4)
    child = resdiff.Rng(7).child(0)
    assert not (child.gaussian([4, 4]) == ga).all()
    u = resdiff.Rng(3).uniform()
    assert 0.0 <= u < 1.0


def test_rsf1_round_trip(tmp_path):
    arr = np.array([[0.1, -0.0, 1.0], [math.pi, 1e-300, -2.5]])
    path = tmp_path / "t.rsf1"
    resdiff.save_rsf1(path, arr)
    back = resdiff.load_rsf1(path)
    assert back.shape == arr.shape
    assert back.tobytes() == arr.tobytes()


def test_stub_and_dataset():
    spec = resdiff.StubSpec()
    spec.kind = resdiff.StubKind.affine_blur
    spec.gain, spec.bias, spec.kernel = 0.8, 0.1, 3
    mask = np.ones((8, 8))
    out = resdiff.stub_apply(spec, mask, mask)
    np.testing.assert_allclose(out, 0.9, rtol=0, atol=1e-15)

    ds = resdiff.DatasetSpec()
    ds.count = 5
    samples = resdiff.make_dataset(ds)
    assert [s[0] for s in samples] == [0, 1, 2, 3, 4]
    for _, image, mask in samples:
        assert image.shape == (16, 16)
        assert set(np.unique(mask)) <= {-1.0, 1.0}


def test_denoiser_and_chain(schedule):
    cfg = resdiff.DenoiserConfig()
    cfg.x_dim = 9
    cfg.cond_dim = 9
    cfg.hidden = [6]
    emb = resdiff.TimeEmbedding()
    emb.dim = 4
    cfg.time_emb = emb
    params = resdiff.DenoiserParams.zeros(cfg)
    out = resdiff.predict_resnoise(params, np.ones(9), np.ones(9), 5)
    assert (out == 0.0).all()

    chain = resdiff.Rng(11)
    trace = resdiff.sample_chain(np.zeros((3, 3)), np.zeros((3, 3)), params, schedule, chain)
    assert trace["x0"].shape == (3, 3)
    assert len(trace["rms"]) == schedule.t_prime + 1
    assert trace["rms"][0][0] == schedule.t_prime
    assert trace["rms"][-1][0] == 0

    assert resdiff.gradcheck_max_rel_error(0, 2) <= 1e-4


def test_embed_time_conventions():
    emb = resdiff.TimeEmbedding()
    emb.dim = 6
    vec = resdiff.embed_time(0, emb)
    assert vec.shape == (6,)
    np.testing.assert_allclose(vec[0::2], 0.0, atol=0)
    np.testing.assert_allclose(vec[1::2], 1.0, atol=0)


def test_config_and_micro_experiment(tmp_path):
    base = resdiff.parse_config_text("")
    name = resdiff.run_dir_name(base)
    assert name.endswith("-s0") and len(name) == 19
    canon = resdiff.canonical_config(base)
    assert resdiff.canonical_config(resdiff.parse_config_text(canon)) == canon

    config = resdiff.parse_config_text(
        "\n".join(
            [
                f"out_dir = {tmp_path}",
                "dataset.height = 8",
                "dataset.width = 8",
                "dataset.train_count = 12",
                "dataset.eval_count = 4",
                "model.hidden = 16",
                "model.time_dim = 8",
                "train.batch_size = 4",
                "train.iterations = 5",
                "train.learning_rate = 0.001",
                "eval.bootstrap_resamples = 50",
            ]
        )
    )
    summary = resdiff.run_experiment(config)
    run_dir = tmp_path / resdiff.run_dir_name(config)
    assert str(run_dir) == summary["run_dir"]
    for artifact in (
        "config.txt",
        "schedule.csv",
        "losses.csv",
        "metrics.csv",
        "summary.csv",
        "checkpoint.rdk",
        "timing.txt",
    ):
        assert (run_dir / artifact).is_file(), artifact
    lines = (run_dir / "metrics.csv").read_text().strip().splitlines()
    assert lines[0] == "sample_id,mse_stub,mse_diffusion,iou_stub,iou_diffusion"
    assert len(lines) == 1 + 4
    assert math.isfinite(summary["mse_diffusion_mean"])
    assert summary["gap_already_zero"] is False
