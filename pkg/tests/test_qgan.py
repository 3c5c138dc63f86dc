import numpy as np
import pytest

from qcgen.datasets import gaussian_target, js, mean_std, tv, uniform_target
from qcgen.mle import NumericalError
from qcgen.qgan import (
    QganConfig,
    disc_loss,
    disc_loss_grad,
    discriminator_output,
    discriminator_outputs,
    fan_in_pairs,
    gen_loss,
    gen_loss_grad,
    generator_distribution,
    make_discriminator,
    make_generator,
    perturb_params,
    sample_generator,
    train_qgan,
)

from oracles import embed_1q


def _fd(f, p, h=1e-5):
    return np.array([(f(p + h * e) - f(p - h * e)) / (2 * h) for e in np.eye(p.size)])


def test_fan_in_topology():
    assert fan_in_pairs(2, 1) == ((0, 1), (0, 2), (1, 2))
    assert fan_in_pairs(3, 2) == ((0, 1), (1, 2), (0, 3), (1, 3), (2, 3), (3, 4))


def test_zero_params_discriminator_outputs_zero():
    disc = make_discriminator(2, 1, 2)
    np.testing.assert_allclose(discriminator_outputs(disc, np.zeros(disc.ansatz.parameter_count)), 0, atol=1e-15)


def test_readout_only_rotation():
    # with one layer and only the readout angle set, D(x) = sin^2(t/2) for every x
    disc = make_discriminator(2, 1, 1)
    p = np.zeros(disc.ansatz.parameter_count)
    p[2] = 0.8
    np.testing.assert_allclose(discriminator_outputs(disc, p), np.sin(0.4) ** 2, atol=1e-14)


def test_discriminator_output_single_matches_batch():
    disc = make_discriminator(3, 2, 2)
    p = np.random.default_rng(0).normal(size=disc.ansatz.parameter_count)
    d = discriminator_outputs(disc, p)
    assert all(0 <= v <= 1 for v in d)
    for x in (0, 5, 7):
        assert discriminator_output(disc, p, x) == pytest.approx(d[x], abs=1e-14)


def test_input_encoding_is_basis_state():
    disc = make_discriminator(2, 1, 1)
    s = disc.input_states()
    assert s.shape == (4, 8)
    np.testing.assert_array_equal(np.argmax(s, axis=1), [0, 2, 4, 6])


def test_loss_gradients_match_fd():
    rng = np.random.default_rng(1)
    gen, disc = make_generator(2, 2), make_discriminator(2, 1, 2)
    g = rng.normal(size=gen.ansatz.parameter_count)
    d = rng.normal(size=disc.ansatz.parameter_count)
    t = gaussian_target(2)
    np.testing.assert_allclose(
        disc_loss_grad(gen, g, disc, d, t), _fd(lambda x: disc_loss(gen, g, disc, x, t), d), atol=1e-6
    )
    np.testing.assert_allclose(gen_loss_grad(gen, g, disc, d), _fd(lambda x: gen_loss(gen, x, disc, d), g), atol=1e-6)


def test_mismatched_widths():
    with pytest.raises(ValueError):
        train_qgan(make_generator(2, 1), make_discriminator(3, 1, 1), uniform_target(2), QganConfig(iterations=1))
    with pytest.raises(ValueError):
        train_qgan(make_generator(2, 1), make_discriminator(2, 1, 1), uniform_target(3), QganConfig(iterations=1))


def test_config_validation():
    with pytest.raises(ValueError):
        QganConfig(iterations=0).validate()
    with pytest.raises(ValueError):
        QganConfig(optimizer="nope").validate()


def test_uniform_task_converges():
    gen, disc = make_generator(2, 2), make_discriminator(2, 1, 2)
    g, _, hist = train_qgan(gen, disc, uniform_target(2), QganConfig(iterations=300, eval_interval=50))
    assert tv(generator_distribution(gen, g), uniform_target(2)) < 0.05
    assert [r.iteration for r in hist.records] == [0, 50, 100, 150, 200, 250, 299]


def test_history_deterministic():
    gen, disc = make_generator(2, 1), make_discriminator(2, 1, 1)
    cfg = QganConfig(iterations=30, seed=3, sampled_mode=True)
    a = train_qgan(gen, disc, gaussian_target(2), cfg)
    b = train_qgan(gen, disc, gaussian_target(2), cfg)
    assert a[0].tobytes() == b[0].tobytes() and a[2] == b[2]


def test_nonfinite_init_raises():
    gen, disc = make_generator(1, 1), make_discriminator(1, 1, 1)
    with pytest.raises((NumericalError, ValueError)):
        train_qgan(gen, disc, uniform_target(1), QganConfig(iterations=2), g_params=[np.inf])


def test_perturbation():
    p = np.arange(5.0)
    assert perturb_params(p, 0.0, 1).tobytes() == p.tobytes()
    q = perturb_params(p, 0.01, 1)
    assert 0 < np.abs(q - p).max() < 0.1
    with pytest.raises(ValueError):
        perturb_params(p, -1, 0)


def test_sample_generator_seeded():
    gen = make_generator(3, 2)
    g = np.random.default_rng(0).normal(size=gen.ansatz.parameter_count)
    assert sample_generator(gen, g, 100, 5) == sample_generator(gen, g, 100, 5)


def test_losses_match_enumeration():
    rng = np.random.default_rng(7)
    gen, disc = make_generator(3, 2), make_discriminator(3, 1, 2)
    g = rng.normal(size=gen.ansatz.parameter_count)
    d = rng.normal(size=disc.ansatz.parameter_count)
    t = gaussian_target(3)
    pg = generator_distribution(gen, g).probs
    outs = [discriminator_output(disc, d, x) for x in range(8)]
    brute_d = -sum(t.probs[x] * np.log(outs[x]) + pg[x] * np.log(1 - outs[x]) for x in range(8))
    brute_g = -sum(pg[x] * np.log(outs[x]) for x in range(8))
    assert disc_loss(gen, g, disc, d, t) == pytest.approx(brute_d, abs=1e-10)
    assert gen_loss(gen, g, disc, d) == pytest.approx(brute_g, abs=1e-10)
    assert disc_loss(gen, g, disc, d, t) >= 0 and gen_loss(gen, g, disc, d) >= 0


def test_constant_half_discriminator_gives_zero_generator_gradient():
    gen, disc = make_generator(2, 2), make_discriminator(2, 1, 1)
    d = np.zeros(disc.ansatz.parameter_count)
    d[2] = np.pi / 2  # readout RY only
    np.testing.assert_allclose(discriminator_outputs(disc, d), 0.5, atol=1e-15)
    g = np.random.default_rng(0).normal(size=gen.ansatz.parameter_count)
    np.testing.assert_allclose(gen_loss_grad(gen, g, disc, d), 0, atol=1e-12)


def test_point_mass_target():
    from qcgen.sampling import Distribution

    gen, disc = make_generator(2, 2), make_discriminator(2, 1, 2)
    g, _, _ = train_qgan(gen, disc, Distribution.point_mass(2, 2), QganConfig(iterations=300, eval_interval=100))
    assert generator_distribution(gen, g).probs[2] > 0.95
