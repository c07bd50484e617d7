import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graybayes import (
    CostCounter,
    DetectorConfig,
    GaussianAdditive,
    GrayImage,
    Window,
    boundary_likelihood_constant,
    boundary_likelihood_exact,
    build_noise_matrix,
    exterior_likelihood,
    identity_noise,
    interior_likelihood,
    pixel_really_is,
    pruned_interior_likelihood,
    save_pair_map_csv,
    scan_image,
    uniform_distribution,
)


def make_cfg(noise, **kwargs) -> DetectorConfig:
    prior = kwargs.pop("prior", uniform_distribution(noise.num_colors))
    return DetectorConfig(noise=noise, color_prior=prior, **kwargs)


def const_window(value: int, k: int = 3) -> Window:
    return Window(size=k, values=np.full(k * k, value))


def test_pixel_really_is_delta_noise():
    cfg = make_cfg(identity_noise(4))
    assert pixel_really_is(3, 3, cfg) == 1.0
    assert pixel_really_is(2, 3, cfg) == 0.0


def test_pixel_really_is_matches_normalized_gaussian_peak():
    cfg = make_cfg(build_noise_matrix(GaussianAdditive(sigma=4.0), 16, "renormalize"))
    col = [math.exp(-((o - 5) ** 2) / 32.0) for o in range(16)]
    assert pixel_really_is(5, 5, cfg) == pytest.approx(col[5] / math.fsum(col), rel=1e-14)
    assert pixel_really_is(5, 5, cfg) == pytest.approx(0.10938983913190127, rel=1e-12)


def test_interior_delta_noise_monochrome():
    cfg = make_cfg(identity_noise(4))
    assert interior_likelihood(const_window(2), cfg) == pytest.approx(0.25, abs=1e-15)


def test_interior_delta_noise_two_values_impossible():
    cfg = make_cfg(identity_noise(4))
    w = Window(size=3, values=np.array([0, 0, 0, 0, 1, 0, 0, 0, 0]))
    assert interior_likelihood(w, cfg) == 0.0


def test_interior_matches_direct_color_sum():
    cfg = make_cfg(build_noise_matrix(GaussianAdditive(sigma=4.0), 8, "wraparound"))
    w = Window(size=3, values=np.array([1, 1, 2, 1, 1, 1, 0, 1, 1]))
    got = interior_likelihood(w, cfg)
    # independently summed over all 8 colors with math.fsum/math.prod
    assert got == pytest.approx(7.474406879678479e-09, rel=1e-12)
    direct = math.fsum(
        (1.0 / 8.0) * math.prod(float(cfg.noise.entries[o, c]) for o in w.values)
        for c in range(8)
    )
    assert got == pytest.approx(direct, rel=1e-13)


def test_exterior_is_color_count_power():
    cfg2 = make_cfg(identity_noise(2))
    assert exterior_likelihood(const_window(0), cfg2) == pytest.approx(1.0 / 512.0)
    cfg1 = make_cfg(identity_noise(1))
    assert exterior_likelihood(const_window(0), cfg1) == 1.0
    cfg16 = make_cfg(identity_noise(16))
    assert exterior_likelihood(const_window(0), cfg16) == pytest.approx(16.0 ** -9)


def test_boundary_constant_equals_exterior():
    cfg = make_cfg(build_noise_matrix(GaussianAdditive(sigma=4.0), 4, "renormalize"))
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = Window(size=3, values=rng.integers(0, 4, size=9))
        assert boundary_likelihood_constant(w, cfg) == exterior_likelihood(w, cfg)
    assert boundary_likelihood_constant(const_window(1), cfg) == pytest.approx(4.0 ** -9)


def test_exact_bimodal_delta_noise_two_values():
    cfg = make_cfg(identity_noise(2))
    w = Window(size=3, values=np.array([0, 0, 0, 0, 0, 1, 1, 1, 1]))
    # the single pair {0,1} contributes (1/2)^9
    assert boundary_likelihood_exact(w, cfg) == pytest.approx(1.0 / 512.0, rel=1e-15)


def test_exact_bimodal_delta_noise_three_values_impossible():
    cfg = make_cfg(identity_noise(4))
    w = Window(size=3, values=np.array([0, 1, 2, 0, 1, 2, 0, 1, 2]))
    assert boundary_likelihood_exact(w, cfg) == 0.0


def test_exact_bimodal_matches_direct_pair_sum():
    cfg = make_cfg(build_noise_matrix(GaussianAdditive(sigma=4.0), 8, "wraparound"))
    w = Window(size=3, values=np.array([1, 1, 2, 1, 1, 1, 0, 1, 1]))
    got = boundary_likelihood_exact(w, cfg)
    # independently summed over all 28 unordered pairs
    assert got == pytest.approx(7.460790297412e-09, rel=1e-12)
    e = cfg.noise.entries
    pairs = [(a, b) for a in range(8) for b in range(a + 1, 8)]
    acc = math.fsum(
        math.prod(0.5 * float(e[o, c1]) + 0.5 * float(e[o, c2]) for o in w.values)
        for c1, c2 in pairs
    )
    assert got == pytest.approx(acc / len(pairs), rel=1e-13)


def test_exact_bimodal_needs_two_colors():
    cfg = make_cfg(identity_noise(1))
    with pytest.raises(ValueError):
        boundary_likelihood_exact(const_window(0), cfg)


def test_pruning_disabled_equals_interior():
    cfg = make_cfg(build_noise_matrix(GaussianAdditive(sigma=4.0), 8, "wraparound"))
    rng = np.random.default_rng(11)
    for _ in range(20):
        w = Window(size=3, values=rng.integers(0, 8, size=9))
        assert pruned_interior_likelihood(w, cfg) == interior_likelihood(w, cfg)


def test_pruning_with_delta_noise_is_exact():
    cfg = make_cfg(identity_noise(4), prune_eps=0.001)
    assert pruned_interior_likelihood(const_window(2), cfg) == interior_likelihood(
        const_window(2), cfg
    )


def test_pruning_error_bound_and_fires():
    counter = CostCounter()
    cfg = make_cfg(
        build_noise_matrix(GaussianAdditive(sigma=4.0), 32, "renormalize"),
        prune_eps=0.001,
        counter=counter,
    )
    exact_cfg = make_cfg(cfg.noise)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        w = Window(size=3, values=rng.integers(0, 32, size=9))
        worst = max(worst, abs(pruned_interior_likelihood(w, cfg) - interior_likelihood(w, exact_cfg)))
    assert worst <= 0.001
    assert counter.pruned_colors > 0


def test_multiply_counts_match_cost_model():
    n, k2 = 16, 9
    counter = CostCounter()
    cfg = make_cfg(identity_noise(n), counter=counter)
    w = const_window(3)
    interior_likelihood(w, cfg)
    assert counter.multiplies == n * (k2 - 1) + n
    counter.reset()
    exterior_likelihood(w, cfg)
    assert counter.multiplies == k2 - 1
    counter.reset()
    boundary_likelihood_exact(w, cfg)
    num_pairs = n * (n - 1) // 2
    assert counter.multiplies == num_pairs * (3 * k2 + 1)


@given(data=st.data())
@settings(max_examples=80, deadline=None)
def test_all_likelihoods_permutation_invariant_bitwise(data):
    noise = build_noise_matrix(GaussianAdditive(sigma=4.0), 16, "renormalize")
    cfg = make_cfg(noise)
    values = data.draw(
        st.lists(st.integers(min_value=0, max_value=15), min_size=9, max_size=9)
    )
    perm = data.draw(st.permutations(values))
    w1 = Window(size=3, values=np.array(values))
    w2 = Window(size=3, values=np.array(perm))
    for op in (
        interior_likelihood,
        exterior_likelihood,
        boundary_likelihood_constant,
        boundary_likelihood_exact,
    ):
        assert op(w1, cfg) == op(w2, cfg)


def test_window_validation():
    with pytest.raises(ValueError):
        Window(size=2, values=np.zeros(4, dtype=int))
    with pytest.raises(ValueError):
        Window(size=3, values=np.zeros(8, dtype=int))
    with pytest.raises(ValueError):
        Window(size=3, values=np.full(9, 0.5))
    cfg = make_cfg(identity_noise(4))
    with pytest.raises(ValueError):
        interior_likelihood(Window(size=3, values=np.full(9, 4)), cfg)


def test_scan_tiny_image_single_center():
    cfg = make_cfg(identity_noise(4))
    img = GrayImage(pixels=np.full((3, 3), 1), num_colors=4)
    lmap = scan_image(img, cfg, "interior_vs_exterior")
    assert lmap.defined_mask.sum() == 1
    assert lmap.defined_mask[1, 1]
    assert np.isnan(lmap.p_feature[0, 0])


def test_scan_constant_image_values():
    cfg = make_cfg(identity_noise(4))
    img = GrayImage(pixels=np.full((6, 5), 2), num_colors=4)
    lmap = scan_image(img, cfg, "interior_vs_exterior")
    defined = lmap.defined_mask
    assert np.all(lmap.p_feature[defined] == 0.25)
    assert np.all(lmap.p_not_feature[defined] == pytest.approx(4.0 ** -9))


def test_scan_equals_single_window_calls():
    from graybayes import SceneSpec, generate_scene

    noiseless, _ = generate_scene(
        SceneSpec(width=16, height=16, num_rects=3, color_range=8, rng_seed=9)
    )
    cfg = make_cfg(
        build_noise_matrix(GaussianAdditive(sigma=4.0), 8, "wraparound"),
        boundary_model="exact_bimodal",
    )
    lmap = scan_image(noiseless, cfg, "boundary_vs_not")
    for y, x in [(1, 1), (5, 8), (14, 14), (7, 3)]:
        w = Window(size=3, values=noiseless.pixels[y - 1 : y + 2, x - 1 : x + 2].ravel())
        assert lmap.p_feature[y, x] == boundary_likelihood_exact(w, cfg)
        assert lmap.p_not_feature[y, x] == interior_likelihood(w, cfg)


def test_scan_rejects_small_image():
    cfg = make_cfg(identity_noise(4), window_size=5)
    img = GrayImage(pixels=np.zeros((4, 4), dtype=int), num_colors=4)
    with pytest.raises(ValueError):
        scan_image(img, cfg, "interior_vs_exterior")


def test_scan_rejects_unknown_feature():
    cfg = make_cfg(identity_noise(4))
    img = GrayImage(pixels=np.zeros((5, 5), dtype=int), num_colors=4)
    with pytest.raises(ValueError):
        scan_image(img, cfg, "edges_vs_not")


def test_pair_map_csv_layout(tmp_path):
    cfg = make_cfg(identity_noise(4))
    img = GrayImage(pixels=np.full((3, 3), 1), num_colors=4)
    lmap = scan_image(img, cfg, "interior_vs_exterior")
    path = str(tmp_path / "pairs.csv")
    save_pair_map_csv(lmap, path)
    lines = open(path, encoding="ascii").read().strip().splitlines()
    assert len(lines) == 3
    assert lines[0].split(",")[0] == "nan"
    center = lines[1].split(",")
    assert float(center[2]) == 0.25


def test_detector_config_validation():
    noise = identity_noise(4)
    with pytest.raises(ValueError):
        DetectorConfig(noise=noise, color_prior=uniform_distribution(4), window_size=4)
    with pytest.raises(ValueError):
        DetectorConfig(noise=noise, color_prior=uniform_distribution(8))
    with pytest.raises(ValueError):
        DetectorConfig(noise=noise, color_prior=uniform_distribution(4), prune_eps=1.5)
    with pytest.raises(ValueError):
        DetectorConfig(
            noise=noise, color_prior=uniform_distribution(4), boundary_model="fancy"
        )
