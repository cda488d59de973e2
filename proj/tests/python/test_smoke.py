import math

import pytest

import curvops


def test_flat_distance_is_euclidean():
    m = curvops.Manifold(2, 0.0)
    assert m.distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)


def test_sphere_roundtrip_and_radii():
    m = curvops.Manifold(2, 1.0)
    x = m.base_point()
    y = m.exp(x, m.log(x, [0.0, 0.0, 1.0]))
    assert y == pytest.approx([0.0, 0.0, 1.0], abs=1e-10)
    assert m.injectivity_radius(x) == pytest.approx(math.pi)
    assert m.convexity_radius(x) == pytest.approx(math.pi / 2)


def test_transport_is_an_isometry():
    m = curvops.Manifold(2, -1.0)
    x = m.base_point()
    y = m.exp(x, [0.0, 0.4, 0.3])
    v = [0.0, 0.2, -0.5]
    moved = m.transport(x, y, v)
    def mink(a, b):
        return -a[0] * b[0] + sum(ai * bi for ai, bi in zip(a[1:], b[1:]))
    assert mink(moved, moved) == pytest.approx(mink(v, v), abs=1e-10)


def test_eigenvalues_sorted():
    assert curvops.eigenvalues([[3.0, 0.0], [0.0, 1.0]]) == pytest.approx([1.0, 3.0])


def test_kernel_catalog_and_evaluation():
    ids = curvops.catalog()
    assert "pucci+:1:2" in ids
    k = curvops.kernel("pucci+:1:2", 2)
    assert k.ellipticity == pytest.approx((1.0, 2.0))
    assert k(0.0, [1.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]) == pytest.approx(-2.0)
    plap = curvops.kernel("p-laplacian:3", 2)
    assert plap.homogeneity == pytest.approx(2.0)
    with pytest.raises(Exception):
        curvops.kernel("game-p-laplacian:3")(0.0, [0.0, 0.0], [[1, 0], [0, 1]])


def test_condition_matrix_has_no_mismatches():
    rows = curvops.condition_matrix(2, 0.0, 20240808)
    assert rows
    assert all(r["match"] for r in rows)


def test_barrier_certification():
    cert = curvops.certify_barrier("laplace-beltrami", kappa=0.0, r0=0.5)
    assert cert["found"]
    assert cert["margin"] > 0.0
    assert 0.0 < cert["c"] < 1.0
    assert all(m > 0.0 for m in cert["epsilon_margins"])


def test_smp_spike_verdicts():
    ok = curvops.smp_spike("laplace-beltrami", size=15, spacing=0.1)
    assert ok["is_subsolution"] and ok["constant"]
    bad = curvops.smp_spike("counterexample", size=15, spacing=0.1)
    assert bad["is_subsolution"] and not bad["constant"]
    assert bad["covered"] == 1


def test_solve_dirichlet_converges():
    sol = curvops.solve_dirichlet("pucci-:1:2", size=15, spacing=0.1)
    assert sol["converged"]
    assert sol["residual_sup"] <= 1e-8
