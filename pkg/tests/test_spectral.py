import numpy as np
import pytest
from conftest import random_hermitian
from hypothesis import given, settings
from hypothesis import strategies as st
from test_algebra import spin_factor

from boxalg.algebra import Element, build_custom, from_complex_matrix, random_element
from boxalg.errors import FormalRealityError, UnsupportedConstruction
from boxalg.spectral import (
    decompose,
    is_positive_coords,
    minimal_polynomial,
    order_unit_norm_coords,
    random_idempotent,
    spectral_decompose,
    spectral_rank,
)

TAGS = ["H2(R)", "H3(R)", "H3(C)", "H3(H)", "H3(O)", "H4(C)"]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eigenvalues_match_eigvalsh(catalog, rng, n):
    spec = catalog(f"H{n}(C)")
    for _ in range(25):
        a = random_hermitian(rng, n)
        dec = spectral_decompose(Element(spec, from_complex_matrix(spec, a)))
        assert np.allclose(dec.eigenvalues_with_multiplicity(), np.linalg.eigvalsh(a), atol=1e-8)


def test_repeated_eigenvalue_multiplicity(catalog, rng):
    spec = catalog("H4(C)")
    u, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    a = u @ np.diag([2.0, 2.0, -1.0, 5.0]) @ u.conj().T
    dec = decompose(spec, from_complex_matrix(spec, a))
    assert np.allclose(dec.eigenvalues, [-1.0, 2.0, 5.0], atol=1e-9)
    assert np.allclose(dec.traces, [1, 2, 1], atol=1e-9)


@pytest.mark.parametrize("tag", TAGS)
def test_decomposition_invariants(catalog, rng, tag):
    spec = catalog(tag)
    for _ in range(20):
        x = random_element(spec, rng)
        dec = decompose(spec, x)
        f = dec.idempotents
        assert spec.norm2(dec.reconstruct() - x) <= 1e-8
        assert spec.norm2(f.sum(axis=0) - spec.unit) <= 1e-8
        prods = spec.mul(f[:, None], f[None, :])
        for j in range(len(f)):
            for k in range(len(f)):
                target = f[j] if j == k else 0.0
                assert spec.norm2(prods[j, k] - target) <= 1e-8


@pytest.mark.parametrize("tag", ["H3(R)", "H3(O)", "H4(C)"])
def test_order_unit_norm_is_tight(catalog, rng, tag):
    spec = catalog(tag)
    for _ in range(5):
        x = random_element(spec, rng)
        t = order_unit_norm_coords(spec, x)
        assert is_positive_coords(spec, t * spec.unit + x)
        assert is_positive_coords(spec, t * spec.unit - x)
        lo, hi = 0.0, t
        while hi - lo > 1e-6:
            mid = (lo + hi) / 2
            ok = is_positive_coords(spec, mid * spec.unit + x, 0) and is_positive_coords(spec, mid * spec.unit - x, 0)
            lo, hi = (lo, mid) if ok else (mid, hi)
        assert abs(hi - t) <= 1e-6


def test_minimal_polynomial(catalog):
    spec = catalog("H3(C)")
    assert np.allclose(minimal_polynomial(spec.one()), [1.0, -1.0])
    assert np.allclose(minimal_polynomial(spec.zero()), [1.0, 0.0])
    x = spec.basis(0) * 2.0 + spec.basis(1) * 3.0  # diag(2, 3, 0)
    assert np.allclose(minimal_polynomial(x), np.poly([2.0, 3.0, 0.0]), atol=1e-9)


def test_spin_factor_has_rank_two(rng):
    spec = spin_factor(4)
    assert spectral_rank(spec) == 2
    x = np.array([0.5, 3.0, 4.0, 0.0, 0.0])
    assert np.allclose(decompose(spec, x).eigenvalues, [-4.5, 5.5], atol=1e-9)


def complex_numbers_as_real_algebra():
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = c[0, 1, 1] = c[1, 0, 1] = 1.0
    c[1, 1, 0] = -1.0
    return build_custom(2, c, [1.0, 0.0])


def test_not_formally_real():
    spec = complex_numbers_as_real_algebra()
    with pytest.raises(FormalRealityError):
        decompose(spec, [0.0, 1.0])


def test_noncommutative_algebra_has_no_spectral_theory():
    c = np.zeros((4, 4, 4))
    # 2x2 real matrices with matrix units e11, e12, e21, e22
    units = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for a, (i, j) in enumerate(units):
        for b, (k, l) in enumerate(units):
            if j == k:
                c[a, b, units.index((i, l))] = 1.0
    spec = build_custom(4, c, [1.0, 0.0, 0.0, 1.0])
    with pytest.raises(UnsupportedConstruction):
        decompose(spec, [1.0, 2.0, 3.0, 4.0])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_random_idempotent_rank(rank, seed):
    from boxalg.algebra import parse_catalog_tag

    spec = parse_catalog_tag("H3(H)")
    e = random_idempotent(spec, rank, seed).coords
    assert spec.norm2(spec.mul(e, e) - e) <= 1e-9
    assert abs(spec.inner(e, spec.unit) - rank) <= 1e-9


def test_random_idempotent_rejects_bad_rank(catalog):
    with pytest.raises(ValueError):
        random_idempotent(catalog("H3(R)"), 4, 0)
