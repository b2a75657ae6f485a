import json

import numpy as np
import pytest
from conftest import random_hermitian

from boxalg.algebra import (
    Element,
    build_custom,
    build_hermitian_algebra,
    from_complex_matrix,
    load_algebra,
    parse_catalog_tag,
    random_element,
    spec_from_json,
    spec_to_json,
    to_complex_matrix,
    to_matrix,
)
from boxalg.errors import UnsupportedConstruction, ValidationError

ALL_TAGS = [f"H{n}({f})" for n in (2, 3, 4) for f in "RCH"] + ["H3(O)"]


def quaternion_block(mat):
    """(n, n, 4) quaternion matrix -> (2n, 2n) complex matrix via z + w j -> [[z, w], [-conj w, conj z]]."""
    z = mat[..., 0] + 1j * mat[..., 1]
    w = mat[..., 2] + 1j * mat[..., 3]
    return np.block([[z, w], [-w.conj(), z.conj()]])


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_dimension_formula(catalog, tag):
    spec = catalog(tag)
    n, f = spec.hermitian
    m = {"R": 1, "C": 2, "H": 4, "O": 8}[f]
    assert spec.dim == n + m * n * (n - 1) // 2
    assert spec.type_I2_flag == (n == 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_complex_product_matches_numpy(catalog, rng, n):
    spec = catalog(f"H{n}(C)")
    for _ in range(20):
        a, b = random_hermitian(rng, n), random_hermitian(rng, n)
        x, y = from_complex_matrix(spec, a), from_complex_matrix(spec, b)
        got = to_complex_matrix(spec, spec.mul(x, y))
        assert np.allclose(got, (a @ b + b @ a) / 2, atol=1e-12)
        assert abs(spec.inner(x, y) - np.trace(a @ b).real) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_quaternionic_product_matches_complex_representation(catalog, rng, n):
    spec = catalog(f"H{n}(H)")
    for _ in range(20):
        x, y = random_element(spec, rng), random_element(spec, rng)
        a, b = quaternion_block(to_matrix(spec, x)), quaternion_block(to_matrix(spec, y))
        got = quaternion_block(to_matrix(spec, spec.mul(x, y)))
        assert np.allclose(got, (a @ b + b @ a) / 2, atol=1e-12)


def test_real_product_matches_numpy(catalog, rng):
    spec = catalog("H4(R)")
    for _ in range(20):
        a, b = random_hermitian(rng, 4).real, random_hermitian(rng, 4).real
        x = from_complex_matrix(catalog("H4(C)"), a)
        # real coordinates are the diagonal plus the real off-diagonal slots
        x_r = np.concatenate([x[:4], x[4::2]])
        y = from_complex_matrix(catalog("H4(C)"), b)
        y_r = np.concatenate([y[:4], y[4::2]])
        got = to_matrix(spec, spec.mul(x_r, y_r))[..., 0]
        assert np.allclose(got, (a @ b + b @ a) / 2, atol=1e-12)


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_jordan_identity_and_trace_associativity(catalog, rng, tag):
    spec = catalog(tag)
    for _ in range(20):
        a, b, c = (random_element(spec, rng) for _ in range(3))
        a2 = spec.mul(a, a)
        lhs = spec.mul(a2, spec.mul(a, b))
        rhs = spec.mul(a, spec.mul(a2, b))
        assert spec.norm2(lhs - rhs) <= 1e-10
        assert abs(spec.inner(spec.mul(a, b), c) - spec.inner(a, spec.mul(b, c))) <= 1e-10


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_unit_and_orthonormal_basis(catalog, tag):
    spec = catalog(tag)
    eye = np.eye(spec.dim)
    assert np.allclose(spec.mul(spec.unit, eye), eye, atol=1e-12)
    assert np.allclose(spec.trace_form, eye)
    assert spec.is_commutative


def test_octonionic_product_is_not_associative(catalog, rng):
    spec = catalog("H3(O)")
    a, b, c = (random_element(spec, rng) for _ in range(3))
    assoc = spec.mul(spec.mul(a, b), c) - spec.mul(a, spec.mul(b, c))
    assert spec.norm2(assoc) > 1e-3


def test_bilinearity(catalog, rng):
    spec = catalog("H3(O)")
    a, b, c = (random_element(spec, rng) for _ in range(3))
    lhs = spec.mul(2.5 * a + b, c)
    assert np.max(np.abs(lhs - (2.5 * spec.mul(a, c) + spec.mul(b, c)))) <= 1e-12


def test_catalog_is_cached_and_immutable(catalog):
    spec = catalog("H3(C)")
    assert build_hermitian_algebra(3, "C") is spec
    with pytest.raises(ValueError):
        spec.structure[0, 0, 0] = 5.0


def test_left_right_operators(catalog, rng):
    spec = catalog("H3(H)")
    a, b = random_element(spec, rng), random_element(spec, rng)
    assert np.allclose(spec.left_matrix(a) @ b, spec.mul(a, b))
    assert np.allclose(spec.right_matrix(a) @ b, spec.mul(b, a))


@pytest.mark.parametrize("bad", ["H1(R)", "H2(O)", "H4(O)"])
def test_unsupported_catalog(bad):
    with pytest.raises(UnsupportedConstruction):
        parse_catalog_tag(bad)


@pytest.mark.parametrize("bad", ["H3(X)", "M3(C)", "H(C)", ""])
def test_malformed_tags(bad):
    with pytest.raises(ValidationError):
        parse_catalog_tag(bad)


def spin_factor(k):
    """R 1 + R^k with (s, u)(t, v) = (st + u.v, sv + tu)."""
    d = k + 1
    c = np.zeros((d, d, d))
    c[0, :, :] = np.eye(d)
    c[:, 0, :] = np.eye(d)
    for i in range(1, d):
        c[i, i, 0] = 1.0
    return build_custom(d, c, np.eye(d)[0])


def test_custom_spec_roundtrip(tmp_path):
    spec = spin_factor(3)
    doc = spec_to_json(spec)
    path = tmp_path / "spin.json"
    path.write_text(json.dumps(doc))
    again = load_algebra(str(path))
    assert np.array_equal(again.structure, spec.structure)
    assert again.catalog_tag is None


def test_catalog_roundtrip_returns_catalog(catalog):
    spec = catalog("H2(H)")
    assert spec_from_json(json.loads(json.dumps(spec_to_json(spec)))) is spec


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"dim": 2},
        {"dim": 2, "unit": [1, 0], "structure": [[0, 0, 0]]},
        {"dim": 2, "unit": [1, 0], "structure": [[0, 0, 5, 1.0]]},
        {"dim": 2, "unit": [1, 0], "structure": [[-1, 0, 0, 1.0]]},
        {"dim": 1, "unit": [1.0], "structure": [[0, 0, 0, 2.0]]},
        {"dim": 1, "unit": [1.0], "structure": [[0, 0, 0, 1.0]], "trace_form": [[-1.0]]},
    ],
)
def test_malformed_specs(doc):
    with pytest.raises(ValidationError):
        spec_from_json(doc)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        load_algebra(str(path))


def test_element_validation(catalog):
    spec = catalog("H2(C)")
    with pytest.raises(ValidationError):
        Element(spec, np.zeros(3))
    with pytest.raises(ValidationError):
        spec.one() + catalog("H2(R)").one()
    e = spec.basis(0)
    assert (e.box(e) - e).norm2() < 1e-12
