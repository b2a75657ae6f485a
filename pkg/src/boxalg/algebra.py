"""Finite-dimensional order-unit algebras given by structure constants.

An :class:`AlgebraSpec` stores a dense tensor ``structure[i, j, k]`` with
``e_i [] e_j = sum_k structure[i, j, k] e_k``, the coordinates of the unit,
and a positive-definite trace form used to represent states as densities.
Coordinates are plain float arrays; :class:`Element` is a thin wrapper for
the public API, while the vectorized methods on the spec accept raw arrays
with arbitrary leading batch axes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .composition import TAG_DIMS, multiplication_table
from .errors import UnsupportedConstruction, ValidationError

ARITH_TOL = 1e-12
PROPERTY_TOL = 1e-9

UNIT_NAMES = {
    "R": ["1"],
    "C": ["1", "i"],
    "H": ["1", "i", "j", "k"],
    "O": [f"e{k}" for k in range(8)],
}

_CATALOG_RE = re.compile(r"^H(\d+)\(([RCHO])\)$")


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    dim: int
    structure: np.ndarray
    unit: np.ndarray
    trace_form: np.ndarray
    basis_labels: tuple[str, ...]
    catalog_tag: str | None = None
    type_I2_flag: bool = False
    extreme_rays: np.ndarray | None = None
    hermitian: tuple[int, str] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "structure", _readonly(self.structure))
        object.__setattr__(self, "unit", _readonly(self.unit))
        object.__setattr__(self, "trace_form", _readonly(self.trace_form))
        if self.extreme_rays is not None:
            object.__setattr__(self, "extreme_rays", _readonly(np.atleast_2d(self.extreme_rays)))
        d = self.dim
        if self.structure.shape != (d, d, d):
            raise ValidationError(f"structure must have shape {(d, d, d)}, got {self.structure.shape}")
        if self.unit.shape != (d,):
            raise ValidationError(f"unit must have length {d}")
        if self.trace_form.shape != (d, d):
            raise ValidationError(f"trace_form must have shape {(d, d)}")
        if len(self.basis_labels) != d:
            raise ValidationError(f"need {d} basis labels, got {len(self.basis_labels)}")
        if self.extreme_rays is not None and self.extreme_rays.shape[1] != d:
            raise ValidationError("extreme rays must have the algebra dimension")

    def __repr__(self):
        name = self.catalog_tag or "custom"
        return f"AlgebraSpec({name}, dim={self.dim})"

    # -- vectorized coordinate arithmetic ---------------------------------

    def mul(self, x, y) -> np.ndarray:
        """Coordinates of ``x [] y``; broadcasts over leading axes."""
        return np.einsum("...i,...j,ijk->...k", x, y, self.structure)

    def inner(self, x, y) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", x, self.trace_form, y)

    def norm2(self, x) -> np.ndarray:
        """Trace-form (Euclidean) norm, used for residuals of elements."""
        return np.sqrt(np.maximum(self.inner(x, x), 0.0))

    def left_matrix(self, a) -> np.ndarray:
        """Matrix of ``T_a: b -> a [] b``."""
        return np.einsum("i,ijk->kj", a, self.structure)

    def right_matrix(self, a) -> np.ndarray:
        """Matrix of ``R_a: x -> x [] a``."""
        return np.einsum("j,ijk->ki", a, self.structure)

    def adjoint(self, op: np.ndarray) -> np.ndarray:
        """Adjoint of a coordinate operator with respect to the trace form."""
        return np.linalg.solve(self.trace_form, op.T @ self.trace_form)

    @property
    def is_catalog(self) -> bool:
        return self.hermitian is not None

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.max(np.abs(self.structure - self.structure.transpose(1, 0, 2)), initial=0.0) <= ARITH_TOL)

    @cached_property
    def right_operators(self) -> np.ndarray:
        """Stack ``R_{e_i}`` for all basis elements, shape (d, d, d)."""
        return np.einsum("jik->ikj", self.structure)

    def element(self, coords) -> Element:
        return Element(self, coords)

    def one(self) -> Element:
        return Element(self, self.unit)

    def zero(self) -> Element:
        return Element(self, np.zeros(self.dim))

    def basis(self, k: int) -> Element:
        return Element(self, np.eye(self.dim)[k])


@dataclass(frozen=True, eq=False)
class Element:
    algebra: AlgebraSpec
    coords: np.ndarray

    def __post_init__(self):
        c = _readonly(self.coords)
        if c.shape != (self.algebra.dim,):
            raise ValidationError(f"element needs {self.algebra.dim} coordinates, got shape {c.shape}")
        object.__setattr__(self, "coords", c)

    def _same(self, other: Element) -> None:
        if other.algebra is not self.algebra:
            raise ValidationError("elements belong to different algebras")

    def __add__(self, other: Element) -> Element:
        self._same(other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: Element) -> Element:
        self._same(other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> Element:
        return Element(self.algebra, -self.coords)

    def __mul__(self, scalar: float) -> Element:
        return Element(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> Element:
        return Element(self.algebra, self.coords / float(scalar))

    def box(self, other: Element) -> Element:
        return multiply(self, other)

    def norm2(self) -> float:
        return float(self.algebra.norm2(self.coords))

    def is_close(self, other: Element, tol: float = PROPERTY_TOL) -> bool:
        self._same(other)
        return bool(self.algebra.norm2(self.coords - other.coords) <= tol)


def multiply(a: Element, b: Element) -> Element:
    a._same(b)
    return Element(a.algebra, a.algebra.mul(a.coords, b.coords))


def left_mult_operator(a: Element) -> np.ndarray:
    return a.algebra.left_matrix(a.coords)


def right_mult_operator(a: Element) -> np.ndarray:
    return a.algebra.right_matrix(a.coords)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def op_norm(m: np.ndarray) -> float:
    """Spectral norm of a coordinate operator (0 for empty matrices)."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


# -- hermitian matrix catalog ---------------------------------------------


def _hermitian_basis(n: int, tag: str) -> tuple[np.ndarray, list[str]]:
    m = TAG_DIMS[tag]
    mats, labels = [], []
    for i in range(n):
        b = np.zeros((n, n, m))
        b[i, i, 0] = 1.0
        mats.append(b)
        labels.append(f"E{i + 1}{i + 1}")
    s = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            for u in range(m):
                b = np.zeros((n, n, m))
                b[i, j, u] = s
                b[j, i, u] = -s if u else s
                mats.append(b)
                labels.append(f"F{i + 1}{j + 1}({UNIT_NAMES[tag][u]})")
    return np.array(mats), labels


def matmul_over(tag: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product of matrices with entries in the composition algebra ``tag``.

    Entries live on the trailing axis: shapes (..., n, k, m) and (..., k, l, m).
    """
    return np.einsum("...ijp,...jkq,pqr->...ikr", x, y, multiplication_table(tag), optimize=True)


def from_matrix(spec: AlgebraSpec, mat: np.ndarray) -> np.ndarray:
    """Coordinates of a hermitian matrix (n, n, m) in the catalog basis."""
    n, tag = _require_hermitian(spec)
    m = TAG_DIMS[tag]
    mat = np.asarray(mat, dtype=float)
    diag = [mat[..., i, i, 0] for i in range(n)]
    off = [np.sqrt(2.0) * mat[..., i, j, u] for i in range(n) for j in range(i + 1, n) for u in range(m)]
    return np.stack(diag + off, axis=-1)


def to_matrix(spec: AlgebraSpec, coords) -> np.ndarray:
    """Hermitian matrix (n, n, m) with entries in the composition algebra."""
    _require_hermitian(spec)
    return np.einsum("...a,aijp->...ijp", coords, _hermitian_basis_cached(*spec.hermitian))


def to_complex_matrix(spec: AlgebraSpec, coords) -> np.ndarray:
    n, tag = _require_hermitian(spec)
    if tag not in ("R", "C"):
        raise UnsupportedConstruction(f"H{n}({tag}) has no complex matrix form")
    mat = to_matrix(spec, coords)
    out = mat[..., 0].astype(complex)
    if tag == "C":
        out = out + 1j * mat[..., 1]
    return out


def from_complex_matrix(spec: AlgebraSpec, mat: np.ndarray) -> np.ndarray:
    n, tag = _require_hermitian(spec)
    if tag != "C":
        raise UnsupportedConstruction("complex matrices only map into H_n(C)")
    mat = np.asarray(mat, dtype=complex)
    return from_matrix(spec, np.stack([mat.real, mat.imag], axis=-1))


def _require_hermitian(spec: AlgebraSpec) -> tuple[int, str]:
    if spec.hermitian is None:
        raise UnsupportedConstruction(f"{spec!r} is not a hermitian matrix algebra")
    return spec.hermitian


@lru_cache(maxsize=None)
def _hermitian_basis_cached(n: int, tag: str) -> np.ndarray:
    mats, _ = _hermitian_basis(n, tag)
    mats.setflags(write=False)
    return mats


@lru_cache(maxsize=None)
def build_hermitian_algebra(n: int, tag: str) -> AlgebraSpec:
    """Jordan algebra H_n(F) of hermitian n x n matrices over F in {R, C, H, O}.

    The product is ``(AB + BA)/2``; the basis is orthonormal for the trace
    form ``Re tr(A o B)``.  Results are cached, so repeated calls return the
    same object.
    """
    if tag not in TAG_DIMS:
        raise ValidationError(f"unknown division algebra {tag!r}")
    if n < 2:
        raise UnsupportedConstruction("hermitian catalog algebras need n >= 2")
    if tag == "O" and n != 3:
        raise UnsupportedConstruction("octonionic hermitian algebras are only built for n = 3")
    mats, labels = _hermitian_basis(n, tag)
    spec_stub = _Stub(hermitian=(n, tag))
    ab = matmul_over(tag, mats[:, None], mats[None, :])
    jordan = 0.5 * (ab + ab.transpose(1, 0, 2, 3, 4))
    structure = from_matrix(spec_stub, jordan)
    gram = np.einsum("abiir->abr", jordan)[..., 0]
    d = len(labels)
    if np.max(np.abs(gram - np.eye(d))) > 1e-12:
        raise AssertionError("catalog basis is not trace-orthonormal")
    structure[np.abs(structure) < 1e-15] = 0.0
    return AlgebraSpec(
        dim=d,
        structure=structure,
        unit=from_matrix(spec_stub, np.eye(n)[:, :, None] * np.eye(TAG_DIMS[tag])[0]),
        trace_form=np.eye(d),
        basis_labels=tuple(labels),
        catalog_tag=f"H{n}({tag})",
        type_I2_flag=(n == 2),
        hermitian=(n, tag),
    )


@dataclass(frozen=True)
class _Stub:
    hermitian: tuple[int, str]


def parse_catalog_tag(tag: str) -> AlgebraSpec:
    """Build the algebra named by a tag such as ``"H3(O)"``."""
    m = _CATALOG_RE.match(tag.strip())
    if not m:
        raise ValidationError(f"catalog tags look like H<n>(<R|C|H|O>), got {tag!r}")
    return build_hermitian_algebra(int(m.group(1)), m.group(2))


def build_custom(
    dim: int,
    structure,
    unit,
    trace_form=None,
    extreme_ray_samples=None,
    labels: Sequence[str] | None = None,
    catalog_tag: str | None = None,
) -> AlgebraSpec:
    structure = np.asarray(structure, dtype=float)
    unit = np.asarray(unit, dtype=float)
    trace_form = np.eye(dim) if trace_form is None else np.asarray(trace_form, dtype=float)
    labels = tuple(labels) if labels is not None else tuple(f"e{k}" for k in range(dim))
    spec = AlgebraSpec(
        dim=dim,
        structure=structure,
        unit=unit,
        trace_form=trace_form,
        basis_labels=labels,
        catalog_tag=catalog_tag,
        extreme_rays=extreme_ray_samples,
    )
    eye = np.eye(dim)
    scale = max(1.0, float(np.max(np.abs(structure), initial=0.0)))
    left = spec.mul(unit, eye)
    right = spec.mul(eye, unit)
    err = max(np.max(np.abs(left - eye)), np.max(np.abs(right - eye)))
    if err > ARITH_TOL * scale * dim:
        raise ValidationError(f"unit is not a two-sided identity (error {err:.3g})")
    if np.max(np.abs(trace_form - trace_form.T)) > ARITH_TOL:
        raise ValidationError("trace_form is not symmetric")
    if np.linalg.eigvalsh(trace_form).min() <= 0:
        raise ValidationError("trace_form is not positive definite")
    return spec


# -- JSON spec files --------------------------------------------------------


def spec_to_json(spec: AlgebraSpec) -> dict:
    idx = np.argwhere(spec.structure != 0.0)
    doc = {
        "dim": spec.dim,
        "unit": spec.unit.tolist(),
        "structure": [[int(i), int(j), int(k), float(spec.structure[i, j, k])] for i, j, k in idx],
        "trace_form": spec.trace_form.tolist(),
        "labels": list(spec.basis_labels),
    }
    if spec.catalog_tag:
        doc["catalog_tag"] = spec.catalog_tag
    if spec.extreme_rays is not None:
        doc["extreme_rays"] = spec.extreme_rays.tolist()
    doc["type_I2"] = spec.type_I2_flag
    return doc


def spec_from_json(doc: dict) -> AlgebraSpec:
    """Parse the algebra spec file format; raises ValidationError on bad input."""
    if not isinstance(doc, dict):
        raise ValidationError("spec document must be a JSON object")
    try:
        dim = int(doc["dim"])
        unit = np.asarray(doc["unit"], dtype=float)
        triples = doc["structure"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed spec: {exc}") from exc
    if dim < 1:
        raise ValidationError("dim must be positive")
    structure = np.zeros((dim, dim, dim))
    for entry in triples:
        if len(entry) != 4:
            raise ValidationError(f"structure entries are [i, j, k, value], got {entry!r}")
        i, j, k, v = entry
        try:
            idx = (int(i), int(j), int(k))
            if min(idx) < 0:
                raise IndexError("negative index")
            structure[idx] += float(v)
        except (IndexError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad structure entry {entry!r}") from exc
    tag = doc.get("catalog_tag")
    if tag and _CATALOG_RE.match(tag):
        catalog = parse_catalog_tag(tag)
        if catalog.dim == dim and np.allclose(catalog.structure, structure, atol=1e-12):
            return catalog
    return build_custom(
        dim,
        structure,
        unit,
        trace_form=doc.get("trace_form"),
        extreme_ray_samples=doc.get("extreme_rays"),
        labels=doc.get("labels"),
        catalog_tag=tag,
    )


def load_algebra(source: str) -> AlgebraSpec:
    """Resolve a catalog tag or a path to a JSON spec file."""
    if _CATALOG_RE.match(source.strip()):
        return parse_catalog_tag(source)
    path = Path(source)
    if not path.exists():
        raise ValidationError(f"{source!r} is neither a catalog tag nor an existing spec file")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON ({exc})") from exc
    return spec_from_json(doc)


def random_element(spec: AlgebraSpec, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(spec.dim) / np.sqrt(spec.dim)
