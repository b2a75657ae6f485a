"""Arithmetic in the composition algebras R, C, H and O.

Every algebra is obtained from the previous one by Cayley-Dickson doubling
with the frozen sign convention

    (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)).

With this convention the quaternion basis (1, i, j, k) satisfies i*j = k,
and the octonion basis e0..e7 is the doubled quaternion basis.  All
structure constants of the hermitian matrix algebras are derived from the
tables produced here, so changing the convention changes every downstream
coordinate (but not any basis-independent result).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TAG_DIMS = {"R": 1, "C": 2, "H": 4, "O": 8}


def _check_tag(tag: str) -> int:
    try:
        return TAG_DIMS[tag]
    except KeyError:
        raise ValueError(f"unknown division algebra tag {tag!r}; expected one of R, C, H, O") from None


def _conj(x: np.ndarray) -> np.ndarray:
    out = -x
    out[..., 0] = x[..., 0]
    return out


def _cd_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[..., :h], x[..., h:]
    c, d = y[..., :h], y[..., h:]
    return np.concatenate(
        [_cd_mul(a, c) - _cd_mul(_conj(d), b), _cd_mul(d, a) + _cd_mul(b, _conj(c))],
        axis=-1,
    )


@lru_cache(maxsize=None)
def multiplication_table(tag: str) -> np.ndarray:
    """Return ``M`` with ``e_p * e_q = sum_r M[p, q, r] e_r`` (read-only)."""
    m = _check_tag(tag)
    eye = np.eye(m)
    table = _cd_mul(eye[:, None, :].repeat(m, axis=1), eye[None, :, :].repeat(m, axis=0))
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class CompositionScalar:
    tag: str
    coords: tuple[float, ...]

    def __post_init__(self):
        m = _check_tag(self.tag)
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != m:
            raise ValueError(f"{self.tag} needs {m} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def unit(cls, tag: str, index: int = 0) -> CompositionScalar:
        c = [0.0] * _check_tag(tag)
        c[index] = 1.0
        return cls(tag, tuple(c))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords)

    def __add__(self, other: CompositionScalar) -> CompositionScalar:
        _same_tag(self, other)
        return CompositionScalar(self.tag, tuple(self.array + other.array))

    def __sub__(self, other: CompositionScalar) -> CompositionScalar:
        _same_tag(self, other)
        return CompositionScalar(self.tag, tuple(self.array - other.array))

    def __neg__(self) -> CompositionScalar:
        return CompositionScalar(self.tag, tuple(-self.array))

    def __mul__(self, other):
        if isinstance(other, CompositionScalar):
            return comp_mul(self, other)
        return CompositionScalar(self.tag, tuple(float(other) * self.array))

    def __rmul__(self, other):
        return CompositionScalar(self.tag, tuple(float(other) * self.array))

    def conj(self) -> CompositionScalar:
        return comp_conj(self)

    def norm(self) -> float:
        return comp_norm(self)

    def is_close(self, other: CompositionScalar, tol: float = 1e-12) -> bool:
        _same_tag(self, other)
        return bool(np.max(np.abs(self.array - other.array)) <= tol)


def _same_tag(x: CompositionScalar, y: CompositionScalar) -> None:
    if x.tag != y.tag:
        raise TypeError(f"cannot combine {x.tag} and {y.tag} scalars")


def comp_mul(x: CompositionScalar, y: CompositionScalar) -> CompositionScalar:
    _same_tag(x, y)
    return CompositionScalar(x.tag, tuple(_cd_mul(x.array, y.array)))


def comp_conj(x: CompositionScalar) -> CompositionScalar:
    return CompositionScalar(x.tag, tuple(_conj(x.array)))


def comp_norm(x: CompositionScalar) -> float:
    """Quadratic norm ``N(x) = x conj(x)``, i.e. the sum of squared coordinates."""
    return float(np.dot(x.array, x.array))


def mul_arrays(tag: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized product over the trailing axis of coordinate arrays."""
    return np.einsum("...p,...q,pqr->...r", x, y, multiplication_table(tag))


def conj_arrays(x: np.ndarray) -> np.ndarray:
    return _conj(np.asarray(x, dtype=float))


def associator_witness(tag: str) -> tuple[CompositionScalar, CompositionScalar, CompositionScalar] | None:
    """Return basis units ``(x, y, z)`` with ``(xy)z != x(yz)``, or None if associative."""
    m = _check_tag(tag)
    table = multiplication_table(tag)
    left = np.einsum("pqs,srt->pqrt", table, table)
    right = np.einsum("qrs,pst->pqrt", table, table)
    bad = np.argwhere(np.abs(left - right).max(axis=-1) > 0.5)
    if len(bad) == 0:
        return None
    p, q, r = bad[0]
    return (CompositionScalar.unit(tag, p), CompositionScalar.unit(tag, q), CompositionScalar.unit(tag, r))
