"""Spectral theory in the subalgebra generated by a single element.

Works for commutative, power-associative algebras (the hermitian catalog and
custom specs that pass the sampled power-associativity test).  Powers are
generated by repeated multiplication, the minimal polynomial is the first
linear dependence among them, and spectral idempotents are Lagrange
interpolation polynomials evaluated at the element.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraSpec, Element, random_element
from .errors import ConsistencyError, FormalRealityError, SamplingError, UnsupportedConstruction

RANK_TOL = 1e-10
CLUSTER_TOL = 1e-7
POSITIVITY_TOL = 1e-9
PURIFY_STEPS = 2  # McWeeny steps f <- 3f^2 - 2f^3 after interpolation

_power_assoc_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()
_rank_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def is_power_associative(spec: AlgebraSpec, n_samples: int = 5, tol: float = 1e-9) -> bool:
    """Sampled test of commutativity plus ``x^2 x^2 = x (x x^2)``."""
    if spec in _power_assoc_cache:
        return _power_assoc_cache[spec]
    ok = spec.is_commutative
    if ok and not spec.is_catalog:
        rng = np.random.default_rng(12345)
        for _ in range(n_samples):
            x = random_element(spec, rng)
            x2 = spec.mul(x, x)
            lhs = spec.mul(x2, x2)
            rhs = spec.mul(x, spec.mul(x, x2))
            if spec.norm2(lhs - rhs) > tol * max(1.0, spec.norm2(lhs)):
                ok = False
                break
    _power_assoc_cache[spec] = ok
    return ok


def _require_spectral(spec: AlgebraSpec) -> None:
    if not is_power_associative(spec):
        raise UnsupportedConstruction(f"{spec!r} is not commutative and power-associative; no spectral theory")


def _scaled(spec: AlgebraSpec, x) -> tuple[np.ndarray, float]:
    s = float(spec.norm2(x))
    return (np.asarray(x, dtype=float) / s if s > 0 else np.asarray(x, dtype=float)), s


def _min_poly_scaled(spec: AlgebraSpec, b: np.ndarray) -> np.ndarray:
    """Ascending coefficients (monic) of the minimal polynomial of ``b``."""
    chol = np.linalg.cholesky(spec.trace_form)
    powers = [spec.unit.copy()]
    for k in range(1, spec.dim + 1):
        powers.append(spec.mul(b, powers[-1]))
        cols = np.array(powers).T
        sv = np.linalg.svd(chol.T @ cols, compute_uv=False)
        if len(powers) > spec.dim or sv[-1] <= RANK_TOL * sv[0]:
            basis = chol.T @ cols[:, :-1]
            coef, *_ = np.linalg.lstsq(basis, -chol.T @ cols[:, -1], rcond=None)
            return np.append(coef, 1.0)
    raise ConsistencyError("no linear dependence among powers up to the algebra dimension")


def minimal_polynomial(a: Element) -> np.ndarray:
    """Monic minimal polynomial of ``a``, coefficients in descending order.

    >>> minimal_polynomial(spec.one())   # doctest: +SKIP
    array([ 1., -1.])
    """
    spec = a.algebra
    _require_spectral(spec)
    b, s = _scaled(spec, a.coords)
    if s == 0:
        return np.array([1.0, 0.0])
    asc = _min_poly_scaled(spec, b)
    k = len(asc) - 1
    asc = asc * s ** (k - np.arange(k + 1))
    return asc[::-1].copy()


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct sorted eigenvalues and the matching spectral idempotents.

    ``idempotents`` holds one coordinate row per eigenvalue.
    """

    algebra: AlgebraSpec
    eigenvalues: np.ndarray
    idempotents: np.ndarray

    def elements(self) -> list[Element]:
        return [Element(self.algebra, f) for f in self.idempotents]

    def reconstruct(self) -> np.ndarray:
        return self.eigenvalues @ self.idempotents

    @property
    def traces(self) -> np.ndarray:
        """Trace-form weights ``<f_k, 1>``; the multiplicities on the catalog."""
        return self.algebra.inner(self.idempotents, self.algebra.unit)

    def eigenvalues_with_multiplicity(self) -> np.ndarray:
        mult = np.rint(self.traces).astype(int)
        return np.repeat(self.eigenvalues, mult)


def decompose(spec: AlgebraSpec, x) -> SpectralDecomposition:
    _require_spectral(spec)
    x = np.asarray(x, dtype=float)
    b, s = _scaled(spec, x)
    if s == 0:
        return SpectralDecomposition(spec, np.array([0.0]), spec.unit[None, :].copy())
    asc = _min_poly_scaled(spec, b)
    roots = np.roots(asc[::-1])
    if np.max(np.abs(roots.imag), initial=0.0) > CLUSTER_TOL:
        raise FormalRealityError(f"minimal polynomial has complex roots {roots}")
    roots = np.sort(roots.real)
    clusters = [[roots[0]]]
    for r in roots[1:]:
        if r - clusters[-1][-1] < CLUSTER_TOL:
            clusters[-1].append(r)
        else:
            clusters.append([r])
    mu = np.array([np.mean(c) for c in clusters])
    idem = []
    for k, mk in enumerate(mu):
        f = spec.unit.copy()
        for j, mj in enumerate(mu):
            if j != k:
                f = (spec.mul(b, f) - mj * f) / (mk - mj)
        idem.append(f)
    idem = np.array(idem)
    for _ in range(PURIFY_STEPS):
        sq = spec.mul(idem, idem)
        idem = 3.0 * sq - 2.0 * spec.mul(idem, sq)
    # Rayleigh refinement: a [] f_k = lambda_k f_k.
    af = spec.mul(x, idem)
    lam = spec.inner(af, idem) / spec.inner(idem, idem)
    return SpectralDecomposition(spec, lam, idem)


def spectral_decompose(a: Element) -> SpectralDecomposition:
    return decompose(a.algebra, a.coords)


def eigenvalues(spec: AlgebraSpec, x) -> np.ndarray:
    return decompose(spec, x).eigenvalues


def is_positive_coords(spec: AlgebraSpec, x, tol: float = POSITIVITY_TOL) -> bool:
    lam = eigenvalues(spec, x)
    return bool(lam.min() >= -tol * max(1.0, float(np.max(np.abs(lam)))))


def is_positive(a: Element, tol: float = POSITIVITY_TOL) -> bool:
    return is_positive_coords(a.algebra, a.coords, tol)


def order_unit_norm_coords(spec: AlgebraSpec, x) -> float:
    return float(np.max(np.abs(eigenvalues(spec, x))))


def order_unit_norm(a: Element) -> float:
    """``inf{t > 0 : -t 1 <= a <= t 1}``, i.e. the spectral radius."""
    return order_unit_norm_coords(a.algebra, a.coords)


def spectral_rank(spec: AlgebraSpec) -> int:
    """Degree of the minimal polynomial of a generic element."""
    if spec in _rank_cache:
        return _rank_cache[spec]
    _require_spectral(spec)
    if spec.hermitian is not None:
        r = spec.hermitian[0]
    else:
        rng = np.random.default_rng(2024)
        r = max(len(_min_poly_scaled(spec, _scaled(spec, random_element(spec, rng))[0])) - 1 for _ in range(3))
    _rank_cache[spec] = r
    return r


def random_spectral_frame(spec: AlgebraSpec, rng, max_tries: int = 20) -> SpectralDecomposition:
    """Decomposition of a random element whose idempotents are all primitive."""
    rng = as_rng(rng)
    r = spectral_rank(spec)
    for _ in range(max_tries):
        dec = decompose(spec, random_element(spec, rng))
        if len(dec.eigenvalues) == r and np.min(np.diff(dec.eigenvalues), initial=1.0) > 1e-3:
            return dec
    raise SamplingError(f"no element with {r} well-separated eigenvalues after {max_tries} draws")


def random_idempotent(spec: AlgebraSpec, rank: int, rng_seed=None) -> Element:
    """Sum of ``rank`` primitive spectral idempotents of a random element."""
    r = spectral_rank(spec)
    if not 0 <= rank <= r:
        raise ValueError(f"rank must lie in [0, {r}], got {rank}")
    rng = as_rng(rng_seed)
    dec = random_spectral_frame(spec, rng)
    chosen = rng.permutation(r)[:rank]
    return Element(spec, dec.idempotents[chosen].sum(axis=0) if rank else np.zeros(spec.dim))
