"""Events, states, the quadratic maps U_e and conditional probabilities.

Events are the extreme points of the unit interval ``[0, 1]``; on the
catalog these are exactly the idempotents, so validation checks
idempotency plus a {0, 1} spectrum.  States are represented by densities
``rho`` with ``mu(x) = <rho, x>`` for the trace form.

This module also hosts the sampled checks of the four structural
conditions and of the two lemmas about ``U_e`` and conditioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import PROPERTY_TOL, AlgebraSpec, Element, op_norm, random_element
from .errors import SamplingError, UndefinedConditioning, ValidationError
from .report import Report, ViolationTracker
from .spectral import (
    as_rng,
    decompose,
    eigenvalues,
    is_power_associative,
    order_unit_norm_coords,
    random_spectral_frame,
    spectral_rank,
)

IDEMPOTENT_TOL = 1e-9
SPECTRUM_TOL = 1e-7
CONDITIONING_CUTOFF = 1e-12


# -- events -------------------------------------------------------------------


def event_defect(spec: AlgebraSpec, x) -> float:
    """How far ``x`` is from being an event (0 for exact projections)."""
    x = np.asarray(x, dtype=float)
    idem = float(spec.norm2(spec.mul(x, x) - x))
    if idem > IDEMPOTENT_TOL:
        return idem
    lam = eigenvalues(spec, x)
    spec_err = float(np.max(np.minimum(np.abs(lam), np.abs(lam - 1.0))))
    return idem if spec_err <= SPECTRUM_TOL else spec_err


def is_event(spec: AlgebraSpec, x) -> bool:
    x = np.asarray(x, dtype=float)
    if float(spec.norm2(spec.mul(x, x) - x)) > IDEMPOTENT_TOL:
        return False
    lam = eigenvalues(spec, x)
    return bool(np.all(np.minimum(np.abs(lam), np.abs(lam - 1.0)) <= SPECTRUM_TOL))


@dataclass(frozen=True, eq=False)
class Event:
    element: Element

    def __post_init__(self):
        if not is_event(self.element.algebra, self.element.coords):
            raise ValidationError("element is not an event (idempotent with spectrum in {0, 1})")

    @classmethod
    def of(cls, spec: AlgebraSpec, coords) -> Event:
        return cls(Element(spec, coords))

    @property
    def algebra(self) -> AlgebraSpec:
        return self.element.algebra

    @property
    def coords(self) -> np.ndarray:
        return self.element.coords


def orthocomplement(e: Event) -> Event:
    return Event.of(e.algebra, e.algebra.unit - e.coords)


def is_orthogonal(e: Event, f: Event) -> bool:
    if e.algebra is not f.algebra:
        raise ValidationError("events belong to different algebras")
    return is_event(e.algebra, e.coords + f.coords)


def is_below(f: Event, e: Event) -> bool:
    """``f <= e``, decided as: ``e - f`` is again an event."""
    return is_event(e.algebra, e.coords - f.coords)


def quadratic_matrix(spec: AlgebraSpec, e) -> np.ndarray:
    t = spec.left_matrix(e)
    return 2.0 * t @ t - t


def quadratic_map(e: Event) -> np.ndarray:
    """Matrix of ``U_e = 2 T_e^2 - T_e``."""
    return quadratic_matrix(e.algebra, e.coords)


# -- states -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class State:
    """Positive normalized functional ``x -> <density, x>``."""

    algebra: AlgebraSpec
    density: np.ndarray

    def __post_init__(self):
        rho = np.array(self.density, dtype=float)
        rho.setflags(write=False)
        object.__setattr__(self, "density", rho)
        spec = self.algebra
        total = float(spec.inner(rho, spec.unit))
        if abs(total - 1.0) > PROPERTY_TOL:
            raise ValidationError(f"state must satisfy mu(1) = 1, got {total}")
        if is_power_associative(spec) and eigenvalues(spec, rho).min() < -PROPERTY_TOL:
            raise ValidationError("state density is not positive")

    def __call__(self, x) -> float:
        if isinstance(x, (Element, Event)):
            x = x.coords
        return float(self.algebra.inner(self.density, x))

    def functional(self) -> np.ndarray:
        """Row vector ``g`` with ``mu(x) = g @ x``."""
        return self.algebra.trace_form @ self.density


def _density_from_functional(spec: AlgebraSpec, g: np.ndarray) -> np.ndarray:
    return np.linalg.solve(spec.trace_form, g)


def random_positive(spec: AlgebraSpec, rng) -> np.ndarray:
    """A random positive element: a square, or a cone combination of extreme rays."""
    rng = as_rng(rng)
    if spec.extreme_rays is not None:
        w = rng.exponential(size=len(spec.extreme_rays))
        return w @ spec.extreme_rays
    b = random_element(spec, rng)
    return spec.mul(b, b)


def random_state(spec: AlgebraSpec, rng_seed=None, max_tries: int = 20) -> State:
    rng = as_rng(rng_seed)
    for _ in range(max_tries):
        p = random_positive(spec, rng)
        total = float(spec.inner(p, spec.unit))
        if total > 1e-8:
            return State(spec, p / total)
    raise SamplingError("could not draw a non-degenerate state")


def conditioned_state(mu: State, e: Event) -> State:
    """The state ``x -> mu(U_e x) / mu(e)``."""
    spec = mu.algebra
    me = mu(e)
    if me <= CONDITIONING_CUTOFF:
        raise UndefinedConditioning(f"mu(e) = {me:.3g} is too small to condition on")
    g = mu.functional() @ quadratic_matrix(spec, e.coords) / me
    return State(spec, _density_from_functional(spec, g))


def conditional_probability(mu: State, e: Event, f: Event) -> float:
    me = mu(e)
    if me <= CONDITIONING_CUTOFF:
        raise UndefinedConditioning(f"mu(e) = {me:.3g} is too small to condition on")
    return float(mu.functional() @ quadratic_matrix(mu.algebra, e.coords) @ f.coords) / me


# -- sampling of events -------------------------------------------------------


def sample_event(spec: AlgebraSpec, rng, rank: int | None = None) -> np.ndarray:
    rng = as_rng(rng)
    r = spectral_rank(spec)
    if rank is None:
        rank = int(rng.integers(0, r + 1))
    frame = random_spectral_frame(spec, rng)
    chosen = rng.permutation(r)[:rank]
    return frame.idempotents[chosen].sum(axis=0) if rank else np.zeros(spec.dim)


def sample_subevent(spec: AlgebraSpec, e, rng, primitive: bool = False) -> np.ndarray:
    """Random nonzero event ``f <= e`` (zero if ``e = 0``).

    Decomposes ``U_e b - M e'`` for random ``b``: the eigenvalue ``-M`` carries
    ``e'`` and the remaining idempotents split ``e`` into primitive pieces.
    """
    rng = as_rng(rng)
    e = np.asarray(e, dtype=float)
    k = int(round(float(spec.inner(e, spec.unit)))) if spec.is_catalog else None
    if spec.norm2(e) < 1e-12:
        return np.zeros(spec.dim)
    ue = quadratic_matrix(spec, e)
    ec = spec.unit - e
    for _ in range(20):
        b = random_element(spec, rng)
        c = ue @ b - (10.0 + 10.0 * float(spec.norm2(b))) * ec
        dec = decompose(spec, c)
        keep = dec.eigenvalues > -5.0
        parts = dec.idempotents[keep]
        if k is not None and len(parts) != k:
            continue
        if np.min(np.diff(dec.eigenvalues[keep]), initial=1.0) < 1e-3:
            continue
        size = 1 if primitive else int(rng.integers(1, len(parts) + 1))
        return parts[rng.permutation(len(parts))[:size]].sum(axis=0)
    raise SamplingError("could not split the event into primitive pieces")


# -- sampled checks -----------------------------------------------------------


def _events_for(spec: AlgebraSpec, rng, n_samples: int):
    """Yield ``n_samples`` events, starting with the edge cases 1 and 0."""
    yield spec.unit.copy()
    if n_samples > 1:
        yield np.zeros(spec.dim)
    for _ in range(n_samples - 2):
        yield sample_event(spec, rng)


def check_condition_A(spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL) -> Report:
    """Norm submultiplicativity of [] and idempotency of sampled events."""
    rng = as_rng(seed)
    v = ViolationTracker()
    one = spec.unit
    v.add("submultiplicativity", order_unit_norm_coords(spec, spec.mul(one, one)) - 1.0)
    for e in _events_for(spec, rng, n_samples):
        a, b = random_element(spec, rng), random_element(spec, rng)
        lhs = order_unit_norm_coords(spec, spec.mul(a, b))
        rhs = order_unit_norm_coords(spec, a) * order_unit_norm_coords(spec, b)
        v.add("submultiplicativity", max(0.0, lhs - rhs))
        v.add("event_idempotency", spec.norm2(spec.mul(e, e) - e))
    return v.report("condition_A", n_samples, tol)


def check_condition_B(spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL) -> Report:
    """Positivity of U_e and the identification of its range with span{f <= e}."""
    rng = as_rng(seed)
    v = ViolationTracker()
    for e in _events_for(spec, rng, n_samples):
        ue = quadratic_matrix(spec, e)
        a = random_positive(spec, rng)
        lam = eigenvalues(spec, ue @ a)
        v.add("positivity", max(0.0, -lam.min()) / max(1.0, order_unit_norm_coords(spec, a)))
        f = sample_subevent(spec, e, rng)
        g = sample_subevent(spec, spec.unit - e, rng)
        v.add("fixes_subevents", spec.norm2(ue @ f - f))
        v.add("kills_orthogonal", spec.norm2(ue @ g))
        # range of U_e versus the span of sampled subevents
        u, s, _ = np.linalg.svd(ue)
        rank = int(np.sum(s > 1e-9 * max(1.0, s[0])))
        if rank:
            subs = np.array([sample_subevent(spec, e, rng, primitive=True) for _ in range(2 * rank + 2)]).T
            q, sq, _ = np.linalg.svd(subs, full_matrices=False)
            q = q[:, sq > 1e-9 * sq[0]]
            rng_basis = u[:, :rank]
            v.add("range_spanned", op_norm(rng_basis - q @ (q.T @ rng_basis)))
            v.add("range_dimension", abs(q.shape[1] - rank))
    return v.report("condition_B", n_samples, tol)


def check_condition_D(spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL) -> Report:
    """``mu(a) = 0`` for positive ``a`` forces ``mu(a [] b) = 0``."""
    rng = as_rng(seed)
    v = ViolationTracker()
    r = spectral_rank(spec)
    b = random_element(spec, rng)
    mu0 = random_state(spec, rng)
    v.add("mu(a[]b)", abs(mu0(spec.mul(np.zeros(spec.dim), b))))
    for _ in range(n_samples):
        frame = random_spectral_frame(spec, rng)
        size = int(rng.integers(1, r)) if r > 1 else 0
        idx = rng.permutation(r)
        support, rest = idx[:size], idx[size:]
        a = rng.uniform(0.1, 1.0, size) @ frame.idempotents[support]
        comp = frame.idempotents[rest].sum(axis=0)
        rho = quadratic_matrix(spec, comp) @ random_positive(spec, rng)
        rho = rho / float(spec.inner(rho, spec.unit))
        mu = State(spec, rho)
        b = random_element(spec, rng)
        v.add("mu(a)", abs(mu(a)))
        v.add("mu(a[]b)", abs(mu(spec.mul(a, b))))
    return v.report("condition_D", n_samples, tol)


def check_lemma1(spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL) -> Report:
    rng = as_rng(seed)
    v = ViolationTracker()
    eye = np.eye(spec.dim)
    for e in _events_for(spec, rng, n_samples):
        ec = spec.unit - e
        ue, uc = quadratic_matrix(spec, e), quadratic_matrix(spec, ec)
        te, tc = spec.left_matrix(e), spec.left_matrix(ec)
        v.add("U_e^2 = U_e", op_norm(ue @ ue - ue))
        v.add("U_e U_e' = 0", op_norm(ue @ uc))
        v.add("U_e' U_e = 0", op_norm(uc @ ue))
        f = sample_subevent(spec, e, rng)
        g = sample_subevent(spec, ec, rng)
        v.add("U_e f = f", spec.norm2(ue @ f - f))
        v.add("U_e' f = 0", spec.norm2(uc @ f))
        v.add("U_e g = 0", spec.norm2(ue @ g))
        v.add("U_e' g = g", spec.norm2(uc @ g - g))
        v.add("T_e = (I + U_e - U_e')/2", op_norm(te - 0.5 * (eye + ue - uc)))
        v.add("T_e f = f", spec.norm2(te @ f - f))
        v.add("T_e' f = 0", spec.norm2(tc @ f))
        v.add("T_e g = 0", spec.norm2(te @ g))
        v.add("T_e' g = g", spec.norm2(tc @ g - g))
    return v.report("lemma1", n_samples, tol)


def check_lemma2_uniqueness(spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL) -> Report:
    """The conditioned functional is a state that is invariant under T_e."""
    rng = as_rng(seed)
    v = ViolationTracker()
    r = spectral_rank(spec)
    for t in range(n_samples):
        mu = random_state(spec, rng)
        e = spec.unit.copy() if t == 0 else sample_event(spec, rng, rank=int(rng.integers(1, r + 1)))
        ev = Event.of(spec, e)
        if mu(e) <= CONDITIONING_CUTOFF:
            continue
        nu = conditioned_state(mu, ev)
        if t == 0:
            v.add("nu = mu for e = 1", spec.norm2(nu.density - mu.density))
        g = nu.functional()
        v.add("nu(e) = 1", abs(nu(e) - 1.0))
        v.add("nu(e') = 0", abs(nu(spec.unit - e)))
        v.add("nu(1) = 1", abs(nu(spec.unit) - 1.0))
        v.add("nu positive", max(0.0, -eigenvalues(spec, nu.density).min()))
        f = sample_subevent(spec, e, rng)
        v.add("nu(f) = mu(f)/mu(e)", abs(nu(f) - mu(f) / mu(e)))
        v.add("nu T_e = nu", float(np.linalg.norm(g @ spec.left_matrix(e) - g)))
        v.add("nu U_e = nu", float(np.linalg.norm(g @ quadratic_matrix(spec, e) - g)))
        h = sample_event(spec, rng)
        v.add("nu(event) >= 0", max(0.0, -nu(h)))
    return v.report("lemma2_uniqueness", n_samples, tol)
