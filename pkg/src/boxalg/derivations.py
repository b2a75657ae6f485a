"""Order derivations and the Lie algebra L of skew order derivations.

In finite dimension an operator ``D`` is an order derivation exactly when
``D - R_{D(1)}`` satisfies the Leibniz rule for [] and kills the unit, so L
is computed as the null space of a linear system in the d*d entries of D.
The exponential-positivity definition and the state criterion are kept as
sampled corroboration in :func:`is_order_derivation`.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import PROPERTY_TOL, AlgebraSpec, commutator, op_norm, random_element
from .errors import ConsistencyError
from .logic import event_defect, random_positive, sample_event
from .report import Report, ViolationTracker
from .spectral import as_rng, eigenvalues, is_power_associative, order_unit_norm_coords, random_spectral_frame

NULLSPACE_TOL = 1e-9
CLOSURE_LIMIT = 1e-6
CENTRALIZER_TOL = 1e-8
RANK_DRAWS = 5

_lie_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


# -- single operators ---------------------------------------------------------


def leibniz_defect(spec: AlgebraSpec, D: np.ndarray) -> np.ndarray:
    """``D(e_i [] e_j) - D(e_i) [] e_j - e_i [] D(e_j)`` for all basis pairs."""
    c = spec.structure
    return (
        np.einsum("kq,ijq->ijk", D, c)
        - np.einsum("li,ljk->ijk", D, c)
        - np.einsum("lj,ilk->ijk", D, c)
    )


def is_jordan_derivation(spec: AlgebraSpec, D: np.ndarray, tol: float = PROPERTY_TOL) -> tuple[bool, float]:
    """Leibniz rule plus ``D(1) = 0``; returns the verdict and the worst residual."""
    D = np.asarray(D, dtype=float)
    res = float(np.max(np.linalg.norm(leibniz_defect(spec, D), axis=-1), initial=0.0))
    unit_res = float(spec.norm2(D @ spec.unit))
    return bool(res <= tol and unit_res <= tol), max(res, unit_res)


@dataclass(frozen=True, eq=False)
class OrderDerivation:
    operator: np.ndarray
    selfadjoint_part: np.ndarray
    skew_part: np.ndarray


def split_derivation(spec: AlgebraSpec, D: np.ndarray) -> OrderDerivation:
    """``D = R_a + (D - R_a)`` with ``a = D(1)``."""
    D = np.asarray(D, dtype=float)
    a = D @ spec.unit
    return OrderDerivation(D, a, D - spec.right_matrix(a))


def is_order_derivation(
    spec: AlgebraSpec, D: np.ndarray, n_samples: int = 20, seed=0, tol: float = PROPERTY_TOL
) -> tuple[bool, dict]:
    """Decide via the Leibniz rule for the skew part; corroborate by sampling.

    The certificate records the Leibniz residual, the worst value of
    ``|<f, D g>|`` over orthogonal primitive idempotents (the state
    criterion), and the most negative eigenvalue of ``exp(tD) a`` over
    positive samples, with a witness when the cone is left.
    """
    parts = split_derivation(spec, D)
    ok, residual = is_jordan_derivation(spec, parts.skew_part, tol)
    cert: dict = {
        "selfadjoint_part": parts.selfadjoint_part.tolist(),
        "leibniz_residual": residual,
    }
    if not is_power_associative(spec):
        return ok, cert
    rng = as_rng(seed)
    worst_state = 0.0
    for _ in range(n_samples):
        frame = random_spectral_frame(spec, rng)
        f = frame.idempotents
        vals = f @ spec.trace_form @ (D @ f.T)
        np.fill_diagonal(vals, 0.0)
        worst_state = max(worst_state, float(np.max(np.abs(vals))))
    cert["state_criterion"] = worst_state
    worst_exp, witness = 0.0, None
    scale = max(1.0, op_norm(D))
    for _ in range(n_samples):
        a = random_positive(spec, rng)
        for t in (1.0, -1.0, 4.0, -4.0):
            w = expm((t / scale) * D) @ a
            lam = eigenvalues(spec, w)
            rel = float(lam.min()) / max(1.0, float(np.max(np.abs(lam))))
            if rel < worst_exp:
                worst_exp = rel
                witness = {"t": t / scale, "positive_input": a.tolist(), "min_eigenvalue": float(lam.min())}
    cert["exp_min_relative_eigenvalue"] = worst_exp
    if witness is not None and worst_exp < -tol:
        cert["cone_violation_witness"] = witness
    return ok, cert


# -- the Lie algebra L --------------------------------------------------------


def leibniz_system(spec: AlgebraSpec) -> np.ndarray:
    """Matrix acting on ``vec(D)`` (row-major) whose null space is L.

    Commutative algebras use the pairs ``i <= j`` only.
    """
    d = spec.dim
    c = spec.structure
    if spec.is_commutative:
        ii, jj = np.triu_indices(d)
    else:
        ii, jj = np.indices((d, d)).reshape(2, -1)
    eye = np.eye(d)
    t1 = np.einsum("kp,nq->nkpq", eye, c[ii, jj, :])
    t2 = np.einsum("nq,pnk->nkpq", eye[ii], c[:, jj, :])
    t3 = np.einsum("nq,npk->nkpq", eye[jj], c[ii, :, :])
    rows = (t1 - t2 - t3).reshape(len(ii) * d, d * d)
    unit_rows = np.kron(eye, spec.unit[None, :])
    return np.vstack([rows, unit_rows])


def _null_space(m: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal rows spanning the null space of ``m``."""
    if m.shape[0] > m.shape[1]:
        m = np.linalg.qr(m, mode="r")
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    top = s[0] if len(s) else 0.0
    rank = int(np.sum(s > rel_tol * top)) if top > 0 else 0
    return vt[rank:]


@dataclass(eq=False)
class LieAlgebraStructure:
    ambient_algebra: AlgebraSpec
    basis: np.ndarray
    structure_constants: np.ndarray
    killing_matrix: np.ndarray
    closure_residual: float
    rank: int = 0
    classification: str = "unidentified"
    aliases: list[str] = field(default_factory=list)
    killing_negative_definite: bool = False
    roots: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def operator(self, coeffs) -> np.ndarray:
        return np.einsum("m,mij->ij", np.asarray(coeffs, dtype=float), self.basis)

    def coordinates(self, op: np.ndarray) -> tuple[np.ndarray, float]:
        """Coefficients of ``op`` in the basis plus the Frobenius distance to span(L)."""
        coef = np.einsum("mij,ij->m", self.basis, op)
        rest = op - self.operator(coef)
        return coef, float(np.linalg.norm(rest))

    def ad(self, coeffs) -> np.ndarray:
        return np.einsum("a,acb->cb", np.asarray(coeffs, dtype=float), self.structure_constants.transpose(0, 2, 1))

    def summary(self) -> dict:
        return {
            "dim_L": self.dim,
            "killing_definite": self.killing_negative_definite,
            "rank": self.rank,
            "classification": self.classification,
            "aliases": self.aliases,
            "closure_residual": self.closure_residual,
        }


def skew_derivation_basis(spec: AlgebraSpec, seed=0) -> LieAlgebraStructure:
    """Compute L, its structure constants, Killing form, rank and type.

    Cached per algebra for the default seed.
    """
    if seed == 0 and spec in _lie_cache:
        return _lie_cache[spec]
    d = spec.dim
    null = _null_space(leibniz_system(spec), NULLSPACE_TOL)
    basis = null.reshape(-1, d, d)
    m = len(basis)
    if m:
        flat = basis.reshape(m, -1)
        prods = np.einsum("aij,bjk->abik", basis, basis)
        brackets = (prods - prods.transpose(1, 0, 2, 3)).reshape(m, m, -1)
        f = brackets @ flat.T
        closure = float(np.max(np.linalg.norm(brackets - f @ flat, axis=-1)))
    else:
        f = np.zeros((0, 0, 0))
        closure = 0.0
    if closure > CLOSURE_LIMIT:
        raise ConsistencyError(f"brackets leave the computed span (residual {closure:.3g})")
    killing = np.einsum("abc,dcb->ad", f, f)
    lie = LieAlgebraStructure(spec, basis, f, killing, closure)
    lie.killing_negative_definite = _negative_definite(killing)
    lie.rank, cartan = _generic_rank(lie, as_rng(seed))
    _classify_into(lie, cartan, as_rng(seed))
    if seed == 0:
        _lie_cache[spec] = lie
    return lie


def _negative_definite(k: np.ndarray) -> bool:
    if k.size == 0:
        return False
    ev = np.linalg.eigvalsh(k)
    top = np.max(np.abs(ev))
    return bool(top > 0 and np.all(ev / top < -1e-8))


def _generic_rank(lie: LieAlgebraStructure, rng) -> tuple[int, np.ndarray]:
    """Minimum centralizer dimension over random elements, with that centralizer."""
    if lie.dim == 0:
        return 0, np.zeros((0, 0))
    best = None
    for _ in range(RANK_DRAWS):
        x = rng.standard_normal(lie.dim)
        cent = _null_space(lie.ad(x), CENTRALIZER_TOL)
        if best is None or len(cent) < len(best[1]):
            best = (x, cent)
    return len(best[1]), best[1]


# -- classification -------------------------------------------------------------

ALIASES = {
    "so(3)": ["su(2)", "sp(1)"],
    "so(4)": ["su(2) ⊕ su(2)"],
    "sp(2)": ["so(5)"],
    "su(4)": ["so(6)"],
}


def _simple_name(kind: str, r: int) -> str:
    if kind == "A":
        return "so(3)" if r == 1 else f"su({r + 1})"
    if kind == "B":
        return f"so({2 * r + 1})"
    if kind == "C":
        return f"sp({r})"
    if kind == "D":
        return f"so({2 * r})"
    return {"G": "g2", "F": "f4", "E": f"e{r}"}[kind]


def identify_root_component(rank: int, sq_lengths: np.ndarray) -> tuple[str, int] | None:
    """Cartan type of an irreducible root system from its size and root lengths."""
    n = len(sq_lengths)
    rel = sq_lengths / sq_lengths.max()
    long = int(np.sum(rel > 0.75))
    short = n - long
    r = rank
    if short == 0:
        if n == r * (r + 1):
            return ("A", r)
        if r >= 4 and n == 2 * r * (r - 1):
            return ("D", r)
        if (r, n) in {(6, 72), (7, 126), (8, 240)}:
            return ("E", r)
        return None
    ratio = 1.0 / float(np.median(rel[rel <= 0.75]))
    if abs(ratio - 3.0) < 0.1 and r == 2 and long == 6 and short == 6:
        return ("G", 2)
    if abs(ratio - 2.0) > 0.1:
        return None
    if r == 2 and long == 4 and short == 4:
        return ("C", 2)
    if r == 4 and long == 24 and short == 24:
        return ("F", 4)
    if r >= 3 and short == 2 * r and long == 2 * r * (r - 1):
        return ("B", r)
    if r >= 3 and long == 2 * r and short == 2 * r * (r - 1):
        return ("C", r)
    return None


def compute_roots(lie: LieAlgebraStructure, cartan: np.ndarray, rng, draws: int = 5):
    """Roots as real functionals on the Cartan subalgebra, plus the dual Killing form.

    Requires a negative-definite Killing form.  Returns None if no draw gives
    cleanly separated root spaces.
    """
    r = len(cartan)
    neg_k = -lie.killing_matrix
    chol = np.linalg.cholesky(neg_k)
    # in coordinates y = chol.T x every ad_x is skew-symmetric
    to_y = lambda a: chol.T @ a @ np.linalg.inv(chol.T)  # noqa: E731
    ads = [1j * to_y(lie.ad(h)) for h in cartan]
    k_h = cartan @ neg_k @ cartan.T
    for _ in range(draws):
        w = rng.standard_normal(r)
        herm = np.tensordot(w, np.array(ads), axes=1)
        herm = 0.5 * (herm + herm.conj().T)
        vals, vecs = np.linalg.eigh(herm)
        scale = np.max(np.abs(vals))
        nz = np.abs(vals) > 1e-6 * scale
        if np.sum(~nz) != r:
            continue
        if np.min(np.diff(vals[nz]), initial=scale) < 1e-6 * scale:
            continue
        v = vecs[:, nz]
        roots = np.real(np.einsum("im,kij,jm->mk", v.conj(), np.array(ads), v))
        resid = max(
            float(np.linalg.norm(ads[k] @ v - v * roots[:, k])) for k in range(r)
        )
        if resid > 1e-6 * scale:
            continue
        return roots, np.linalg.inv(k_h)
    return None


def _classify_into(lie: LieAlgebraStructure, cartan: np.ndarray, rng) -> None:
    if lie.dim == 0:
        lie.classification = "trivial"
        return
    if not lie.killing_negative_definite:
        lie.classification = "unidentified (non-compact or non-semisimple)"
        return
    found = compute_roots(lie, cartan, rng)
    if found is None:
        lie.classification = f"unidentified (dim {lie.dim}, rank {lie.rank})"
        return
    roots, dual = found
    lie.roots = roots
    lie.classification, lie.aliases = classify_roots(roots, dual, lie.dim, lie.rank)


def classify_roots(roots: np.ndarray, dual: np.ndarray, dim: int, rank: int) -> tuple[str, list[str]]:
    """Split a root system into irreducible components and name the sum."""
    gram = roots @ dual @ roots.T
    tol = 1e-6 * np.max(np.abs(gram))
    n = len(roots)
    comp = -np.ones(n, dtype=int)
    label = 0
    for start in range(n):
        if comp[start] >= 0:
            continue
        stack = [start]
        comp[start] = label
        while stack:
            i = stack.pop()
            for j in np.nonzero((np.abs(gram[i]) > tol) & (comp < 0))[0]:
                comp[j] = label
                stack.append(j)
        label += 1
    names = []
    total_rank = 0
    for c in range(label):
        idx = comp == c
        rc = int(np.linalg.matrix_rank(roots[idx], tol=1e-6 * np.max(np.abs(roots))))
        total_rank += rc
        kind = identify_root_component(rc, np.diag(gram)[idx])
        if kind is None:
            return f"unidentified (dim {dim}, rank {rank})", []
        names.append(_simple_name(*kind))
    if total_rank != rank:
        names.append(f"u(1)^{rank - total_rank}")
    names.sort()
    if names == ["so(3)", "so(3)"]:
        names = ["so(4)"]
    name = " ⊕ ".join(names)
    return name, ALIASES.get(name, [])


def classify_lie_algebra(lie: LieAlgebraStructure) -> str:
    return lie.classification


# -- sampled lemma checks -------------------------------------------------------


def _random_skew(lie: LieAlgebraStructure, rng) -> np.ndarray:
    d = lie.ambient_algebra.dim
    if lie.dim == 0:
        return np.zeros((d, d))
    D = lie.operator(rng.standard_normal(lie.dim))
    return D / max(op_norm(D), 1e-300)


def check_lemma4_automorphism(
    spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL, lie: LieAlgebraStructure | None = None
) -> Report:
    """``exp(tD)`` for skew ``D`` preserves [], the unit and the events."""
    lie = lie or skew_derivation_basis(spec)
    rng = as_rng(seed)
    v = ViolationTracker()
    spectral_ok = is_power_associative(spec)
    for k in range(n_samples):
        D = _random_skew(lie, rng)
        t = 0.0 if k == 0 else float(rng.uniform(-2.0, 2.0))
        w = expm(t * D)
        a, b = random_element(spec, rng), random_element(spec, rng)
        v.add("W(a[]b) = W(a)[]W(b)", spec.norm2(w @ spec.mul(a, b) - spec.mul(w @ a, w @ b)))
        v.add("W(1) = 1", spec.norm2(w @ spec.unit - spec.unit))
        if spectral_ok:
            e = sample_event(spec, rng)
            v.add("W(e) is an event", event_defect(spec, w @ e))
    return v.report("lemma4_automorphism", n_samples, tol, dim_L=lie.dim)


def check_lemma5(
    spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL, lie: LieAlgebraStructure | None = None
) -> Report:
    """``[D, R_a] = R_{D(a)}`` for skew ``D``."""
    lie = lie or skew_derivation_basis(spec)
    rng = as_rng(seed)
    v = ViolationTracker()
    for k in range(n_samples):
        D = _random_skew(lie, rng)
        a = spec.unit.copy() if k == 0 else random_element(spec, rng)
        v.add("[D,R_a] = R_D(a)", op_norm(commutator(D, spec.right_matrix(a)) - spec.right_matrix(D @ a)))
    return v.report("lemma5", n_samples, tol, dim_L=lie.dim)


def check_commutator_element(
    spec: AlgebraSpec, n_samples: int = 100, seed=0, tol: float = PROPERTY_TOL, lie: LieAlgebraStructure | None = None
) -> Report:
    """``[R_a, R_b] - R_{b[]a - a[]b}`` kills the unit and lies in span(L)."""
    lie = lie or skew_derivation_basis(spec)
    rng = as_rng(seed)
    v = ViolationTracker()
    for k in range(n_samples):
        a = random_element(spec, rng)
        b = a.copy() if k == 0 else random_element(spec, rng)
        x = commutator(spec.right_matrix(a), spec.right_matrix(b)) - spec.right_matrix(
            spec.mul(b, a) - spec.mul(a, b)
        )
        v.add("kills unit", spec.norm2(x @ spec.unit))
        if lie.dim:
            v.add("in span(L)", lie.coordinates(x)[1])
        else:
            v.add("in span(L)", float(np.linalg.norm(x)))
    return v.report("commutator_element", n_samples, tol, dim_L=lie.dim)
