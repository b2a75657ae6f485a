"""Dynamical correspondences a -> D_a and the complex *-algebra they induce.

A correspondence is stored as a matrix ``psi`` of shape (dim L, d): column
``i`` holds the coordinates of ``D_{e_i}`` in the orthonormal basis of L.
The search treats ``D_a b + D_b a = 0`` as a linear constraint on ``psi``
and minimizes the bracket condition ``[D_a, D_b] = -[R_a, R_b]`` with a
damped Gauss-Newton (Levenberg-Marquardt) iteration from random starts.
A residual floor reported by the search is numerical evidence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    AlgebraSpec,
    commutator,
    from_complex_matrix,
    op_norm,
    random_element,
    to_complex_matrix,
)
from .derivations import LieAlgebraStructure, _null_space, skew_derivation_basis
from .errors import ConsistencyError, UnsupportedConstruction
from .report import Report, ViolationTracker
from .spectral import as_rng, is_positive_coords, order_unit_norm_coords, random_spectral_frame, spectral_rank

VERIFY_TOL = 1e-8
EXISTS_TOL = 1e-8


@dataclass(eq=False)
class DynamicalCorrespondence:
    algebra: AlgebraSpec
    lie: LieAlgebraStructure
    psi: np.ndarray

    def operators(self) -> np.ndarray:
        """Stack of ``D_{e_i}``, shape (d, d, d)."""
        d = self.algebra.dim
        if self.lie.dim == 0:
            return np.zeros((d, d, d))
        return np.einsum("mi,mjk->ijk", self.psi, self.lie.basis)

    def operator(self, a) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(a, dtype=float), self.operators())

    def cross_tensor(self) -> np.ndarray:
        """``X[i, j] = D_{e_i} e_j``, i.e. the coordinates of ``e_i x e_j``."""
        return self.operators().transpose(0, 2, 1)


def zero_correspondence(spec: AlgebraSpec) -> DynamicalCorrespondence:
    lie = skew_derivation_basis(spec)
    return DynamicalCorrespondence(spec, lie, np.zeros((lie.dim, spec.dim)))


def canonical_correspondence(spec: AlgebraSpec) -> DynamicalCorrespondence:
    """``D_a x = i(ax - xa)/2`` on H_n(C), expressed in the basis of L."""
    if spec.hermitian is None or spec.hermitian[1] != "C":
        raise UnsupportedConstruction("the canonical correspondence exists only on H_n(C)")
    lie = skew_derivation_basis(spec)
    d = spec.dim
    mats = to_complex_matrix(spec, np.eye(d))
    psi = np.zeros((lie.dim, d))
    worst = 0.0
    for i in range(d):
        comm = 0.5j * (mats[i] @ mats - mats @ mats[i])
        op = from_complex_matrix(spec, comm).T
        psi[:, i], res = lie.coordinates(op)
        worst = max(worst, res)
    if worst > 1e-9:
        raise ConsistencyError(f"canonical D_a not in span(L) (residual {worst:.3g})")
    return DynamicalCorrespondence(spec, lie, psi)


def verify_correspondence(dc: DynamicalCorrespondence, tol: float = VERIFY_TOL) -> Report:
    """Both defining conditions and both consequences, over basis pairs."""
    spec = dc.algebra
    d = spec.dim
    D = dc.operators()
    R = spec.right_operators
    v = ViolationTracker()
    for i in range(d):
        for j in range(i, d):
            if i < j:
                v.add("[D_a,D_b] = -[R_a,R_b]", op_norm(commutator(D[i], D[j]) + commutator(R[i], R[j])))
            v.add("D_a b + D_b a = 0", spec.norm2(D[i][:, j] + D[j][:, i]))
            v.add("[D_a,R_b] = [R_a,D_b]", op_norm(commutator(D[i], R[j]) - commutator(R[i], D[j])))
            v.add("D_a b = -D_b a", spec.norm2(D[i][:, j] + D[j][:, i]))
    v.add("D_1 = 0", op_norm(dc.operator(spec.unit)))
    return v.report("dynamical_correspondence", d * (d + 1) // 2, tol, dim_L=dc.lie.dim)


# -- numerical search -----------------------------------------------------------


@dataclass
class SearchResult:
    correspondence: DynamicalCorrespondence
    best_residual: float
    per_start: list[float]
    history: list[float]
    exists_numerically: bool
    note: str = ""
    free_parameters: int = 0

    def to_dict(self) -> dict:
        return {
            "exists_numerically": self.exists_numerically,
            "best_residual": self.best_residual,
            "per_start": self.per_start,
            "history": self.history,
            "free_parameters": self.free_parameters,
            "note": self.note,
        }


class _BracketProblem:
    """Residuals of ``[D_i, D_j] + [R_i, R_j]`` in L-coordinates for i < j."""

    def __init__(self, spec: AlgebraSpec, lie: LieAlgebraStructure):
        d, m = spec.dim, lie.dim
        self.d, self.m = d, m
        self.f = lie.structure_constants
        self.ii, self.jj = np.triu_indices(d, k=1)
        R = spec.right_operators
        brackets = np.array([commutator(R[i], R[j]) for i, j in zip(self.ii, self.jj)])
        self.scale = float(np.sum(brackets**2))
        if m:
            self.g = np.einsum("nij,mij->nm", brackets, lie.basis)
            rest = brackets - np.einsum("nm,mij->nij", self.g, lie.basis)
        else:
            self.g = np.zeros((len(self.ii), 0))
            rest = brackets
        self.const = float(np.sum(rest**2))
        # polarized D_a a = 0: sum_m psi[m,i] X_m e_j + psi[m,j] X_m e_i = 0 for i <= j
        cols = lie.basis.transpose(0, 2, 1) if m else np.zeros((0, d, d))  # cols[m, j] = X_m e_j
        pi, pj = np.triu_indices(d)
        eye = np.eye(d)
        lin = np.einsum("nl,mnk->nkml", eye[pi], cols[:, pj, :]) + np.einsum("nl,mnk->nkml", eye[pj], cols[:, pi, :])
        self.null = _null_space(lin.reshape(len(pi) * d, m * d), 1e-10) if m else np.zeros((0, 0))

    def psi(self, z: np.ndarray) -> np.ndarray:
        return (z @ self.null).reshape(self.m, self.d)

    def residual(self, z: np.ndarray) -> np.ndarray:
        p = self.psi(z)
        q = np.einsum("ai,abp->ibp", p, self.f)
        r = np.einsum("ibp,bj->ijp", q, p)
        return (r[self.ii, self.jj] + self.g).ravel()

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        p = self.psi(z)
        n = len(self.ii)
        u = np.einsum("abp,bj->ajp", self.f, p)
        v = np.einsum("ai,abp->ibp", p, self.f)
        jt = np.zeros((n, self.m, self.m, self.d))
        rows = np.arange(n)
        jt[rows, :, :, self.ii] += u.transpose(1, 2, 0)[self.jj]
        jt[rows, :, :, self.jj] += v.transpose(0, 2, 1)[self.ii]
        return jt.reshape(n * self.m, self.m * self.d) @ self.null.T

    def objective(self, r: np.ndarray) -> float:
        total = float(r @ r) + self.const
        return total / self.scale if self.scale > 0 else total


def _levenberg_marquardt(prob: _BracketProblem, z: np.ndarray, max_iters: int) -> tuple[np.ndarray, list[float]]:
    r = prob.residual(z)
    obj = prob.objective(r)
    history = [obj]
    lam = 1e-3
    stall = 0
    for _ in range(max_iters):
        if obj <= 1e-28:
            break
        jac = prob.jacobian(z)
        a = jac.T @ jac
        g = jac.T @ r
        diag = np.maximum(np.diag(a), 1e-12)
        improved = False
        for _ in range(30):
            try:
                step = np.linalg.solve(a + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            z_new = z + step
            r_new = prob.residual(z_new)
            obj_new = prob.objective(r_new)
            if obj_new < obj:
                gain = (obj - obj_new) / max(obj, 1e-300)
                z, r, obj = z_new, r_new, obj_new
                lam = max(lam / 3.0, 1e-12)
                improved = True
                break
            lam *= 4.0
        if not improved:
            break
        history.append(obj)
        stall = stall + 1 if gain < 1e-10 else 0
        if stall >= 5:
            break
    return z, history


def search_correspondence(
    spec: AlgebraSpec, n_starts: int = 50, max_iters: int = 200, rng_seed=0
) -> SearchResult:
    """Multistart least-squares search for a dynamical correspondence.

    The residual is the bracket-condition sum of squares divided by
    ``sum_{i<j} |[R_i, R_j]|^2``.  Starts use independent child streams
    of ``rng_seed``; the result is deterministic for a fixed seed.
    """
    lie = skew_derivation_basis(spec)
    prob = _BracketProblem(spec, lie)
    if lie.dim == 0 or prob.null.shape[0] == 0:
        psi = np.zeros((lie.dim, spec.dim))
        res = prob.objective(prob.g.ravel())
        exists = res <= EXISTS_TOL
        note = (
            "no skew derivations, correspondence impossible unless all [R_a,R_b] = 0"
            if lie.dim == 0
            else "the linear condition D_a a = 0 leaves only the zero map"
        )
        note += " (numerical rank decision: evidence, not proof)"
        return SearchResult(
            DynamicalCorrespondence(spec, lie, psi), res, [res] * n_starts, [res], exists, note, 0
        )
    n_free = prob.null.shape[0]
    children = np.random.SeedSequence(rng_seed if isinstance(rng_seed, int) else None).spawn(n_starts)
    best = None
    per_start = []
    for child in children:
        rng = np.random.default_rng(child)
        z0 = rng.standard_normal(n_free)
        z, hist = _levenberg_marquardt(prob, z0, max_iters)
        per_start.append(hist[-1])
        if best is None or hist[-1] < best[1]:
            best = (z, hist[-1], hist)
    z, res, hist = best
    dc = DynamicalCorrespondence(spec, lie, prob.psi(z))
    exists = res <= EXISTS_TOL
    note = (
        "converged to a correspondence"
        if exists
        else "empirical multistart residual floor: evidence of nonexistence, not a proof"
    )
    return SearchResult(dc, res, per_start, hist, exists, note, n_free)


# -- the complex *-algebra A + iA ----------------------------------------------


@dataclass(eq=False)
class ComplexStarAlgebra:
    """``A + iA`` as a real algebra of dimension 2d with product tensor and involution.

    Coordinates are ``(re, im)`` concatenated; ``involution`` is the diagonal
    of the conjugate-linear map ``(a + ib)* = a - ib``.
    """

    base: AlgebraSpec
    product: np.ndarray
    involution: np.ndarray
    checks: dict = field(default_factory=dict)
    witness: list[int] | None = None

    @property
    def real_dim(self) -> int:
        return len(self.involution)

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("...i,...j,ijk->...k", x, y, self.product)

    def star(self, x) -> np.ndarray:
        return self.involution * x

    def embed(self, a, b=None) -> np.ndarray:
        b = np.zeros(self.base.dim) if b is None else b
        return np.concatenate([a, b])

    def real_part(self, x) -> np.ndarray:
        return x[..., : self.base.dim]

    def imag_part(self, x) -> np.ndarray:
        return x[..., self.base.dim :]

    @property
    def unit(self) -> np.ndarray:
        return self.embed(self.base.unit)

    @property
    def imaginary_unit(self) -> np.ndarray:
        return self.embed(np.zeros(self.base.dim), self.base.unit)

    @property
    def passed(self) -> bool:
        return bool(self.checks.get("passed", False))


def _star_product_tensor(spec: AlgebraSpec, cross: np.ndarray) -> np.ndarray:
    d = spec.dim
    jt = spec.structure
    kt = -cross  # ab = a [] b - i (a x b)
    p = np.zeros((2 * d, 2 * d, 2 * d))
    re, im = slice(0, d), slice(d, 2 * d)
    p[re, re, re], p[im, im, re], p[re, im, re], p[im, re, re] = jt, -jt, -kt, -kt
    p[re, re, im], p[im, im, im], p[re, im, im], p[im, re, im] = kt, -kt, jt, jt
    return p


def theorem1_construct(
    spec: AlgebraSpec, dc: DynamicalCorrespondence, tol: float = VERIFY_TOL, seed=0
) -> ComplexStarAlgebra:
    """Build ``A + iA`` with ``ab = a [] b - i D_a b`` and validate it.

    Refuses (ConsistencyError) when ``dc`` does not verify.  Associativity
    failures are recorded in ``checks`` with a witness basis triple.
    """
    ver = verify_correspondence(dc, tol)
    if not ver.passed:
        raise ConsistencyError(f"refusing construction: correspondence residual {ver.max_violation:.3g}")
    d = spec.dim
    cross = dc.cross_tensor()
    prod = _star_product_tensor(spec, cross)
    inv = np.concatenate([np.ones(d), -np.ones(d)])
    csa = ComplexStarAlgebra(spec, prod, inv)

    left = np.einsum("abk,kcl->abcl", prod, prod)
    right = np.einsum("bck,akl->abcl", prod, prod)
    assoc = np.linalg.norm(left - right, axis=-1)
    worst = np.unravel_index(np.argmax(assoc), assoc.shape)
    # (e_a e_b)* versus e_b* e_a*
    star_lhs = prod * inv[None, None, :]
    star_rhs = np.einsum("a,b,bak->abk", inv, inv, prod)
    inv_res = float(np.max(np.linalg.norm(star_lhs - star_rhs, axis=-1)))
    ab = prod[:d, :d]
    sym = 0.5 * (ab + ab.transpose(1, 0, 2))
    sym_res = float(np.max(np.linalg.norm(sym[..., :d] - spec.structure, axis=-1)))
    sym_res = max(sym_res, float(np.max(np.abs(sym[..., d:]), initial=0.0)))
    unit_res = float(np.max(np.abs(csa.mul(csa.unit, np.eye(2 * d)) - np.eye(2 * d))))

    jt = spec.structure
    # a x (b x c) - b x (a x c) = -a [] (b [] c) + b [] (a [] c)
    xx = np.einsum("bcl,alk->abck", cross, cross)
    jj = np.einsum("bcl,alk->abck", jt, jt)
    eq1 = (xx - xx.transpose(1, 0, 2, 3)) + (jj - jj.transpose(1, 0, 2, 3))
    # a x (b [] c) - b [] (a x c) = a [] (b x c) - b x (a [] c)
    xj = np.einsum("bcl,alk->abck", jt, cross)  # a x (b [] c)
    jx = np.einsum("acl,blk->abck", cross, jt)  # b [] (a x c)
    jx2 = np.einsum("bcl,alk->abck", cross, jt)  # a [] (b x c)
    xj2 = np.einsum("acl,blk->abck", jt, cross)  # b x (a [] c)
    eq2 = (xj - jx) - (jx2 - xj2)

    checks = {
        "associativity_residual": float(assoc[worst]),
        "involution_residual": inv_res,
        "involutive": True,
        "symmetrized_product_residual": sym_res,
        "unit_residual": unit_res,
        "proof_identity_brackets": float(np.max(np.linalg.norm(eq1, axis=-1))),
        "proof_identity_mixed": float(np.max(np.linalg.norm(eq2, axis=-1))),
        "cross_antisymmetry": float(np.max(np.linalg.norm(cross + cross.transpose(1, 0, 2), axis=-1))),
    }
    if checks["associativity_residual"] > tol:
        csa.witness = [int(w) for w in worst]
    n = spectral_rank(spec) if spec.is_commutative else 0
    if n and n * n == d:
        checks["isomorphism_residual"] = matrix_algebra_isomorphism(csa, n, seed)[1]
    checks["passed"] = all(
        checks[k] <= tol
        for k in (
            "associativity_residual",
            "involution_residual",
            "symmetrized_product_residual",
            "unit_residual",
            "proof_identity_brackets",
            "proof_identity_mixed",
        )
    ) and checks.get("isomorphism_residual", 0.0) <= tol
    csa.checks = checks
    return csa


def matrix_algebra_isomorphism(csa: ComplexStarAlgebra, n: int, seed=0) -> tuple[np.ndarray, float]:
    """Real-linear map M_n(C) -> A + iA built from matrix units.

    Picks primitive orthogonal projections ``e_k`` of A, a unit ``u_k`` in
    ``e_1 (A + iA) e_k`` with ``u_k u_k* = e_1``, and sets
    ``E_jk = u_j* u_k``.  Returns the map (columns: real basis ``E_jk``,
    ``i E_jk``) and the worst residual among bijectivity, multiplicativity
    and *-preservation.
    """
    spec = csa.base
    rng = as_rng(seed)
    frame = random_spectral_frame(spec, rng)
    e = [csa.embed(f) for f in frame.idempotents]
    dim2 = csa.real_dim
    eye = np.eye(dim2)
    left = lambda x: np.einsum("i,ijk->kj", x, csa.product)  # noqa: E731
    right = lambda x: np.einsum("j,ijk->ki", x, csa.product)  # noqa: E731
    units = [e[0]]
    for k in range(1, n):
        sandwich = left(e[0]) @ right(e[k])
        cols = sandwich @ eye
        u = cols[:, np.argmax(np.linalg.norm(cols, axis=0))]
        uu = csa.mul(u, csa.star(u))
        c = float(uu @ e[0]) / float(e[0] @ e[0])
        if c <= 0:
            return np.zeros((dim2, 2 * n * n)), float("inf")
        units.append(u / np.sqrt(c))
    # E_{1k} = units[k], E_{j1} = units[j]*, E_{jk} = E_{j1} E_{1k}
    E = np.zeros((n, n, dim2))
    for j in range(n):
        for k in range(n):
            row = e[0] if j == 0 else csa.star(units[j])
            col = e[0] if k == 0 else units[k]
            E[j, k] = csa.mul(row, col)
    iu = csa.imaginary_unit
    phi = np.zeros((dim2, 2 * n * n))
    std = []
    for j in range(n):
        for k in range(n):
            idx = 2 * (j * n + k)
            phi[:, idx] = E[j, k]
            phi[:, idx + 1] = csa.mul(iu, E[j, k])
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            std.extend([m, 1j * m])
    if phi.shape[0] != phi.shape[1]:
        return phi, float("inf")
    sv = np.linalg.svd(phi, compute_uv=False)
    worst = 0.0 if sv[-1] > 1e-8 else float("inf")

    def to_vec(m):
        out = np.empty(2 * n * n)
        out[0::2] = m.real.ravel()
        out[1::2] = m.imag.ravel()
        return out

    for a, ma in enumerate(std):
        worst = max(worst, float(np.linalg.norm(phi @ to_vec(ma.conj().T) - csa.star(phi[:, a]))))
        for b, mb in enumerate(std):
            lhs = phi @ to_vec(ma @ mb)
            rhs = csa.mul(phi[:, a], phi[:, b])
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return phi, worst


def corollary1_checks(
    spec: AlgebraSpec, csa: ComplexStarAlgebra, n_samples: int = 100, seed=0, tol: float = VERIFY_TOL
) -> Report:
    """Positive squares, the C*-identity and submultiplicativity of ``|x*x|^(1/2)``."""
    rng = as_rng(seed)
    v = ViolationTracker()

    def cstar_norm(x):
        xx = csa.mul(csa.star(x), x)
        v.add("x*x selfadjoint", spec.norm2(csa.imag_part(xx)))
        return np.sqrt(order_unit_norm_coords(spec, csa.real_part(xx)))

    v.add("|1| = 1", abs(cstar_norm(csa.unit) - 1.0))
    for _ in range(n_samples):
        a = random_element(spec, rng)
        sq = spec.mul(a, a)
        v.add("a^2 >= 0", 0.0 if is_positive_coords(spec, sq, tol) else float("inf"))
        v.add("|a + i0| = |a|", abs(cstar_norm(csa.embed(a)) - order_unit_norm_coords(spec, a)))
        x = csa.embed(random_element(spec, rng), random_element(spec, rng))
        y = csa.embed(random_element(spec, rng), random_element(spec, rng))
        nx, ny = cstar_norm(x), cstar_norm(y)
        xx = csa.mul(csa.star(x), x)
        v.add("|x*x| = |x|^2", abs(cstar_norm(xx) - nx**2) / max(1.0, nx**2))
        v.add("|xy| <= |x||y|", max(0.0, cstar_norm(csa.mul(x, y)) - nx * ny))
        v.add("x*x >= 0", 0.0 if is_positive_coords(spec, csa.real_part(xx), tol) else float("inf"))
    return v.report("corollary1", n_samples, tol)
