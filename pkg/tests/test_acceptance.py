"""Acceptance criteria 1-8.

Each criterion prints one ``PASS``/``FAIL`` line (visible under ``pytest -v``
and when run directly with ``python tests/test_acceptance.py``).
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from boxalg.algebra import Element, from_complex_matrix, parse_catalog_tag, to_complex_matrix
from boxalg.derivations import (
    check_commutator_element,
    check_lemma4_automorphism,
    check_lemma5,
    skew_derivation_basis,
)
from boxalg.dyncorr import (
    canonical_correspondence,
    corollary1_checks,
    search_correspondence,
    theorem1_construct,
    verify_correspondence,
)
from boxalg.logic import (
    Event,
    check_condition_A,
    check_condition_B,
    check_condition_D,
    check_lemma1,
    check_lemma2_uniqueness,
    quadratic_map,
)
from boxalg.spectral import spectral_decompose

SUITE = [
    check_lemma1,
    check_lemma2_uniqueness,
    check_condition_A,
    check_condition_B,
    check_condition_D,
    check_lemma4_automorphism,
    check_lemma5,
    check_commutator_element,
]
SUITE_TAGS = ["H3(R)", "H3(C)", "H3(H)", "H3(O)", "H4(R)", "H4(C)"]
DERIVATION_TABLE = {
    "H3(R)": (3, "so(3)"),
    "H3(C)": (8, "su(3)"),
    "H3(H)": (21, "sp(3)"),
    "H3(O)": (52, "f4"),
    "H4(R)": (6, "so(4)"),
    "H4(C)": (15, "su(4)"),
}


def criterion_1():
    worst, failures = 0.0, []
    for tag in SUITE_TAGS:
        spec = parse_catalog_tag(tag)
        for check in SUITE:
            r = check(spec, n_samples=100, seed=0, tol=1e-8)
            worst = max(worst, r.max_violation)
            if not (r.passed and r.samples >= 100):
                failures.append(f"{tag}:{r.check}")
    return not failures, f"max violation {worst:.2e} over {len(SUITE)} checks x {len(SUITE_TAGS)} algebras {failures or ''}"


def criterion_2():
    rows, ok = [], True
    for tag, (dim, name) in DERIVATION_TABLE.items():
        lie = skew_derivation_basis(parse_catalog_tag(tag))
        good = lie.dim == dim and lie.killing_negative_definite and lie.classification == name
        ok &= good
        rows.append(f"{tag}:{lie.dim}/{lie.classification}")
    return ok, " ".join(rows)


def criterion_3():
    worst, ok = 0.0, True
    for tag in ("H3(C)", "H4(C)"):
        r = verify_correspondence(canonical_correspondence(parse_catalog_tag(tag)), tol=1e-9)
        names = set(r.details["residuals"])
        ok &= r.passed and {"[D_a,D_b] = -[R_a,R_b]", "D_a b + D_b a = 0", "[D_a,R_b] = [R_a,D_b]", "D_a b = -D_b a"} <= names
        worst = max(worst, r.max_violation)
    return ok, f"max residual {worst:.2e}"


def criterion_4():
    spec = parse_catalog_tag("H3(C)")
    csa = theorem1_construct(spec, canonical_correspondence(spec))
    c = csa.checks
    cor = corollary1_checks(spec, csa, n_samples=100)
    ok = (
        c["associativity_residual"] <= 1e-8
        and c["involution_residual"] <= 1e-8
        and c["symmetrized_product_residual"] <= 1e-9
        and c["isomorphism_residual"] <= 1e-8
        and cor.passed
        and cor.samples == 100
    )
    return ok, (
        f"assoc {c['associativity_residual']:.1e} inv {c['involution_residual']:.1e} "
        f"sym {c['symmetrized_product_residual']:.1e} iso {c['isomorphism_residual']:.1e} "
        f"corollary {cor.max_violation:.1e}"
    )


def criterion_5():
    res = {tag: search_correspondence(parse_catalog_tag(tag), n_starts=50, rng_seed=0) for tag in ("H3(C)", "H3(R)", "H3(H)")}
    ok = res["H3(C)"].best_residual <= 1e-8 and res["H3(C)"].exists_numerically
    for tag in ("H3(R)", "H3(H)"):
        r = res[tag]
        ok &= r.best_residual >= 1e-3 and not r.exists_numerically and "evidence, not proof" in r.note
        ok &= len(r.per_start) == 50
    return ok, " ".join(f"{t}:{r.best_residual:.2e}" for t, r in res.items())


def criterion_6():
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in (2, 3, 4):
        spec = parse_catalog_tag(f"H{n}(C)")
        for _ in range(100):
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a = (z + z.conj().T) / 2
            lam = spectral_decompose(Element(spec, from_complex_matrix(spec, a))).eigenvalues_with_multiplicity()
            worst = max(worst, float(np.max(np.abs(lam - np.linalg.eigvalsh(a)))))
    return worst <= 1e-8, f"max eigenvalue gap {worst:.2e}"


def criterion_7():
    rng = np.random.default_rng(7)
    spec = parse_catalog_tag("H3(C)")
    worst = 0.0
    for k in range(100):
        u, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        rank = k % 4
        p = u[:, :rank] @ u[:, :rank].conj().T
        e = Event.of(spec, from_complex_matrix(spec, p))
        z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        a = (z + z.conj().T) / 2
        ue_a = to_complex_matrix(spec, quadratic_map(e) @ from_complex_matrix(spec, a))
        worst = max(worst, float(np.linalg.norm(ue_a - p @ a @ p)))
    return worst <= 1e-9, f"max |U_e a - eae| {worst:.2e}"


def _cli_commands(tmp: Path):
    element = tmp / "element.json"
    element.write_text(json.dumps([0.3, -1.2, 2.0, 0.5, 0.1, -0.4, 0.9, 0.0, 0.2]))
    return [
        ["build", "H3(O)"],
        ["spectral", "H3(C)", str(element)],
        ["events", "sample", "H3(H)", "--samples", "5"],
        ["condprob", "H3(C)", "--samples", "10", "--seed", "3"],
        ["check", "lemma1", "H3(R)", "--seed", "7"],
        ["check", "lemma2", "H2(C)", "--seed", "1"],
        ["check", "condA", "H3(H)", "--samples", "30"],
        ["check", "condB", "H3(C)", "--samples", "30", "--seed", "5"],
        ["check", "condD", "H4(R)", "--samples", "30"],
        ["check", "lemma4", "H3(C)", "--samples", "30", "--seed", "2"],
        ["check", "lemma5", "H3(H)", "--samples", "30"],
        ["check", "commutator", "H4(C)", "--samples", "30"],
        ["derivations", "H4(C)"],
        ["classify", "H3(H)"],
        ["dyncorr", "verify", "H3(C)"],
        ["dyncorr", "search", "H3(C)", "--starts", "20", "--seed", "11"],
        ["dyncorr", "search", "H3(R)", "--starts", "10"],
        ["dyncorr", "construct", "H3(C)", "--samples", "20", "--seed", "4"],
    ]


def criterion_8():
    mismatches = []
    with tempfile.TemporaryDirectory() as tmp:
        commands = _cli_commands(Path(tmp))
        for argv in commands:
            full = [sys.executable, "-m", "boxalg", *argv]
            first = subprocess.run(full, capture_output=True)
            second = subprocess.run(full, capture_output=True)
            if first.stdout != second.stdout or not first.stdout:
                mismatches.append(" ".join(argv))
    return not mismatches, f"{len(commands)} commands rerun, mismatches: {mismatches or 'none'}"


CRITERIA = {
    1: ("lemma suite", criterion_1),
    2: ("derivation dimensions and classification", criterion_2),
    3: ("canonical correspondence", criterion_3),
    4: ("complex *-algebra reconstruction", criterion_4),
    5: ("existence/nonexistence contrast", criterion_5),
    6: ("spectral oracle equivalence", criterion_6),
    7: ("von Neumann form U_e a = eae", criterion_7),
    8: ("CLI determinism", criterion_8),
}


def _line(number: int, passed: bool, detail: str) -> str:
    return f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {CRITERIA[number][0]} -- {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    passed, detail = CRITERIA[number][1]()
    with capsys.disabled():
        print("\n" + _line(number, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    results = []
    for number, (_, run) in sorted(CRITERIA.items()):
        passed, detail = run()
        results.append(passed)
        print(_line(number, passed, detail), flush=True)
    sys.exit(0 if all(results) else 1)
