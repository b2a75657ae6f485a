"""Command-line driver.  Every command prints one JSON document.

Exit status: 0 when the report passes, 1 when a check fails, 2 for parse
or validation errors, 3 for constructions the algebra does not support.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import PROPERTY_TOL, load_algebra, random_element, spec_to_json
from .derivations import (
    check_commutator_element,
    check_lemma4_automorphism,
    check_lemma5,
    skew_derivation_basis,
)
from .dyncorr import (
    canonical_correspondence,
    corollary1_checks,
    search_correspondence,
    theorem1_construct,
    verify_correspondence,
)
from .errors import BoxAlgebraError, FormalRealityError, UnsupportedConstruction, ValidationError
from .logic import (
    Event,
    check_condition_A,
    check_condition_B,
    check_condition_D,
    check_lemma1,
    check_lemma2_uniqueness,
    conditional_probability,
    event_defect,
    random_state,
    sample_event,
)
from .spectral import as_rng, decompose, is_power_associative, spectral_rank

CHECKS = {
    "lemma1": check_lemma1,
    "lemma2": check_lemma2_uniqueness,
    "condA": check_condition_A,
    "condB": check_condition_B,
    "condD": check_condition_D,
    "lemma4": check_lemma4_automorphism,
    "lemma5": check_lemma5,
    "commutator": check_commutator_element,
}

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_UNSUPPORTED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"passed": False, "error": message, "status": EXIT_PARSE}), file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _add_common(p: argparse.ArgumentParser, samples: int = 100, tol: float = PROPERTY_TOL) -> None:
    p.add_argument("algebra_pos", nargs="?", metavar="ALGEBRA", help="catalog tag such as H3(C) or a spec file")
    p.add_argument("--algebra", help="same as the positional ALGEBRA")
    p.add_argument("--samples", type=_positive_int, default=samples)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive_float, default=tol)
    p.add_argument("--output", help="write the report here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boxalg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="construct an algebra and report its basic data")
    _add_common(p, samples=20)
    p.add_argument("--emit-spec", action="store_true", help="include the full spec JSON")

    p = sub.add_parser("spectral", help="spectral decomposition of an element")
    _add_common(p)
    p.add_argument("element_file", help="JSON list of coordinates, or {'coords': [...]}")

    p = sub.add_parser("events", help="event sampling")
    ev = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = ev.add_parser("sample")
    _add_common(q, samples=1)
    q.add_argument("--rank", type=int, default=None)

    p = sub.add_parser("condprob", help="conditional probabilities mu(f|e) for sampled data")
    _add_common(p, samples=10)

    p = sub.add_parser("check", help="run a sampled lemma or condition check")
    p.add_argument("name", choices=sorted(CHECKS))
    _add_common(p)

    p = sub.add_parser("derivations", help="Lie algebra of skew order derivations")
    _add_common(p)
    p = sub.add_parser("classify", help="classify the Lie algebra of skew derivations")
    _add_common(p)

    p = sub.add_parser("dyncorr", help="dynamical correspondence workflows")
    dc = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("verify", "search", "construct"):
        q = dc.add_parser(name)
        _add_common(q, tol=1e-8)
        q.add_argument("--starts", type=_positive_int, default=50)
        q.add_argument("--max-iters", type=_positive_int, default=200)
    return parser


# -- command bodies -------------------------------------------------------------


def _build(spec, args) -> dict:
    rng = as_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        a, b = random_element(spec, rng), random_element(spec, rng)
        worst = max(worst, float(spec.norm2(spec.mul(spec.unit, a) - a)))
        if spec.is_commutative:
            a2 = spec.mul(a, a)
            worst = max(worst, float(spec.norm2(spec.mul(a2, spec.mul(a, b)) - spec.mul(a, spec.mul(a2, b)))))
    out = {
        "dim": spec.dim,
        "catalog_tag": spec.catalog_tag,
        "type_I2": bool(spec.type_I2_flag),
        "commutative": bool(spec.is_commutative),
        "unit_and_jordan_residual": worst,
        "passed": worst <= args.tol,
    }
    if is_power_associative(spec):
        out["spectral_rank"] = spectral_rank(spec)
    if args.emit_spec:
        out["spec"] = spec_to_json(spec)
    return out


def _read_element(spec, path: str) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    coords = doc.get("coords") if isinstance(doc, dict) else doc
    try:
        x = np.asarray(coords, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: coordinates must be numbers") from exc
    if x.shape != (spec.dim,):
        raise ValidationError(f"{path}: expected {spec.dim} coordinates, got shape {x.shape}")
    return x


def _spectral(spec, args) -> dict:
    x = _read_element(spec, args.element_file)
    dec = decompose(spec, x)
    recon = float(spec.norm2(dec.reconstruct() - x))
    return {
        "eigenvalues": dec.eigenvalues.tolist(),
        "multiplicities": np.rint(dec.traces).astype(int).tolist(),
        "idempotents": dec.idempotents.tolist(),
        "reconstruction_residual": recon,
        "passed": recon <= args.tol * max(1.0, float(spec.norm2(x))),
    }


def _events_sample(spec, args) -> dict:
    if args.rank is not None and not 0 <= args.rank <= spectral_rank(spec):
        raise ValidationError(f"--rank must lie in [0, {spectral_rank(spec)}]")
    rng = as_rng(args.seed)
    events = [sample_event(spec, rng, args.rank) for _ in range(args.samples)]
    defects = [event_defect(spec, e) for e in events]
    return {
        "events": [e.tolist() for e in events],
        "ranks": [int(round(float(spec.inner(e, spec.unit)))) for e in events],
        "max_defect": max(defects),
        "passed": max(defects) <= args.tol,
    }


def _condprob(spec, args) -> dict:
    rng = as_rng(args.seed)
    rows = []
    worst = 0.0
    for _ in range(args.samples):
        mu = random_state(spec, rng)
        e = Event.of(spec, sample_event(spec, rng, rank=max(1, spectral_rank(spec) - 1)))
        f = Event.of(spec, sample_event(spec, rng))
        p = conditional_probability(mu, e, f)
        worst = max(worst, -p, p - 1.0)
        rows.append({"mu_e": mu(e), "mu_f": mu(f), "mu_f_given_e": p})
    return {"samples_detail": rows, "range_violation": max(worst, 0.0), "passed": worst <= args.tol}


def _check(spec, args) -> dict:
    report = CHECKS[args.name](spec, n_samples=args.samples, seed=args.seed, tol=args.tol)
    return report.to_dict()


def _derivations(spec, args) -> dict:
    lie = skew_derivation_basis(spec, seed=args.seed)
    out = lie.summary()
    out["passed"] = out["closure_residual"] <= args.tol
    return out


def _classify(spec, args) -> dict:
    lie = skew_derivation_basis(spec, seed=args.seed)
    out = lie.summary()
    out["n_roots"] = 0 if lie.roots is None else len(lie.roots)
    out["passed"] = not out["classification"].startswith("unidentified")
    return out


def _correspondence_for(spec, args):
    try:
        return canonical_correspondence(spec), "canonical", None
    except UnsupportedConstruction:
        res = search_correspondence(spec, args.starts, args.max_iters, args.seed)
        return res.correspondence, "search", res


def _dyncorr(spec, args) -> dict:
    if args.action == "search":
        res = search_correspondence(spec, args.starts, args.max_iters, args.seed)
        out = res.to_dict()
        out["passed"] = res.exists_numerically
        return out
    dc, origin, res = _correspondence_for(spec, args)
    ver = verify_correspondence(dc, args.tol)
    out = {"source": origin, "verification": ver.to_dict(), "exists_numerically": ver.passed}
    if res is not None:
        out.update(best_residual=res.best_residual, per_start=res.per_start, note=res.note)
    if args.action == "verify":
        out["passed"] = ver.passed
        return out
    if not ver.passed:
        raise UnsupportedConstruction("no verified dynamical correspondence; complex *-algebra not built")
    csa = theorem1_construct(spec, dc, args.tol, seed=args.seed)
    cor = corollary1_checks(spec, csa, args.samples, args.seed, args.tol)
    out["construction"] = dict(csa.checks, witness=csa.witness)
    out["corollary1"] = cor.to_dict()
    out["passed"] = csa.passed and cor.passed
    return out


HANDLERS = {
    "build": _build,
    "spectral": _spectral,
    "events": _events_sample,
    "condprob": _condprob,
    "check": _check,
    "derivations": _derivations,
    "classify": _classify,
    "dyncorr": _dyncorr,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(doc: dict, output: str | None) -> None:
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
    if args.command == "check":
        command += f" {args.name}"
    source = args.algebra or args.algebra_pos
    header = {
        "command": command,
        "algebra": source,
        "seed": args.seed,
        "samples": args.samples,
        "tolerance": args.tol,
        "version": __version__,
    }
    if source is None:
        _emit(dict(header, passed=False, error="no algebra given"), args.output)
        return EXIT_PARSE
    try:
        spec = load_algebra(source)
        body = HANDLERS[args.command](spec, args)
    except ValidationError as exc:
        _emit(dict(header, passed=False, error=str(exc)), args.output)
        return EXIT_PARSE
    except (UnsupportedConstruction, FormalRealityError) as exc:
        _emit(dict(header, passed=False, error=str(exc)), args.output)
        return EXIT_UNSUPPORTED
    except BoxAlgebraError as exc:
        _emit(dict(header, passed=False, error=f"{type(exc).__name__}: {exc}"), args.output)
        return EXIT_FAILED
    doc = dict(body, **header)
    _emit(doc, args.output)
    return EXIT_OK if doc.get("passed") else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
