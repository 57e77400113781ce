"""``mdkern`` command line front end.

Exit codes: 0 success / true / feasible, 2 usage error, 3 false / infeasible
(evidence is printed), 4 validation error, 5 solver or estimator failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import actions, crofton, cutcone, embedding, kernel, measurespace, trees
from .errors import EmbeddingError, EstimatorError, SolverError, ValidationError

EXIT_OK, EXIT_USAGE, EXIT_FALSE, EXIT_INVALID, EXIT_FAILURE = 0, 2, 3, 4, 5


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text, parse_constant=kernel._reject_constant)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from exc


def _emit(args, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _labels(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _crofton_opts(args) -> crofton.CroftonOptions:
    return crofton.CroftonOptions(method=args.method, samples=args.samples, seed=args.seed, tol=args.quad_tol,
                                  atom_cap=args.atom_cap, embed_tol=args.tol)


# -- subcommands ---------------------------------------------------------------------------


def cmd_negdef(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    res = kernel.is_negative_definite(K, args.tol)
    out = {"negative_definite": res.negative_definite, "max_eigenvalue": res.max_eigenvalue}
    if res.witness is not None:
        out["witness"] = {"coefficients": list(res.witness.coefficients), "value": res.witness.value}
    _emit(args, out)
    return EXIT_OK if res.negative_definite else EXIT_FALSE


def cmd_pseudometric(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    res = kernel.is_pseudometric(K, args.tol)
    out = {"pseudometric": res.pseudometric}
    if res.violation is not None:
        out["violation"] = [K.labels[i] for i in res.violation]
        out["excess"] = res.excess
    _emit(args, out)
    return EXIT_OK if res.pseudometric else EXIT_FALSE


def cmd_embed(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    C = embedding.schoenberg_embed(K, args.tol)
    _emit(args, C.to_dict())
    return EXIT_OK


def cmd_crofton(args) -> int:
    C = embedding.PointConfiguration.from_dict(_read_json(args.config))
    opts = _crofton_opts(args)
    if args.pos or args.neg:
        cyl = crofton.CylinderSpec(_labels(args.pos or ""), _labels(args.neg or ""))
        _emit(args, crofton.cylinder_measure(C, cyl, opts).to_dict())
    else:
        est = crofton.atom_estimates(C, opts)
        _emit(args, {
            "labels": list(C.labels),
            "cylinders": [
                {"pattern": measurespace.pattern_from_mask(mk, C.n), **e.to_dict()} for mk, e in est.items()
            ],
        })
    return EXIT_OK


def cmd_sqrt_rep(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    R = crofton.sqrt_representation(K, _crofton_opts(args))
    _emit(args, R.to_dict())
    return EXIT_OK


def cmd_decompose(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    res = cutcone.decompose(K, cutcone.DecomposeOptions(exact=args.exact, cap=args.cap))
    if res.feasible:
        _emit(args, {"feasible": True, "max_residual": res.max_residual, **res.representation.to_dict()})
        return EXIT_OK
    _emit(args, {"feasible": False, "margin": res.margin, **res.certificate.to_dict()})
    return EXIT_FALSE


def cmd_kernel_of(args) -> int:
    data = _read_json(args.input)
    if "points" in data and "atoms" not in data:
        R = measurespace.GroundedRepresentation.from_dict(data)
    else:
        R = measurespace.AtomicRepresentation.from_dict(data)
    _emit(args, measurespace.symmetric_difference_kernel(R).to_dict())
    return EXIT_OK


def cmd_tree(args) -> int:
    T = trees.Tree.from_dict(_read_json(args.input))
    out = {"kernel": trees.distance_kernel(T).to_dict()}
    if args.representation:
        out["representation"] = trees.tree_representation(T).to_dict()
    _emit(args, out)
    return EXIT_OK


def cmd_defect(args) -> int:
    S = actions.EventuallyConstantSet.parse(args.set)
    _emit(args, {"set": S.to_dict(), "k": args.k, "defect": actions.defect(S, args.k)})
    return EXIT_OK


def cmd_growth(args) -> int:
    A = actions.ZAction.parse(args.gens)
    S = actions.EventuallyConstantSet.parse(args.set)
    rows = actions.defect_growth(A, S, args.radius)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "max_defect"])
        w.writerows(rows)
        if args.csv == "-":
            sys.stdout.write(buf.getvalue())
        else:
            Path(args.csv).write_text(buf.getvalue())
    else:
        _emit(args, {"generators": A.amounts, "set": S.to_dict(),
                     "growth": [{"length": ell, "max_defect": m} for ell, m in rows]})
    return EXIT_OK


def cmd_invariance(args) -> int:
    K = kernel.Kernel.from_dict(_read_json(args.input))
    G = actions.FiniteGroup.parse(args.group)
    cyl = crofton.CylinderSpec(_labels(args.pos), _labels(args.neg))
    rep = actions.group_cylinder_invariance(K, G, args.g, cyl, _crofton_opts(args))
    _emit(args, rep.to_dict())
    return EXIT_OK if rep.agree else EXIT_FALSE


# -- parser ------------------------------------------------------------------------------------


def _default_seed() -> int:
    env = os.environ.get("MDKERN_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"MDKERN_SEED must be an integer, got {env!r}") from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="relative tolerance (default 1e-9)")
    common.add_argument("--out", help="write output here instead of stdout")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--method", choices=crofton.METHODS, default="auto")
    mc.add_argument("--samples", type=_positive_int, default=10**6, help="Monte Carlo directions")
    mc.add_argument("--seed", type=int, default=_default_seed())
    mc.add_argument("--quad-tol", type=_positive_float, default=1e-8)
    mc.add_argument("--atom-cap", type=_positive_int, default=12)

    p = argparse.ArgumentParser(prog="mdkern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, parents, help_text):
        sp = sub.add_parser(name, parents=parents, help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("negdef", cmd_negdef, [common], "test conditional negative definiteness")
    sp.add_argument("--in", dest="input", required=True)
    sp = add("pseudometric", cmd_pseudometric, [common], "test the triangle inequality")
    sp.add_argument("--in", dest="input", required=True)
    sp = add("embed", cmd_embed, [common], "points with |v_x - v_y|^2 = K(x, y)")
    sp.add_argument("--in", dest="input", required=True)
    sp = add("crofton", cmd_crofton, [common, mc], "half-space cylinder masses of a configuration")
    sp.add_argument("--config", required=True)
    sp.add_argument("--pos", help="comma-separated positive labels")
    sp.add_argument("--neg", help="comma-separated negative labels")
    sp = add("sqrt-rep", cmd_sqrt_rep, [common, mc], "atomic representation of sqrt(K)")
    sp.add_argument("--in", dest="input", required=True)
    sp = add("decompose", cmd_decompose, [common], "cut-cone decomposition or Farkas certificate")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--exact", action="store_true", help="solve in rational arithmetic")
    sp.add_argument("--cap", type=_positive_int, default=cutcone.DEFAULT_CAP)
    sp = add("kernel-of", cmd_kernel_of, [common], "symmetric-difference kernel of a representation")
    sp.add_argument("--in", dest="input", required=True)
    sp = add("tree", cmd_tree, [common], "distance kernel of a weighted tree")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--representation", action="store_true", help="also emit the rooted-geodesic representation")
    sp = add("defect", cmd_defect, [common], "|S symmetric-difference (S + k)| on Z")
    sp.add_argument("--set", required=True, help="e.g. 'ge1', '0,1,2', 'le-3,5..7'")
    sp.add_argument("--k", type=int, required=True)
    sp = add("growth", cmd_growth, [common], "max defect by word length for a Z-action")
    sp.add_argument("--gens", required=True, help="generator translation amounts, e.g. '+2,-3'")
    sp.add_argument("--set", default="ge1")
    sp.add_argument("--radius", type=_positive_int, required=True)
    sp.add_argument("--csv", help="write (length, max_defect) rows as CSV; '-' for stdout")
    sp = add("invariance", cmd_invariance, [common, mc], "cylinder mass vs. its left translate")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--group", required=True, help="'cyclic:<n>' or 'symmetric:<n>'")
    sp.add_argument("--g", required=True, help="group element label")
    sp.add_argument("--pos", required=True)
    sp.add_argument("--neg", required=True)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except EmbeddingError as exc:
        _emit(args, {"error": str(exc), "eigenvalue": exc.eigenvalue})
        return EXIT_FALSE
    except ValidationError as exc:
        print(f"mdkern: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, EstimatorError) as exc:
        print(f"mdkern: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
