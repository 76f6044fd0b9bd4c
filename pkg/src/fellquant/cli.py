"""Command-line front end: validate and check definition files, run the golden corpus."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, kernels
from .bundlemap import (QuantaleMapP, check_ipi_stable, check_quantic_bundle, check_semiopen_laws,
                        check_stable, check_surjection, check_weakly_open)
from .convalg import FellBundleSpec, LineTwist, ProductBundle
from .deffile import DefinitionFile, groupoid_text, parse
from .errors import FellQuantError
from .examples import MISMATCH, paper_examples
from .groupoid import mask_of
from .linalg import DEFAULT_TOL
from .maxa import MaxElement
from .reports import FAILS, HOLDS_EXHAUSTIVE, CheckReport
from .weyl import (SubalgebraContext, comparison_map, germ_groupoid_B, is_normalizer,
                   sample_normalizers, sigma_hat, signature_normalizers, weyl_groupoid)


def build_map(df: DefinitionFile) -> QuantaleMapP:
    if df.fiber is not None:
        kind = ProductBundle(df.fiber)
    elif df.cocycle is not None:
        kind = LineTwist(df.cocycle)
    else:
        kind = None
    return QuantaleMapP(FellBundleSpec(df.groupoid, kind))


def subalgebra_context(df: DefinitionFile, p: QuantaleMapP, seed: int) -> SubalgebraContext:
    if df.subalgebra is None:
        mask = p.G.units_mask
    else:
        mask = mask_of(df.arrow_index(a) for a in df.subalgebra)
    return SubalgebraContext(p.A, p.p_star(mask), seed)


def named_normalizers(df: DefinitionFile, ctx: SubalgebraContext) -> list:
    return [vecs[0] for vecs in df.generators.values()
            if len(vecs) == 1 and is_normalizer(ctx, vecs[0])]


def generator_elements(df: DefinitionFile, p: QuantaleMapP, ctx: SubalgebraContext,
                       sources: list[str], seed: int) -> list[MaxElement]:
    """Subspaces used to generate germ groupoids.

    Named single-vector generators that normalize B enter through B n B;
    other named spans enter as given.
    """
    out: list[MaxElement] = []
    for source in sources:
        if source == "bisections":
            out += [p.p_star(u) for u in p.bisections if u]
        elif source == "signature":
            out += [sigma_hat(ctx, n) for n in signature_normalizers(ctx, seed)]
        elif source.startswith("sampled"):
            count = int(source.replace(":", " ").split()[1])
            out += [sigma_hat(ctx, n) for n in sample_normalizers(ctx, count, seed)]
        elif source == "file":
            for vecs in df.generators.values():
                if len(vecs) == 1 and is_normalizer(ctx, vecs[0]):
                    out.append(sigma_hat(ctx, vecs[0]))
                else:
                    out.append(p.A.element(vecs))
        else:
            raise ValueError(f"unknown generator source {source!r}")
    return out


def _sources(df: DefinitionFile) -> list[str]:
    found = list(df.generator_sources)
    if df.generators:
        found.append("file")
    return found or ["signature"]


def recover_groupoid(df: DefinitionFile, p: QuantaleMapP, seed: int) -> CheckReport:
    ctx = subalgebra_context(df, p, seed)
    sources = _sources(df)
    germs = germ_groupoid_B(ctx, generator_elements(df, p, ctx, sources, seed))
    comp = comparison_map(ctx, p, germs)
    ok = comp.is_iso and comp.triangle_commutes
    return CheckReport("recover_G", HOLDS_EXHAUSTIVE if ok else FAILS, 0, seed, None, {
        "generators": sources, "germ_arrows": germs.groupoid.arrow_count,
        "groupoid_arrows": p.G.arrow_count, "k_injective": comp.k_injective,
        "k_surjective": comp.k_surjective, "homomorphism": comp.homomorphism,
        "triangle_commutes": comp.triangle_commutes})


def run_checks(df: DefinitionFile, seed: int = 0, samples: int = 1000) -> dict:
    p = build_map(df)
    reports = []
    for name in df.checks:
        if name == "surjection":
            rep = check_surjection(p)
        elif name == "semiopen":
            rep = check_semiopen_laws(p, samples, seed)
        elif name == "weakly_open":
            rep = check_weakly_open(p, samples, seed)
        elif name == "quantic":
            rep = check_quantic_bundle(p, samples, seed)
        elif name == "stable":
            rep = check_stable(p, samples, seed)
        elif name == "ipi_stable":
            ctx = SubalgebraContext(p.A, p.p_star(p.G.units_mask), seed)
            rep = check_ipi_stable(p, named_normalizers(df, ctx), samples, seed)
        else:
            rep = recover_groupoid(df, p, seed)
        reports.append(rep.to_dict())
    return {"version": __version__, "backend": kernels.BACKEND, "seed": seed, "samples": samples,
            "tolerance": DEFAULT_TOL, "checks": reports}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _print_checks(result: dict) -> None:
    for rep in result["checks"]:
        line = f"{rep['property']:<12} {rep['verdict']}"
        w = rep.get("witness")
        if w:
            line += f"  U={w['U']} lhs={w['lhs_support']} rhs={w['rhs_support']}"
        print(line)


def cmd_validate(args) -> int:
    df = parse(args.file)
    p = build_map(df)
    G = p.G
    kind = "line bundle" if p.bundle.is_line else f"product bundle, fiber dim {p.bundle.fiber_dim}"
    print(f"ok: {G.object_count} objects, {G.arrow_count} arrows, {kind}, "
          f"algebra dim {p.A.dim}, checks {df.checks or 'none'}")
    return 0


def cmd_check(args) -> int:
    result = run_checks(parse(args.file), args.seed, args.samples)
    result["input"] = Path(args.file).name
    _print_checks(result)
    if args.json:
        Path(args.json).write_text(_dump(result) + "\n")
    return 1 if any(r["verdict"] == FAILS for r in result["checks"]) else 0


def cmd_paper_examples(args) -> int:
    cases = paper_examples(args.samples, args.seed)
    if args.json:
        print(_dump({"seed": args.seed, "samples": args.samples, "cases": cases}))
    else:
        for c in cases:
            print(f"{c['case']:<28} {c['status']}")
    return 1 if any(c["status"] == MISMATCH for c in cases) else 0


def cmd_weyl(args) -> int:
    df = parse(args.file)
    p = build_map(df)
    ctx = subalgebra_context(df, p, args.seed)
    sources = [s.strip() for s in args.generators.split(",") if s.strip()]
    gens = generator_elements(df, p, ctx, sources, args.seed)
    germs = germ_groupoid_B(ctx, gens)
    weyl = weyl_groupoid(ctx, gens)
    print(f"# generated germ groupoid from {', '.join(sources)}: "
          f"{germs.groupoid.object_count} objects, {germs.groupoid.arrow_count} arrows")
    print(groupoid_text(germs.groupoid))
    print(f"# Weyl groupoid: {weyl.object_count} objects, {weyl.arrow_count} arrows")
    print(groupoid_text(weyl))
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fellquant", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="parse a definition file and build its bundle")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)
    c = sub.add_parser("check", help="run the checks listed in a definition file")
    c.add_argument("file")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_check)
    e = sub.add_parser("paper-examples", help="run the golden example corpus")
    e.add_argument("--json", action="store_true")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--samples", type=int, default=1000)
    e.set_defaults(func=cmd_paper_examples)
    w = sub.add_parser("weyl", help="germ and Weyl groupoids of the unit subalgebra")
    w.add_argument("file")
    w.add_argument("--generators", default="signature",
                   help="comma-separated: file, bisections, signature, sampled:N")
    w.add_argument("--seed", type=int, default=0)
    w.set_defaults(func=cmd_weyl)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FellQuantError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
