"""Command-line entry point: ``k3cone verify``, ``k3cone recheck`` and friends."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from k3cone import __version__
from k3cone.claims import Context, UnknownClaimError, recheck_entry, run_claims
from k3cone.conegeom import ConeError, dual_cone_q, mori_lemma_replay
from k3cone.diophant import (
    default_search_height,
    pell_orbit,
    pell_solutions,
    quad_isotropic_rank3,
    solve_conic,
)
from k3cone.dynamics import (
    L,
    growth_report,
    invariant_divisor_report,
    orbit,
    periodicity_certificate,
)
from k3cone.hilbscheme import f_push
from k3cone.quadlat import LatticeError, spectral_radius_enclosure
from k3cone.report import FAIL, PASS, dumps, report_dict
from k3cone.scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 2, 3


class InputError(Exception):
    pass


def parse_gram(text: str) -> list[list[int]]:
    """``"6,8;8,6"`` -> [[6, 8], [8, 6]]."""
    try:
        rows = [[int(c) for c in row.split(",")] for row in text.replace(" ", "").split(";") if row]
    except ValueError:
        raise InputError(f"--gram: expected integer rows like '6,8;8,6', got {text!r}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InputError(f"--gram: matrix must be square, got {text!r}")
    return rows


def _emit(payload, out: str | None) -> None:
    text = dumps(payload)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _status_code(reports) -> int:
    return EXIT_FAIL if any(r.status == FAIL for r in reports) else EXIT_OK


def _figures_dir(args) -> Path | None:
    if not getattr(args, "figures", None):
        return None
    d = Path(args.figures)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _draw_section(ctx: Context, d: Path) -> list[str]:
    from k3cone.plotting import plot_cone_section

    if not (ctx.scn.mori_generators and ctx.scn.ample_generators):
        return []
    return [str(plot_cone_section(ctx.mori, ctx.ample, d / "mori_section.png", ctx.jc))]


def _draw_orbit(ctx: Context, rec, d: Path) -> list[str]:
    from k3cone.plotting import plot_orbit_growth

    enc = spectral_radius_enclosure(f_push(ctx.hl), Fraction(1, 10**6))
    return [str(plot_orbit_growth(rec, enc.lo, enc.hi, d / "orbit_growth.png"))]


def _scenario_ctx(args) -> Context:
    return Context(load_scenario(args.scenario))


def _seed(ctx: Context, text: str | None):
    if text is None:
        return L(ctx.hl, 1)
    try:
        return ctx.lat.parse(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"--class: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    scn = load_scenario(args.scenario)
    selection = None
    if args.claims:
        selection = [c.strip() for c in args.claims.split(",") if c.strip()]
        if selection == ["all"]:
            selection = None
    try:
        reports = run_claims(scn, selection)
    except UnknownClaimError as exc:
        raise InputError(f"unknown claim id {exc.args[0]!r}") from None
    payload = report_dict(scn.name, reports, __version__, args.timings)
    d = _figures_dir(args)
    if d is not None:
        ctx = Context(scn)
        figs = _draw_section(ctx, d)
        if ctx.hl.lattice.rank == 3 and len(ctx.hl.polarizations) == 2 and scn.mori_generators:
            figs += _draw_orbit(ctx, orbit(ctx.hl, L(ctx.hl, 1), scn.orbit_steps), d)
        sys.stderr.write("".join(f"figure: {f}\n" for f in figs))
    _emit(payload, args.report)
    passed = sum(r.status == PASS for r in reports)
    sys.stderr.write(f"{scn.name}: {passed}/{len(reports)} pass, "
                     f"{sum(r.status == FAIL for r in reports)} fail, "
                     f"{len(reports) - passed - sum(r.status == FAIL for r in reports)} assumed\n")
    return _status_code(reports)


def cmd_recheck(args) -> int:
    try:
        data = json.loads(Path(args.report).read_text("utf-8"))
        entries = data["claims"]
    except FileNotFoundError:
        raise InputError(f"no such report: {args.report}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed report {args.report}: {exc}") from None
    rows = []
    bad = False
    for e in entries:
        try:
            again = recheck_entry(e)
        except UnknownClaimError as exc:
            raise InputError(f"unknown claim id {exc.args[0]!r}") from None
        agrees = again == e.get("status")
        bad = bad or not agrees or again == FAIL
        rows.append({"id": e["id"], "reported": e.get("status"), "rechecked": again, "agrees": agrees})
    _emit({"report": str(args.report), "rechecks": rows, "tool_version": __version__}, args.out)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_conic(args) -> int:
    g = parse_gram(args.gram)
    if len(g) != 2:
        raise InputError("--gram: conic needs a 2x2 matrix")
    if args.bound < 1:
        raise InputError("--bound must be >= 1")
    res = solve_conic(g[0][0], 2 * g[0][1], g[1][1], args.target, args.bound)
    _emit(res.to_dict(), args.out)
    return EXIT_OK


def cmd_isotropy(args) -> int:
    g = parse_gram(args.gram)
    if len(g) != 3:
        raise InputError("--gram: isotropy needs a 3x3 matrix")
    descent = (2, 3) if args.descent else None
    try:
        cert = quad_isotropic_rank3(g, args.bound or default_search_height(), descent=descent)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(cert.to_dict(), args.out)
    return EXIT_OK


def cmd_pell(args) -> int:
    try:
        if args.bound:
            sols = pell_solutions(args.d, args.target, args.bound)
        else:
            sols = pell_orbit(args.d, args.target, args.steps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit({"D": args.d, "N": args.target, "solutions": [list(s) for s in sols]}, args.out)
    return EXIT_OK


def cmd_cone_dual(args) -> int:
    ctx = _scenario_ctx(args)
    dual = dual_cone_q(ctx.lat, ctx.mori)
    payload = {"mori": ctx.mori.to_dict(), "dual": dual.to_dict(),
               "dual_labels": [str(r) for r in dual.rays]}
    d = _figures_dir(args)
    if d is not None:
        _draw_section(ctx, d)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_mori_replay(args) -> int:
    ctx = _scenario_ctx(args)
    squares = None
    if args.squares:
        try:
            squares = [int(s) for s in args.squares.split(",")]
        except ValueError:
            raise InputError(f"--squares: expected integers, got {args.squares!r}") from None
    rep = mori_lemma_replay(ctx.hl, ctx.scn.vectors(ctx.hl, "mori_generators"), ctx.predicates(), squares)
    d = _figures_dir(args)
    if d is not None:
        _draw_section(ctx, d)
    _emit(rep.to_dict(), args.out)
    return _status_code([rep])


def cmd_orbit(args) -> int:
    ctx = _scenario_ctx(args)
    seed = _seed(ctx, args.cls)
    if args.steps < 0:
        raise InputError("--steps must be nonnegative")
    rec = orbit(ctx.hl, seed, args.steps)
    payload = rec.to_dict()
    payload["growth"] = growth_report(rec, f_push(ctx.hl))
    d = _figures_dir(args)
    if d is not None:
        _draw_orbit(ctx, rec, d)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_periodicity(args) -> int:
    ctx = _scenario_ctx(args)
    seed = _seed(ctx, args.cls)
    if seed.is_zero():
        raise InputError("--class: the zero class has no ray")
    rep = periodicity_certificate(ctx.hl, seed, args.steps)
    _emit(rep.to_dict(), args.out)
    return _status_code([rep])


def cmd_invariant(args) -> int:
    ctx = _scenario_ctx(args)
    rep = invariant_divisor_report(ctx.hl)
    _emit(rep.to_dict(), args.out)
    return _status_code([rep])


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error code; 2 is reserved for failing claims
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="k3cone", description=__doc__)
    p.add_argument("--version", action="version", version=f"k3cone {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_arg(sp):
        sp.add_argument("--scenario", default="hilb3-deg6", help="built-in name or JSON path")

    def out_arg(sp):
        sp.add_argument("--out", help="write JSON here instead of stdout")

    def fig_arg(sp):
        sp.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")

    sp = sub.add_parser("verify", help="run the claim registry on a scenario")
    scenario_arg(sp)
    sp.add_argument("--claims", help="comma separated ids (C01,C04 or all)")
    sp.add_argument("--report", help="write the JSON report here instead of stdout")
    sp.add_argument("--timings", action="store_true", help="include elapsed_ms (breaks byte stability)")
    fig_arg(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("recheck", help="re-validate a report from its certificates")
    sp.add_argument("--report", required=True)
    out_arg(sp)
    sp.set_defaults(func=cmd_recheck)

    sp = sub.add_parser("conic", help="solutions of a binary form = target in a box")
    sp.add_argument("--gram", required=True, help="2x2 Gram matrix, e.g. '6,8;8,6'")
    sp.add_argument("--target", type=int, required=True)
    sp.add_argument("--bound", type=int, default=10)
    out_arg(sp)
    sp.set_defaults(func=cmd_conic)

    sp = sub.add_parser("isotropy", help="isotropy certificate for a ternary form")
    sp.add_argument("--gram", required=True, help="3x3 Gram matrix, e.g. '3,4,0;4,3,0;0,0,-2'")
    sp.add_argument("--bound", type=int, help="brute-force height (default from K3CONE_SEARCH_HEIGHT or 200)")
    sp.add_argument("--descent", action="store_true", help="attach the mod 8 descent trace")
    out_arg(sp)
    sp.set_defaults(func=cmd_isotropy)

    sp = sub.add_parser("pell", help="solutions of t^2 - D y^2 = target")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--target", type=int, required=True)
    sp.add_argument("--steps", type=int, default=6, help="number of smallest solutions")
    sp.add_argument("--bound", type=int, help="instead: all solutions with 0 < t <= bound")
    out_arg(sp)
    sp.set_defaults(func=cmd_pell)

    sp = sub.add_parser("cone-dual", help="the q-dual of the scenario's Mori cone")
    scenario_arg(sp)
    out_arg(sp)
    fig_arg(sp)
    sp.set_defaults(func=cmd_cone_dual)

    sp = sub.add_parser("mori-replay", help="exhaust the regions outside the Mori cone")
    scenario_arg(sp)
    sp.add_argument("--squares", help="restrict square values, e.g. '-2,-4'")
    out_arg(sp)
    fig_arg(sp)
    sp.set_defaults(func=cmd_mori_replay)

    for name, func, helptext in (
        ("orbit", cmd_orbit, "iterate f_* on a curve class"),
        ("periodicity", cmd_periodicity, "non-periodicity certificate for a class"),
    ):
        sp = sub.add_parser(name, help=helptext)
        scenario_arg(sp)
        sp.add_argument("--class", dest="cls", help="coordinates in the lattice basis, e.g. '0,-3/2,1'")
        sp.add_argument("--steps", type=int, default=20)
        out_arg(sp)
        if name == "orbit":
            fig_arg(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("invariant-divisors", help="fixed line of f^* and why it carries no effective class")
    scenario_arg(sp)
    out_arg(sp)
    sp.set_defaults(func=cmd_invariant)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ScenarioError, LatticeError, ConeError, ValueError) as exc:
        sys.stderr.write(f"k3cone: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
