"""
jetcalc command line.

Usage examples::

    jetcalc check-symmetry --system kdv --phi "u*u_x + u_xxx"
    jetcalc symmetries --system burgers --order 2 --degree 2 --xt-degree 1
    jetcalc recursion --system kdv --phi u_x --steps 2
    jetcalc conservation --system kdv --order 2 --degree 2
    jetcalc covering check --file systems/kdv-potential.cov
    jetcalc covering we --rep we-abelian

Exit codes: 0 success, 1 domain failure (including a check that found a
nonzero residual), 2 usage or input errors. Errors go to stderr as
``error[<code>]: <message>``; logging goes to stderr as well, so stdout is
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

from pydantic import BaseModel, ValidationError

from config.settings import get_settings
from jetcalc import reports
from jetcalc.ansatz import AnsatzSpec
from jetcalc.calculus import GeneratingFunction
from jetcalc.conservation import self_adjointness_check
from jetcalc.context import JetContext
from jetcalc.covering import flatness_report, we_report
from jetcalc.errors import JetCalcError, NotExactError
from jetcalc.loader import load_covering, load_representation, load_system
from jetcalc.models import RunConfig
from jetcalc.parser import parse
from jetcalc.symmetry import RecursionOperator, invariant_system

logger = logging.getLogger(__name__)


class _UsageError(Exception):
    pass


# ── Argument parsing ──────────────────────────────────────────────────────────


def _build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=["text", "json"],
                        default=settings.output_format, help="Output format (default: %(default)s)")
    common.add_argument("--log-level", default=settings.log_level,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--system", help="System file or built-in name (burgers, kdv, heat)")
    system.add_argument("--independent", help="Comma-separated independent variables (instead of --system)")
    system.add_argument("--dependent", help="Comma-separated dependent variables (instead of --system)")

    ansatz = argparse.ArgumentParser(add_help=False)
    ansatz.add_argument("--order", type=int, required=True, help="Maximum jet order of the ansatz")
    ansatz.add_argument("--degree", type=int, required=True, help="Maximum jet degree of the ansatz")
    ansatz.add_argument("--xt-degree", type=int, default=0, help="Maximum degree in the independent variables")
    ansatz.add_argument("--ansatz-limit", type=int, default=settings.ansatz_limit,
                        help="Refuse ansatz families larger than this (default: %(default)s)")

    parser = argparse.ArgumentParser(
        prog="jetcalc",
        description="Exact jet-space calculus: symmetries, conservation laws and coverings of PDE systems",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parents = [common, system]

    p = sub.add_parser("reduce", parents=parents, help="Normal form of an expression on E∞")
    p.add_argument("--expr", required=True)

    for name, text in (("linearize", "Universal linearization ℓ_F"), ("adjoint", "Formal adjoint ℓ*_F")):
        p = sub.add_parser(name, parents=parents, help=text)
        p.add_argument("--restricted", action="store_true", help="Restrict coefficients to E∞")

    sub.add_parser("symmetries", parents=[*parents, ansatz], help="Solve the determining equation in an ansatz")

    p = sub.add_parser("check-symmetry", parents=parents, help="Residual ℓ̄_F(φ)")
    p.add_argument("--phi", action="append", required=True, help="Generating function (components split by ';')")

    p = sub.add_parser("bracket", parents=parents, help="Jacobi bracket {φ, ψ}")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--on-solutions", action="store_true", help="Compute on E∞ of --system")

    p = sub.add_parser("classify", parents=parents, help="Point / Contact / Higher")
    p.add_argument("--phi", required=True)

    p = sub.add_parser("recursion", parents=parents, help="Apply a recursion operator repeatedly")
    p.add_argument("--operator", help="Operator file (terms D^2, c*u, c*u_x*Dinv); default: KdV operator")
    p.add_argument("--phi", default="u_x", help="Seed generating function (default: %(default)s)")
    p.add_argument("--steps", type=int, default=1)

    p = sub.add_parser("integrate", parents=parents, help="Formal integration D_x⁻¹")
    p.add_argument("--expr", required=True)
    p.add_argument("--variable", help="Integration variable (default: first independent variable)")

    p = sub.add_parser("invariant-system", parents=parents, help="Joint system of F = 0 and φ = 0")
    p.add_argument("--phi", action="append", required=True, help="One generating function per flag")

    sub.add_parser("conservation", parents=[*parents, ansatz], help="Solve ℓ̄*_F(Υ) = 0 in an ansatz")

    p = sub.add_parser("check-conservation", parents=parents, help="Residual ℓ̄*_F(Υ)")
    p.add_argument("--upsilon", action="append", required=True)

    p = sub.add_parser("euler", parents=parents, help="Euler operator of a Lagrangian density")
    p.add_argument("--lagrangian", required=True)

    p = sub.add_parser("self-adjoint", parents=parents, help="Compare ℓ*_F with λ·ℓ_F")
    p.add_argument("--lambda", dest="conformal_factor", help="Conformal factor λ (default: 1)")

    p = sub.add_parser("check-current", parents=parents, help="Total divergence Σ D̄_i J^i")
    p.add_argument("--components", required=True, help="J components in variable order, split by ';'")

    cov = sub.add_parser("covering", help="Covering operations").add_subparsers(dest="covering_command", required=True)
    p = cov.add_parser("check", parents=[common], help="Flatness of a covering")
    p.add_argument("--file", required=True, help="Covering file or built-in (kdv-potential, cole-hopf)")
    p = cov.add_parser("we", parents=[common], help="Assemble the WE covering of KdV from A, B, C, D")
    p.add_argument("--rep", required=True, help="Representation file or built-in (we-abelian)")
    p.add_argument("--literal", action="store_true", help="Judge the printed ½(B + [B,[C,B]]) reading")
    p = cov.add_parser("nonlocal", parents=[common], help="Nonlocal symmetry residuals")
    p.add_argument("--file", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True, help="Fiber components split by ';'")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    command = args.command if args.command != "covering" else f"covering {args.covering_command}"
    phi = args.phi if isinstance(getattr(args, "phi", None), list) else [getattr(args, "phi", None) or ""]
    try:
        return RunConfig(
            command=command,
            system=getattr(args, "system", None),
            order=getattr(args, "order", 2),
            degree=getattr(args, "degree", 2),
            xt_degree=getattr(args, "xt_degree", 0),
            phi=[p for p in phi if p],
            psi=[args.psi] if getattr(args, "psi", None) else [],
            output_format=args.output_format,
            ansatz_limit=getattr(args, "ansatz_limit", get_settings().ansatz_limit),
        )
    except ValidationError as exc:
        raise _UsageError(exc.errors()[0]["msg"]) from exc


# ── Commands ──────────────────────────────────────────────────────────────────


def _system(args):
    if not args.system:
        raise _UsageError("--system is required for this command")
    return load_system(args.system)


def _context(args) -> tuple[JetContext, object]:
    """Variables from --independent/--dependent, else from --system (also returned)."""
    if args.independent or args.dependent:
        if not (args.independent and args.dependent):
            raise _UsageError("--independent and --dependent go together")
        return JetContext.from_names(args.independent, args.dependent), None
    system = _system(args)
    return system.ctx, system


def _spec(cfg: RunConfig) -> AnsatzSpec:
    return AnsatzSpec(order=cfg.order, degree=cfg.degree, xt_degree=cfg.xt_degree)


def _cmd_reduce(args, cfg):
    return reports.reduce_report(_system(args), args.expr), 0


def _cmd_linearize(args, cfg):
    return reports.linearize_report(_system(args), restricted=args.restricted), 0


def _cmd_adjoint(args, cfg):
    return reports.linearize_report(_system(args), restricted=args.restricted, adjoint=True), 0


def _cmd_symmetries(args, cfg):
    return reports.symmetries_report(_system(args), _spec(cfg), limit=cfg.ansatz_limit), 0


def _cmd_check_symmetry(args, cfg):
    report = reports.check_symmetry_report(_system(args), ";".join(cfg.phi))
    return report, 0 if report.zero else 1


def _cmd_bracket(args, cfg):
    ctx, system = _context(args)
    if args.on_solutions and system is None:
        raise _UsageError("--on-solutions needs --system")
    return reports.bracket_report(ctx, args.phi, args.psi, system if args.on_solutions else None), 0


def _cmd_classify(args, cfg):
    ctx, _ = _context(args)
    return reports.classify_report(ctx, args.phi), 0


def _cmd_recursion(args, cfg):
    system = _system(args)
    if args.steps < 1:
        raise _UsageError("--steps must be at least 1")
    if args.operator:
        lines = Path(args.operator).read_text(encoding="utf-8").splitlines()
        operator = RecursionOperator.parse(lines, system.ctx)
    else:
        operator = RecursionOperator.kdv()
    try:
        return reports.recursion_report(system, operator, args.phi, args.steps), 0
    except NotExactError as exc:
        exc.args = (reports.render_not_exact(exc, system.ctx),)
        raise


def _cmd_integrate(args, cfg):
    ctx, _ = _context(args)
    try:
        return reports.integrate_report(ctx, args.expr, args.variable or ctx.independent[0]), 0
    except NotExactError as exc:
        exc.args = (reports.render_not_exact(exc, ctx),)
        raise


def _cmd_invariant_system(args, cfg):
    system = _system(args)
    phis = [GeneratingFunction.parse(text, system.ctx) for text in cfg.phi]
    return invariant_system(system, phis), 0


def _cmd_conservation(args, cfg):
    return reports.conservation_report(_system(args), _spec(cfg), limit=cfg.ansatz_limit), 0


def _cmd_check_conservation(args, cfg):
    report = reports.check_conservation_report(_system(args), ";".join(args.upsilon))
    return report, 0 if report.zero else 1


def _cmd_euler(args, cfg):
    ctx, _ = _context(args)
    return reports.euler_report(ctx, args.lagrangian), 0


def _cmd_self_adjoint(args, cfg):
    system = _system(args)
    lam = parse(args.conformal_factor, system.ctx) if args.conformal_factor else None
    report = self_adjointness_check(system, lam)
    return report, 0 if report.self_adjoint else 1


def _cmd_check_current(args, cfg):
    report = reports.check_current_report(_system(args), args.components)
    return report, 0 if report.conserved else 1


def _cmd_covering_check(args, cfg):
    report = flatness_report(load_covering(args.file))
    return report, 0 if report.flat else 1


def _cmd_covering_we(args, cfg):
    rep = load_representation(args.rep)
    both = [we_report(rep, literal=False), we_report(rep, literal=True)]
    selected = both[1] if args.literal else both[0]
    ok = selected.flatness.flat and selected.relations_hold
    return both, 0 if ok else 1


def _cmd_covering_nonlocal(args, cfg):
    report = reports.nonlocal_report(load_covering(args.file), args.phi, args.psi)
    return report, 0 if report.symmetry else 1


_COMMANDS: dict[str, Callable] = {
    "reduce": _cmd_reduce,
    "linearize": _cmd_linearize,
    "adjoint": _cmd_adjoint,
    "symmetries": _cmd_symmetries,
    "check-symmetry": _cmd_check_symmetry,
    "bracket": _cmd_bracket,
    "classify": _cmd_classify,
    "recursion": _cmd_recursion,
    "integrate": _cmd_integrate,
    "invariant-system": _cmd_invariant_system,
    "conservation": _cmd_conservation,
    "check-conservation": _cmd_check_conservation,
    "euler": _cmd_euler,
    "self-adjoint": _cmd_self_adjoint,
    "check-current": _cmd_check_current,
    "covering check": _cmd_covering_check,
    "covering we": _cmd_covering_we,
    "covering nonlocal": _cmd_covering_nonlocal,
}


# ── Text rendering ────────────────────────────────────────────────────────────


def _indexed(label: str, values: Sequence[str]) -> list[str]:
    if len(values) == 1:
        return [f"{label}: {values[0]}"]
    return [f"{label}[{k}]: {v}" for k, v in enumerate(values)]


def _text(command: str, report) -> list[str]:
    data = report.model_dump() if isinstance(report, BaseModel) else None
    if command == "reduce" or command == "integrate":
        return [report.expression]
    if command in ("linearize", "adjoint"):
        return [*report.text, json.dumps({"shape": data["shape"], "entries": data["entries"]}, sort_keys=True)]
    if command in ("symmetries", "conservation"):
        lines = [f"dimension: {report.dimension}"]
        for k, gf in enumerate(report.basis):
            lines.append(f"[{k}] " + "; ".join(gf))
        return lines
    if command in ("check-symmetry", "check-conservation"):
        return _indexed("residual", report.residual)
    if command in ("bracket", "euler"):
        return _indexed("bracket" if command == "bracket" else "euler", report.components)
    if command == "classify":
        lines = [f"kind: {report.kind}"]
        if report.field is not None:
            lines += [f"a: ({', '.join(report.a)})", f"b: ({', '.join(report.b)})", f"field: {report.field}"]
        return lines
    if command == "recursion":
        lines = [f"R = {' + '.join(report.operator)}", f"seed: {'; '.join(report.seed)}"]
        for k, (step, residual) in enumerate(zip(report.steps, report.residuals), start=1):
            lines.append(f"R^{k}: {'; '.join(step)}")
            lines.append(f"residual R^{k}: {'; '.join(residual)}")
        return lines
    if command == "invariant-system":
        lines = [f"independent = {', '.join(report.independent)}", f"dependent = {', '.join(report.dependent)}"]
        lines += [f"equation = {e}" for e in report.equations]
        lines += [f"constraint = {c}" for c in report.constraints]
        lines += [f"trajectory = {t}" for t in report.trajectories]
        lines += [f"residual[{k}] = {'; '.join(r)}" for k, r in enumerate(report.residuals)]
        return lines
    if command == "self-adjoint":
        return [
            f"lambda: {report.conformal_factor}",
            f"self-adjoint: {_yes(report.self_adjoint)}",
            f"self-adjoint on solutions: {_yes(report.self_adjoint_on_solutions)}",
            *(f"difference {line}" for line in report.difference),
        ]
    if command == "check-current":
        return [f"divergence: {report.divergence}", f"conserved: {_yes(report.conserved)}"]
    if command == "covering check":
        return _flatness_lines(report)
    if command == "covering we":
        lines = []
        for we in report:
            lines.append(f"reading: {we.reading}")
            lines += [f"  V_x {line}" for line in we.v_x]
            lines += [f"  V_t {line}" for line in we.v_t]
            for rel in we.relations:
                lines.append(f"  relation {rel.relation}: {'holds' if rel.holds else '; '.join(rel.residual)}")
            lines += [f"  {line}" for line in _flatness_lines(we.flatness)]
        return lines
    if command == "covering nonlocal":
        lines = [f"symmetry: {_yes(report.symmetry)}"]
        lines += _indexed("determining", report.determining)
        lines += [f"fiber[{f.variable},{f.fiber}]: {f.residual}" for f in report.fiber]
        return lines
    raise AssertionError(f"no text rendering for {command}")


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _flatness_lines(report) -> list[str]:
    lines = [f"flat: {_yes(report.flat)}"]
    lines += [f"residual[{r.i},{r.j};{r.fiber}]: {r.residual}" for r in report.residuals]
    return lines


def _json(report) -> str:
    if isinstance(report, list):
        return json.dumps([r.model_dump(mode="json") for r in report], indent=2)
    return report.model_dump_json(indent=2)


# ── Entry points ──────────────────────────────────────────────────────────────


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Execute one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        parser = _build_parser()
    except RuntimeError as exc:
        print(f"error[config]: {exc}", file=stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s - %(message)s", stream=stderr)
    try:
        cfg = _run_config(args)
        report, code = _COMMANDS[cfg.command](args, cfg)
    except _UsageError as exc:
        print(f"error[usage]: {exc}", file=stderr)
        return 2
    except JetCalcError as exc:
        print(f"error[{exc.code}]: {exc}", file=stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error[io]: {exc}", file=stderr)
        return 2

    if cfg.output_format == "json":
        print(_json(report), file=stdout)
    else:
        for line in _text(cfg.command, report):
            print(line, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
