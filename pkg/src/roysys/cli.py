"""Command-line front end: ``roysys <command> [options]``.

Exit status: 0 on success, 1 on domain errors or malformed input, 2 when a
resource cap (enumeration radius, horizon) is hit.  Files are written
atomically.  ``ROYSYS_PRECISION`` sets the default number of significant
digits used when rendering exact values.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from fractions import Fraction

from . import contraction, dimensions, oracle, potential, templates
from .plot import PlotInputError, render_svg
from .pwl import DomainError, MalformedSystemError, PiecewiseLinearSystem, validate
from .scalar import format_scalar, parse_scalar, to_decimal_str

EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, status: int = EXIT_DOMAIN):
        super().__init__(message)
        self.status = status


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, text: str) -> None:
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def rational(text: str) -> Fraction:
    v = parse_scalar(text)
    if not isinstance(v, Fraction):
        raise argparse.ArgumentTypeError(f"expected a finite rational, got {text!r}")
    return v


def assignment(text: str):
    """``d=value`` pairs for --omega."""
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected d=value, got {text!r}")
    d, v = text.split("=", 1)
    try:
        return int(d), parse_scalar(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def default_precision() -> int:
    raw = os.environ.get("ROYSYS_PRECISION", "12")
    try:
        p = int(raw)
    except ValueError:
        return 12
    return p if p > 0 else 12


def load_system(path: str) -> PiecewiseLinearSystem:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    return PiecewiseLinearSystem.from_json(text)


def show(x, args) -> str:
    if args.exact and isinstance(x, Fraction):
        return format_scalar(x)
    return to_decimal_str(x, args.precision)


# -- commands ------------------------------------------------------------


def cmd_validate(args) -> int:
    report = validate(load_system(args.file))
    if report.passed:
        emit(args, "passed\n")
        return EXIT_OK
    lines = [f"failed: {len(report.violations)} violation(s)"]
    for v in report.violations:
        loc = v.location if not isinstance(v.location, tuple) else "[" + ", ".join(map(format_scalar, v.location)) + "]"
        if isinstance(loc, Fraction):
            loc = format_scalar(loc)
        lines.append(f"{v.axiom} at q={loc}: {v.description}")
    sys.stderr.write("\n".join(lines) + "\n")
    return EXIT_DOMAIN


def _omegas(args) -> dict:
    out = {}
    for d, w in args.omega or ():
        if d in out:
            raise CliError(f"omega_{d} given twice")
        out[d] = w
    return out


def cmd_generate(args) -> int:
    kind = args.template
    if kind == "constant":
        system = templates.constant_template(args.n, args.q0, args.horizon or 1)
    elif kind == "random":
        system = templates.random_roy_system(args.seed, args.n, args.q0, args.horizon or 10)
    else:
        om = _omegas(args)
        if kind == "single":
            if len(om) != 1:
                raise CliError("the single template needs exactly one --omega d=value")
            (d, w), = om.items()
            params = templates.SingleExponentParams(args.n, d, w, args.epsilon)
            system = templates.single_exponent_template(params, q_max=args.horizon, cycles=args.cycles)
        else:
            if sorted(om) != list(range(args.n)):
                raise CliError(f"the intersection template needs --omega d=value for every d in 0..{args.n - 1}")
            spec = dimensions.ExponentSpectrum(tuple(om[d] for d in range(args.n)))
            params = templates.IntersectionParams(args.n, spec, args.epsilon)
            system = templates.intersection_template(params, q_max=args.horizon, cycles=args.cycles)
    emit(args, system.to_json(indent=1) + "\n")
    return EXIT_OK


def cmd_rates(args) -> int:
    system = load_system(args.file)
    if args.format == "csv":
        emit(args, contraction.trajectory_csv(system, args.precision))
        return EXIT_OK
    lo, hi, lo_at, hi_at = contraction.rate_extrema(system, args.horizon, args.tail)
    text = (
        f"lower_rate {show(lo, args)}\n"
        f"upper_rate {show(hi, args)}\n"
        f"lower_at {' '.join(show(p, args) for p in lo_at)}\n"
        f"upper_at {' '.join(show(p, args) for p in hi_at)}\n"
    )
    emit(args, text)
    return EXIT_OK


def cmd_exponents(args) -> int:
    system = load_system(args.file)
    ests = contraction.exponent_functionals(system, args.horizon, args.tail)
    n = system.n
    lines = ["k index liminf_Sk/q limsup_Sk/q omega omega_hat"]
    for e in ests:
        lines.append(
            f"{e.k} {n - e.k} {show(e.liminf_value, args)} {show(e.limsup_value, args)} "
            f"{show(e.inferred_omega, args)} {show(e.inferred_omega_hat, args)}"
        )
    lines.append(f"# {ests[0].note}")
    emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_dimension(args) -> int:
    om = _omegas(args)
    if not om:
        raise CliError("give at least one --omega d=value")
    if args.n < 1 or any(not 0 <= d < args.n for d in om):
        raise CliError(f"indices must lie in 0..{args.n - 1}")
    res = dimensions.dimension_query(args.n, om)
    lines = [
        f"hausdorff {format_scalar(res.hausdorff)}",
        f"packing {format_scalar(res.packing)}",
        f"full: {'yes' if res.is_full_hausdorff else 'no'}",
    ]
    if res.completion is not None and len(om) < args.n:
        lines.append("completion " + " ".join(format_scalar(w) for w in res.completion.omegas))
    emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    if (args.theta is None) == (args.u is None):
        raise CliError("give exactly one of --theta or --u")
    u = oracle.DirectionVector.from_theta(args.theta) if args.theta is not None else oracle.DirectionVector.from_u(args.u)
    traj = oracle.trajectory(u, args.q_max, args.step, radius_cap=args.radius_cap, workers=args.workers)
    csv_text = oracle.trajectory_csv(traj, args.precision)
    status = EXIT_OK
    if not traj.complete:
        bad = [p.q for p in traj.points if not p.complete]
        sys.stderr.write(f"radius cap {args.radius_cap} reached at {len(bad)} grid point(s), first q={bad[0]:g}\n")
        status = EXIT_RESOURCE
    emit(args, csv_text)
    if args.svg and traj.complete:
        write_atomic(args.svg, render_svg(csv_text))
    if status == EXIT_OK and args.estimate:
        for e in oracle.empirical_exponents(traj, args.tail, args.method):
            sys.stderr.write(
                f"k={e.k} omega_{u.n - e.k}~{e.inferred_omega:.6g} omega_hat_{u.n - e.k}~{e.inferred_omega_hat:.6g} ({e.note})\n"
            )
    return status


def cmd_check_potential(args) -> int:
    system = load_system(args.file)
    if args.kind == "single":
        if args.d is None:
            raise CliError("--kind single needs --d")
        spec = potential.PotentialSpec.single(system.n, args.d)
    else:
        spec = potential.PotentialSpec.intersection(system.n)
    report = potential.check_slope_inequality(spec, system)
    lines = []
    for row in potential.phi_csv_rows(report):
        lines.append(",".join(x if isinstance(x, str) else format_scalar(Fraction(x)) for x in row))
    emit(args, "\n".join(lines) + "\n")
    sys.stderr.write(f"{spec.label}: {len(report.rows)} interval(s), {len(report.violations)} violation(s)\n")
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {args.file}: {exc.strerror}") from exc
    emit(args, render_svg(text, show_delta=args.delta, title=args.title, log=args.log))
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write to this file (atomically) instead of stdout")
    common.add_argument("--precision", type=int, default=default_precision(), help="significant digits for decimals")
    common.add_argument("--exact", action="store_true", help="print rationals as p/q")

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--horizon", type=rational, help="end of the tail window (default: end of the system)")
    window.add_argument("--tail", type=rational, default=contraction.DEFAULT_TAIL, help="tail fraction, default 1/2")

    p = argparse.ArgumentParser(prog="roysys", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a Roy-system JSON file against the axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("generate", parents=[common], help="write a template or random Roy-system as JSON")
    s.add_argument("--template", choices=["constant", "single", "intersection", "random"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--omega", type=assignment, action="append", metavar="D=VALUE")
    s.add_argument("--epsilon", type=rational, default=Fraction(1, 1000))
    s.add_argument("--cycles", type=int)
    s.add_argument("--horizon", type=rational, help="q_max of the generated system")
    s.add_argument("--q0", type=rational, default=Fraction(0))
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("rates", parents=[common, window], help="average contraction rate estimates")
    s.add_argument("file")
    s.add_argument("--format", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_rates)

    s = sub.add_parser("exponents", parents=[common, window], help="exponents read off S_k(q)/q")
    s.add_argument("file")
    s.set_defaults(func=cmd_exponents)

    s = sub.add_parser("dimension", parents=[common], help="Hausdorff and packing dimension of an exponent set")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--omega", type=assignment, action="append", metavar="D=VALUE")
    s.set_defaults(func=cmd_dimension)

    s = sub.add_parser("oracle", parents=[common], help="successive minima trajectory of a concrete vector")
    s.add_argument("--theta", type=float_list)
    s.add_argument("--u", type=float_list)
    s.add_argument("--q-max", type=float, required=True)
    s.add_argument("--step", type=float, default=0.1)
    s.add_argument("--radius-cap", type=int, default=oracle.DEFAULT_RADIUS_CAP)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--tail", type=float, default=0.5)
    s.add_argument("--method", choices=["tail", "hull"], default="tail")
    s.add_argument("--estimate", action="store_true", help="print exponent estimates to stderr")
    s.add_argument("--svg", help="also write an SVG plot of L_u")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("check-potential", parents=[common], help="per-interval check of Phi' >= delta")
    s.add_argument("file")
    s.add_argument("--kind", choices=["single", "intersection"], required=True)
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_check_potential)

    s = sub.add_parser("plot", parents=[common], help="render a trajectory CSV as SVG")
    s.add_argument("file")
    s.add_argument("--delta", action="store_true", help="overlay the local rate as a step line")
    s.add_argument("--title", default="")
    s.add_argument("--log", action="store_true", help="log10 axes (for templates spanning many scales)")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "precision", 12) < 1:
        parser.error("--precision must be positive")
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.status
    except (contraction.HorizonError, oracle.RadiusCapError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RESOURCE
    except (
        MalformedSystemError,
        DomainError,
        PlotInputError,
        dimensions.InvalidSpectrumError,
        dimensions.InfeasibleSpectrumError,
        templates.UnsupportedSpectrumError,
        ValueError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
