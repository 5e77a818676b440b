"""Command-line surface: every check as a reproducible JSON or TSV report."""

import argparse
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional, TextIO

from . import __version__
from .config import get_settings
from .core.logging_config import setup_logging
from .coupling import (
    QuadratureGrid,
    cm_helicity_lifts,
    cm_helicity_pair,
    d_exchange_identity,
    even_s_table,
    jw_plane_wave,
    jw_relation_factor,
    jw_reorder_factor,
    jw_reordered,
    ls_exclusion_check,
    partial_wave_project,
    partial_wave_reorder_factor,
)
from .errors import NotProportional, NumericOverflow, OracleDisagreement, SpinStatError
from .geometry import FrameKind, bisecting_frames, parallel_frames
from .numerics import HalfInt
from .states import ParticleDesc
from .su2 import SU2Element, Vec3, from_axis_angle, from_euler_zyz
from .twoparticle import (
    Builder,
    OrderedPairDesc,
    enumerate_multisets,
    exchange_phase,
    extrapolate_to_zero,
    fit_phase,
    multiset_count,
    pauli_norm,
    predicted_exchange_phase,
    quick_exchange_phase,
)
from .wigner import big_d, cg_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

PHASE_DIGITS = 12


class UsageError(Exception):
    """Bad command-line input, reported with the offending flag."""


# Input parsing


def parse_vector(text: str, flag: str) -> Vec3:
    """Parse "x,y,z" into a unit Vec3, rejecting zero vectors."""
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as e:
        raise UsageError(f"{flag}: cannot parse {text!r} as x,y,z") from e
    if len(parts) != 3:
        raise UsageError(f"{flag}: expected three comma-separated numbers, got {text!r}")
    v = Vec3(*parts)
    if v.norm() == 0.0:
        raise UsageError(f"{flag}: direction must not be the zero vector")
    return v.normalized()


def parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise UsageError(f"{flag}: cannot parse {text!r} as a list of numbers") from e


def spin(twice: int, flag: str) -> HalfInt:
    if twice < 0:
        raise UsageError(f"{flag}: must be non-negative, got {twice}")
    return HalfInt(twice)


def projection(twice_m: Optional[int], s: HalfInt, flag: str) -> HalfInt:
    """Projection from a twice-value, defaulting to m = s."""
    if twice_m is None:
        return s
    if abs(twice_m) > s.twice or (s.twice - twice_m) % 2:
        raise UsageError(f"{flag}: {twice_m}/2 is not a projection of spin {s}")
    return HalfInt(twice_m)


# Output


def _complex(z: complex, digits: Optional[int] = None) -> list[float]:
    re, im = z.real, z.imag
    if digits is not None:
        re, im = round(re, digits), round(im, digits)
    return [float(re) + 0.0, float(im) + 0.0]


def _su2(g: SU2Element) -> list[float]:
    return [g.w, g.x, g.y, g.z]


def _vec(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_cell(v) for v in value)
    return str(value)


def render(report: dict[str, Any], fmt: str) -> str:
    """Serialize a report; identical inputs give identical bytes."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"

    results = report["results"]
    buffer = io.StringIO()
    if isinstance(results, dict):
        buffer.write("key\tvalue\n")
        for key, value in results.items():
            buffer.write(f"{key}\t{_cell(value)}\n")
    else:
        header = list(results[0].keys()) if results else []
        buffer.write("\t".join(header) + "\n")
        for row in results:
            buffer.write("\t".join(_cell(row[h]) for h in header) + "\n")
    return buffer.getvalue()


# Commands


def cmd_wigner_d(args: argparse.Namespace) -> tuple[dict, Any]:
    s = spin(args.two_s, "--two-s")
    if args.euler is not None:
        alpha, beta, gamma = parse_floats(args.euler, "--euler")[:3]
        g = from_euler_zyz(alpha, beta, gamma)
    else:
        g = from_axis_angle(parse_vector(args.axis, "--axis"), args.angle)
    d = big_d(s, g)
    rows = [[_complex(complex(z)) for z in row] for row in d.entries]
    inputs = {"two_s": args.two_s, "element": _su2(g)}
    return inputs, {"matrix": rows, "unitary": d.is_unitary()}


def cmd_cg(args: argparse.Namespace) -> tuple[dict, Any]:
    j1, j2 = spin(args.two_j1, "--two-j1"), spin(args.two_j2, "--two-j2")
    rows = []
    for cg in cg_table(j1, j2):
        if args.two_J is not None and cg.J.twice != args.two_J:
            continue
        v = cg.value
        rows.append({
            "J": str(cg.J), "M": str(cg.M), "m1": str(cg.m1), "m2": str(cg.m2),
            "sign": v.sign, "squared": str(v.radicand), "value": float(cg),
        })
    return {"two_j1": args.two_j1, "two_j2": args.two_j2, "two_J": args.two_J}, rows


def cmd_frames(args: argparse.Namespace) -> tuple[dict, Any]:
    v_a, v_b = parse_vector(args.pa, "--pa"), parse_vector(args.pb, "--pb")
    seed = parse_vector(args.seed, "--seed") if args.seed else None
    build = parallel_frames if args.kind == FrameKind.PARALLEL.label else bisecting_frames
    pair = build(v_a, v_b, seed=seed, sign=-1 if args.flip else 1)
    results = {
        "frame_a": [_vec(pair.frame_a.x), _vec(pair.frame_a.y), _vec(pair.frame_a.z)],
        "frame_b": [_vec(pair.frame_b.x), _vec(pair.frame_b.y), _vec(pair.frame_b.z)],
        "k_hat": _vec(pair.k_hat),
        "theta": pair.theta,
        "r_ab": _su2(pair.r_ab),
        "r_ba": _su2(pair.r_ba),
    }
    inputs = {"pa": _vec(v_a), "pb": _vec(v_b), "kind": args.kind, "flip": args.flip}
    return inputs, results


def _ordered(args: argparse.Namespace) -> OrderedPairDesc:
    s_a, s_b = spin(args.two_s_a, "--two-s-a"), spin(args.two_s_b, "--two-s-b")
    m_a = projection(args.two_m_a, s_a, "--two-m-a")
    m_b = projection(args.two_m_b, s_b, "--two-m-b")
    v_a, v_b = parse_vector(args.pa, "--pa"), parse_vector(args.pb, "--pb")
    seed = parse_vector(args.seed, "--seed") if args.seed else None
    return OrderedPairDesc(
        ParticleDesc(args.q_a, v_a, 1.0, s_a, m_a),
        ParticleDesc(args.q_b, v_b, 1.0, s_b, m_b),
        args.r12_sign,
        seed,
    )


def cmd_exchange_phase(args: argparse.Namespace) -> tuple[dict, Any]:
    o = _ordered(args)
    builder = Builder(args.basis)
    phase = exchange_phase(builder, o, get_settings().tolerance)
    inputs = {
        "basis": builder.value, "two_s_a": args.two_s_a, "two_s_b": args.two_s_b,
        "pa": _vec(o.first.p_dir), "pb": _vec(o.second.p_dir), "r12_sign": args.r12_sign,
    }
    results = {
        "phase": _complex(phase, PHASE_DIGITS),
        "predicted": predicted_exchange_phase(builder, o),
    }
    return inputs, results


def cmd_pauli(args: argparse.Namespace) -> tuple[dict, Any]:
    s = spin(args.two_s, "--two-s")
    m = projection(args.two_m, s, "--two-m")
    eps = parse_floats(args.eps, "--eps")
    if not eps:
        raise UsageError("--eps: need at least one value")
    v_a, v_b = parse_vector(args.pa, "--pa"), parse_vector(args.pb, "--pb")
    norms = pauli_norm(Builder(args.basis), "q", v_a, v_b, s, m, eps, r12_sign=args.r12_sign)
    rows = [{"eps": e, "norm": n} for e, n in zip(eps, norms)]
    rows.append({"eps": 0.0, "norm": extrapolate_to_zero(eps, norms)})
    return {"basis": args.basis, "two_s": args.two_s, "two_m": m.twice}, rows


def cmd_even_s(args: argparse.Namespace) -> tuple[dict, Any]:
    s = spin(args.two_s, "--two-s")
    if s.twice == 0:
        raise UsageError("--two-s: spin zero has a single coupled state")
    settings = get_settings()
    table = even_s_table(s, args.eps, ratio=settings.forbidden_ratio)
    results = {str(S): "allowed" if ok else "forbidden" for S, ok, _ in table}
    return {"two_s": args.two_s, "eps": args.eps}, results


def cmd_jw_check(args: argparse.Namespace) -> tuple[dict, Any]:
    s_a, s_b = spin(args.two_s_a, "--two-s-a"), spin(args.two_s_b, "--two-s-b")
    lam_a = projection(args.two_lam_a, s_a, "--two-lam-a")
    lam_b = projection(args.two_lam_b, s_b, "--two-lam-b")
    p = parse_vector(args.p, "--p")
    lifts = cm_helicity_lifts(p)
    tol = get_settings().tolerance

    jw = jw_plane_wave("a", "b", s_a, lam_a, s_b, lam_b, p, convention=args.convention,
                       lifts=lifts)
    sym = cm_helicity_pair("a", "b", s_a, lam_a, s_b, lam_b, p, lifts=lifts)
    rev = jw_reordered("a", "b", s_a, lam_a, s_b, lam_b, p, convention=args.convention,
                       lifts=lifts)
    results: dict[str, Any] = {
        "relation": _complex(fit_phase(sym, jw, tol), PHASE_DIGITS),
        "relation_expected": _complex(jw_relation_factor(s_b, lam_b, args.convention)),
        "reorder": _complex(fit_phase(jw, rev, tol), PHASE_DIGITS),
        "reorder_expected": _complex(jw_reorder_factor(s_a, lam_a, s_b, lam_b, args.convention)),
    }

    if args.two_J is not None:
        J = spin(args.two_J, "--two-J")
        M = projection(args.two_M, J, "--two-M") if args.two_M is not None else HalfInt(J.twice % 2)
        lhs, rhs = d_exchange_identity(J, M, lam_a, lam_b, from_euler_zyz(0.3, 1.1, -0.7))
        grid = QuadratureGrid.for_rank(J, get_settings().grid_refine)
        kwargs = dict(s_a=s_a, s_b=s_b, convention=args.convention)
        forward = partial_wave_project(J, M, lam_a, lam_b, grid, **kwargs)
        backward = partial_wave_project(J, M, lam_a, lam_b, grid, reorder=True, **kwargs)
        results["d_identity_residual"] = abs(lhs - rhs)
        results["partial_wave_reorder"] = _complex(
            forward.inner(backward) / forward.inner(forward), PHASE_DIGITS
        )
        results["partial_wave_expected"] = partial_wave_reorder_factor(
            J, s_a, s_b, lam_a, lam_b, args.convention
        )
    inputs = {
        "two_s_a": args.two_s_a, "two_s_b": args.two_s_b, "two_lam_a": lam_a.twice,
        "two_lam_b": lam_b.twice, "p": _vec(p), "convention": args.convention,
    }
    return inputs, results


def cmd_ls_table(args: argparse.Namespace) -> tuple[dict, Any]:
    s = spin(args.two_s, "--two-s")
    settings = get_settings()
    refine = args.refine or settings.grid_refine
    table = ls_exclusion_check(
        s, args.j_max, refine=refine, convention=args.convention,
        ratio=settings.forbidden_ratio,
    )
    rows = [
        {"J": str(r.J), "L": str(r.L), "S": str(r.S),
         "allowed": r.allowed, "norm_sq": r.norm_sq}
        for r in table
    ]
    inputs = {"two_s": args.two_s, "j_max": args.j_max, "convention": args.convention}
    return inputs, rows


def cmd_count_states(args: argparse.Namespace) -> tuple[dict, Any]:
    if args.entities < 0 or args.states < 0:
        raise UsageError("--entities/--states: counts must be non-negative")
    results: dict[str, Any] = {"count": multiset_count(args.entities, args.states)}
    if args.enumerate:
        states = [f"s{i}" for i in range(args.states)]
        results["multisets"] = [
            {str(k): n for k, n in m.entries}
            for m in enumerate_multisets(states, args.entities)
        ]
    return {"entities": args.entities, "states": args.states}, results


def cmd_quick_exchange(args: argparse.Namespace) -> tuple[dict, Any]:
    s_a, s_b = spin(args.two_s_a, "--two-s-a"), spin(args.two_s_b, "--two-s-b")
    m_a = projection(args.two_m_a, s_a, "--two-m-a")
    m_b = projection(args.two_m_b, s_b, "--two-m-b")
    phase = quick_exchange_phase(s_a, m_a, s_b, m_b, args.theta, args.phi, args.hold)
    inputs = {"two_s_a": args.two_s_a, "two_s_b": args.two_s_b, "theta": args.theta,
              "phi": args.phi, "hold": args.hold}
    return inputs, {"phase": _complex(phase, PHASE_DIGITS)}


# Parser


def _add_pair_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--two-s-a", type=int, required=True, help="twice the spin of particle a")
    p.add_argument("--two-s-b", type=int, required=True, help="twice the spin of particle b")
    p.add_argument("--two-m-a", type=int, default=None, help="twice m_a (default s_a)")
    p.add_argument("--two-m-b", type=int, default=None, help="twice m_b (default s_b)")
    p.add_argument("--q-a", default="a", help="intrinsic label of particle a")
    p.add_argument("--q-b", default="b", help="intrinsic label of particle b")
    p.add_argument("--pa", required=True, help="direction of a as x,y,z")
    p.add_argument("--pb", required=True, help="direction of b as x,y,z")
    p.add_argument("--seed", default=None, help="y axis for collinear directions")
    p.add_argument("--r12-sign", type=int, choices=(1, -1), default=1,
                   help="sign of the ordering half-turn")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinstat",
        description="Single-valued spin states, exchange phases and exclusion rules.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=("json", "tsv"), default=None,
                        help="report format (default from SPINSTAT_OUTPUT_FORMAT)")
    parser.add_argument("--out", type=Path, default=None, help="also write the report here")
    parser.add_argument("--log-level", default=None, help="override SPINSTAT_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner-d", help="dump D^s(g)")
    p.add_argument("--two-s", type=int, required=True)
    p.add_argument("--axis", default="0,0,1", help="rotation axis as x,y,z")
    p.add_argument("--angle", type=float, default=0.0, help="rotation angle in radians")
    p.add_argument("--euler", default=None, help="z-y-z angles alpha,beta,gamma")
    p.set_defaults(handler=cmd_wigner_d)

    p = sub.add_parser("cg", help="Clebsch-Gordan table")
    p.add_argument("--two-j1", type=int, required=True)
    p.add_argument("--two-j2", type=int, required=True)
    p.add_argument("--two-J", type=int, default=None, help="restrict to one total J")
    p.set_defaults(handler=cmd_cg)

    p = sub.add_parser("frames", help="symmetric frames of a pair of directions")
    p.add_argument("--pa", required=True)
    p.add_argument("--pb", required=True)
    p.add_argument("--kind", choices=[k.label for k in FrameKind], default="parallel")
    p.add_argument("--seed", default=None)
    p.add_argument("--flip", action="store_true", help="use the -pi half-turn for r_ab")
    p.set_defaults(handler=cmd_frames)

    p = sub.add_parser("exchange-phase", help="exchange phase of an ordered pair builder")
    p.add_argument("--basis", choices=[b.value for b in Builder], default="canonical")
    _add_pair_args(p)
    p.set_defaults(handler=cmd_exchange_phase)

    p = sub.add_parser("pauli", help="identical-particle norms as p_b approaches p_a")
    p.add_argument("--basis", choices=[b.value for b in Builder], default="canonical")
    p.add_argument("--two-s", type=int, required=True)
    p.add_argument("--two-m", type=int, default=None)
    p.add_argument("--pa", default="0,0,1")
    p.add_argument("--pb", default="1,0,0", help="direction of approach")
    p.add_argument("--eps", default="1e-1,1e-2,1e-3")
    p.add_argument("--r12-sign", type=int, choices=(1, -1), default=1)
    p.set_defaults(handler=cmd_pauli)

    p = sub.add_parser("even-s", help="allowed total spins of two identical particles")
    p.add_argument("--two-s", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-3)
    p.set_defaults(handler=cmd_even_s)

    p = sub.add_parser("jw-check", help="centre-of-mass helicity relations")
    p.add_argument("--two-s-a", type=int, required=True)
    p.add_argument("--two-s-b", type=int, required=True)
    p.add_argument("--two-lam-a", type=int, default=None)
    p.add_argument("--two-lam-b", type=int, default=None)
    p.add_argument("--p", default="0.48,0.6,0.64", help="direction of particle a")
    p.add_argument("--two-J", type=int, default=None, help="also check the partial wave")
    p.add_argument("--two-M", type=int, default=None)
    p.add_argument("--convention", choices=("yz", "y"), default="yz")
    p.set_defaults(handler=cmd_jw_check)

    p = sub.add_parser("ls-table", help="odd L+S exclusion table")
    p.add_argument("--two-s", type=int, required=True)
    p.add_argument("--j-max", type=int, default=2)
    p.add_argument("--refine", type=int, default=None)
    p.add_argument("--convention", choices=("yz", "y"), default="yz")
    p.set_defaults(handler=cmd_ls_table)

    p = sub.add_parser("count-states", help="order-free multiset count")
    p.add_argument("--entities", type=int, required=True)
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--enumerate", action="store_true", help="also list every multiset")
    p.set_defaults(handler=cmd_count_states)

    p = sub.add_parser("quick-exchange", help="extended-angle exchange phase")
    p.add_argument("--two-s-a", type=int, required=True)
    p.add_argument("--two-s-b", type=int, required=True)
    p.add_argument("--two-m-a", type=int, default=None)
    p.add_argument("--two-m-b", type=int, default=None)
    p.add_argument("--theta", type=float, default=math.pi / 3)
    p.add_argument("--phi", type=float, default=0.25)
    p.add_argument("--hold", choices=("first", "second"), default="second")
    p.set_defaults(handler=cmd_quick_exchange)

    return parser


def run(argv: Optional[list[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """Parse arguments, run one command and write its report."""
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    settings = get_settings()
    if args.log_level:
        setup_logging(args.log_level, settings.log_file)
    fmt = args.format or settings.output_format

    handler: Callable[[argparse.Namespace], tuple[dict, Any]] = args.handler
    try:
        inputs, results = handler(args)
    except UsageError as e:
        print(f"spinstat {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NotProportional, OracleDisagreement, NumericOverflow) as e:
        logger.error(f"{args.command} failed a numeric check: {e}")
        print(f"spinstat {args.command}: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpinStatError, ValueError) as e:
        print(f"spinstat {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    report = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "tolerances": {
            "tau": settings.tolerance,
            "forbidden_ratio": settings.forbidden_ratio,
        },
    }
    text = render(report, fmt)
    stdout.write(text)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {args.out}")
    return EXIT_OK
