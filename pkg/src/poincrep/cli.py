"""Command-line front door: dispatch, run manifests, CSV reports.

Every run writes two files into --out-dir: a ``<command>.csv`` report and
``manifest.json`` recording the fully resolved argv, so that a manifest
can be replayed later.  Grid and quadrature modes are deterministic, so a
replay reproduces the CSV byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .minkowski import CausalClass, FourVector, OrbitLabel, orbit_of
from .reps import GroupTag, StabilizerGroup, elementary

# ---------------------------------------------------------------------------
# small shared helpers


def _fmt_spin(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


def _parse_group(text: str) -> StabilizerGroup:
    """Accept tag names (case-insensitive) plus Z<n> for finite cyclic."""
    t = text.strip()
    low = t.lower()
    named = {
        "sl2c": StabilizerGroup.sl2c,
        "su2": StabilizerGroup.su2,
        "so21": StabilizerGroup.so21,
        "e2": StabilizerGroup.e2,
        "u1": StabilizerGroup.u1,
        "so2": StabilizerGroup.so2,
        "trivial": StabilizerGroup.trivial,
    }
    if low in named:
        return named[low]()
    if low.startswith("z") and low[1:].isdigit():
        return StabilizerGroup.cyclic(int(low[1:]))
    raise ValueError(
        f"unknown group {text!r}; use one of {', '.join(sorted(named))} or Z<n>"
    )


def _parse_irrep_label(text: str) -> OrbitLabel:
    """'E_<r>' or a bare radius; radius 0 names the zero orbit."""
    t = text.strip()
    if t.upper().startswith("E_"):
        t = t[2:]
    try:
        r = float(t)
    except ValueError:
        raise ValueError(f"cannot read an orbit radius from {text!r}") from None
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return OrbitLabel.zero()
    return OrbitLabel(CausalClass.TIMELIKE_FUTURE, r)


def _csv_bytes(rows: Sequence[Sequence[object]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue().encode("utf-8")


class RunContext:
    """Collects the report rows and resolved parameters of one run."""

    def __init__(self, command: tuple[str, ...], args: argparse.Namespace):
        self.command = command
        self.args = args
        self.rows: list[Sequence[object]] = []
        self.stdout_lines: list[str] = []

    def add(self, *row: object) -> None:
        self.rows.append(row)

    def say(self, line: str) -> None:
        self.stdout_lines.append(line)


_INTERNAL_KEYS = {"group_cmd", "sub_cmd", "replay"}


def _public_params(args: argparse.Namespace) -> dict[str, object]:
    return {
        k: v
        for k, v in sorted(vars(args).items())
        if not k.startswith("_") and k not in _INTERNAL_KEYS
    }


def _resolved_argv(command: tuple[str, ...], args: argparse.Namespace) -> list[str]:
    argv = list(command)
    for key, value in _public_params(args).items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def _finish(ctx: RunContext, started: float) -> int:
    out_dir = Path(ctx.args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_name = "-".join(ctx.command) + ".csv"
    report_path = out_dir / report_name
    report_path.write_bytes(_csv_bytes(ctx.rows))
    manifest = {
        "command": list(ctx.command),
        "argv": _resolved_argv(ctx.command, ctx.args),
        "parameters": _public_params(ctx.args),
        "seed": ctx.args.seed,
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
        "report": report_name,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8"
    )
    for line in ctx.stdout_lines:
        print(line)
    return 0


# ---------------------------------------------------------------------------
# orbit subcommands


def _run_orbit_su2_tensor(ctx: RunContext) -> None:
    from .kirillov import su2_tensor_decompose

    spins = su2_tensor_decompose(ctx.args.j, ctx.args.l)
    ctx.say(" ".join(_fmt_spin(s) for s in spins))
    ctx.add("j", float(ctx.args.j))
    ctx.add("l", float(ctx.args.l))
    for s in spins:
        ctx.add("spin", float(s))


def _run_orbit_sl2c_label(ctx: RunContext) -> None:
    v = FourVector.from_text(ctx.args.point)
    label = orbit_of(v)
    ctx.say(f"{label.causal_class.name} radius {label.radius:.12g}")
    ctx.add("causal_class", label.causal_class.name)
    ctx.add("radius", label.radius)
    ctx.add("invariant", label.invariant())


def _run_orbit_flux(ctx: RunContext) -> None:
    from .kirillov import su2_flux

    res = su2_flux(ctx.args.j, n_nodes=ctx.args.resolution)
    ctx.say(f"flux {res.value:.12g} converged {res.converged}")
    ctx.add("j", float(ctx.args.j))
    ctx.add("flux", res.value)
    ctx.add("n_theta", res.n_theta)
    ctx.add("n_phi", res.n_phi)
    ctx.add("rel_step", res.rel_step)
    ctx.add("converged", res.converged)


# ---------------------------------------------------------------------------
# rep subcommands


def _run_rep_tensor(ctx: RunContext) -> None:
    from .reps import DirectIntegralDecomposition, elementary_tensor

    dec = elementary_tensor(
        elementary(ctx.args.r1), elementary(ctx.args.r2), seed=ctx.args.seed
    )
    if not isinstance(dec, DirectIntegralDecomposition):
        raise ValueError(f"unsupported pair: {dec.reason}")
    parts = []
    for term in dec.discrete_terms:
        ctx.add("discrete_radius", term.radius)
        parts.append(f"discrete r={term.radius:.12g}")
    for fam in dec.continuum_families:
        ctx.add("continuum_min", fam.r_min)
        ctx.add("continuum_max", fam.r_max)
        ctx.add("continuum_fiber", fam.fiber.kind.name)
        ctx.add("continuum_measure", fam.measure)
        parts.append(f"continuum ({fam.r_min:.12g}, {fam.r_max:.12g})")
    ctx.say("; ".join(parts))


def _run_rep_triangle(ctx: RunContext) -> None:
    from .reps import triangle_fiber

    rep = triangle_fiber(ctx.args.r1, ctx.args.r2, ctx.args.r, seed=ctx.args.seed)
    dim = rep.empirical_dim if rep.empirical_dim is not None else ""
    ctx.say(f"status {rep.status} dim {dim}")
    ctx.add("status", rep.status)
    ctx.add("empirical_dim", dim)
    if rep.time_component is not None:
        ctx.add("time_component", rep.time_component)
    if rep.spatial_radius is not None:
        ctx.add("spatial_radius", rep.spatial_radius)
    for i, point in enumerate(rep.points):
        ctx.add("point", i, *[float(x) for x in point])


def _run_rep_quad(ctx: RunContext) -> None:
    from .reps import quadrilateral_shape_space

    try:
        edges = [float(p) for p in ctx.args.edges.split(",")]
    except ValueError:
        raise ValueError(f"bad --edges {ctx.args.edges!r}") from None
    if len(edges) != 3:
        raise ValueError("--edges needs exactly three comma-separated radii")
    rep = quadrilateral_shape_space(*edges, ctx.args.total, seed=ctx.args.seed)
    ctx.say(f"feasible {rep.feasible} samples {len(rep.samples)}")
    ctx.add("feasible", rep.feasible)
    ctx.add("n_samples", len(rep.samples))
    for tag, count in sorted(rep.isotropy_counts.items(), key=lambda kv: kv[0].name):
        ctx.add("isotropy", tag.name, count)
    for i, sample in enumerate(rep.samples):
        for k, edge in enumerate(sample):
            ctx.add("edge_vector", i, k, *[float(x) for x in edge])


# ---------------------------------------------------------------------------
# intw subcommands


def _run_intw_bridge(ctx: RunContext) -> None:
    from .intertwiners import bridge

    b = bridge(
        _parse_group(ctx.args.group),
        _parse_group(ctx.args.h1),
        _parse_group(ctx.args.h2),
    )
    inter = b.intersection.tag.value
    if b.intersection.tag is GroupTag.CYCLIC:
        inter = f"Z{b.intersection.order}"
    ctx.say(f"dim {b.dim} intersection {inter}")
    ctx.add("dim", b.dim)
    ctx.add("intersection", inter)


def _run_intw_cocycle_dim(ctx: RunContext) -> None:
    from .intertwiners import cocycle_solution_dimension

    label = _parse_irrep_label(ctx.args.irrep)
    dim = cocycle_solution_dimension(label, seed=ctx.args.seed)
    ctx.say(str(dim))
    ctx.add("irrep", ctx.args.irrep)
    ctx.add("solution_dimension", dim)


# ---------------------------------------------------------------------------
# statesum subcommands


def _load_statesum_inputs(ctx: RunContext):
    from . import statesum as ss

    t = ss.load_triangulation(Path(ctx.args.complex).read_text(encoding="utf-8"))
    cfg = ss.AmplitudeConfig()
    if ctx.args.config:
        cfg = ss.load_config(Path(ctx.args.config).read_text(encoding="utf-8"))
    if ctx.args.seed != cfg.seed:
        from dataclasses import replace

        cfg = replace(cfg, seed=ctx.args.seed)
    return ss, t, cfg


def _run_statesum_eval(ctx: RunContext) -> None:
    ss, t, cfg = _load_statesum_inputs(ctx)
    counts = t.counts
    ctx.add("edges", counts[0])
    ctx.add("triangles", counts[1])
    ctx.add("tetrahedra", counts[2])
    ctx.add("simplices", counts[3])
    if ctx.args.labels:
        lab = ss.load_labelling(Path(ctx.args.labels).read_text(encoding="utf-8"), t)
        rep = ss.admissible(t, lab)
        ctx.add("labelling_admissible", rep.passed)
        ctx.add("labelling_collinear", len(rep.collinear))
        if rep.passed:
            trace = ss.five_j(t.simplices[0], lab, cfg)
            ctx.add("labelled_trace_plus", trace.plus_value)
            ctx.add("labelled_trace_minus", trace.minus_value)
    res = ss.evaluate_Z(t, cfg)
    ctx.say(f"Z {res.value:.12g} ({res.integrator})")
    ctx.add("Z", res.value)
    if res.std_error is not None:
        ctx.add("std_error", res.std_error)
    ctx.add("integrator", res.integrator)
    ctx.add("n_evaluations", res.n_evaluations)
    ctx.add("admissible_fraction", res.admissible_fraction)
    ctx.add("five_j_factor", res.five_j_factor)
    ctx.add("cutoff", res.cutoff)
    ctx.add("normalization", res.normalization)
    ctx.add("backend", res.backend)


def _run_statesum_sphericity(ctx: RunContext) -> None:
    ss, t, cfg = _load_statesum_inputs(ctx)
    if ctx.args.labels:
        lab = ss.load_labelling(Path(ctx.args.labels).read_text(encoding="utf-8"), t)
    else:
        lab = ss.causal_chain_labelling(t, seed=ctx.args.seed)
    rep = ss.sphericity_check(t, lab, cfg, trials=ctx.args.trials)
    ctx.say(f"max_residual {rep.max_residual:.6g} at {rep.n_nodes} nodes")
    ctx.add("max_residual", rep.max_residual)
    ctx.add("trials", rep.trials)
    ctx.add("n_nodes", rep.n_nodes)
    ctx.add("n_simplices", rep.n_simplices)
    if ctx.args.sweep:
        sweep = ss.sphericity_sweep(t, lab, cfg, trials=max(1, ctx.args.trials // 5))
        for n_nodes, residual in zip((64, 256, 1024, 4096), sweep):
            ctx.add("sweep_residual", n_nodes, residual)


# ---------------------------------------------------------------------------
# replay


def _run_replay(args: argparse.Namespace) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    argv = list(manifest["argv"])
    if args.out_dir is not None:
        # override the recorded output directory
        try:
            k = argv.index("--out-dir")
            argv[k + 1] = args.out_dir
        except ValueError:
            argv.extend(["--out-dir", args.out_dir])
    return dispatch(argv)


# ---------------------------------------------------------------------------
# parser wiring


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed for sampled steps")
    p.add_argument("--out-dir", default=".", help="directory for report + manifest")
    p.add_argument("--config", default=None, help="flat key = value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poincrep",
        description="Orbit representation calculus and state-sum evaluation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="group_cmd", required=True)

    handlers: dict[tuple[str, str], Callable[[RunContext], None]] = {}

    def leaf(group: argparse._SubParsersAction, g: str, name: str, fn, help_: str):
        p = group.add_parser(name, help=help_)
        _add_common(p)
        handlers[(g, name)] = fn
        return p

    orbit = parser_sub(top, "orbit", "orbit classification and the shell calculus")
    p = leaf(orbit, "orbit", "su2-tensor", _run_orbit_su2_tensor, "compact spin products")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p = leaf(orbit, "orbit", "sl2c-label", _run_orbit_sl2c_label, "classify a 4-vector")
    p.add_argument("--point", required=True, help="t,x1,x2,x3")
    p = leaf(orbit, "orbit", "flux", _run_orbit_flux, "symplectic flux through a spin shell")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--resolution", type=int, default=10000)

    rep = parser_sub(top, "rep", "orbit representation objects")
    p = leaf(rep, "rep", "tensor", _run_rep_tensor, "decompose a product of two objects")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p = leaf(rep, "rep", "triangle", _run_rep_triangle, "sample a two-sided constraint fiber")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p = leaf(rep, "rep", "quad", _run_rep_quad, "closed 4-gon shape space")
    p.add_argument("--edges", required=True, help="three comma-separated radii")
    p.add_argument("--total", type=float, required=True)

    intw = parser_sub(top, "intw", "intertwiner spaces")
    p = leaf(intw, "intw", "bridge", _run_intw_bridge, "double-coset tangent dimension")
    p.add_argument("--group", required=True)
    p.add_argument("--h1", required=True)
    p.add_argument("--h2", required=True)
    p = leaf(intw, "intw", "cocycle-dim", _run_intw_cocycle_dim, "invariant field dimension")
    p.add_argument("--irrep", required=True, help="E_<radius> or a bare radius")

    statesum = parser_sub(top, "statesum", "triangulation state sums")
    p = leaf(statesum, "statesum", "eval", _run_statesum_eval, "evaluate Z on a complex")
    p.add_argument("--complex", required=True, help="triangulation file")
    p.add_argument("--labels", default=None, help="edge color file")
    p = leaf(statesum, "statesum", "sphericity", _run_statesum_sphericity, "pasting-order residuals")
    p.add_argument("--complex", required=True, help="triangulation file")
    p.add_argument("--labels", default=None, help="edge color file")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--sweep", action="store_true", help="add a node-count sweep")

    replay = top.add_parser("replay", help="re-run a recorded manifest")
    replay.add_argument("--manifest", required=True)
    replay.add_argument("--out-dir", default=None)
    replay.set_defaults(replay=True)

    parser.set_defaults(_handlers=handlers)
    return parser


def parser_sub(top: argparse._SubParsersAction, name: str, help_: str):
    p = top.add_parser(name, help=help_)
    return p.add_subparsers(dest="sub_cmd", required=True)


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one command; 0 on success, 1 on computation error, 2 on usage."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return code
    if getattr(args, "replay", False):
        try:
            return _run_replay(args)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    handler = args._handlers[(args.group_cmd, args.sub_cmd)]
    ctx = RunContext((args.group_cmd, args.sub_cmd), args)
    started = time.perf_counter()
    try:
        handler(ctx)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return _finish(ctx, started)


def main() -> None:
    sys.exit(dispatch())
