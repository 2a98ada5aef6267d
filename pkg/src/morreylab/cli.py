"""Command-line front end.

Subcommands cover the individual checks (weight class, envelope
admissibility, radius-variable conditions, operator application, scan
quasinorms, oscillation seminorm) and the verification experiment suite.
Exit codes: 0 all requested checks passed, 1 a check failed, 2 invalid
invocation.
"""

import csv
from pathlib import Path

import click
import numpy as np

from .conditions import (
    coupling_bound,
    coupling_bound_with_log,
    tail_integral,
    tail_integral_with_log,
)
from .family import default_family
from .grid import make_grid
from .harness import (
    EXPERIMENT_NAMES,
    export_report,
    load_config,
    parse_weight,
    roster_function,
    run_all,
    run_experiment,
    symbol_function,
)
from .morrey import Envelope, bmo_seminorm, envelope_class_check, morrey_quasinorm
from .operators import (
    commutator_integral,
    commutator_maximal,
    fractional_integral,
    fractional_maximal,
)
from .reporting import format_real
from .weights import ExponentSet, ap_characteristic, apq_characteristic

_OPS = {
    "integral": fractional_integral,
    "maximal": fractional_maximal,
    "commutator-integral": commutator_integral,
    "commutator-maximal": commutator_maximal,
}


def _parse_grid(spec: str):
    """Lattice from a DIM:HALF_WIDTH:CELLS spec string, e.g. 1:4:1024."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise click.BadParameter(f"grid spec {spec!r}; want DIM:HALF_WIDTH:CELLS")
    try:
        return make_grid(int(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as e:
        raise click.BadParameter(str(e)) from None


def _parsed(build):
    """Run a spec-string constructor, turning ValueError into a usage error."""
    try:
        return build()
    except ValueError as e:
        raise click.BadParameter(str(e)) from None


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def _num(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _opt(v) -> str:
    """Numeric field that may be absent (e.g. no drift once divergent)."""
    return "n/a" if v is None else f"{v:.6g}"


grid_option = click.option(
    "--grid", "grid_spec", default="1:4:512", show_default=True,
    help="Lattice spec DIM:HALF_WIDTH:CELLS.")
centers_option = click.option(
    "--centers", type=int, default=5, show_default=True,
    help="Scan-family centers per axis.")


@click.group()
def main():
    """Numerical evidence desk for fractional-integral boundedness on
    weighted Morrey-type scales."""


@main.command("check-weight")
@grid_option
@centers_option
@click.option("--weight", required=True,
              help="const:AMP | power:EXP[:AMP] | pinched:LOW:HIGH")
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--alpha", type=float, default=0.25, show_default=True,
              help="Smoothing order fixing the output exponent q.")
def check_weight(grid_spec, centers, weight, p, alpha):
    """Muckenhoupt-class reports: single exponent and the (p, q) pair."""
    grid = _parse_grid(grid_spec)
    fam = default_family(grid, centers_per_axis=centers)
    w = _parsed(lambda: parse_weight(weight))
    exps = _parsed(lambda: ExponentSet.from_p_alpha(p, alpha, grid.dim))
    single = _parsed(lambda: ap_characteristic(w, p, fam, grid))
    pair = apq_characteristic(w, exps, fam, grid)
    click.echo(f"A_{p:g}:          {single}")
    click.echo(f"A_{p:g},{exps.q:g}:      {pair}")
    if not (single.in_class and pair.in_class):
        raise SystemExit(1)


@main.command("check-envelope")
@grid_option
@centers_option
@click.option("--growth", type=float, required=True,
              help="Envelope exponent: phi(r) = r**GROWTH.")
@click.option("--weight", default="const:1", show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--weight-power", type=float, default=None,
              help="Power of the weight inside the measure [default: p].")
def check_envelope(grid_spec, centers, growth, weight, p, weight_power):
    """Structural admissibility of a power envelope for a weighted measure:
    small-radius decay of the normalized ball mass and a positive floor at
    unit scale."""
    grid = _parse_grid(grid_spec)
    fam = default_family(grid, centers_per_axis=centers)
    w = _parsed(lambda: parse_weight(weight))
    wpow = p if weight_power is None else weight_power
    rep = envelope_class_check(Envelope.power_radial(growth), w, wpow, fam, grid)
    click.echo(f"small-radius decay: {_yesno(rep.small_r_decay)}")
    click.echo(f"positive floor:     {_yesno(rep.positive_floor)} "
               f"(floor {rep.floor_value:.6g})")
    if not (rep.small_r_decay and rep.positive_floor):
        raise SystemExit(1)


@main.command("check-conditions")
@grid_option
@centers_option
@click.option("--input-growth", type=float, default=0.3, show_default=True,
              help="Input envelope exponent.")
@click.option("--output-growth", type=float, default=None,
              help="Output envelope exponent [default: input * q/p].")
@click.option("--weight", default="const:1", show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--alpha", type=float, default=0.25, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True,
              help="Lower endpoint of the tail integral.")
@click.option("--with-log", is_flag=True,
              help="Commutator variant with the ln(e + t/r) factor.")
def check_conditions(grid_spec, centers, input_growth, output_growth, weight,
                     p, alpha, delta, with_log):
    """Radius-variable sufficient conditions: the tail integral of the
    supremized majorant and the envelope-coupling bound."""
    grid = _parse_grid(grid_spec)
    fam = default_family(grid, centers_per_axis=centers)
    w = _parsed(lambda: parse_weight(weight))
    exps = _parsed(lambda: ExponentSet.from_p_alpha(p, alpha, grid.dim))
    q = exps.q
    phi = Envelope.power_radial(input_growth)
    mu = input_growth * q / p if output_growth is None else output_growth
    psi = Envelope.power_radial(mu)
    if with_log:
        tail = tail_integral_with_log(phi, p, w, q, delta, fam.centers, grid)
        coup = coupling_bound_with_log(phi, p, psi, q, w, fam, grid)
    else:
        tail = tail_integral(phi, p, w, q, delta, fam.centers, grid)
        coup = coupling_bound(phi, p, psi, q, w, fam, grid)
    click.echo(f"tail integral: value {tail.value:.6g}  "
               f"exponent {_opt(tail.tail_exponent)} ({tail.tail_method})  "
               f"divergent: {_yesno(tail.divergent)}")
    click.echo(f"coupling:      value {coup.value:.6g}  "
               f"drift {_opt(coup.drift)}  stable: {_yesno(bool(coup.stable))}")
    if not (tail.passes and coup.passes):
        click.echo("verdict: FAIL")
        raise SystemExit(1)
    click.echo("verdict: pass")


@main.command("apply-op")
@grid_option
@click.option("--op", type=click.Choice(sorted(_OPS)), default="integral",
              show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--function", "function_spec", default="indicator:1",
              show_default=True,
              help="indicator:R | smooth:R | singular:GAMMA | zero")
@click.option("--symbol", "symbol_spec", default="log", show_default=True,
              help="Oscillation symbol for the commutator variants.")
@click.option("--p", type=float, default=2.0, show_default=True,
              help="Integrability exponent (validates singular rosters).")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Write the output field as CSV.")
def apply_op(grid_spec, op, alpha, function_spec, symbol_spec, p, out):
    """Apply a smoothing operator (or its commutator) to a roster function
    and report the values nearest the origin and at the peak."""
    grid = _parse_grid(grid_spec)
    entry = _parsed(lambda: roster_function(function_spec, grid, p))
    if op.startswith("commutator"):
        b = _parsed(lambda: symbol_function(symbol_spec, grid))
        field = _parsed(lambda: _OPS[op](b, entry.f, alpha))
    else:
        field = _parsed(lambda: _OPS[op](entry.f, alpha))
    vals, pts = field.values, grid.points
    k0 = int(np.argmin(np.sum(pts * pts, axis=-1)))
    kp = int(np.argmax(np.abs(vals)))
    click.echo(f"{op} [alpha={alpha:g}] of {function_spec}:")
    click.echo(f"  nearest origin: {vals[k0]:.9g} at {tuple(map(float, pts[k0]))}")
    click.echo(f"  peak |value|:   {abs(vals[kp]):.9g} at {tuple(map(float, pts[kp]))}")
    if out is not None:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i + 1}" for i in range(grid.dim)] + ["value"])
            for pt, v in zip(pts, vals):
                writer.writerow([format_real(c) for c in pt] + [format_real(v)])
        click.echo(f"  wrote {out}")


@main.command("morrey-norm")
@grid_option
@centers_option
@click.option("--function", "function_spec", default="indicator:1",
              show_default=True)
@click.option("--growth", type=float, default=0.5, show_default=True,
              help="Envelope exponent.")
@click.option("--p", type=float, default=1.0, show_default=True)
@click.option("--weight", default="const:1", show_default=True)
@click.option("--weight-power", type=float, default=None,
              help="Power of the weight inside the measure [default: p].")
def morrey_norm(grid_spec, centers, function_spec, growth, p, weight,
                weight_power):
    """Scan quasinorm of a roster function, with the witness ball and the
    small-radius head of the modulus curve."""
    grid = _parse_grid(grid_spec)
    fam = default_family(grid, centers_per_axis=centers)
    w = _parsed(lambda: parse_weight(weight))
    wpow = p if weight_power is None else weight_power
    entry = _parsed(lambda: roster_function(function_spec, grid, p))
    rep = _parsed(lambda: morrey_quasinorm(
        entry.f, Envelope.power_radial(growth), p, w, wpow, fam))
    wit = rep.witness
    click.echo(f"quasinorm: {rep.quasinorm:.9g}")
    click.echo(f"witness:   B({tuple(float(c) for c in wit.center)}, {wit.radius:.6g})")
    head = ", ".join(f"v({r:.4g})={v:.4g}" for r, v in rep.modulus_curve[:4])
    click.echo(f"modulus head: {head}")


@main.command()
@grid_option
@centers_option
@click.option("--symbol", "symbol_spec", default="log", show_default=True,
              help="log | step | const:C")
def bmo(grid_spec, centers, symbol_spec):
    """Mean-oscillation seminorm of a symbol over the scan family."""
    grid = _parse_grid(grid_spec)
    fam = default_family(grid, centers_per_axis=centers)
    b = _parsed(lambda: symbol_function(symbol_spec, grid))
    click.echo(f"seminorm: {bmo_seminorm(b, fam):.9g}")


@main.command()
@click.argument("experiment", type=click.Choice(EXPERIMENT_NAMES + ("all",)))
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="TOML file of flat config fields; flags override it.")
@click.option("--cells", type=int, default=None)
@click.option("--half-width", type=float, default=None)
@click.option("--dim", type=int, default=None)
@click.option("--p", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--weight", default=None)
@click.option("--input-growth", type=float, default=None)
@click.option("--output-growth", type=float, default=None)
@click.option("--roster", default=None, help="Comma-separated roster specs.")
@click.option("--symbol", default=None)
@click.option("--centers-per-axis", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Write JSON report bodies and curve CSVs here.")
def verify(experiment, config_path, cells, half_width, dim, p, alpha, weight,
           input_growth, output_growth, roster, symbol, centers_per_axis,
           seed, out_dir):
    """Run one verification experiment, or the whole suite with `all`."""
    overrides = dict(
        cells=cells, half_width=half_width, dim=dim, p=p, alpha=alpha,
        weight=weight, input_growth=input_growth, output_growth=output_growth,
        symbol=symbol, centers_per_axis=centers_per_axis, seed=seed,
        out_dir=out_dir)
    if roster is not None:
        overrides["roster"] = tuple(s.strip() for s in roster.split(",") if s.strip())
    cfg = _parsed(lambda: load_config(config_path, **overrides))
    try:
        if experiment == "all":
            reports = run_all(cfg)
        else:
            reports = [run_experiment(experiment, cfg)]
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    failed = 0
    for rep in reports:
        label = rep.status if rep.status == "pass" else rep.status.upper()
        bits = ", ".join(f"{k}={_num(v)}" for k, v in rep.summary.items()
                         if isinstance(v, (int, float)))
        click.echo(f"{rep.name:24s} {label}" + (f"  [{bits}]" if bits else ""))
        if rep.status == "hypotheses not satisfied":
            click.echo(f"{'':24s} failed gates: "
                       + ", ".join(rep.summary.get("failed_gates", [])))
        if rep.status != "pass":
            failed += 1
        if cfg.out_dir:
            for path in export_report(rep, cfg.out_dir):
                click.echo(f"{'':24s} wrote {path}")
    if failed:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
