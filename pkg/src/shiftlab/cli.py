"""Command-line front end.

Subcommands: check, synthesize, orbit, density, props.  Exit codes:
0 completed, 1 usage/input error, 2 math audit or property failure.
Outputs embed the resolved config and the library version; pass
--no-timestamp for byte-reproducible files.  SHIFTLAB_THREADS bounds kernel
parallelism, SHIFTLAB_NO_NUMBA=1 forces the numpy fallback path.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .algebra import run_props_suite
from .blocks import SearchCapExceeded, build_blocks, hypercyclicity_witness, verify_inequalities
from .criteria import (
    HorizonConfig,
    avg_expansive_backward,
    avg_expansive_forward,
    avg_pos_expansive,
    expansive_basis_diagnostic,
    hierarchy_audit,
    mixing_check,
    unif_expansive_backward,
    unif_expansive_forward,
    unif_pos_expansive,
)
from .density import cesaro_trace, distributional_report
from .reporting import canonical_json, envelope, write_csv
from .scalars import log2_exact
from .shifts import (
    ShiftOperator,
    basis_orbit_norm,
    check_invertible,
    check_operator_wellposed,
    parse_weights,
    weights_from_json,
    weights_to_json,
)
from .spaces import InvalidSpecError, parse_space, space_from_json, space_to_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AUDIT = 2


class AuditFailure(Exception):
    """A math audit or property suite reported violations."""


def _load_space(text: str):
    if text.startswith("@"):
        return space_from_json(json.loads(Path(text[1:]).read_text()))
    return parse_space(text)


def _load_weights(text: str):
    if text.startswith("@"):
        return weights_from_json(json.loads(Path(text[1:]).read_text()))
    return parse_weights(text)


def _parse_grid(text: str):
    return tuple(int(v) for v in text.split(","))


def _parse_range(text: str):
    lo, _, hi = text.partition(":")
    return int(lo), int(hi) if hi else int(lo)


def _emit(out_path, text: str):
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text, nl=False)


def _horizon(n_max, window, k_max, l_max, m_grid, basis_window) -> HorizonConfig:
    kwargs = dict(n_max=n_max, window=window, k_max=k_max, basis_window=basis_window)
    if l_max is not None:
        kwargs["l_max"] = l_max
    if m_grid is not None:
        kwargs["m_grid"] = _parse_grid(m_grid)
    return HorizonConfig(**kwargs)


_horizon_options = [
    click.option("--n-max", default=10_000, show_default=True, help="horizon for n"),
    click.option("--window", default=1_000, show_default=True, help="index-window radius"),
    click.option("--k-max", default=3, show_default=True, help="seminorm levels checked"),
    click.option("--l-max", default=None, type=int, help="level search bound (default k_max+5)"),
    click.option("--m-grid", default=None, help="comma-separated ascending thresholds"),
    click.option("--basis-window", default=50, show_default=True,
                 help="basis-index radius for the expansivity diagnostic"),
]


def _with_horizon(fn):
    for opt in reversed(_horizon_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def cli():
    """Orbit-norm dynamics of weighted shifts: certificates and audits."""


@cli.command()
@click.option("--space", "space_text", required=True, help="preset (lp_Z:2, s_Z, ...) or @file.json")
@click.option("--weights", "weights_text", required=True,
              help="constant:2, geometric:1:2, blocks:4, or @file.json")
@click.option("--criterion", type=click.Choice(
    ["ae", "ape", "ape-inverse", "ue", "upe", "e", "mixing", "hierarchy", "wellposed"]),
    default="ae", show_default=True)
@click.option("--side", type=click.Choice(["backward", "forward"]), default="backward",
              show_default=True)
@_with_horizon
@click.option("--out", default=None, type=click.Path())
@click.option("--no-timestamp", is_flag=True, default=False)
def check(space_text, weights_text, criterion, side, n_max, window, k_max, l_max,
          m_grid, basis_window, out, no_timestamp):
    """Run one criterion checker and emit its verdict report."""
    space = _load_space(space_text)
    weights = _load_weights(weights_text)
    op = ShiftOperator(side, weights, space)
    cfg = _horizon(n_max, window, k_max, l_max, m_grid, basis_window)

    if criterion == "wellposed":
        payload = {
            "wellposed": [check_operator_wellposed(op, k, cfg).to_json()
                          for k in range(1, cfg.k_max + 1)],
            "invertible": [check_invertible(op, k, cfg).to_json()
                           for k in range(1, cfg.k_max + 1)],
        }
    elif criterion == "ae":
        fn = avg_expansive_backward if side == "backward" else avg_expansive_forward
        payload = fn(op, cfg).to_json()
    elif criterion == "ape":
        payload = avg_pos_expansive(op, cfg, side="op").to_json()
    elif criterion == "ape-inverse":
        payload = avg_pos_expansive(op, cfg, side="inverse").to_json()
    elif criterion == "ue":
        fn = unif_expansive_backward if side == "backward" else unif_expansive_forward
        prop, verdict = fn(op, cfg)
        payload = verdict.to_json()
        payload["upe"] = prop == "a"
    elif criterion == "upe":
        payload = unif_pos_expansive(op, cfg).to_json()
    elif criterion == "e":
        payload = expansive_basis_diagnostic(op, cfg).to_json()
    elif criterion == "mixing":
        payload = mixing_check(op, cfg).to_json()
    else:
        payload = hierarchy_audit(op, cfg).to_json()

    config = {"space": space_to_json(space), "weights": weights_to_json(weights),
              "side": side, "criterion": criterion, "horizon": cfg.to_json()}
    _emit(out, canonical_json(envelope("check", config, payload, not no_timestamp)))
    if criterion == "hierarchy" and not payload["consistent"]:
        raise AuditFailure("hierarchy audit inconsistent")


@cli.command()
@click.option("--blocks", "j_max", default=4, show_default=True, help="blocks to construct")
@click.option("--t-range", default=8, show_default=True, help="shift range for the witness audit")
@click.option("--out", default=None, type=click.Path())
@click.option("--weights-out", default=None, type=click.Path(),
              help="also write the weight table as a weight-spec JSON file")
@click.option("--no-timestamp", is_flag=True, default=False)
def synthesize(j_max, t_range, out, weights_out, no_timestamp):
    """Build the block weight sequence and audit every inequality exactly."""
    build = build_blocks(j_max)
    audit = verify_inequalities(build)
    witness = hypercyclicity_witness(build, t_range=t_range)
    lo, hi = -build.layout.t_max, build.layout.t_max + 1
    payload = {
        "layout": [build.layout[j].to_json() for j in range(1, j_max + 1)],
        "weights_window": {str(j): str(build.weights.value(j)) for j in range(lo, hi + 1)},
        "audits": {
            "eq1": audit.eq1, "eq2": audit.eq2, "eq3": audit.eq3,
            "eq4": {"ok": audit.eq4_ok, "first_violation": audit.eq4_first_violation},
            "eq2_at_j1": audit.eq2_at_j1,
            "oracle_equivalence": audit.closed_form_matches_products,
            "symmetry": audit.symmetry_holds,
            "hc": witness.to_json(),
        },
        "all_passed": audit.all_passed and witness.certified,
    }
    config = {"blocks": j_max, "t_range": t_range}
    _emit(out, canonical_json(envelope("synthesize", config, payload, not no_timestamp)))
    if weights_out:
        Path(weights_out).write_text(canonical_json(weights_to_json(build.weights) | {
            "table_window": {str(j): str(build.weights.value(j)) for j in range(lo, hi + 1)}}))
    if not payload["all_passed"]:
        raise AuditFailure("block construction audit failed")


@cli.command()
@click.option("--space", "space_text", required=True)
@click.option("--weights", "weights_text", required=True)
@click.option("--side", type=click.Choice(["backward", "forward"]), default="forward",
              show_default=True)
@click.option("--vector", default="e:0", show_default=True, help="basis vector, e:<index>")
@click.option("--n", "n_range", default="-50:50", show_default=True, help="orbit step range lo:hi")
@click.option("--k", "k_range", default="1:3", show_default=True, help="seminorm level range lo:hi")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--out", default=None, type=click.Path())
@click.option("--no-timestamp", is_flag=True, default=False)
def orbit(space_text, weights_text, side, vector, n_range, k_range, fmt, out, no_timestamp):
    """Tabulate log2 orbit norms of a basis vector over a step range."""
    space = _load_space(space_text)
    weights = _load_weights(weights_text)
    op = ShiftOperator(side, weights, space)
    if not vector.startswith("e:"):
        raise InvalidSpecError("vector must be 'e:<index>'")
    j0 = int(vector[2:])
    n_lo, n_hi = _parse_range(n_range)
    k_lo, k_hi = _parse_range(k_range)
    ks = range(k_lo, k_hi + 1)
    rows = []
    for n in range(n_lo, n_hi + 1):
        row = [n]
        for k in ks:
            row.append(repr(log2_exact(basis_orbit_norm(op, j0, n, k))))
        rows.append(row)
    header = ["n"] + [f"log2_norm_k{k}" for k in ks]
    if fmt == "csv":
        _emit(out, write_csv(header, rows))
        return
    config = {"space": space_to_json(space), "weights": weights_to_json(weights),
              "side": side, "vector": vector, "n": n_range, "k": k_range}
    payload = {"header": header, "rows": rows}
    _emit(out, canonical_json(envelope("orbit", config, payload, not no_timestamp)))


@cli.command()
@click.option("--weights", "weights_text", default="blocks:4", show_default=True,
              help="blocks:<J> or @file.json (needs a finite table)")
@click.option("--vector", type=click.Choice(["e:-1", "e:1"]), default="e:-1", show_default=True)
@click.option("--n", "n_horizon", default=None, type=int, help="horizon (default: table reach)")
@click.option("--n0", default=None, type=int, help="density base N0 (default horizon/10)")
@click.option("--tau-grid", default=None, help="comma-separated small thresholds, e.g. 1/2,1/3")
@click.option("--k-grid", default=None, help="comma-separated large thresholds, e.g. 2,3,4")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--out", default=None, type=click.Path())
@click.option("--no-timestamp", is_flag=True, default=False)
def density(weights_text, vector, n_horizon, n0, tau_grid, k_grid, fmt, out, no_timestamp):
    """Per-step norms, running averages, and counting ratios for the witness
    orbits of the block construction."""
    from .blocks import backward_norms, forward_norms

    if not weights_text.startswith("blocks:"):
        raise InvalidSpecError("density works on the synthesized block weights (blocks:<J>)")
    build = build_blocks(int(weights_text.split(":")[1]))
    n_horizon = build.layout.t_max if n_horizon is None else n_horizon
    taus = ([Fraction(t) for t in tau_grid.split(",")] if tau_grid
            else [Fraction(1, j + 1) for j in range(1, build.j_max + 1)])
    kays = ([Fraction(v) for v in k_grid.split(",")] if k_grid
            else [Fraction(j + 1) for j in range(1, build.j_max + 1)])
    norms = (backward_norms(build, n_horizon) if vector == "e:-1"
             else forward_norms(build, n_horizon))
    vec_name = "e-1-forward" if vector == "e:-1" else "e1-backward"
    trace = cesaro_trace(build, vec_name, "op", n_horizon)

    header = (["n", "norm_log2", "running_average"]
              + [f"ratio_small({t})" for t in taus] + [f"ratio_large({K})" for K in kays])
    small_counts = [0] * len(taus)
    large_counts = [0] * len(kays)
    rows = []
    for n in range(1, n_horizon + 1):
        v = norms[n]
        for i, t in enumerate(taus):
            small_counts[i] += v <= t
        for i, K in enumerate(kays):
            large_counts[i] += v >= K
        row = [n, repr(log2_exact(v)), repr(float(trace.value_at(n)))]
        row += [repr(c / n) for c in small_counts] + [repr(c / n) for c in large_counts]
        rows.append(row)
    if fmt == "csv":
        _emit(out, write_csv(header, rows))
        return
    report = distributional_report(build, vec_name, [int(K) for K in kays], taus,
                                   n_horizon, n0)
    config = {"weights": weights_text, "vector": vector, "n": n_horizon, "n0": n0}
    _emit(out, canonical_json(envelope("density", config, report, not no_timestamp)))


@cli.command()
@_with_horizon
@click.option("--out", default=None, type=click.Path())
@click.option("--no-timestamp", is_flag=True, default=False)
def props(n_max, window, k_max, l_max, m_grid, basis_window, out, no_timestamp):
    """Run the closure-law suite over the preset battery (exit 2 on failure)."""
    cfg = _horizon(min(n_max, 512), min(window, 128), min(k_max, 2), l_max,
                   m_grid or "1,2,4,8", min(basis_window, 8))
    results = run_props_suite(cfg)
    config = {"horizon": cfg.to_json()}
    _emit(out, canonical_json(envelope("props", config, results, not no_timestamp)))
    if not results["all_passed"]:
        raise AuditFailure("closure-law suite failed")


def main(argv=None) -> int:
    threads = os.environ.get("SHIFTLAB_THREADS", "").strip()
    if threads and not threads.isdigit():
        click.echo("SHIFTLAB_THREADS must be a positive integer", err=True)
        return EXIT_USAGE
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except AuditFailure as exc:
        click.echo(f"audit failure: {exc}", err=True)
        return EXIT_AUDIT
    except (click.UsageError, click.BadParameter) as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except (InvalidSpecError, SearchCapExceeded, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as exc:  # --help / --version
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
