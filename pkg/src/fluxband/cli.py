"""Command-line front end.

Exit codes: 0 on success, 2 when the input fails to parse or validate,
3 when a bound check is violated (which would indicate a bug in the
package, not in the estimates).
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import library
from .bounds import (
    effective_form,
    perturbation_bounds,
    verify_bounds,
)
from .graph import GraphError
from .specfile import (
    ParseError,
    ValidationError,
    band_csv,
    band_json,
    gnuplot_script,
    load_spec,
    parse_spec,
    path_csv,
    serialize_spec,
)
from .spectrum import TorusGrid, band_path, default_grid, flat_bands, measure_and_gaps, sweep
from .topology import flux_data, minimal_reduction

PATH_POINTS = {
    "G": lambda d: [0.0] * d,
    "GAMMA": lambda d: [0.0] * d,
    "X": lambda d: [math.pi] + [0.0] * (d - 1),
    "M": lambda d: [math.pi, math.pi] + [0.0] * (d - 2),
    "R": lambda d: [math.pi] * d,
    "PI": lambda d: [math.pi] * d,
}


class CliError(click.ClickException):
    exit_code = 2


def _load(path: str):
    try:
        return load_spec(path)
    except (ParseError, ValidationError, GraphError) as exc:
        raise CliError(str(exc)) from exc


def _make_grid(graph, n: Optional[int]) -> TorusGrid:
    try:
        return default_grid(graph.dimension, n)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text, encoding="utf-8")


def common_options(fn):
    @click.option("--grid", "grid_n", type=int, default=None, help="Grid points per dimension (odd).")
    @click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text")
    @click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


@click.group()
def main() -> None:
    """Band structure and spectral bounds for periodic discrete graphs."""


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def info(spec: str, fmt: str) -> None:
    """Vertices, cycles, fluxes and the modified potential of a graph."""
    graph = _load(spec)
    fd = flux_data(graph)

    if fmt == "json":
        doc = {
            "nu": graph.nu,
            "dimension": graph.dimension,
            "beta": fd.betti,
            "kappa_plus": graph.kappa_plus,
            "tree_edges": sorted(fd.tree.tree_edges),
            "cotree": [
                {
                    "edge": e,
                    "flux": f,
                    "cycle_index": list(ix),
                    "alpha_star": fd.alpha_star.value(e),
                }
                for e, f, ix in zip(fd.cotree, fd.fluxes, fd.cycle_indices)
            ],
        }
        click.echo(json.dumps(doc, indent=2))
        return
    click.echo(f"vertices:    {graph.nu}")
    click.echo(f"dimension:   {graph.dimension}")
    click.echo(f"betti:       {fd.betti}")
    click.echo(f"kappa_plus:  {graph.kappa_plus:g}")
    click.echo(f"tree edges:  {sorted(fd.tree.tree_edges)}")
    click.echo("cotree edge   flux          cycle index")
    for e, f, ix in zip(fd.cotree, fd.fluxes, fd.cycle_indices):
        click.echo(f"  {e:<10} {f: .9g}  {list(ix)}")


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@common_options
def spectrum(spec: str, grid_n: Optional[int], fmt: str, out: Optional[str]) -> None:
    """Bands, flat bands, gaps and the measure of the spectrum."""
    graph = _load(spec)
    grid = _make_grid(graph, grid_n)
    fd = flux_data(graph)
    bs = sweep(graph, grid=grid)
    if fmt in ("json", "csv"):
        _write(json.dumps(band_json(graph, fd, bs), indent=2), out)
        return
    measure, gaps = measure_and_gaps(bs)
    flats = flat_bands(bs)
    lines = []
    for n, (lo, hi) in enumerate(bs.bands):
        lines.append(f"band {n + 1}: [{lo:.9g}, {hi:.9g}]")
    for fb in flats:
        inside = any(a < fb.value < b for a, b in gaps)
        note = "  (inside a gap)" if inside else ""
        lines.append(f"flat band at {fb.value:.9g}, multiplicity {fb.multiplicity}{note}")
    for a, b in gaps:
        lines.append(f"gap: ({a:.9g}, {b:.9g})")
    lines.append(f"measure: {measure:.9g}")
    _write("\n".join(lines), out)


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@click.option("--path", "path_tokens", default=None, help="Waypoints, e.g. 'G,X,M' or '0:0,pi:0'.")
@click.option("--samples", type=int, default=32, help="Samples per path segment.")
@click.option("--gnuplot", is_flag=True, help="Also write a gnuplot script next to --out.")
@common_options
def bands(
    spec: str,
    path_tokens: Optional[str],
    samples: int,
    gnuplot: bool,
    grid_n: Optional[int],
    fmt: str,
    out: Optional[str],
) -> None:
    """Eigenvalues over the full grid, or along a waypoint path."""
    graph = _load(spec)
    if path_tokens:
        waypoints = [_parse_waypoint(tok, graph.dimension) for tok in path_tokens.split(",")]
        path = band_path(graph, waypoints, samples_per_segment=samples)
        csv_text = path_csv(path)
        payload = csv_text
        if fmt == "json":
            payload = json.dumps(
                {
                    "arclength": path.arclength.tolist(),
                    "thetas": path.thetas.tolist(),
                    "values": path.values.tolist(),
                },
                indent=2,
            )
        _write(payload, out)
        _maybe_gnuplot(gnuplot, out, graph.dimension, path.values.shape[1], path_mode=True)
        return
    grid = _make_grid(graph, grid_n)
    fd = flux_data(graph)
    bs = sweep(graph, grid=grid)
    if fmt == "json":
        _write(json.dumps(band_json(graph, fd, bs), indent=2), out)
    else:
        _write(band_csv(bs), out)
        _maybe_gnuplot(gnuplot, out, graph.dimension, graph.nu, path_mode=False)


def _maybe_gnuplot(flag: bool, out: Optional[str], dimension: int, nu: int, path_mode: bool) -> None:
    if not flag:
        return
    if out is None:
        raise CliError("--gnuplot requires --out so the script can reference the CSV")
    target = Path(out)
    script = gnuplot_script(target.name, dimension, nu, path_mode)
    target.with_suffix(".gp").write_text(script, encoding="utf-8")


def _parse_waypoint(token: str, d: int) -> list[float]:
    token = token.strip()
    key = token.upper()
    if key in PATH_POINTS:
        point = PATH_POINTS[key](d)
        if len(point) < d:
            point = point + [0.0] * (d - len(point))
        return point[:d]
    parts = token.split(":")
    if len(parts) != d:
        raise CliError(f"waypoint {token!r} needs {d} colon-separated components")
    out = []
    for part in parts:
        part = part.strip()
        try:
            if "pi" in part.lower():
                from .specfile import _number

                out.append(_number(part, "waypoint"))
            else:
                out.append(float(part))
        except (ValueError, ParseError) as exc:
            raise CliError(f"bad waypoint component {part!r}") from exc
    return out


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@common_options
def verify(spec: str, grid_n: Optional[int], fmt: str, out: Optional[str]) -> None:
    """Check every band-length and gap estimate; exit 3 on violation."""
    graph = _load(spec)
    grid = _make_grid(graph, grid_n)
    reports = verify_bounds(graph, grid=grid)
    _emit_reports(reports, fmt, out)


def _emit_reports(reports, fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        doc = [
            {"name": r.name, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "satisfied": r.satisfied}
            for r in reports
        ]
        _write(json.dumps(doc, indent=2), out)
    else:
        _write("\n".join(str(r) for r in reports), out)
    if not all(r.satisfied for r in reports):
        sys.exit(3)


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@click.argument("spec_other", type=click.Path(exists=True))
@common_options
def perturb(
    spec: str, spec_other: str, grid_n: Optional[int], fmt: str, out: Optional[str]
) -> None:
    """Band-endpoint variation between two potentials on the same graph."""
    graph = _load(spec)
    other = _load(spec_other)
    same = (
        graph.dimension == other.dimension
        and graph.vertices == other.vertices
        and len(graph.edges) == len(other.edges)
        and all(
            (e.tail, e.head, e.index, e.weight) == (f.tail, f.head, f.index, f.weight)
            for e, f in zip(graph.edges, other.edges)
        )
    )
    if not same:
        raise CliError("the two files must describe the same graph up to alpha")
    grid = _make_grid(graph, grid_n)
    data, reports = perturbation_bounds(
        graph, graph.one_form(), other.one_form(), grid=grid
    )
    if fmt == "text":
        click.echo(f"lambda_1  = {data.lambda_1: .9g}")
        click.echo(f"lambda_nu = {data.lambda_nu: .9g}")
        click.echo(f"coupling  = {data.coupling: .9g}")
    _emit_reports(reports, fmt, out)


@main.command("effective-mass")
@click.argument("spec", type=click.Path(exists=True))
@click.option("--band", type=int, required=True, help="Band number, 1-based.")
@click.option("--kind", type=click.Choice(["min", "max"]), default="min")
@common_options
def effective_mass(
    spec: str, band: int, kind: str, grid_n: Optional[int], fmt: str, out: Optional[str]
) -> None:
    """Band-edge curvature matrix and the index-norm bound on it."""
    graph = _load(spec)
    grid = _make_grid(graph, grid_n)
    try:
        eff, report = effective_form(graph, band - 1, grid=grid, kind=kind)
    except (ValueError, IndexError) as exc:
        raise CliError(str(exc)) from exc
    if fmt == "text":
        click.echo(f"band {band} ({kind}) at theta0 = {[round(t, 12) for t in eff.theta0]}")
        click.echo(f"curvature matrix:\n{np.array2string(eff.matrix, precision=9)}")
        click.echo(f"rho = {eff.rho:.9g}   T1 = {eff.t1:.9g}   T2 = {eff.t2:.9g}")
        if eff.flat:
            click.echo("branch is flat")
    _emit_reports([report], fmt, out)


@main.command()
@click.argument("spec", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def reduce(spec: str, fmt: str) -> None:
    """Minimal-flux change of variables: momentum shift and reduced potential."""
    graph = _load(spec)
    fd = flux_data(graph)
    mr = minimal_reduction(fd)
    if fmt == "json":
        doc = {
            "theta0": list(mr.theta0),
            "independent_edges": list(mr.independent_edges),
            "reduced_cotree": list(mr.reduced_cotree),
            "alpha_tilde": {str(e): mr.alpha_tilde.value(e) for e in mr.reduced_cotree},
            "residual_parameters": len(mr.reduced_cotree),
        }
        click.echo(json.dumps(doc, indent=2))
        return
    click.echo(f"theta0: {[round(t, 12) for t in mr.theta0]}")
    click.echo(f"independent edges: {list(mr.independent_edges)}")
    click.echo(f"residual flux parameters: {len(mr.reduced_cotree)} (betti - d)")
    for e in mr.reduced_cotree:
        click.echo(f"  edge {e}: alpha_tilde = {mr.alpha_tilde.value(e): .9g}")


@main.command()
@click.argument("family", type=click.Choice(["square", "hexagonal", "star", "harper", "figure1"]))
@click.option("-d", "--dim", type=int, default=2)
@click.option("--nu", type=int, default=3, help="Vertices per cell (star family).")
@click.option("-p", type=int, default=1, help="Flux numerator (harper).")
@click.option("-q", type=int, default=2, help="Flux denominator (harper).")
@click.option("--out", type=click.Path(), default=None)
def new(family: str, dim: int, nu: int, p: int, q: int, out: Optional[str]) -> None:
    """Write a graph file for one of the built-in families."""
    try:
        if family == "square":
            named = library.square_lattice(dim)
        elif family == "hexagonal":
            named = library.hexagonal()
        elif family == "star":
            named = library.star_lattice(dim, nu)
        elif family == "harper":
            named = library.harper(p, q)
        else:
            named = library.figure1_graph()
    except (ValueError, library.BadFraction) as exc:
        raise CliError(str(exc)) from exc
    _write(serialize_spec(named.graph), out)


@main.command()
@click.option("--qmax", type=int, required=True, help="Largest flux denominator.")
@click.option("--grid", "grid_n", type=int, default=9, help="Grid points per dimension (odd).")
@click.option("--out", type=click.Path(), default=None)
@click.option("--gnuplot", is_flag=True)
def butterfly(qmax: int, grid_n: int, out: Optional[str], gnuplot: bool) -> None:
    """Flux-versus-eigenvalue point cloud over all reduced fractions p/q.

    Emits CSV rows flux,p,q,lambda for every grid eigenvalue of every
    fraction with denominator at most qmax.
    """
    if qmax < 1:
        raise CliError("--qmax must be >= 1")
    fractions = sorted(
        {(p, q) for q in range(1, qmax + 1) for p in range(0, q + 1) if math.gcd(p, q) == 1}
    , key=lambda pq: pq[0] / pq[1])
    lines = ["flux,p,q,lambda"]
    for p, q in fractions:
        named = library.harper(p, q)
        grid = _make_grid(named.graph, grid_n)
        bs = sweep(named.graph, grid=grid)
        x = p / q
        for value in np.sort(bs.values, axis=None):
            lines.append(f"{x!r},{p},{q},{float(value)!r}")
    text = "\n".join(lines) + "\n"
    _write(text, out)
    if gnuplot:
        if out is None:
            raise CliError("--gnuplot requires --out")
        target = Path(out)
        script = (
            "set datafile separator ','\n"
            "set xlabel 'flux p/q'\nset ylabel 'eigenvalue'\nset key off\n"
            f"plot '{target.name}' using 1:4 with points pt 7 ps 0.2\n"
        )
        target.with_suffix(".gp").write_text(script, encoding="utf-8")


if __name__ == "__main__":
    main()
