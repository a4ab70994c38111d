"""Graph description files and tabular exporters.

A graph file is a single JSON document::

    {
      "dimension": 2,
      "vertices": [{"name": "a", "potential": 0, "weight": 1}, ...],
      "edges": [{"from": "a", "to": "b", "index": [1, 0],
                 "weight": 1, "alpha": "pi/2"}, ...]
    }

Unknown keys are rejected.  Any numeric field also accepts a pi-scaled
string such as "pi", "-pi/2" or "3*pi/4", so exact flux values survive the
round trip; plain JSON numbers are taken verbatim.
"""

from __future__ import annotations

import json
import re
from typing import Any, Optional

import numpy as np

from .graph import Edge, FundamentalGraph, GraphError, Vertex, validate
from .spectrum import BandStructure, PathBands, flat_bands, measure_and_gaps
from .topology import FluxData

__all__ = [
    "ParseError",
    "ValidationError",
    "parse_spec",
    "serialize_spec",
    "load_spec",
    "band_csv",
    "path_csv",
    "band_json",
    "gnuplot_script",
]


class ParseError(ValueError):
    """Malformed graph file."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ValueError):
    """The file parsed but the graph violates a structural invariant."""


_PI_PATTERN = re.compile(
    r"^\s*([+-]?)\s*(\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$",
    re.IGNORECASE,
)


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI_PATTERN.match(value)
        if not m:
            raise ParseError(f"{where}: cannot parse {value!r} as a pi-scaled number")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        div = float(m.group(3)) if m.group(3) else 1.0
        return sign * coef * np.pi / div
    raise ParseError(f"{where}: expected a number, got {type(value).__name__}")


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{where}: missing keys {sorted(missing)}")


def parse_spec(text: str) -> FundamentalGraph:
    """Parse and validate a graph file; ids follow declaration order."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    _require_keys(doc, {"dimension", "vertices", "edges"}, {"dimension", "vertices", "edges"}, "document")
    dim = doc["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError("dimension must be a positive integer")

    if not isinstance(doc["vertices"], list) or not doc["vertices"]:
        raise ParseError("vertices must be a non-empty list")
    names: dict[str, int] = {}
    vertices = []
    for i, entry in enumerate(doc["vertices"]):
        where = f"vertices[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        _require_keys(entry, {"name", "potential", "weight"}, {"name"}, where)
        name = entry["name"]
        if not isinstance(name, str):
            raise ParseError(f"{where}: name must be a string")
        if name in names:
            raise ParseError(f"{where}: duplicate vertex name {name!r}")
        names[name] = i
        vertices.append(
            Vertex(
                id=i,
                name=name,
                potential=_number(entry.get("potential", 0.0), where),
                weight=_number(entry.get("weight", 1.0), where),
            )
        )

    if not isinstance(doc["edges"], list):
        raise ParseError("edges must be a list")
    edges = []
    for i, entry in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        _require_keys(entry, {"from", "to", "index", "weight", "alpha"}, {"from", "to", "index"}, where)
        for end in ("from", "to"):
            if entry[end] not in names:
                raise ParseError(f"{where}: unknown vertex {entry[end]!r}")
        index = entry["index"]
        if not isinstance(index, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in index):
            raise ParseError(f"{where}: index must be a list of integers")
        edges.append(
            Edge(
                id=i,
                tail=names[entry["from"]],
                head=names[entry["to"]],
                index=tuple(index),
                weight=_number(entry.get("weight", 1.0), where),
                alpha=_number(entry.get("alpha", 0.0), where),
            )
        )

    graph = FundamentalGraph(dimension=dim, vertices=tuple(vertices), edges=tuple(edges))
    try:
        return validate(graph)
    except GraphError as exc:
        raise ValidationError(str(exc)) from exc


def load_spec(path: str) -> FundamentalGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())


def serialize_spec(graph: FundamentalGraph) -> str:
    """Deterministic JSON for a graph; reparsing yields an equal graph."""
    doc = {
        "dimension": graph.dimension,
        "vertices": [
            {"name": v.name, "potential": v.potential, "weight": v.weight}
            for v in graph.vertices
        ],
        "edges": [
            {
                "from": graph.vertices[e.tail].name,
                "to": graph.vertices[e.head].name,
                "index": list(e.index),
                "weight": e.weight,
                "alpha": e.alpha,
            }
            for e in graph.edges
        ],
    }
    return json.dumps(doc, indent=2)


def _fmt(x: float) -> str:
    return repr(float(x))


def band_csv(bs: BandStructure) -> str:
    """One row per grid point: theta components then ascending eigenvalues."""
    d = bs.grid.dimension
    header = ",".join(
        [f"theta_{j + 1}" for j in range(d)] + [f"lambda_{n + 1}" for n in range(bs.nu)]
    )
    lines = [header]
    pts = bs.grid.points()
    for i in range(len(pts)):
        row = [_fmt(x) for x in pts[i]] + [_fmt(v) for v in bs.values[:, i]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def path_csv(path: PathBands) -> str:
    """One row per path sample: arclength, theta components, eigenvalues."""
    d = path.thetas.shape[1]
    nu = path.values.shape[1]
    header = ",".join(
        ["arclength"]
        + [f"theta_{j + 1}" for j in range(d)]
        + [f"lambda_{n + 1}" for n in range(nu)]
    )
    lines = [header]
    for i in range(len(path.arclength)):
        row = (
            [_fmt(path.arclength[i])]
            + [_fmt(x) for x in path.thetas[i]]
            + [_fmt(v) for v in path.values[i]]
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def band_json(graph: FundamentalGraph, fd: FluxData, bs: BandStructure) -> dict:
    """Bands plus everything needed to recompute the estimates externally."""
    measure, gaps = measure_and_gaps(bs)
    flats = flat_bands(bs)
    return {
        "nu": graph.nu,
        "dimension": graph.dimension,
        "beta": fd.betti,
        "kappa_plus": graph.kappa_plus,
        "grid": bs.grid.points_per_dim,
        "fluxes": [
            {"edge": e, "flux": f, "cycle_index": list(ix)}
            for e, f, ix in zip(fd.cotree, fd.fluxes, fd.cycle_indices)
        ],
        "bands": [[float(a), float(b)] for a, b in bs.bands],
        "flat_bands": [[fb.value, fb.multiplicity] for fb in flats],
        "gaps": [[float(a), float(b)] for a, b in gaps],
        "measure": measure,
    }


def gnuplot_script(csv_name: str, dimension: int, nu: int, path_mode: bool) -> str:
    """Plain-text gnuplot script plotting the CSV next to it."""
    lines = [
        "set datafile separator ','",
        "set key off",
        "set ylabel 'eigenvalue'",
    ]
    if path_mode:
        lines.append("set xlabel 'arclength'")
        offset = dimension + 1
        plots = ", ".join(
            f"'{csv_name}' using 1:{offset + n + 1} with lines" for n in range(nu)
        )
        lines.append(f"plot {plots}")
    elif dimension == 1:
        plots = ", ".join(
            f"'{csv_name}' using 1:{1 + n + 1} with lines" for n in range(nu)
        )
        lines.append("set xlabel 'theta_1'")
        lines.append(f"plot {plots}")
    else:
        lines.append("set xlabel 'theta_1'")
        lines.append("set ylabel 'theta_2'")
        lines.append("set zlabel 'eigenvalue'")
        plots = ", ".join(
            f"'{csv_name}' using 1:2:{dimension + n + 1} with points pt 7 ps 0.3"
            for n in range(nu)
        )
        lines.append(f"splot {plots}")
    return "\n".join(lines) + "\n"
