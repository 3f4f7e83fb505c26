"""Command-line surface: configuration, serialization, and SVG rendering.

Every subcommand is a thin adapter over the library modules: it parses
flags, calls one library entry point, and serializes the result.  Outputs
are deterministic: JSON is emitted with sorted keys, CSV floats use
'.'-decimal with 12 significant digits, files are written atomically
(temp file + rename), and the active seed is echoed into every summary.
"""

from __future__ import annotations

import colorsys
import csv
import functools
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields, is_dataclass
from fractions import Fraction
from pathlib import Path

import click

from tilepress import cells, ldp, orbits, thermo
from tilepress.geometry import GeometryError, realize_geometry
from tilepress.rule import (
    RuleFormatError,
    SubdivisionRule,
    builtin_rule,
    parse_rule,
    serialize_rule,
    validate_rule,
)
from tilepress.subsystem import (
    make_subsystem,
    parry_equilibrium,
    primitivity,
    subsystem_entropy,
)
from tilepress.thermo import indicator_potential, zero_potential

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    cap: int = 12
    tol: float = 1e-6
    seed: int = 0
    out: str | None = None
    format: str = "json"
    threads: int | None = None

    def __post_init__(self) -> None:
        if self.cap <= 0:
            raise ValueError("cap must be positive")
        if not (0.0 < self.tol < 1.0):
            raise ValueError("tol must lie in (0, 1)")


# ---------------------------------------------------------------------------
# serialization helpers


def _sig(x: float) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return float(_sig(obj)) if math.isfinite(obj) else _sig(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in seq]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _emit(cfg: RunConfig, stem: str, text: str, ext: str) -> None:
    if cfg.out:
        _write_atomic(Path(cfg.out) / f"{stem}.{ext}", text)
    else:
        click.echo(text, nl=False)


def _emit_json(cfg: RunConfig, stem: str, payload: dict) -> None:
    payload = dict(payload)
    payload.setdefault("schema_version", SCHEMA_VERSION)
    payload.setdefault("seed", cfg.seed)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    _emit(cfg, stem, text, "json")


def _emit_csv(cfg: RunConfig, stem: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_sig(v) if isinstance(v, float) else v for v in row])
    _emit(cfg, stem, buf.getvalue(), "csv")


def _emit_table(
    cfg: RunConfig, stem: str, summary: dict, header: list[str], rows: list[list]
) -> None:
    if cfg.format == "csv":
        _emit_csv(cfg, stem, header, rows)
    else:
        summary = dict(summary)
        summary["rows"] = [dict(zip(header, row)) for row in rows]
        _emit_json(cfg, stem, summary)


def _fail(kind: str, message: str) -> None:
    click.echo(
        json.dumps({"error": kind, "message": message}, sort_keys=True), err=True
    )
    sys.exit(1)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (
            RuleFormatError,
            GeometryError,
            ValueError,
            KeyError,
            NotImplementedError,
            MemoryError,
            FileNotFoundError,
        ) as exc:
            _fail(type(exc).__name__, str(exc))

    return wrapper


# ---------------------------------------------------------------------------
# input loading


def _load_rule(spec: str) -> SubdivisionRule:
    if os.path.sep in spec or os.path.exists(spec):
        return parse_rule(Path(spec).read_text())
    return builtin_rule(spec)


def _load_potential(rule: SubdivisionRule, spec: str | None) -> thermo.Potential:
    """Potential mini-language: 'zero', 'indicator', 'indicator:t1,t2',
    or a JSON file {"level": l, "values": {"t1|t2|..": "p/q"}}."""
    if spec is None or spec == "zero":
        return zero_potential()
    if spec == "indicator":
        return indicator_potential(rule)
    if spec.startswith("indicator:"):
        tiles = spec.split(":", 1)[1].split(",")
        return indicator_potential(rule, tiles=tiles)
    if os.path.exists(spec):
        doc = json.loads(Path(spec).read_text())
        pos = rule.index.tile_pos
        values = {}
        for key, val in doc["values"].items():
            word = tuple(pos[tid] for tid in key.split("|"))
            values[word] = Fraction(val)
        return thermo.Potential(level=int(doc["level"]), values=values)
    raise ValueError(f"unknown potential spec {spec!r}")


def _parse_range(spec: str) -> range:
    parts = [int(p) for p in spec.split(":")]
    if len(parts) == 1:
        return range(parts[0], parts[0] + 1)
    if len(parts) == 2:
        return range(parts[0], parts[1] + 1)
    if len(parts) == 3:
        return range(parts[0], parts[1] + 1, parts[2])
    raise ValueError(f"bad range spec {spec!r}")


def _word_str(rule: SubdivisionRule, word: tuple[int, ...]) -> str:
    return ".".join(rule.tiles[a].id for a in word)


# ---------------------------------------------------------------------------
# SVG rendering


@dataclass
class SvgScene:
    rule_name: str
    depth: int
    overlay: str | None
    faces: dict[str, str]  # location name -> SVG document


_GOLDEN = 0.6180339887498949


def _pair_color(i: int) -> str:
    h = (i * _GOLDEN) % 1.0
    r, g, b = colorsys.hsv_to_rgb(h, 0.55, 0.95)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _svg_face(
    polys: list[tuple[list[tuple[float, float]], str, str]],
    legend: list[tuple[str, str]],
    title: str,
    bounds: tuple[float, float, float, float],
) -> str:
    x0, y0, x1, y1 = bounds
    scale = 512.0
    pad = 12.0
    width = (x1 - x0) * scale + 2 * pad
    height = (y1 - y0) * scale + 2 * pad
    legend_h = 22.0 * (len(legend) + 1)

    def pt(p: tuple[float, float]) -> str:
        x = (p[0] - x0) * scale + pad
        y = (y1 - p[1]) * scale + pad
        return f"{x:.2f},{y:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {width:.2f} {height + legend_h:.2f}">',
        f'<title>{title}</title>',
        '<g stroke="#333" stroke-width="0.6" stroke-linejoin="round">',
    ]
    for pts, fill, cls in polys:
        d = " ".join(pt(p) for p in pts)
        out.append(f'<polygon class="{cls}" points="{d}" fill="{fill}"/>')
    out.append("</g>")
    ly = height + 16.0
    out.append(f'<text x="{pad:.2f}" y="{ly:.2f}" font-size="14">{title}</text>')
    for label, color in legend:
        ly += 22.0
        out.append(
            f'<rect x="{pad:.2f}" y="{ly - 11:.2f}" width="14" height="14" '
            f'fill="{color}" stroke="#333"/>'
        )
        out.append(f'<text x="{pad + 20:.2f}" y="{ly:.2f}" font-size="13">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(
    rule: SubdivisionRule,
    depth: int,
    overlay: str | None = None,
    vertex: str | None = None,
    exclude: tuple[str, ...] = (),
    cap: int = 8,
) -> SvgScene:
    """Render one SVG per pillow face, with an optional overlay.

    overlay 'subsystem' highlights words avoiding ``exclude``; 'pairs'
    hue-codes the tile pairs sharing an image-0 seam; 'flower' highlights
    the tiles meeting the vertex 'tileid:corner'.
    """
    real = realize_geometry(rule, depth, cap=cap)
    idx = rule.index
    base_fill = {0: "#f5f5f5", 1: "#9aa2ab"}
    legend = [("white word", base_fill[0]), ("black word", base_fill[1])]

    fill_of: dict[tuple[int, ...], tuple[str, str]] = {}
    if overlay == "subsystem":
        banned = {idx.tile_pos[t] for t in exclude}
        if not banned:
            raise ValueError("subsystem overlay needs --exclude tiles")
        for w in real.polygons:
            member = not any(a in banned for a in w)
            fill_of[w] = ("#2b6cb0", "member") if member else ("#ffffff", "hole")
        legend = [("subsystem word", "#2b6cb0"), ("removed (hole)", "#ffffff")]
    elif overlay == "pairs":
        pairs = cells.enumerate_pairs(rule, depth)
        for i, pr in enumerate(pairs):
            color = _pair_color(i)
            for tw in (pr.first, pr.second):
                w = cells.word_from_ids(rule, tw)
                fill_of[w] = (color, f"pair-{i}")
        legend = [(f"{len(pairs)} word pairs, hue-coded", _pair_color(0))]
    elif overlay == "flower":
        if vertex is None:
            raise ValueError("flower overlay needs --vertex tileid:corner")
        tid, cs = vertex.split(":")
        members = cells.vertex_flower(rule, tid, int(cs), depth)
        for w in members:
            fill_of[w] = ("#d97706", "flower")
        legend = [
            (f"flower at {vertex} ({len(members)} words)", "#d97706"),
            ("other word", "#f5f5f5"),
        ]
    elif overlay is not None:
        raise ValueError(f"unknown overlay {overlay!r}")

    xs = [p[0] for poly in real.polygons.values() for p in poly]
    ys = [p[1] for poly in real.polygons.values() for p in poly]
    bounds = (min(xs + [0.0]), min(ys + [0.0]), max(xs + [1.0]), max(ys + [1.0]))

    faces = {}
    for locn, locname in enumerate(("white", "black")):
        polys = []
        for w in sorted(real.face_words(locn)):
            fill, cls = fill_of.get(w, (base_fill[idx.col[w[0]]], "base"))
            polys.append((real.polygons[w], fill, cls))
        title = f"{rule.name or 'rule'} depth {depth} face {locname}" + (
            f" overlay {overlay}" if overlay else ""
        )
        faces[locname] = _svg_face(polys, legend, title, bounds)
    return SvgScene(
        rule_name=rule.name, depth=depth, overlay=overlay, faces=faces
    )


# ---------------------------------------------------------------------------
# CLI group


@click.group()
@click.option("--cap", default=12, show_default=True, help="Enumeration depth cap.")
@click.option("--tol", default=1e-6, show_default=True, help="Numeric tolerance.")
@click.option("--seed", default=0, show_default=True, help="Seed echoed in outputs.")
@click.option("--out", default=None, type=click.Path(), help="Output directory.")
@click.option(
    "--format",
    "fmt",
    default="json",
    type=click.Choice(["json", "csv"]),
    show_default=True,
)
@click.pass_context
def main(ctx, cap, tol, seed, out, fmt):
    """Thermodynamic-formalism toolkit for two-tile subdivision rules."""
    threads = os.environ.get("TILEPRESS_THREADS")
    nthreads = None
    if threads:
        if not threads.isdigit() or int(threads) < 1:
            _fail("ValueError", "TILEPRESS_THREADS must be a positive integer")
        nthreads = int(threads)
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    try:
        ctx.obj = RunConfig(
            cap=cap, tol=tol, seed=seed, out=out, format=fmt, threads=nthreads
        )
    except ValueError as exc:
        _fail("ValueError", str(exc))


@main.command()
@click.argument("file", type=click.Path(exists=True))
@click.pass_obj
@_guarded
def validate(cfg: RunConfig, file):
    """Parse and validate a rule file."""
    rule = parse_rule(Path(file).read_text())
    report = validate_rule(rule)
    _emit_json(
        cfg,
        "validate",
        {
            "file": os.path.basename(file),
            "pass": report.ok,
            "violations": report.violations,
            "n_tiles": report.n_tiles,
            "n_curve_edges": report.n_curve_edges,
            "n_vertex_classes": report.n_vertex_classes,
            "ramification_sum": report.ramification_sum,
        },
    )
    if not report.ok:
        sys.exit(1)


@main.command()
@click.argument("name")
@click.option("--k", default=None, type=int, help="Grid size for lattes/flap.")
@click.option("--flaps", default=None, type=int, help="Pocket count for flap.")
@click.option("-o", "--output", default=None, type=click.Path())
@click.pass_obj
@_guarded
def gen(cfg: RunConfig, name, k, flaps, output):
    """Generate a builtin rule and write its serialized form."""
    if k is not None:
        name = f"flap-{k}-{flaps}" if flaps is not None else f"lattes-{k}x{k}"
    rule = builtin_rule(name)
    text = serialize_rule(rule)
    if output:
        _write_atomic(Path(output), text)
    else:
        _emit(cfg, name, text, "json")


@main.command("cells")
@click.argument("rule_spec")
@click.option("-n", "level", default=1, show_default=True)
@click.pass_obj
@_guarded
def cells_cmd(cfg: RunConfig, rule_spec, level):
    """Count tiles, edges, and vertices of the level-n decomposition."""
    if level > cfg.cap:
        raise ValueError(f"level {level} exceeds cap {cfg.cap}")
    rule = _load_rule(rule_spec)
    sk = cells.skeleton(rule, level)
    ram = sum(v.local_degree - 1 for v in sk.vertices)
    _emit_json(
        cfg,
        "cells",
        {
            "rule": rule.name,
            "n": level,
            "tiles": sk.tiles,
            "edges": len(sk.edges),
            "vertices": len(sk.vertices),
            "ramification_sum": ram,
            "ramification_expected": 2 * (rule.degree**level - 1),
        },
    )


@main.command("subsys")
@click.argument("rule_spec")
@click.option("--exclude", default="", help="Comma-separated tile ids to remove.")
@click.option("--entropy/--no-entropy", default=True)
@click.pass_obj
@_guarded
def subsys_cmd(cfg: RunConfig, rule_spec, exclude, entropy):
    """Build a subsystem by tile exclusion; report entropy and primitivity."""
    rule = _load_rule(rule_spec)
    excl = tuple(t for t in exclude.split(",") if t)
    sub = make_subsystem(rule, exclude_tiles=excl)
    cert = primitivity(sub)
    payload = {
        "rule": rule.name,
        "excluded": list(excl),
        "alphabet_size": len(sub.alphabet),
        "primitivity": cert.kind,
    }
    if entropy:
        payload["h_top"] = subsystem_entropy(sub)
    _emit_json(cfg, "subsys", payload)


@main.command("pressure")
@click.argument("rule_spec")
@click.option("--phi", default="zero", help="Potential spec.")
@click.option(
    "--method",
    default="spectral",
    type=click.Choice(["spectral", "Zn", "periodic", "preimage"]),
)
@click.option("-n", "level", default=None, type=int)
@click.pass_obj
@_guarded
def pressure_cmd(cfg: RunConfig, rule_spec, phi, method, level):
    """Topological pressure of a potential by the chosen estimator."""
    if level is not None and level > cfg.cap:
        raise ValueError(f"level {level} exceeds cap {cfg.cap}")
    rule = _load_rule(rule_spec)
    pot = _load_potential(rule, phi)
    est = thermo.pressure(rule, pot, method=method, n=level)
    _emit_json(cfg, "pressure", {"rule": rule.name, "phi": phi, **_jsonable(est)})


@main.command("rate")
@click.argument("rule_spec")
@click.option("--phi", default="zero")
@click.option("--psi", default="indicator")
@click.option("--xs", default="0:1:5", help="Grid lo:hi:count for the rate curve.")
@click.pass_obj
@_guarded
def rate_cmd(cfg: RunConfig, rule_spec, phi, psi, xs):
    """Deviation rate function K on a grid of observable values."""
    rule = _load_rule(rule_spec)
    pphi = _load_potential(rule, phi)
    ppsi = _load_potential(rule, psi)
    lo_s, hi_s, cnt_s = xs.split(":")
    lo, hi, cnt = float(lo_s), float(hi_s), int(cnt_s)
    grid = [lo + (hi - lo) * i / (cnt - 1) for i in range(cnt)] if cnt > 1 else [lo]
    curve = thermo.legendre_rate(rule, pphi, ppsi, grid)
    rows = [[x, k] for x, k in zip(curve.xs, curve.values)]
    _emit_table(
        cfg,
        "rate",
        {"rule": rule.name, "phi": phi, "psi": psi, "pressure": curve.pressure},
        ["x", "K"],
        rows,
    )


@main.command("orbits")
@click.argument("rule_spec")
@click.pass_obj
@_guarded
def orbits_cmd(cfg: RunConfig, rule_spec):
    """Critical 1-vertices, their local degrees, and 0-vertex orbits."""
    rule = _load_rule(rule_spec)
    report = orbits.critical_orbits(rule)
    _emit_json(cfg, "orbits", {"rule": rule.name, **_jsonable(report)})


@main.command("ldp")
@click.argument("rule_spec")
@click.option(
    "--mode",
    default="curve",
    type=click.Choice(["law", "curve", "pair"]),
    show_default=True,
)
@click.option("--phi", default="zero")
@click.option("--psi", default="indicator")
@click.option("-n", "level", default=8, show_default=True)
@click.option("--alpha", default=0.5, show_default=True)
@click.option(
    "--estimator",
    default="birkhoff",
    type=click.Choice(["birkhoff", "periodic", "preimage"]),
)
@click.option("--n-range", default=None, help="lo:hi[:step] levels for curves.")
@click.pass_obj
@_guarded
def ldp_cmd(cfg: RunConfig, rule_spec, mode, phi, psi, level, alpha, estimator, n_range):
    """Birkhoff-average laws, deviation curves, and pair constructions."""
    rule = _load_rule(rule_spec)
    pphi = _load_potential(rule, phi)
    ppsi = _load_potential(rule, psi)
    if mode == "law":
        if level > 4 * cfg.cap:
            raise ValueError(f"level {level} exceeds law cap {4 * cfg.cap}")
        law = ldp.birkhoff_law(rule, pphi, ppsi, level)
        rows = [[float(v), float(p)] for v, p in sorted(law.law.items())]
        _emit_table(
            cfg,
            "ldp-law",
            {"rule": rule.name, "n": level, "exact": law.exact, "mean": float(law.mean())},
            ["value", "probability"],
            rows,
        )
    elif mode == "curve":
        rng = _parse_range(n_range) if n_range else range(4, level + 1, 2)
        curve = ldp.deviation_curve(rule, pphi, ppsi, alpha, estimator, rng)
        rows = [
            [e.n, e.xi, e.xi_lo, e.xi_hi, e.rate, e.rate_lo, e.rate_hi]
            for e in curve.entries
        ]
        _emit_table(
            cfg,
            "ldp-curve",
            {
                "rule": rule.name,
                "estimator": estimator,
                "alpha": alpha,
                "asymptotic_rate": curve.asymptotic_rate,
                "legendre_value": curve.legendre_value,
                "final_gap": curve.final_gap,
                "fitted_gap": curve.fitted_gap,
            },
            ["n", "xi", "xi_lo", "xi_hi", "rate", "rate_lo", "rate_hi"],
            rows,
        )
    else:
        mm, report = ldp.pair_measure_construct(rule, pphi, [ppsi], alpha, level)
        _emit_json(cfg, "ldp-pair", {"rule": rule.name, **_jsonable(report)})


@main.command("usc")
@click.argument("rule_spec")
@click.option("--n-range", default="1:5", show_default=True)
@click.option("--coarse", default=2, show_default=True)
@click.pass_obj
@_guarded
def usc_cmd(cfg: RunConfig, rule_spec, n_range, coarse):
    """Flower-subsystem entropy growth at a periodic critical vertex."""
    rule = _load_rule(rule_spec)
    report = ldp.usc_experiment(rule, _parse_range(n_range), coarse=coarse)
    rows = [
        [e.n, e.h_top, e.h_n, e.rate_n, e.mass_outside] for e in report.entries
    ]
    _emit_table(
        cfg,
        "usc",
        {
            "rule": rule.name,
            "flaps": report.n_f,
            "grid": report.k,
            "coarse_level": report.coarse_level,
        },
        ["n", "h_top", "h_n", "rate_n", "mass_outside"],
        rows,
    )


@main.command("density")
@click.argument("rule_spec")
@click.argument("targets_file", type=click.Path(exists=True))
@click.pass_obj
@_guarded
def density_cmd(cfg: RunConfig, rule_spec, targets_file):
    """Construct an ergodic chain close in entropy and integrals to a
    convex combination of target measures.

    The targets file is JSON: {"eps": 0.05, "targets": [{"weight": "1/2",
    "exclude_tiles": ["w11","b11"]}, {"weight": "1/2"}]}.
    """
    rule = _load_rule(rule_spec)
    doc = json.loads(Path(targets_file).read_text())
    eps = float(doc["eps"])
    targets = []
    for entry in doc["targets"]:
        excl = tuple(entry.get("exclude_tiles", ()))
        sub = make_subsystem(rule, exclude_tiles=excl)
        mm = parry_equilibrium(sub)
        targets.append(
            ldp.DensityTarget(
                measure=mm, weight=float(Fraction(entry["weight"])), subsystem=sub
            )
        )
    psis = tuple(
        _load_potential(rule, spec) for spec in doc.get("observables", [])
    )
    mm, report = ldp.entropy_density_construct(rule, targets, eps, psis=psis)
    payload = _jsonable(report)
    payload.pop("plan", None)
    payload.pop("connectors", None)
    _emit_json(cfg, "density", {"rule": rule.name, **payload})


@main.command("equidist")
@click.argument("rule_spec")
@click.option("--phi", default="zero")
@click.option("--mode", default="preimage", type=click.Choice(["preimage", "periodic"]))
@click.option("--coarse", default=2, show_default=True)
@click.option("--n-range", default="4:12:2", show_default=True)
@click.pass_obj
@_guarded
def equidist_cmd(cfg: RunConfig, rule_spec, phi, mode, coarse, n_range):
    """Distance of weighted orbit averages from the equilibrium coarse law."""
    rule = _load_rule(rule_spec)
    pot = _load_potential(rule, phi)
    curve = ldp.equidistribution_curve(
        rule, pot, _parse_range(n_range), coarse=coarse, mode=mode
    )
    rows = [[e.n, e.tv, e.tv_lo, e.tv_hi, e.bracket] for e in curve.entries]
    _emit_table(
        cfg,
        "equidist",
        {"rule": rule.name, "mode": mode, "coarse": coarse},
        ["n", "tv", "tv_lo", "tv_hi", "bracket"],
        rows,
    )


@main.command("render")
@click.argument("rule_spec")
@click.option("--depth", default=2, show_default=True)
@click.option("--overlay", default=None, type=click.Choice(["subsystem", "pairs", "flower"]))
@click.option("--exclude", default="", help="Tiles removed for subsystem overlay.")
@click.option("--vertex", default=None, help="tileid:corner for flower overlay.")
@click.pass_obj
@_guarded
def render_cmd(cfg: RunConfig, rule_spec, depth, overlay, exclude, vertex):
    """Render the depth-n decomposition, one SVG per pillow face."""
    if depth > cfg.cap:
        raise ValueError(f"depth {depth} exceeds cap {cfg.cap}")
    rule = _load_rule(rule_spec)
    excl = tuple(t for t in exclude.split(",") if t)
    scene = render_svg(
        rule, depth, overlay=overlay, vertex=vertex, exclude=excl, cap=cfg.cap
    )
    stem = f"{rule.name or 'rule'}-d{depth}" + (f"-{overlay}" if overlay else "")
    for locname, svg in scene.faces.items():
        if cfg.out:
            _write_atomic(Path(cfg.out) / f"{stem}-{locname}.svg", svg)
        else:
            click.echo(svg, nl=False)


if __name__ == "__main__":
    main()
