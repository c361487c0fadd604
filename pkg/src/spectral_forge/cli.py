"""Command-line front end: model construction, verification suites, spectra,
dimension estimates, distances, q-sweeps, and report merging.

Config precedence: CLI flags > JSON config file > defaults.  All artifacts
separate run-specific metadata (header) from deterministic results (payload);
identical configurations produce byte-identical payload blocks.  Exit codes:
0 = success and all checks passed, 1 = checks ran and at least one failed,
2 = usage or configuration error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import (
    CountingPolicy,
    check_bound_3y,
    check_bound_7,
    check_nondegeneracy,
    estimate_spectral_dimension,
    structured_eigs,
    verify_d1_eigs,
    verify_dI_eigs,
    _analytic_lists,
)
from .dirac import build_bundle, check_p_injectivity
from .linop import ContractViolation, ResourceLimit, SpaceMismatch, eig_hermitian
from .metrics import (
    CirclePoint,
    QubitPoint,
    SolverOptions,
    connes_distance,
    default_basis,
    q_sweep,
)
from .models import (
    circle_triple,
    podles_model,
    suq2_model,
    toeplitz_extension,
    two_point_triple,
)
from .reporting import (
    canonical_json,
    float17,
    read_artifact,
    render_table,
    write_artifact,
    write_csv,
    write_operator_bin,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

DEFAULTS: dict = {
    "model": None,
    "fiber": None,
    "q": 0.5,
    "N": 64,
    "W": 64,
    "lambda": 0.5,
    "degree_cap": 3,
    "fourier_cap": 16,
    "seed": 0,
    "samples": None,
    "threads": None,
    "max_iter": 20000,
    "tol": None,
    "margin": 1,
    "format": "json",
    "out": None,
}

_LIB_ERRORS = (ContractViolation, ResourceLimit, SpaceMismatch)


def _env_threads() -> int | None:
    raw = os.environ.get("SPECTRAL_FORGE_THREADS")
    if raw is None or raw == "":
        return None
    try:
        return max(int(raw), 1)
    except ValueError as exc:
        raise click.UsageError(f"SPECTRAL_FORGE_THREADS={raw!r} is not an integer") from exc


def _resolve(params: dict, config_path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise click.UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"malformed JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise click.UsageError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(DEFAULTS))
        if unknown:
            raise click.UsageError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for key, val in params.items():
        if val is not None:
            cfg[key] = val
    if cfg["threads"] is None:
        cfg["threads"] = _env_threads() or 1
    return cfg


def _descriptor(cfg: dict) -> dict:
    return {"model": cfg["model"], "q": float(cfg["q"]), "N": int(cfg["N"]),
            "W": int(cfg["W"]), "lambda": float(cfg["lambda"]),
            "degree_cap": int(cfg["degree_cap"])}


def _require_model(cfg: dict) -> str:
    model = cfg.get("model")
    if model not in ("circle", "two_point", "suq2", "podles"):
        raise click.UsageError("--model is required "
                               "(circle, two_point, suq2, podles)")
    return model


def _build_triple(cfg: dict):
    model = _require_model(cfg)
    if model == "circle":
        return circle_triple(int(cfg["W"]), float(cfg["lambda"]))
    if model == "two_point":
        return two_point_triple()
    raise click.UsageError(f"model {model!r} is an extension; "
                           "this command needs a plain triple")


def _build_extension(cfg: dict):
    model = _require_model(cfg)
    if model == "suq2":
        return suq2_model(float(cfg["q"]), int(cfg["N"]), int(cfg["W"]),
                          float(cfg["lambda"]))
    if model == "podles":
        return podles_model(float(cfg["q"]), int(cfg["N"]), float(cfg["lambda"]))
    if model == "circle":
        fiber_kind = cfg.get("fiber") or "two_point"
        quotient = circle_triple(int(cfg["W"]), float(cfg["lambda"]))
        if fiber_kind == "two_point":
            return toeplitz_extension(quotient, two_point_triple())
        if fiber_kind == "circle":
            return toeplitz_extension(quotient, circle_triple(int(cfg["W"]), 0.0))
        raise click.UsageError(f"unsupported fiber {fiber_kind!r}")
    raise click.UsageError(f"model {model!r} has no extension bundle")


def _structured_desc(cfg: dict) -> dict:
    desc = _descriptor(cfg)
    if cfg["model"] == "circle" and cfg.get("fiber"):
        desc["fiber"] = cfg["fiber"]
    return desc


def _guard(fn):
    try:
        return fn()
    except _LIB_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _parse_angle(expr: str) -> float:
    s = expr.strip().replace(" ", "")
    sign = 1.0
    if s.startswith("-"):
        sign, s = -1.0, s[1:]
    try:
        if "pi" in s:
            left, _, right = s.partition("pi")
            factor = 1.0 if left == "" else float(left)
            denom = 1.0
            if right.startswith("/"):
                denom = float(right[1:])
            elif right:
                raise ValueError(right)
            return sign * factor * np.pi / denom
        return sign * float(s)
    except ValueError as exc:
        raise click.UsageError(f"cannot parse angle {expr!r}") from exc


def _parse_state(token: str):
    t = token.strip()
    if t in ("delta1", "point:1"):
        return QubitPoint(1)
    if t in ("delta2", "point:2"):
        return QubitPoint(2)
    if t.startswith("theta:"):
        return CirclePoint(_parse_angle(t[len("theta:"):]))
    raise click.UsageError(
        f"cannot parse state {token!r}; use delta1/delta2 or theta:<angle>")


def _parse_pair(pair: str):
    parts = pair.split(",")
    if len(parts) != 2:
        raise click.UsageError(f"--pair needs exactly two states, got {pair!r}")
    return pair, _parse_state(parts[0]), _parse_state(parts[1])


def _out_dir(cfg: dict) -> Path | None:
    out = cfg.get("out")
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise click.UsageError(f"output directory {path} is not writable")
    return path


def _common_options(f):
    decorators = [
        click.option("--model", type=click.Choice(
            ["circle", "two_point", "suq2", "podles"]), default=None,
            help="Model family."),
        click.option("--fiber", type=click.Choice(["two_point", "circle"]),
                     default=None, help="Fiber pairing for circle bundles."),
        click.option("--q", type=float, default=None,
                     help="Deformation parameter in (0,1)."),
        click.option("--N", "N", type=int, default=None,
                     help="Corner cutoff (rank of the Toeplitz projection)."),
        click.option("--W", "W", type=int, default=None,
                     help="Circle window half-width."),
        click.option("--lambda", "lambda_", type=float, default=None,
                     help="Diagonal shift of the circle Dirac."),
        click.option("--degree-cap", type=int, default=None,
                     help="Monomial degree cap for generator spans."),
        click.option("--fourier-cap", type=int, default=None,
                     help="Fourier mode cap for circle spans."),
        click.option("--seed", type=int, default=None),
        click.option("--samples", type=int, default=None),
        click.option("--threads", type=int, default=None,
                     help="Worker cap; never changes results."),
        click.option("--max-iter", type=int, default=None),
        click.option("--tol", type=float, default=None),
        click.option("--margin", type=int, default=None,
                     help="Interior margin for relation residuals."),
        click.option("--config", "config_path",
                     type=click.Path(dir_okay=False), default=None,
                     help="JSON config file (CLI flags win)."),
        click.option("--out", type=click.Path(file_okay=False), default=None,
                     help="Artifact output directory."),
        click.option("--format", "format", type=click.Choice(
            ["json", "csv", "text"]), default=None),
    ]
    for d in reversed(decorators):
        f = d(f)
    return f


def _collect(kwargs: dict) -> dict:
    remap = {"lambda_": "lambda"}
    params = {}
    for k, v in kwargs.items():
        if k == "config_path":
            continue
        params[remap.get(k, k)] = v
    return _resolve(params, kwargs.get("config_path"))


@click.group()
@click.version_option(version=__version__, prog_name="spectral-forge")
def main():
    """Finite-truncation laboratory for Dirac operators on Toeplitz-type
    extensions: spectra, dimension estimates, bound checks, and state-space
    distances."""


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


@main.command()
@_common_options
def build(**kwargs):
    """Construct a model and export its operators (descriptor JSON header
    plus little-endian float64 (re,im) row-major binary dumps)."""
    cfg = _collect(kwargs)
    model = _require_model(cfg)
    out = _out_dir(cfg) or Path(".")
    files: dict[str, dict] = {}

    def dump(name: str, mat: np.ndarray):
        path = out / f"{name}.bin"
        write_operator_bin(path, mat)
        files[name] = {"file": path.name, "dim": int(mat.shape[0])}

    if model in ("circle", "two_point") and not cfg.get("fiber"):
        triple = _guard(lambda: _build_triple(cfg))
        dump("dirac", triple.dirac.mat)
        dims = {"space": triple.space.dim}
    else:
        ext = _guard(lambda: _build_extension(cfg))
        bundle = _guard(lambda: build_bundle(ext))
        dump("quotient_dirac", bundle.delta_a.mat)
        dump("fiber_dirac", bundle.delta_b.mat)
        dump("projection", ext.projection.mat)
        dump("d1", bundle.d1.mat)
        dump("di", bundle.di.mat)
        dump("d", bundle.d.mat)
        dims = {"product": bundle.space_ab.dim, "total": bundle.d.dim}
    payload = {"descriptor": _descriptor(cfg), "operators": files, "dims": dims}
    write_artifact(out / "manifest.json", "build", payload)
    click.echo(f"wrote {len(files)} operator dumps to {out}")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def _dense_spectrum(cfg: dict, operator: str):
    model = cfg["model"]
    if model in ("circle", "two_point") and not cfg.get("fiber"):
        if operator not in ("dirac", "d"):
            raise click.UsageError(
                "plain triples expose only the full Dirac (--operator dirac)")
        return _build_triple(cfg).dirac_eigs
    ext = _build_extension(cfg)
    bundle = build_bundle(ext)
    op = {"d1": bundle.d1, "di": bundle.di, "d": bundle.d,
          "dirac": bundle.d}.get(operator)
    if op is None:
        raise click.UsageError(f"unknown operator {operator!r}")
    return eig_hermitian(op)


@main.command()
@_common_options
@click.option("--operator", type=click.Choice(["d1", "di", "d", "dirac"]),
              default="d")
@click.option("--structured", is_flag=True, default=False,
              help="Use certified closed-form eigenvalues (large sizes).")
def spectrum(operator, structured, **kwargs):
    """Eigenvalues of the assembled Dirac blocks."""
    cfg = _collect(kwargs)
    _require_model(cfg)
    if structured:
        spec = _guard(lambda: structured_eigs(_structured_desc(cfg), operator))
    else:
        spec = _guard(lambda: _dense_spectrum(cfg, operator))
    payload = {"descriptor": _descriptor(cfg), "operator": operator,
               "method": spec.meta.get("method", "dense"),
               "count": spec.count,
               "values": [float(v) for v in spec.values],
               "multiplicities": [int(m) for m in spec.multiplicities]}
    out = _out_dir(cfg)
    if out:
        write_artifact(out / "spectrum.json", "spectrum", payload)
    lo, hi = float(spec.values[0]), float(spec.values[-1])
    if cfg["format"] == "text":
        rows = list(zip(spec.values, spec.multiplicities))
        click.echo(render_table(["eigenvalue", "multiplicity"], rows), nl=False)
    else:
        click.echo(f"count {spec.count} range [{float17(lo)}, {float17(hi)}]")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# dimension
# ---------------------------------------------------------------------------


@main.command()
@_common_options
@click.option("--window-lo", type=float, default=0.1, show_default=True,
              help="Lower counting radius as a fraction of max |eigenvalue|.")
@click.option("--window-hi", type=float, default=0.8, show_default=True,
              help="Upper counting radius as a fraction of max |eigenvalue|.")
@click.option("--operator", type=click.Choice(["d1", "di", "d", "dirac"]),
              default="d")
@click.option("--dense", is_flag=True, default=False,
              help="Force dense eigensolves instead of certified closed forms.")
def dimension(window_lo, window_hi, operator, dense, **kwargs):
    """Spectral-dimension estimate from the eigenvalue counting function."""
    cfg = _collect(kwargs)
    model = _require_model(cfg)
    policy = CountingPolicy(window_lo=window_lo, window_hi=window_hi)
    use_structured = not dense and model != "two_point"
    if use_structured:
        op = "dirac" if (model == "circle" and not cfg.get("fiber")) else operator
        spec = _guard(lambda: structured_eigs(_structured_desc(cfg), op))
    else:
        spec = _guard(lambda: _dense_spectrum(
            cfg, "dirac" if model in ("circle", "two_point")
            and not cfg.get("fiber") else operator))
    if spec.count < policy.min_count:
        # a handful of eigenvalues is a bounded operator: dimension zero
        payload = {"descriptor": _descriptor(cfg), "operator": operator,
                   "slope": 0.0, "finite_spectrum": True, "count": spec.count}
        out = _out_dir(cfg)
        if out:
            write_artifact(out / "dimension.json", "dimension", payload)
        click.echo("s0 = 0 (finite spectrum, no counting window)")
        sys.exit(EXIT_OK)
    est = _guard(lambda: estimate_spectral_dimension(spec, policy))
    payload = {"descriptor": _descriptor(cfg), "operator": operator,
               "method": spec.meta.get("method", "dense"),
               "finite_spectrum": False, **est.to_payload()}
    out = _out_dir(cfg)
    if out:
        write_artifact(out / "dimension.json", "dimension", payload)
    click.echo(f"s0 = {est.slope:.6f} +- {est.ci_halfwidth:.6f} "
               f"({est.count_points} points)")
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_eigs(cfg: dict) -> tuple[dict, bool, list[str]]:
    ext = _build_extension(cfg)
    bundle = build_bundle(ext)
    desc = _structured_desc(cfg)
    if cfg["model"] == "circle" and "fiber" not in desc:
        desc["fiber"] = "two_point"
    lam, mu = _analytic_lists(desc)
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-9
    c1 = verify_d1_eigs(lam, mu, eig_hermitian(bundle.d1), tol)
    ci = verify_dI_eigs(lam, mu, eig_hermitian(bundle.di), tol)
    lines = [
        f"eigs base: max_dev {float17(c1.max_deviation)} "
        f"(tol {float17(tol)}) {'PASS' if c1.passed else 'FAIL'}",
        f"eigs interface: max_dev {float17(ci.max_deviation)} "
        f"(tol {float17(tol)}) {'PASS' if ci.passed else 'FAIL'}",
    ]
    payload = {"d1": c1.to_payload(), "di": ci.to_payload()}
    return payload, c1.passed and ci.passed, lines


def _verify_relations(cfg: dict) -> tuple[dict, bool, list[str]]:
    ext = _build_extension(cfg)
    if not ext.relation_defects:
        raise click.UsageError(
            f"model {cfg['model']!r} declares no algebra relations")
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-12
    res = ext.relation_residuals(margin=int(cfg["margin"]))
    ok = all(v <= tol for v in res.values())
    lines = [f"relation {name}: residual {float17(v)} "
             f"{'PASS' if v <= tol else 'FAIL'}"
             for name, v in sorted(res.items())]
    return {"residuals": res, "tol": tol, "margin": int(cfg["margin"])}, ok, lines


def _verify_smoothness(cfg: dict) -> tuple[dict, bool, list[str]]:
    from .models import check_toeplitz_conditions
    ext = _build_extension(cfg)
    rep = check_toeplitz_conditions(ext)
    pinj = check_p_injectivity(ext)
    lines = []
    for name, row in sorted(rep.generator_rows.items()):
        lines.append(
            f"smoothness {name}: |[P,a]| {float17(row['norm_comm_proj'])} "
            f"rank {int(row['rank_comm_proj'])} "
            f"split defect {float17(row['split_identity_defect'])}")
    lines.append(f"smoothness corner inverse: min singular "
                 f"{float17(pinj.min_singular)} "
                 f"{'PASS' if pinj.passed else 'FAIL'}")
    ok = rep.passed and pinj.passed
    lines.append(f"smoothness overall: {'PASS' if ok else 'FAIL'}")
    payload = rep.to_payload()
    payload["p_injectivity"] = pinj.to_payload()
    return payload, ok, lines


def _verify_sampled(cfg: dict, suite: str) -> tuple[dict, bool, list[str]]:
    ext = _build_extension(cfg)
    bundle = build_bundle(ext)
    seed = int(cfg["seed"])
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-9
    if suite == "bounds7":
        rep = check_bound_7(bundle, samples=int(cfg["samples"] or 200),
                            seed=seed, tol=tol)
        lines = [f"bound {name}: worst {float17(rep.worst[name])} "
                 f"(allowed {float17(b)})" for name, b in sorted(rep.bounds.items())]
    elif suite == "bounds3y":
        rep = check_bound_3y(bundle, samples=int(cfg["samples"] or 100),
                             seed=seed, tol=tol)
        lines = [f"bound {name}: worst {float17(rep.worst[name])} "
                 f"(allowed {float17(b)})" for name, b in sorted(rep.bounds.items())]
        lines.append(f"bound corner-inverse norm: {float17(rep.extra['norm_y'])}")
    else:
        nd = check_nondegeneracy(bundle, samples=int(cfg["samples"] or 500),
                                 seed=seed)
        lines = [
            f"nondegeneracy unit: L {float17(nd.unit_seminorm)}",
            f"nondegeneracy min over samples: {float17(nd.min_seminorm)} "
            f"(threshold {float17(nd.threshold)})",
        ]
        lines.append(f"nondegeneracy: {'PASS' if nd.passed else 'FAIL'}")
        return nd.to_payload(), nd.passed, lines
    lines.append(f"{suite} violations: {len(rep.violations)} "
                 f"{'PASS' if rep.passed else 'FAIL'}")
    return rep.to_payload(), rep.passed, lines


@main.command()
@_common_options
@click.option("--suite", type=click.Choice(
    ["eigs", "relations", "smoothness", "bounds7", "bounds3y",
     "nondegeneracy"]), required=True)
def verify(suite, **kwargs):
    """Run one verification suite and report PASS/FAIL per check."""
    cfg = _collect(kwargs)
    _require_model(cfg)
    runners = {
        "eigs": lambda: _verify_eigs(cfg),
        "relations": lambda: _verify_relations(cfg),
        "smoothness": lambda: _verify_smoothness(cfg),
        "bounds7": lambda: _verify_sampled(cfg, "bounds7"),
        "bounds3y": lambda: _verify_sampled(cfg, "bounds3y"),
        "nondegeneracy": lambda: _verify_sampled(cfg, "nondegeneracy"),
    }
    payload, ok, lines = _guard(runners[suite])
    payload = {"suite": suite, "descriptor": _descriptor(cfg), **payload}
    out = _out_dir(cfg)
    if out:
        write_artifact(out / f"verify_{suite}.json", f"verify_{suite}", payload)
    for line in lines:
        click.echo(line)
    sys.exit(EXIT_OK if ok else EXIT_FAILED)


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------


def _distance_context(cfg: dict):
    model = _require_model(cfg)
    if model == "two_point":
        return two_point_triple()
    if model == "circle" and not cfg.get("fiber"):
        return circle_triple(int(cfg["W"]), float(cfg["lambda"]))
    ext = _build_extension(cfg)
    return build_bundle(ext)


@main.command()
@_common_options
@click.option("--pair", "pairs", multiple=True, required=True,
              help="Two comma-separated states, e.g. delta1,delta2 or "
                   "theta:0,theta:pi.")
def distance(pairs, **kwargs):
    """Certified lower bounds on the state distance for each pair."""
    cfg = _collect(kwargs)
    context = _guard(lambda: _distance_context(cfg))
    opts = SolverOptions(max_iter=int(cfg["max_iter"]))
    basis = _guard(lambda: default_basis(
        context, fourier_cap=int(cfg["fourier_cap"]),
        degree_cap=int(cfg["degree_cap"])))
    results = []
    for pair in pairs:
        pair_id, sa, sb = _parse_pair(pair)
        res = _guard(lambda: connes_distance(context, sa, sb, basis, opts))
        results.append((pair_id, res))
        click.echo(f"{res.value:.9f}")
    payload = {"descriptor": _descriptor(cfg),
               "pairs": [{"pair_id": pid, **r.to_payload()}
                         for pid, r in results]}
    out = _out_dir(cfg)
    if out:
        write_artifact(out / "distance.json", "distance", payload)
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# sweep-q
# ---------------------------------------------------------------------------


@main.command(name="sweep-q")
@_common_options
@click.option("--from", "q_from", type=float, required=True)
@click.option("--to", "q_to", type=float, required=True)
@click.option("--step", "q_step", type=float, required=True)
@click.option("--pair", "pairs", multiple=True, required=True)
def sweep_q(q_from, q_to, q_step, pairs, **kwargs):
    """Distances for fixed state pairs across a deformation-parameter grid."""
    cfg = _collect(kwargs)
    model = _require_model(cfg)
    if model not in ("suq2", "podles"):
        raise click.UsageError("sweep-q needs a deformed model (suq2/podles)")
    if q_step <= 0 or q_to < q_from:
        raise click.UsageError("need --from <= --to and --step > 0")
    n_steps = int(round((q_to - q_from) / q_step))
    grid = [q_from + i * q_step for i in range(n_steps + 1)
            if q_from + i * q_step <= q_to + 1e-12]
    parsed = [_parse_pair(p) for p in pairs]
    opts = SolverOptions(max_iter=int(cfg["max_iter"]))

    def build_context(q: float):
        local = dict(cfg)
        local["q"] = q
        return build_bundle(_build_extension(local))

    table = q_sweep(build_context, grid, parsed, options=opts,
                    fourier_cap=int(cfg["fourier_cap"]),
                    degree_cap=int(cfg["degree_cap"]))
    rows = [(r.q, r.pair_id, r.distance, r.seminorm_at_witness,
             r.iterations, r.converged) for r in table.rows]
    out = _out_dir(cfg)
    if out:
        write_csv(out / "sweep_q.csv",
                  "q,pair_id,distance,seminorm_at_witness,iterations,converged",
                  rows)
        write_artifact(out / "sweep_q.json", "sweep_q",
                       {"descriptor": _descriptor(cfg), **table.to_payload()})
    for r in table.rows:
        status = "ok" if not r.error else f"error: {r.error}"
        click.echo(f"q={float17(r.q)} {r.pair_id} -> {r.distance:.9f} [{status}]")
    failed = any(r.error for r in table.rows)
    sys.exit(EXIT_FAILED if failed else EXIT_OK)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _summarize(kind: str, payload: dict) -> str:
    if kind == "dimension":
        if payload.get("finite_spectrum"):
            return "s0 = 0 (finite spectrum)"
        return (f"s0 = {float17(payload['slope'])} "
                f"+- {float17(payload['ci_halfwidth'])}")
    if kind == "spectrum":
        return f"{payload['count']} eigenvalues ({payload['method']})"
    if kind.startswith("verify_"):
        flat = canonical_json(payload)
        return "no violations" if '"passed":true' in flat or \
            '"violations":[]' in flat else "see payload"
    if kind == "sweep_q":
        return f"{len(payload.get('rows', []))} sweep rows"
    if kind == "distance":
        vals = [float17(p["value"]) for p in payload.get("pairs", [])]
        return "values: " + ", ".join(vals)
    return "artifact"


@main.command()
@click.option("--out", type=click.Path(file_okay=False), required=True,
              help="Directory holding run artifacts; report files go there too.")
@click.argument("inputs", nargs=-1, type=click.Path())
def report(out, inputs):
    """Merge run artifacts into one human summary, a machine index, and
    plot-data (x,y) files for counting functions and sweeps."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = [Path(p) for p in inputs] if inputs else sorted(
        p for p in out_dir.glob("*.json")
        if p.name not in ("report.json", "manifest.json"))
    sections = []
    index = []
    text_lines = ["artifact report", "================", ""]
    for path in names:
        if not path.exists():
            index.append({"file": path.name, "status": "absent"})
            text_lines.append(f"{path.name}: ABSENT")
            continue
        try:
            art = read_artifact(path)
            kind = art.get("header", {}).get("kind", "unknown")
            payload = art.get("payload", {})
        except (json.JSONDecodeError, OSError):
            index.append({"file": path.name, "status": "unreadable"})
            text_lines.append(f"{path.name}: UNREADABLE")
            continue
        digest = art.get("header", {}).get("payload_sha256", "")
        summary = _summarize(kind, payload)
        index.append({"file": path.name, "status": "ok", "kind": kind,
                      "payload_sha256": digest, "summary": summary})
        text_lines.append(f"{path.name} [{kind}]: {summary}")
        stem = path.stem
        if kind == "dimension" and not payload.get("finite_spectrum"):
            rows = list(zip(payload.get("radii", []), payload.get("counts", [])))
            if rows:
                write_csv(out_dir / f"plot_{stem}.csv", "x,y", rows)
                sections.append(f"plot_{stem}.csv")
        if kind == "sweep_q":
            by_pair: dict[str, list] = {}
            for r in payload.get("rows", []):
                by_pair.setdefault(r["pair_id"], []).append(
                    (r["q"], r["distance"]))
            for pid, rows in sorted(by_pair.items()):
                safe = "".join(ch if ch.isalnum() else "_" for ch in pid)
                write_csv(out_dir / f"plot_{stem}_{safe}.csv", "x,y", rows)
                sections.append(f"plot_{stem}_{safe}.csv")
    if not index:
        text_lines.append("(no artifacts found)")
    if sections:
        text_lines.append("")
        text_lines.append("plot data: " + ", ".join(sorted(sections)))
    write_artifact(out_dir / "report.json", "report",
                   {"artifacts": index, "plots": sorted(sections)})
    (out_dir / "report.txt").write_text("\n".join(text_lines) + "\n",
                                        encoding="utf-8")
    click.echo("\n".join(text_lines))
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
