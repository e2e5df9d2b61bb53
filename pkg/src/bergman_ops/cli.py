"""Command-line front end: single checks, grid sweeps and convergence studies.

Examples::

    bergman-ops check --theorem T2_1 --config point.json
    bergman-ops sweep --theorem T2_1 --config grid.json --seed 7 --out sweep.json
    bergman-ops converge --check LemmaAdjoint --orders 32,48,64,96 --config point.json

Exit codes: 0 outcome matches expectation, 1 mismatch, 2 configuration
error, 3 internal path disagreement.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checkers as ck
from .errors import BergmanOpsError, PathDisagreement
from .families import (
    AutomorphismForm,
    BergmanFamilyParams,
    S21FamilyParams,
    automorphism_cs_family,
    automorphism_form,
    bergman_cs_family,
    hermitian_family,
    s21_family,
)
from .operators import ConjugationSpec, build_matrix
from .reporting import dumps, to_csv
from .spaces import SpaceSpec

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

THEOREMS = ("T2_1", "T2_2", "T2_3", "T2_4", "T2_5", "LemmaAdjoint")
CONVERGE_CHECKS = ("LemmaAdjoint", "KernelSymmetry")

DEFAULT_TOL = {"T2_1": 1e-9, "T2_2": 1e-9, "T2_3": 1e-9, "T2_4": 1e-10, "T2_5": 1e-9,
               "LemmaAdjoint": 1e-6, "KernelSymmetry": 1e-12}

DEFAULT_SAMPLES = [
    (0.2, 0.5), (0.1j, 0.4), (-0.3 + 0.2j, 0.25 - 0.1j), (0.6, -0.5j), (0.45j, -0.35),
]

# absolute level below which residual growth is rounding noise
CONVERGE_FLOOR = 1e-14


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    theorem_id: str
    space: SpaceSpec | None = None
    params: dict = field(default_factory=dict)
    trunc_order: int = 48
    tolerance: float | None = None
    seed: int = 0
    grid: dict = field(default_factory=dict)
    orders: list = field(default_factory=lambda: [32, 48, 64, 96])
    output_path: str | None = None
    output_format: str = "json"

    def validate(self):
        ids = CONVERGE_CHECKS if self.command == "converge" else THEOREMS
        if self.theorem_id not in ids:
            raise ConfigError(f"unknown id {self.theorem_id!r}; expected one of {ids}")
        for N in [self.trunc_order] + (list(self.orders) if self.command == "converge" else []):
            if not isinstance(N, int) or not 8 <= N <= 512:
                raise ConfigError(f"truncation order must be an integer in [8, 512], got {N!r}")
        if self.tolerance is not None and not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ConfigError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.output_format!r}")

    @property
    def tol(self) -> float:
        return self.tolerance if self.tolerance is not None else DEFAULT_TOL[self.theorem_id]


# -- parameter decoding ------------------------------------------------------

def _cplx(v, name) -> complex:
    """Complex inputs arrive as ``[re, im]``; bare reals are accepted."""
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{name} must be a number or an [re, im] pair, got {v!r}")


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _get(params, name, default=None, kind="complex"):
    if name not in params:
        if default is None:
            raise ConfigError(f"missing parameter {name!r}")
        return default
    v = params[name]
    if kind == "complex":
        return _cplx(v, name)
    if kind == "int":
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{name} must be an integer")
        return v
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{name} must be a real number")
    return float(v)


def _conj(params) -> ConjugationSpec:
    return ConjugationSpec.from_angles(_get(params, "mu_angle", 0.0, "real"),
                                       _get(params, "eta_angle", 0.0, "real"))


def _samples(params):
    raw = params.get("samples")
    if raw is None:
        return DEFAULT_SAMPLES
    try:
        return [(_cplx(z, "sample z"), _cplx(w, "sample w")) for z, w in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad samples: {exc}") from exc


def _space_for(theorem, space, params):
    if theorem == "T2_5":
        return SpaceSpec.derivative_hardy()
    if theorem == "LemmaAdjoint" and space is not None:
        return space
    if space is not None and not space.is_bergman:
        raise ConfigError(f"{theorem} lives on the Bergman space")
    alpha = _get(params, "alpha", space.alpha if space is not None else 0.0, "real")
    try:
        return SpaceSpec.bergman(alpha)
    except BergmanOpsError as exc:
        raise ConfigError(str(exc)) from exc


def _bergman_params(params, b=None):
    return BergmanFamilyParams(
        _get(params, "a", 1.0), _get(params, "b", 0.0) if b is None else b, _get(params, "c"),
        _get(params, "n", 1, "int"), _get(params, "alpha", 0.0, "real"), _conj(params))


def _is_real(z: complex) -> bool:
    return z.imag == 0.0


def evaluate_point(theorem: str, params: dict, space: SpaceSpec | None, N: int, tol: float):
    """Run the checks for one parameter point.

    Returns ``(expected, records)`` where ``records`` are :class:`CheckReport`.
    """
    space = _space_for(theorem, space, params)
    eps = _get(params, "perturb_eps", 0.0, "real")
    echo = dict(params)
    records = []
    if theorem in ("T2_1", "T2_3"):
        p = _bergman_params(params, b=0j if theorem == "T2_3" else None)
        if theorem == "T2_3" and _get(params, "b", 0.0) != 0:
            raise ConfigError("T2_3 needs phi(0) = 0, i.e. b = 0")
        sym = bergman_cs_family(p, N)
        if eps > 0:
            sym = ck.perturbed(sym, eps, N)
        T = build_matrix(sym, space, N)
        records.append(ck.check_complex_symmetric(T, p.conj, tol, echo))
        if theorem == "T2_1":
            records.append(ck.kernel_symmetry_residual(sym, space, p.conj, _samples(params), N,
                                                       ck.TOL_CLOSED_FORM, echo))
        else:
            records.append(ck.check_normal(T, tol, echo))
            off = T.entries - np.diag(np.diag(T.entries))
            records.append(ck.CheckReport("diagonal", float(np.max(np.abs(off))), 1e-14, N,
                                          ck._argmax_witness(off), echo))
        expected = ck.FAIL if eps > 0 else ck.PASS
    elif theorem == "T2_2":
        a0 = _get(params, "a0")
        if not 0 < abs(a0) < 1:
            raise ConfigError(f"a0 must satisfy 0 < |a0| < 1, got {a0}")
        c = _conj(params)
        sym = automorphism_cs_family(a0, c.eta, _get(params, "a", 1.0), _get(params, "n", 1, "int"),
                                     space.alpha, c.mu, N)
        disc = automorphism_form(AutomorphismForm.disc(a0, c.eta), N)
        D = sym.phi.window(N).coeffs - disc.coeffs
        records.append(ck.CheckReport("disc_consistency", float(np.max(np.abs(D))), ck.TOL_CLOSED_FORM,
                                      N, (int(np.argmax(np.abs(D))),), echo))
        records.append(ck.check_complex_symmetric(build_matrix(sym, space, N), c, tol, echo))
        expected = ck.PASS
    elif theorem == "T2_4":
        a, b, c = _get(params, "a", 1.0), _get(params, "b", 0.0), _get(params, "c")
        sym = hermitian_family(a, b, c, _get(params, "n", 1, "int"), space.alpha, N)
        records.append(ck.check_hermitian(build_matrix(sym, space, N), tol, echo))
        records.append(ck.hermitian_kernel_residual(sym, space, _samples(params), ck.TOL_CLOSED_FORM, echo))
        expected = ck.PASS if (_is_real(a) and _is_real(c)) else ck.FAIL
    elif theorem == "T2_5":
        p = S21FamilyParams(_get(params, "a", 1.0), _get(params, "b"), _get(params, "c"),
                            _get(params, "n", 1, "int"), _conj(params))
        rep = ck.check_s21_obstruction(p, N, tol)
        rep.params_echo = echo
        records.append(rep)
        records.append(ck.kernel_symmetry_residual(s21_family(p, N), space, p.conj, _samples(params),
                                                   N, ck.TOL_CLOSED_FORM, echo))
        expected = rep.extras["expected"]
    else:  # LemmaAdjoint
        w = _get(params, "w", 0.5 + 0j)
        if space.is_bergman:
            sym = bergman_cs_family(_bergman_params(params), N)
        else:
            sym = s21_family(S21FamilyParams(_get(params, "a", 1.0), _get(params, "b"), _get(params, "c"),
                                             _get(params, "n", 1, "int"), _conj(params)), N)
        records.append(ck.check_kernel_adjoint_identity(sym, space, w, N, tol, echo))
        expected = ck.PASS
    return expected, records


def _combined(records) -> str:
    verdicts = {r.verdict for r in records}
    return verdicts.pop() if len(verdicts) == 1 else "Split"


def run_point(theorem, params, space, N, tol, index=0) -> dict:
    expected, records = evaluate_point(theorem, params, space, N, tol)
    verdict = _combined(records)
    return {
        "index": index,
        "theorem": theorem,
        "expected": expected,
        "verdict": verdict,
        "match": verdict == expected,
        "max_residual": float(records[0].max_residual),
        "records": [r.to_dict() for r in records],
    }


# -- grids -------------------------------------------------------------------

def _circle(k: int) -> list[float]:
    return [2 * math.pi * i / k for i in range(k)]


def _lattice_b(radii, nargs):
    out = []
    for r in radii:
        out.extend([0j] if r == 0 else [r * np.exp(1j * t) for t in _circle(nargs)])
    return out


def build_grid(theorem: str, grid: dict, seed: int) -> list[dict]:
    """Deterministic lattice plus ``n_random`` seeded interior points."""
    g = dict(grid)
    rng = np.random.default_rng(seed)
    orders = g.get("orders", [1, 2, 3])
    alphas = g.get("alphas", [-0.5, 0.0, 1.0, 2.5])
    eta_pts, mu_pts = g.get("eta_points", 8), g.get("mu_points", 8)
    a_values = [_cplx(a, "a_values") for a in g.get("a_values", [1.0, [0.6, -0.8]])]
    n_random = g.get("n_random", 15)
    eps = g.get("perturb_eps", 0.0)
    points: list[dict] = []

    def decorate(i, d):
        d.setdefault("n", orders[i % len(orders)])
        d.setdefault("eta_angle", _circle(eta_pts)[i % eta_pts])
        d.setdefault("mu_angle", _circle(mu_pts)[(3 * i) % mu_pts])
        if eps:
            d["perturb_eps"] = eps
        return d

    if theorem in ("T2_1", "LemmaAdjoint"):
        b_max = g.get("b_max", 0.45)
        c_frac = g.get("c_fractions", [0.2, 0.4])
        bs = _lattice_b(g.get("b_radii", [0.0, 0.15, 0.3, 0.45]), g.get("b_args", 4))
        lattice = [(b, f, t) for b in bs for f in c_frac for t in _circle(g.get("c_args", 2))]
        rand = [(rng.uniform(0, b_max) * np.exp(2j * math.pi * rng.uniform()),
                 rng.uniform(0.05, max(c_frac)), 2 * math.pi * rng.uniform()) for _ in range(n_random)]
        for i, (b, f, t) in enumerate(lattice + rand):
            c = f * (1 - abs(b)) ** 2 * np.exp(1j * t)
            d = {"a": _pair(a_values[i % len(a_values)]), "b": _pair(b), "c": _pair(c),
                 "alpha": alphas[i % len(alphas)]}
            if theorem == "LemmaAdjoint":
                d["w"] = _pair(g.get("w_radius", 0.5) * np.exp(1j * _circle(5)[i % 5]))
            points.append(decorate(i, d))
    elif theorem == "T2_2":
        radii = g.get("a0_radii", [0.1, 0.25, 0.4, 0.5, 0.6])
        a0s = [r * np.exp(1j * t) for r in radii for t in _circle(g.get("a0_args", 4))]
        a0s += [rng.uniform(0.05, 0.6) * np.exp(2j * math.pi * rng.uniform()) for _ in range(n_random)]
        for i, a0 in enumerate(a0s):
            d = {"a0": _pair(a0), "a": _pair(a_values[i % len(a_values)]), "alpha": alphas[i % len(alphas)]}
            points.append(decorate(i, d))
    elif theorem == "T2_3":
        cs = [r * np.exp(1j * t) for r in g.get("c_radii", [0.3, 0.6, 0.9]) for t in _circle(g.get("c_args", 4))]
        for i, c in enumerate(cs):
            d = {"a": _pair(a_values[i % len(a_values)]), "b": 0.0, "c": _pair(c), "alpha": alphas[i % len(alphas)]}
            points.append(decorate(i, d))
    elif theorem == "T2_4":
        rot_a, rot_c = g.get("a_rotation", 0.0), g.get("c_rotation", 0.0)
        bs = _lattice_b(g.get("b_radii", [0.0, 0.15, 0.3, 0.45]), g.get("b_args", 4))
        reals = g.get("real_values", [1.0, -0.7])
        lattice = [(b, a, f) for b in bs for a in reals for f in g.get("c_fractions", [0.3, -0.6])]
        rand = [(rng.uniform(0, 0.45) * np.exp(2j * math.pi * rng.uniform()), rng.uniform(-2, 2),
                 rng.uniform(-0.6, 0.6)) for _ in range(n_random)]
        for i, (b, a, f) in enumerate(lattice + rand):
            c = f * (1 - abs(b)) ** 2
            d = {"a": _pair(a * np.exp(1j * rot_a)), "b": _pair(b), "c": _pair(c * np.exp(1j * rot_c)),
                 "alpha": alphas[i % len(alphas)], "n": orders[i % len(orders)]}
            points.append(d)
    elif theorem == "T2_5":
        bs = g.get("b_values", [0.0, 0.3, [0.1, 0.25]])
        cs = g.get("c_values", [0.0, 0.2, [0.0, -0.15]])
        for i, (b, c) in enumerate(itertools.product(bs, cs)):
            points.append(decorate(i, {"a": 1.0, "b": b, "c": c}))
    return points


# -- commands ----------------------------------------------------------------

def _workers() -> int:
    env = os.environ.get("BERGMAN_OPS_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"BERGMAN_OPS_WORKERS must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


def _point_rows(results):
    rows = []
    for res in results:
        for rec in res["records"]:
            rows.append([res["index"], res["theorem"], rec["check_id"], rec["verdict"], res["expected"],
                         float(rec["max_residual"]), float(rec["tolerance"]), rec["trunc_order"]])
    return rows


POINT_HEADER = ["index", "theorem", "check_id", "verdict", "expected", "max_residual", "tolerance", "trunc_order"]


def _emit(text: str, cfg: RunConfig):
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def run_check(cfg: RunConfig) -> int:
    res = run_point(cfg.theorem_id, cfg.params, cfg.space, cfg.trunc_order, cfg.tol)
    doc = {"command": "check", "config": _config_echo(cfg), **res}
    _emit(dumps(doc) if cfg.output_format == "json" else to_csv(POINT_HEADER, _point_rows([res])), cfg)
    return EXIT_OK if res["match"] else EXIT_MISMATCH


def run_sweep(cfg: RunConfig) -> int:
    points = build_grid(cfg.theorem_id, cfg.grid, cfg.seed)
    if not points:
        raise ConfigError("the grid has no admissible points")

    def job(i):
        return run_point(cfg.theorem_id, {**points[i], **cfg.params}, cfg.space, cfg.trunc_order, cfg.tol, i)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = list(pool.map(job, range(len(points))))
    results.sort(key=lambda r: r["index"])
    n_pass = sum(r["verdict"] == ck.PASS for r in results)
    n_match = sum(r["match"] for r in results)
    summary = {
        "points": len(results),
        "pass": n_pass,
        "fail": len(results) - n_pass,
        "expected_matches": n_match,
        "worst_residual": max(r["max_residual"] for r in results),
        "worst_index": max(results, key=lambda r: r["max_residual"])["index"],
    }
    doc = {"command": "sweep", "config": _config_echo(cfg), "summary": summary, "records": results}
    _emit(dumps(doc) if cfg.output_format == "json" else to_csv(POINT_HEADER, _point_rows(results)), cfg)
    return EXIT_OK if n_match == len(results) else EXIT_MISMATCH


def converge_rows(check_id: str, params: dict, space: SpaceSpec | None, orders) -> list[list]:
    rows = []
    for N in orders:
        t0 = time.perf_counter()
        if check_id == "LemmaAdjoint":
            _, recs = evaluate_point("LemmaAdjoint", params, space, N, DEFAULT_TOL["LemmaAdjoint"])
            r = recs[0].max_residual
        else:
            sp = space or SpaceSpec.bergman(_get(params, "alpha", 0.0, "real"))
            if sp.is_bergman:
                sym = bergman_cs_family(_bergman_params(params), N)
            else:
                sym = s21_family(S21FamilyParams(_get(params, "a", 1.0), _get(params, "b"), _get(params, "c"),
                                                 _get(params, "n", 1, "int"), _conj(params)), N)
            r = ck.kernel_symmetry_residual(sym, sp, _conj(params), _samples(params), N).max_residual
        wall_ms = max((time.perf_counter() - t0) * 1e3, 1e-6)
        rows.append([N, check_id, float(r), float(wall_ms)])
    return rows


def is_monotone(residuals, slack: float = 2.0, floor: float = CONVERGE_FLOOR) -> bool:
    """Non-increasing within ``slack``; values under ``floor`` count as rounding noise."""
    return all(r1 <= slack * max(r0, floor) for r0, r1 in zip(residuals, residuals[1:]))


def run_converge(cfg: RunConfig) -> int:
    rows = converge_rows(cfg.theorem_id, cfg.params, cfg.space, cfg.orders)
    _emit(to_csv(["N", "check_id", "residual", "wall_ms"], rows), cfg)
    return EXIT_OK if is_monotone([r[2] for r in rows]) else EXIT_MISMATCH


def _config_echo(cfg: RunConfig) -> dict:
    return {
        "theorem": cfg.theorem_id,
        "space": cfg.space.to_dict() if cfg.space else None,
        "trunc_order": cfg.trunc_order,
        "tolerance": float(cfg.tol),
        "seed": cfg.seed,
        "params": cfg.params,
        "grid": cfg.grid,
    }


# -- argument handling -------------------------------------------------------

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bergman-ops", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file, or '-' for stdin")
        p.add_argument("--trunc", type=int, help="truncation order N")
        p.add_argument("--tol", type=float, help="tolerance of the primary check")
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("check", help="run the checks of one theorem at one parameter point")
    p.add_argument("--theorem", required=True)
    common(p)
    p = sub.add_parser("sweep", help="run one theorem over a parameter grid")
    p.add_argument("--theorem", required=True)
    common(p)
    p = sub.add_parser("converge", help="residual versus truncation order, as CSV")
    p.add_argument("--check", required=True, dest="theorem")
    p.add_argument("--orders", default=None, help="comma-separated orders, e.g. 32,48,64,96")
    common(p)
    return ap


def config_from_args(args) -> RunConfig:
    doc = _load_config(args.config)
    space = SpaceSpec.from_dict(doc["space"]) if "space" in doc else None
    orders = doc.get("orders", [32, 48, 64, 96])
    if getattr(args, "orders", None):
        try:
            orders = [int(x) for x in args.orders.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --orders: {exc}") from exc
    cfg = RunConfig(
        command=args.command,
        theorem_id=args.theorem,
        space=space,
        params=doc.get("params", {}),
        trunc_order=doc.get("trunc_order", 48),
        tolerance=doc.get("tolerance"),
        seed=doc.get("seed", 0),
        grid=doc.get("grid", {}),
        orders=orders,
        output_format=doc.get("output_format", "csv" if args.command == "converge" else "json"),
    )
    if args.trunc is not None:
        cfg.trunc_order = args.trunc
    if args.tol is not None:
        cfg.tolerance = args.tol
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.output_format = args.format
    cfg.output_path = args.out
    cfg.validate()
    return cfg


COMMANDS = {"check": run_check, "sweep": run_sweep, "converge": run_converge}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PathDisagreement as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
