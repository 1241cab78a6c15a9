"""Command-line front end.

Exit codes: 0 on success, 2 when a verification suite fails, 1 on usage,
I/O or library errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .algebra import algebra, table_csv
from .contour import (
    FAST_QUAD,
    QuadratureSpec,
    semigroup_contour,
    sector_check,
    slice_cauchy_reconstruct,
    trace_contour,
)
from .errors import SliceSemiError
from .operators import C, OperatorMatrix, spherical_spectrum
from .semigroup import evolve_expm, evolve_yosida, trace_expm, trace_yosida, yosida_operator
from .slices import cauchy_kernel, eval_slice, exp_stem, poly_stem
from .verify import SUITES, verify_suite

COMMANDS = ("algebra-table", "spectrum", "resolvent", "evolve", "cauchy", "verify")
METHODS = ("expm", "yosida", "contour")
STEMS = ("exp", "poly")

_QUAD_KEYS = {
    "nodes": ("nodes_per_arc", int),
    "order": ("gauss_order", int),
    "panels": ("ray_panels", int),
    "tail": ("tail_tol", float),
    "periods": ("max_panel_periods", float),
}


class UsageError(Exception):
    """Invalid command-line usage or configuration."""


def parse_quad(text: str | None, fast: bool = False) -> QuadratureSpec:
    """Parse ``"nodes=64,order=16,tail=1e-10"`` on top of the default (or fast) rule."""
    base = FAST_QUAD if fast else QuadratureSpec()
    if not text:
        return base
    kw = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in _QUAD_KEYS:
            raise UsageError(f"bad quadrature item {part!r}; keys are {', '.join(_QUAD_KEYS)}")
        name, cast = _QUAD_KEYS[key]
        try:
            kw[name] = cast(value)
        except ValueError:
            raise UsageError(f"bad value in quadrature item {part!r}") from None
    try:
        return QuadratureSpec(**{**base.__dict__, **kw})
    except ValueError as exc:
        raise UsageError(str(exc)) from None


@dataclass
class RunConfig:
    """Everything one invocation needs; ``seed`` drives all random sampling."""

    command: str
    algebra: str | None = None
    op: Path | None = None
    out: Path | None = None
    alpha: str | None = None
    method: str = "expm"
    t: float | None = None
    t_max: float | None = None
    steps: int | None = None
    x: Path | None = None
    full: bool = False
    delta: float = 0.3
    r: float | None = None
    eta: float | None = None
    j: str | None = None
    quad: str | None = None
    tol: float = 1e-8
    kernel: str | None = None
    at: str | None = None
    stem: str | None = None
    coeffs: list[float] = field(default_factory=list)
    radius: float = 4.0
    suite: str = "all"
    m: int = 2
    seed: int = 0
    fast: bool = False
    json_report: Path | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("op", "x"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise UsageError(f"--{name} {path}: no such file")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.method not in METHODS:
            raise UsageError(f"--method must be one of {', '.join(METHODS)}")
        if self.command in ("spectrum", "resolvent", "evolve") and self.op is None:
            raise UsageError(f"{self.command} needs --op")
        if self.command == "evolve":
            if (self.t is None) == (self.t_max is None):
                raise UsageError("evolve needs exactly one of --t or --t-max")
            if self.t is not None and self.t < 0:
                raise UsageError("--t must be non-negative")
            if self.t_max is not None and (self.steps is None or self.steps < 1 or not self.t_max > 0):
                raise UsageError("--t-max needs a positive value and --steps >= 1")
            if self.t_max is not None and self.x is None and not self.full:
                raise UsageError("a trace needs --x or --full")
        if self.command == "resolvent" and self.alpha is None:
            raise UsageError("resolvent needs --alpha")
        if self.command == "cauchy":
            if self.at is None:
                raise UsageError("cauchy needs --at")
            if self.stem is None and self.kernel is None:
                raise UsageError("cauchy needs --kernel or --stem")
            if self.stem is not None and self.stem not in STEMS:
                raise UsageError(f"--stem must be one of {', '.join(STEMS)}")
            if self.stem == "poly" and not self.coeffs:
                raise UsageError("--stem poly needs --coeffs")
        if self.command == "verify" and self.suite not in SUITES + ("all",):
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        if self.m < 1:
            raise UsageError("--m must be positive")


# ---------------------------------------------------------------------------
# Commands


def _cmd_table(cfg: RunConfig) -> int:
    io.write_text(cfg.out, table_csv(algebra(cfg.algebra or "H")))
    return 0


def _cmd_spectrum(cfg: RunConfig) -> int:
    A = io.load_operator(cfg.op)
    io.write_text(cfg.out, spherical_spectrum(A, seed=cfg.seed).to_csv())
    return 0


def _cmd_resolvent(cfg: RunConfig) -> int:
    A = io.load_operator(cfg.op)
    alpha = io.load_element(cfg.alpha, A.desc)
    io.write_text(cfg.out, io.dumps({"alpha": alpha.to_dict(), "resolvent": C(A, alpha).to_dict()}))
    return 0


def _load_x(cfg: RunConfig, A: OperatorMatrix) -> np.ndarray | None:
    if cfg.x is None:
        return None
    desc, x = io.vector_from_json(io.read_json(cfg.x))
    if desc != A.desc or x.shape[0] != A.m:
        raise UsageError(f"--x must be a vector in {A.desc.name}^{A.m}")
    return x


def _contour_kw(cfg: RunConfig, A: OperatorMatrix) -> dict:
    kw = {"r": cfg.r, "eta": cfg.eta}
    if cfg.j is not None:
        kw["j"] = A.desc.parse_element(cfg.j)
    return kw


def _evolve_point(cfg: RunConfig, A: OperatorMatrix, x: np.ndarray | None) -> dict:
    t = float(cfg.t)
    result: dict = {"method": cfg.method, "t": t}
    if cfg.method == "expm":
        T = evolve_expm(A, t)
    elif cfg.method == "yosida":
        T = yosida_operator(A, t, tol=cfg.tol)
        if x is not None:
            res = evolve_yosida(A, t, x, tol=cfg.tol)
            result["value"] = io.vector_to_json(A.desc, res.value)
            result["stopping"] = {
                "rule": "heuristic: Cauchy difference of extrapolated iterates",
                "achieved": res.achieved,
                "n": res.n,
                "iterations": res.iterations,
                "tol": cfg.tol,
            }
    else:
        quad = parse_quad(cfg.quad, cfg.fast)
        if t == 0:
            sector_check(A, cfg.delta, seed=cfg.seed)
            T = OperatorMatrix.identity(A.desc, A.m)
            result["certificate"] = {"tail_bound": 0.0, "quad_nodes": 0, "M": None, "delta": cfg.delta}
        else:
            report = sector_check(A, cfg.delta, seed=cfg.seed)
            res = semigroup_contour(A, t, cfg.delta, quad=quad, report=report, **_contour_kw(cfg, A))
            T = res.value
            result["certificate"] = res.certificate()
    result["operator"] = T.to_dict()
    if x is not None and "value" not in result:
        result["value"] = io.vector_to_json(A.desc, T.apply(x))
    return result


def _evolve_trace(cfg: RunConfig, A: OperatorMatrix, x: np.ndarray | None) -> str:
    times = np.linspace(0.0, float(cfg.t_max), int(cfg.steps) + 1)
    if cfg.method == "yosida" and not cfg.full:
        rows = np.stack([evolve_yosida(A, t, x, tol=cfg.tol).value for t in times])
        return io.trace_to_csv(times, rows)
    if cfg.method == "expm":
        trace = trace_expm(A, times)
    elif cfg.method == "yosida":
        trace = trace_yosida(A, times, cfg.tol)
    else:
        trace = trace_contour(A, times, cfg.delta, quad=parse_quad(cfg.quad, cfg.fast), **_contour_kw(cfg, A))
    if cfg.full:
        return io.trace_to_csv(times, np.stack([T.entries for T in trace.values]))
    return io.trace_to_csv(times, trace.apply(x))


def _cmd_evolve(cfg: RunConfig) -> int:
    A = io.load_operator(cfg.op)
    x = _load_x(cfg, A)
    if cfg.t is not None:
        io.write_text(cfg.out, io.dumps(_evolve_point(cfg, A, x)))
    else:
        io.write_text(cfg.out, _evolve_trace(cfg, A, x))
    return 0


def _cmd_cauchy(cfg: RunConfig) -> int:
    desc = algebra(cfg.algebra) if cfg.algebra else None
    p = io.load_element(cfg.at, desc)
    desc = p.desc
    out: dict = {"at": p.to_dict()}
    if cfg.kernel is not None:
        q = io.load_element(cfg.kernel, desc)
        out["kernel"] = q.to_dict()
        out["value"] = cauchy_kernel(q, p).to_dict()
    if cfg.stem is not None:
        F = exp_stem(desc) if cfg.stem == "exp" else poly_stem(desc, cfg.coeffs)
        j = desc.parse_element(cfg.j) if cfg.j else None
        got = slice_cauchy_reconstruct(F, p, j, radius=cfg.radius, quad=parse_quad(cfg.quad or "nodes=256"))
        direct = eval_slice(F, p)
        out["stem"] = cfg.stem
        out["reconstructed"] = got.to_dict()
        out["direct"] = direct.to_dict()
        out["residual"] = float(np.abs((got - direct).coeffs).max())
    io.write_text(cfg.out, io.dumps(out))
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    reports = verify_suite(cfg.suite, cfg.algebra or "H", cfg.m, cfg.seed, cfg.fast)
    passed = all(r.passed for r in reports)
    doc = {
        "suite": cfg.suite,
        "algebra": algebra(cfg.algebra or "H").name,
        "m": cfg.m,
        "seed": cfg.seed,
        "fast": cfg.fast,
        "pass": passed,
        "max_residual": max(r.max_residual for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    text = io.dumps(doc)
    io.write_text(cfg.out, text)
    if cfg.json_report is not None:
        io.write_text(cfg.json_report, text)
    return 0 if passed else 2


_DISPATCH = {
    "algebra-table": _cmd_table,
    "spectrum": _cmd_spectrum,
    "resolvent": _cmd_resolvent,
    "evolve": _cmd_evolve,
    "cauchy": _cmd_cauchy,
    "verify": _cmd_verify,
}


def run(config: RunConfig) -> int:
    """Execute one command and return its exit code."""
    try:
        config.validate()
        return _DISPATCH[config.command](config)
    except (UsageError, SliceSemiError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"slicesemi: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _coeff_list(text: str) -> list[float]:
    try:
        return [float(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slicesemi", description="Hypercomplex operator calculus and semigroups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    alg = sub.add_parser("algebra", help="algebra utilities")
    alg_sub = alg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    tab = alg_sub.add_parser("table", help="print the signed multiplication table as CSV")
    tab.add_argument("--kind", required=True, help="R, C, H, O or Cl<n>")
    tab.add_argument("--out", type=Path)

    sp = sub.add_parser("spectrum", help="spherical spectrum as CSV rows a,b,multiplicity")
    sp.add_argument("--op", type=Path, required=True)
    sp.add_argument("--out", type=Path)
    sp.add_argument("--seed", type=int, default=0)

    rs = sub.add_parser("resolvent", help="the S-resolvent C_alpha(A) as JSON")
    rs.add_argument("--op", type=Path, required=True)
    rs.add_argument("--alpha", required=True, help="element JSON file or text such as 2+1j")
    rs.add_argument("--out", type=Path)

    ev = sub.add_parser("evolve", help="T(t) = e^(tA) at one time (JSON) or on a grid (CSV)")
    ev.add_argument("--op", type=Path, required=True)
    ev.add_argument("--method", choices=METHODS, default="expm")
    ev.add_argument("--t", type=float)
    ev.add_argument("--t-max", type=float, dest="t_max")
    ev.add_argument("--steps", type=int)
    ev.add_argument("--x", type=Path)
    ev.add_argument("--full", action="store_true", help="trace all of T(t) instead of T(t) x")
    ev.add_argument("--delta", type=float, default=0.3)
    ev.add_argument("--r", type=float)
    ev.add_argument("--eta", type=float)
    ev.add_argument("--j", help="imaginary unit for the contour plane, e.g. j")
    ev.add_argument("--quad", help="e.g. nodes=64,order=16,tail=1e-10")
    ev.add_argument("--tol", type=float, default=1e-8)
    ev.add_argument("--fast", action="store_true")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", type=Path)

    ca = sub.add_parser("cauchy", help="Cauchy kernel S^-1(q, p) or a slice Cauchy reconstruction")
    ca.add_argument("--kernel", help="q: element JSON file or text")
    ca.add_argument("--at", required=True, help="p: element JSON file or text")
    ca.add_argument("--algebra", help="algebra for text elements")
    ca.add_argument("--stem", choices=STEMS)
    ca.add_argument("--coeffs", type=_coeff_list, default=[], help="real polynomial coefficients, lowest first")
    ca.add_argument("--radius", type=float, default=4.0)
    ca.add_argument("--j")
    ca.add_argument("--quad")
    ca.add_argument("--out", type=Path)

    vf = sub.add_parser("verify", help="run a verification suite")
    vf.add_argument("--suite", default="all")
    vf.add_argument("--algebra", default="H")
    vf.add_argument("--m", type=int, default=2)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--fast", action="store_true")
    vf.add_argument("--json-report", type=Path, dest="json_report")
    vf.add_argument("--out", type=Path)
    return p


def config_from_args(argv: Sequence[str] | None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    if command == "algebra":
        ns.pop("action")
        command = "algebra-table"
        ns["algebra"] = ns.pop("kind")
    return RunConfig(command=command, **ns)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        print(f"slicesemi: usage error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
