"""Command-line front end: ``hecke-shuffle eval|verify|cache``.

Exit codes: 0 success, 1 convergence failure or failed check, 2 bad input.
Output carries no timings or paths, so a fixed seed gives byte-identical stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import harmonic as hm
from . import intertwiner as it
from .errors import ConvergenceError, PreconditionError
from .lfunction import Kernel, SpectralPoint, TruncationPolicy, l_dirichlet, l_euler, l_star, phi_K
from .numberfield import (
    cache_dir_from_env,
    cache_path,
    make_field,
    prime_ideals_up_to,
    read_prime_cache,
    unit_lattice,
)
from .shuffle import lookup_generator, parse_expression, parse_permutation, phi_w, shuffle_product
from .verify import SUITES, Check, VerifyConfig, run_suite

SCHEMA = 1
CSV_COLUMNS = ["subject", "field", "lambda_star", "s", "value_re", "value_im", "error_estimate", "truncation"]


@dataclass(frozen=True)
class RunConfig:
    d: int = 0
    X: int = 10_000
    tol: float | None = None
    fmt: str = "json"
    seed: int = 42
    jobs: int = 1
    cache_dir: str | None = None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        directory = cache_dir_from_env(args.cache_dir)
        return cls(args.d, args.X, args.tol, args.format, args.seed, max(1, args.jobs),
                   str(directory) if directory is not None else None)

    def policy(self, **kw) -> TruncationPolicy:
        if self.tol is not None:
            kw.setdefault("tail_tolerance", self.tol)
        return TruncationPolicy(X=self.X, cache_dir=self.cache_dir, **kw)


# --------------------------------------------------------------------------
# input parsing


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise PreconditionError(f"cannot parse complex number {text!r}") from None


def parse_lam(text: str, rank: int) -> tuple[int, ...]:
    text = text.strip()
    parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
    try:
        lam = tuple(int(p) for p in parts)
    except ValueError:
        raise PreconditionError(f"lambda* must be integers, got {text!r}") from None
    if not lam and rank:
        lam = (0,) * rank
    if len(lam) != rank:
        raise PreconditionError(f"lambda* must have {rank} entries for this field, got {len(lam)}")
    return lam


def parse_points(text: str, rank: int) -> list[SpectralPoint]:
    """``lam@s`` items separated by ``;``; a bare ``s`` means lambda* = 0."""
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        lam, _, s = item.rpartition("@")
        out.append(SpectralPoint(parse_lam(lam, rank), parse_complex(s)))
    if not out:
        raise PreconditionError("no evaluation points given")
    return out


# --------------------------------------------------------------------------
# output


def _num(x: float | None):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def record(subject: str, field: str, lam, s, value: complex, error: float | None, truncation) -> dict:
    pts = isinstance(s, (list, tuple))
    return {
        "schema": SCHEMA,
        "subject": subject,
        "field": field,
        "lambda_star": [list(v) for v in lam] if pts else list(lam),
        "s": [[_num(c.real), _num(c.imag)] for c in s] if pts else [_num(s.real), _num(s.imag)],
        "value": [_num(value.real), _num(value.imag)],
        "error_estimate": _num(error),
        "truncation": truncation,
    }


def emit_records(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=False) + "\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            r["subject"], r["field"], json.dumps(r["lambda_star"]), json.dumps(r["s"]),
            r["value"][0], r["value"][1], r["error_estimate"], json.dumps(r["truncation"]),
        ])
    out.write(buf.getvalue())


# --------------------------------------------------------------------------
# eval


def _field_and_lattice(cfg: RunConfig):
    field = make_field(cfg.d)
    return field, unit_lattice(field)


def eval_lfunction(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    fn = {"euler": l_euler, "dirichlet": l_dirichlet, "completed": l_star}[args.method]
    policy = cfg.policy()
    out = []
    for z in _points(args, lattice.rank):
        est = fn(field, lattice, z, policy)
        out.append(record("lfunction", field.name, z.lam, z.s, est.value, est.error,
                           {"X": cfg.X, "method": args.method}))
    return out


def eval_phi(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    policy = cfg.policy()
    out = []
    for z in _points(args, lattice.rank):
        est = phi_K(field, lattice, z, policy)
        out.append(record("phi", field.name, z.lam, z.s, est.value, est.error, {"X": cfg.X}))
    return out


def eval_phiw(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    kernel = Kernel(field, lattice, cfg.policy())
    w = parse_permutation(args.perm)
    z = parse_points(args.at, lattice.rank)
    if len(z) != w.n:
        raise PreconditionError(f"permutation on {w.n} letters needs {w.n} points, got {len(z)}")
    value = phi_w(kernel, w, z)
    return [record("phiw", field.name, [p.lam for p in z], [p.s for p in z], value, None,
                   {"X": cfg.X, "perm": list(w.images)})]


def eval_shuffle(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    kernel = Kernel(field, lattice, cfg.policy())
    if args.expr:
        F = parse_expression(args.expr, kernel, cfg.seed)
    elif args.gens:
        names = [g for g in args.gens.split(",") if g.strip()]
        gens = [lookup_generator(g, cfg.seed) for g in names]
        F = gens[0]
        for g in gens[1:]:
            F = shuffle_product(F, g, kernel)
    else:
        raise PreconditionError("eval shuffle needs --gens or --expr")
    z = parse_points(args.at, lattice.rank)
    if len(z) != F.arity:
        raise PreconditionError(f"expression has arity {F.arity}, got {len(z)} points")
    value = F(z)
    return [record("shuffle", field.name, [p.lam for p in z], [p.s for p in z], value, None,
                   {"X": cfg.X, "expr": F.text(), "seed": cfg.seed})]


def eval_local(args, cfg: RunConfig) -> list[dict]:
    sd = parse_complex(args.sdiff)
    lam_diff = args.lamdiff
    if args.place == "real":
        value, name = it.real_local_closed(lam_diff, sd), "real"
    elif args.place == "complex":
        value, name = it.complex_local_closed(lam_diff, sd), "complex"
    else:
        field, lattice = _field_and_lattice(cfg)
        if args.prime is None:
            raise PreconditionError("--place padic needs --prime <norm>")
        primes = [P for P in prime_ideals_up_to(field, max(args.prime, 2), cache_dir=cfg.cache_dir)
                  if P.norm == args.prime]
        if not primes:
            raise PreconditionError(f"no prime ideal of norm {args.prime} in {field.name}")
        if not 0 <= args.which < len(primes):
            raise PreconditionError(f"--which must be in [0, {len(primes) - 1}]")
        lam = parse_lam(args.lam, lattice.rank)
        P = primes[args.which]
        value = it.padic_local_closed(P, lattice.lam_vee(lam) if lattice.rank else np.zeros(field.places), sd)
        return [record("local", field.name, lam, sd, value, None, {"place": "padic", "norm": P.norm, "which": args.which})]
    return [record("local", "-", [lam_diff], sd, value, None, {"place": name})]


def eval_assemble(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    z = parse_points(args.at, lattice.rank)
    if len(z) != 2:
        raise PreconditionError(f"assembly takes exactly two points, got {len(z)}")
    policy = cfg.policy() if cfg.tol is not None else cfg.policy(tail_tolerance=math.inf)
    est = it.assemble_rank2(field, lattice, z[0], z[1], policy)
    return [record("assemble", field.name, [p.lam for p in z], [p.s for p in z], est.value, est.error, {"X": cfg.X})]


def eval_fourier(args, cfg: RunConfig) -> list[dict]:
    field, lattice = _field_and_lattice(cfg)
    space = hm.BSpace.of(field)
    center = [float(v) for v in args.center.split(",")] if args.center else [1.0] * field.places
    if len(center) != field.places:
        raise PreconditionError(f"--center needs {field.places} positive coordinates")
    mode = tuple(int(v) for v in args.mode.split(",")) if args.mode else (0,) * space.rank
    if len(mode) != space.rank:
        raise PreconditionError(f"--mode needs {space.rank} integers")
    if not args.width > 0:
        raise PreconditionError("--width must be positive")
    bump = hm.TestBump(hm.BPoint(tuple(center)), args.width, mode)
    F = hm.fourier_transform(space, bump)
    out = []
    for z in _points(args, lattice.rank):
        value = complex(F(z))
        out.append(record("fourier", field.name, z.lam, z.s, value, None,
                          {"center": center, "width": args.width, "mode": list(mode)}))
    return out


def _points(args, rank: int) -> list[SpectralPoint]:
    if args.at:
        return parse_points(args.at, rank)
    if args.s is None:
        raise PreconditionError("give --s or --at")
    return [SpectralPoint(parse_lam(args.lam or "", rank), parse_complex(args.s))]


EVALUATORS = {
    "lfunction": eval_lfunction,
    "phi": eval_phi,
    "phiw": eval_phiw,
    "shuffle": eval_shuffle,
    "local": eval_local,
    "assemble": eval_assemble,
    "fourier": eval_fourier,
}


def cmd_eval(args, out=None) -> int:
    out = out or sys.stdout
    cfg = RunConfig.from_args(args)
    records = EVALUATORS[args.subject](args, cfg)
    emit_records(records, "csv" if cfg.fmt == "csv" else "json", out)
    return 0


# --------------------------------------------------------------------------
# verify


def _run_named(job: tuple[str, VerifyConfig]) -> list[Check]:
    return run_suite(*job)


def run_checks(suite: str, vcfg: VerifyConfig, jobs: int = 1) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_named, [(n, vcfg) for n in names]))
    else:
        parts = [run_suite(n, vcfg) for n in names]
    return [c for part in parts for c in part]


def _detail_text(detail: dict) -> str:
    return " ".join(f"{k}={detail[k]}" for k in sorted(detail))


def emit_checks(checks: list[Check], fmt: str, header: dict, out) -> None:
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            **header,
            "passed": all(c.passed for c in checks),
            "checks": [
                {"suite": c.suite, "name": c.name, "status": "PASS" if c.passed else "FAIL",
                 "residual": _num(c.residual), "threshold": _num(c.threshold), "detail": c.detail}
                for c in checks
            ],
        }
        out.write(json.dumps(doc, indent=1, default=str) + "\n")
        return
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["suite", "name", "status", "residual", "threshold", "detail"])
        for c in checks:
            w.writerow([c.suite, c.name, "PASS" if c.passed else "FAIL", f"{c.residual:.6e}",
                        f"{c.threshold:.6e}", _detail_text(c.detail)])
        return
    out.write(" ".join(f"{k}={v}" for k, v in header.items()) + "\n")
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'}  {c.suite:<12} {c.name:<44} residual={c.residual:.3e} threshold={c.threshold:.1e}"
        if c.detail:
            line += "  " + _detail_text(c.detail)
        out.write(line + "\n")
    n_fail = sum(not c.passed for c in checks)
    out.write(f"{len(checks) - n_fail}/{len(checks)} checks passed\n")


def cmd_verify(args, out=None) -> int:
    out = out or sys.stdout
    cfg = RunConfig.from_args(args)
    vcfg = VerifyConfig(d=cfg.d, X=cfg.X, seed=cfg.seed, n=args.n, tol=cfg.tol, cache_dir=cfg.cache_dir)
    vcfg.field()  # precondition: whitelisted field
    checks = run_checks(args.suite, vcfg, cfg.jobs)
    header = {"suite": args.suite, "field": vcfg.field().name, "X": cfg.X, "seed": cfg.seed}
    emit_checks(checks, args.format or "text", header, out)
    return 0 if all(c.passed for c in checks) else 1


# --------------------------------------------------------------------------
# cache


def cmd_cache(args, out=None) -> int:
    out = out or sys.stdout
    cfg = RunConfig.from_args(args)
    if cfg.cache_dir is None:
        raise PreconditionError("no cache directory: pass --cache-dir or set HECKE_SHUFFLE_CACHE")
    directory = Path(cfg.cache_dir)
    if args.action == "build":
        field = make_field(cfg.d)
        primes = prime_ideals_up_to(field, cfg.X, cache_dir=directory)
        out.write(f"{field.name} X={cfg.X}: {len(primes)} prime ideals cached as {cache_path(directory, cfg.d, cfg.X).name}\n")
    elif args.action == "list":
        for path in sorted(directory.glob("primes_d*_X*.txt")):
            d, X, primes = read_prime_cache(path)
            out.write(f"{path.name} d={d} X={X} primes={len(primes)}\n")
    else:
        removed = 0
        for path in sorted(directory.glob("primes_d*_X*.txt")):
            path.unlink()
            removed += 1
        out.write(f"removed {removed} cache files\n")
    return 0


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, fmt_choices: Sequence[str], fmt_default: str | None) -> None:
    p.add_argument("--d", type=int, default=0, help="field Q(sqrt d); 0 means Q")
    p.add_argument("--X", type=int, default=10_000, help="prime-norm truncation")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=fmt_choices, default=fmt_default)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache-dir", default=None, help="prime cache directory (HECKE_SHUFFLE_CACHE wins)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hecke-shuffle", description="Hecke L-functions, the kernel Phi_K and shuffle algebra numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one operation")
    ev.add_argument("subject", choices=list(EVALUATORS))
    _common(ev, ["json", "csv"], "json")
    ev.add_argument("--s", help="complex s, e.g. 2.5 or 1.5+3j")
    ev.add_argument("--lam", default="", help="lambda* as comma-separated integers")
    ev.add_argument("--at", help="points 'lam@s' separated by ';'")
    ev.add_argument("--method", choices=["euler", "dirichlet", "completed"], default="euler")
    ev.add_argument("--perm", help="permutation in one-line notation, e.g. '2,3,1'")
    ev.add_argument("--gens", help="comma-separated generators g<k>/h<k>, shuffled left to right")
    ev.add_argument("--expr", help="expression text, e.g. 'shuffle(gen:g1, gen:g2)'")
    ev.add_argument("--place", choices=["real", "complex", "padic"], default="real")
    ev.add_argument("--sdiff", default="2")
    ev.add_argument("--lamdiff", type=float, default=0.0, help="lambda^vee coordinate difference at the place")
    ev.add_argument("--prime", type=int, help="norm of the prime ideal (padic)")
    ev.add_argument("--which", type=int, default=0, help="which prime of that norm (padic)")
    ev.add_argument("--center", help="bump center, comma-separated B coordinates")
    ev.add_argument("--width", type=float, default=0.5, help="bump log width")
    ev.add_argument("--mode", help="bump torus mode, comma-separated integers")
    ev.set_defaults(handler=cmd_eval)

    ve = sub.add_parser("verify", help="run verification suites")
    ve.add_argument("suite", choices=[*SUITES, "all"])
    _common(ve, ["text", "json", "csv"], "text")
    ve.add_argument("--n", type=int, default=None, help="size bound for the suite")
    ve.set_defaults(handler=cmd_verify)

    ca = sub.add_parser("cache", help="manage the prime-ideal cache")
    ca.add_argument("action", choices=["build", "list", "clear"])
    _common(ca, ["text"], "text")
    ca.set_defaults(handler=cmd_cache)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except PreconditionError as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: did not converge: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
