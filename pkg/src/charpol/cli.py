"""Command-line surface: computations, cross-method comparisons, verification.

Every command emits a RunManifest (JSON by default, CSV on request): command
name, full parameter set, seed, version, wall time, and results with complex
values as {re, im} pairs plus per-method provenance tags.  Re-running a
manifest's command with its recorded parameters reproduces Monte Carlo
results bit-identically.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage error
(including out-of-budget requests, which name the violated budget).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import (
    GOE,
    bessel_half_identity_check,
    gamma_k,
    gamma_k_binomial_form,
    kernel_goe,
    kernel_sine,
    moment_asymptotic,
    rho,
)
from .dual import (
    MONOMIAL,
    QUADRATURE,
    DualIntegralRequest,
    evaluate_request,
    goe_moment_dual,
    quadrature_cross_check,
)
from .ensembles import (
    BudgetError,
    EnsembleSpec,
    GUE,
    LambdaPoints,
    mc_correlator,
    wick_oracle,
)
from .hiz import PdeCheckSpec, group_integral_mc, hiz_unitary, pde_residual
from .linalg import SelfDualQuaternionMatrix, det_batch, lu_det, pfaffian, qdet

WICK_LIMITS = (3, 4)  # max (N, k) for the oracle route


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None
    version: str
    walltime_s: float
    results: list = field(default_factory=list)
    passed: bool | None = None

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "walltime_s": self.walltime_s,
            "results": self.results,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = ["label", "method", "re", "im", "stderr", "pass"]
        writer.writerow(keys)
        for r in self.results:
            value = r.get("value") or {}
            writer.writerow(
                [
                    r.get("label", ""),
                    r.get("method", ""),
                    repr(value.get("re")) if "re" in value else "",
                    repr(value.get("im")) if "im" in value else "",
                    "" if r.get("stderr") is None else repr(r.get("stderr")),
                    "" if r.get("pass") is None else r.get("pass"),
                ]
            )
        return buf.getvalue()


def _result(label, method, value=None, stderr=None, ok=None, **extra) -> dict:
    out = {"label": label, "method": method}
    if value is not None:
        value = complex(value)
        out["value"] = {"re": value.real, "im": value.imag}
    if stderr is not None:
        out["stderr"] = float(stderr)
    if ok is not None:
        out["pass"] = bool(ok)
    if extra:
        out.update(extra)
    return out


def _parse_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _spec_from_params(params: dict) -> EnsembleSpec:
    source = params.get("source")
    return EnsembleSpec(params["ensemble"], params["dim"], tuple(source) if source else None)


# -- command implementations ---------------------------------------------------


def cmd_mc(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    spec = _spec_from_params(params)
    est = mc_correlator(
        spec,
        params["lambdas"],
        params["samples"],
        params["seed"],
        threads=params.get("threads", 1),
    )
    man = RunManifest("mc", params, params["seed"], __version__, 0.0)
    man.results.append(_result("correlator", "mc", est.mean, est.stderr, samples=est.samples))
    man.passed = True
    man.walltime_s = time.perf_counter() - t0
    return man


def cmd_dual(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    spec = _spec_from_params(params)
    method = params.get("method", "monomial")
    req_method = QUADRATURE if method == "quadrature" else MONOMIAL
    req = DualIntegralRequest(
        spec, LambdaPoints(tuple(params["lambdas"])), req_method, params.get("nodes")
    )
    value = evaluate_request(req)
    man = RunManifest("dual", params, params.get("seed"), __version__, 0.0)
    man.results.append(_result("correlator", method, value))
    man.passed = True
    man.walltime_s = time.perf_counter() - t0
    return man


def cmd_gamma(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    man = RunManifest("gamma", params, None, __version__, 0.0)
    for k in range(1, params["kmax"] + 1):
        g = gamma_k(params["ensemble"], k)
        man.results.append(
            {
                "label": f"gamma_{k}",
                "method": "exact-rational",
                "numerator": str(g.numerator),
                "denominator": str(g.denominator),
                "value": {"re": g.as_float, "im": 0.0},
            }
        )
    man.passed = True
    man.walltime_s = time.perf_counter() - t0
    return man


def cmd_kernel(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    man = RunManifest("kernel", params, None, __version__, 0.0)
    xs = np.linspace(params["xmin"], params["xmax"], params["points"])
    for x in xs:
        man.results.append(
            {
                "label": repr(float(x)),
                "method": "kernel",
                "x": float(x),
                "kernel_goe": kernel_goe(float(x)),
                "kernel_sine": kernel_sine(float(x)),
            }
        )
    man.passed = True
    man.walltime_s = time.perf_counter() - t0
    return man


def _kernel_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "kernel_goe", "kernel_sine"])
    for r in results:
        writer.writerow([repr(r["x"]), repr(r["kernel_goe"]), repr(r["kernel_sine"])])
    return buf.getvalue()


# -- verification suites --------------------------------------------------------

SUITE_TOLS = {
    "pfaffian": 1e-10,
    "oracle": 1e-8,
    "hiz-pde": 1e-5,
    "group-mc": 3.0,  # in units of stderr
    "bessel": 1e-12,
    "confluent": 1e-10,
}


def _suite_pfaffian(tol: float, seed: int, results: list) -> bool:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in (2, 4, 6, 8):
        for _ in range(25):
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            a = g - g.T
            pf = pfaffian(a)
            det = lu_det(a)
            worst = max(worst, abs(pf * pf - det) / max(abs(det), 1e-300))
    results.append(_result("pf_squared_vs_det", "pfaffian", worst, ok=worst <= tol))
    worst_q = 0.0
    for _ in range(100):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = (g + g.conj().T) / 2
        d = rng.standard_normal() + 1j * rng.standard_normal()
        dm = np.array([[0.0, d], [-d, 0.0]], dtype=complex)
        lam = rng.standard_normal(2)
        q = qdet(SelfDualQuaternionMatrix(b, dm), lam)
        explicit = (
            abs(d) ** 2
            + (lam[0] - 1j * b[0, 0]) * (lam[1] - 1j * b[1, 1])
            + abs(b[0, 1]) ** 2
        )
        worst_q = max(worst_q, abs(q - explicit) / max(abs(explicit), 1e-300))
    results.append(_result("qdet_k2_explicit", "pfaffian", worst_q, ok=worst_q <= 1e-12))
    return worst <= tol and worst_q <= 1e-12


def _suite_oracle(tol: float, seed: int, results: list) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for kind in (GOE, GUE):
        for n in (1, 2):
            for k in (1, 2, 3, 4):
                worst = 0.0
                for _ in range(5):
                    lam = _distinct_tuple(rng, k)
                    spec = EnsembleSpec(kind, n)
                    w = wick_oracle(spec, lam)
                    d = evaluate_request(DualIntegralRequest(spec, LambdaPoints(lam)))
                    worst = max(worst, abs(d - w) / max(abs(w), 1e-300))
                good = worst <= tol
                ok = ok and good
                results.append(
                    _result(f"{kind}_N{n}_k{k}", "oracle-vs-dual", worst, ok=good)
                )
    return ok


def _distinct_tuple(rng, k: int, low=-1.6, high=1.6, sep=0.35) -> tuple:
    while True:
        lam = np.sort(rng.uniform(low, high, k))
        if k == 1 or np.min(np.diff(lam)) >= sep:
            return tuple(float(v) for v in lam)


def _suite_hiz_pde(tol: float, seed: int, results: list) -> bool:
    from .hiz import CHI_NUMERATOR_TERMS, TauTable, chi_eval  # noqa: F401

    rng = np.random.default_rng(seed)
    ok = True
    for k in (2, 3, 4):
        worst = 0.0
        for _ in range(25):
            ts = _distinct_tuple(rng, k, sep=0.4)
            lams = _distinct_tuple(rng, k, sep=0.4)
            spec = PdeCheckSpec(beta=4, k=k, n=1, lambdas=lams, ts=ts, step=1e-4)
            worst = max(worst, pde_residual(spec))
        good = worst <= tol
        ok = ok and good
        results.append(_result(f"chi_pde_k{k}", "finite-difference", worst, ok=good))
    return ok


def _suite_group_mc(sigmas: float, seed: int, results: list, samples: int) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for trial in range(2):
        xs = _distinct_tuple(rng, 2, sep=0.5)
        ys = _distinct_tuple(rng, 2, sep=0.5)
        cf = hiz_unitary(1, xs, ys)
        est = group_integral_mc("unitary", 2, 1, xs, ys, samples, seed + trial)
        dev = abs(est.mean - cf)
        good = dev <= sigmas * est.stderr
        ok = ok and good
        results.append(
            _result(f"unitary_k2_{trial}", "haar-mc", dev, est.stderr, ok=good)
        )
    from .hiz import symmetrized_hiz_sympl

    for trial in range(2):
        xs = _distinct_tuple(rng, 2, sep=0.5)
        ys = _distinct_tuple(rng, 2, sep=0.5)
        raw = symmetrized_hiz_sympl(2, 1, xs, ys)
        eps = 1e-3
        v1 = symmetrized_hiz_sympl(2, 1, xs, tuple(eps * y for y in ys))
        v2 = symmetrized_hiz_sympl(2, 1, xs, tuple(0.5 * eps * y for y in ys))
        cf = raw / ((4.0 * v2 - v1) / 3.0)
        est = group_integral_mc("compact-symplectic", 2, 1, xs, ys, samples, seed + 10 + trial)
        dev = abs(est.mean - cf)
        good = dev <= sigmas * est.stderr
        ok = ok and good
        results.append(
            _result(f"symplectic_k2_{trial}", "haar-mc", dev, est.stderr, ok=good)
        )
    return ok


def _suite_bessel(tol: float, seed: int, results: list) -> bool:
    dev = bessel_half_identity_check((0.5, 1.0, 2.0, 5.0, 10.0))
    results.append(_result("bessel_half_integer", "closed-form", dev, ok=dev <= tol))
    return dev <= tol


def _suite_confluent(tol: float, seed: int, results: list) -> bool:
    from .dual import goe_correlator_k2

    ok = True
    for n in (1, 2, 4, 8):
        for lam in (0.0, 0.5, 1.0):
            a = goe_correlator_k2(n, lam, lam)
            b = goe_moment_dual(n, 1, lam)
            dev = abs(a - b) / max(abs(b), 1e-300)
            good = dev <= tol
            ok = ok and good
            results.append(_result(f"confluent_N{n}_lam{lam}", "k2-vs-moment", dev, ok=good))
    return ok


SUITES = {
    "pfaffian": _suite_pfaffian,
    "oracle": _suite_oracle,
    "hiz-pde": _suite_hiz_pde,
    "group-mc": _suite_group_mc,
    "bessel": _suite_bessel,
    "confluent": _suite_confluent,
}


def cmd_verify(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    suite = params["suite"]
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    tol = params.get("tol") or SUITE_TOLS[suite]
    seed = params.get("seed", 20260101)
    man = RunManifest("verify", params, seed, __version__, 0.0)
    if suite == "group-mc":
        passed = SUITES[suite](tol, seed, man.results, params.get("samples", 100000))
    else:
        passed = SUITES[suite](tol, seed, man.results)
    man.passed = bool(passed)
    man.walltime_s = time.perf_counter() - t0
    return man


def cmd_compare(params: dict) -> RunManifest:
    t0 = time.perf_counter()
    spec = _spec_from_params(params)
    lam = tuple(params["lambdas"])
    k = len(lam)
    tol = params.get("tol") or 1e-8
    man = RunManifest("compare", params, params.get("seed"), __version__, 0.0)
    values = {}
    values["monomial"] = (
        complex(evaluate_request(DualIntegralRequest(spec, LambdaPoints(lam)))),
        None,
    )
    if k <= 4 and spec.n + 0 <= 64:
        try:
            values["quadrature"] = (
                complex(quadrature_cross_check(DualIntegralRequest(spec, LambdaPoints(lam)))),
                None,
            )
        except BudgetError:
            pass
    if spec.n <= WICK_LIMITS[0] and k <= WICK_LIMITS[1]:
        values["oracle"] = (complex(wick_oracle(spec, lam)), None)
    if params.get("samples"):
        est = mc_correlator(
            spec, lam, params["samples"], params.get("seed", 0), threads=params.get("threads", 1)
        )
        values["mc"] = (est.mean, est.stderr)
    method = params.get("method", "all")
    if method != "all":
        values = {m: v for m, v in values.items() if m == method}
    for m, (v, se) in values.items():
        man.results.append(_result("correlator", m, v, se))
    passed = True
    names = sorted(values)
    for i, m1 in enumerate(names):
        for m2 in names[i + 1 :]:
            v1, se1 = values[m1]
            v2, se2 = values[m2]
            dev = abs(v1 - v2)
            if se1 is not None or se2 is not None:
                band = 3.0 * max(se1 or 0.0, se2 or 0.0)
                good = dev <= band
                crit = f"3*stderr={band:.3e}"
            else:
                scale = max(abs(v1), abs(v2), 1e-300)
                good = dev / scale <= tol
                crit = f"rel_tol={tol:.1e}"
            passed = passed and good
            man.results.append(
                _result(f"{m1}_vs_{m2}", "pairwise", dev, ok=good, criterion=crit)
            )
    man.passed = passed
    man.walltime_s = time.perf_counter() - t0
    return man


def cmd_report(params: dict) -> RunManifest:
    """Render the kernel curves and the moment-ratio trend as figures + CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    t0 = time.perf_counter()
    outdir = Path(params["out_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    man = RunManifest("report", params, None, __version__, 0.0)

    xs = np.linspace(params.get("xmin", 0.05), params.get("xmax", 12.0), params.get("points", 400))
    kg = [kernel_goe(float(x)) for x in xs]
    ks = [kernel_sine(float(x)) for x in xs]
    with open(outdir / "kernels.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "kernel_goe", "kernel_sine"])
        for x, a, b in zip(xs, kg, ks):
            writer.writerow([repr(float(x)), repr(a), repr(b)])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(xs, kg, label="cos x/x$^2$ - sin x/x$^3$ (orthogonal)")
    ax.plot(xs, ks, label="sin x/x (unitary)")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("scaling variable x")
    ax.set_ylabel("kernel")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "kernels.png", dpi=150)
    plt.close(fig)
    man.results.append({"label": "kernels", "method": "figure", "files": ["kernels.csv", "kernels.png"]})

    dims = params.get("dims") or [4, 8, 16, 32]
    rows = []
    for n in dims:
        exact = goe_moment_dual(n, 1, 0.0).real
        asym = moment_asymptotic(GOE, n, 1, 0.0)
        envelope = math.exp(-n * (1.0 + math.log(2.0)))
        rows.append((n, exact, asym, exact / asym, exact / (asym * envelope)))
    with open(outdir / "moment_ratio.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["N", "exact", "asymptotic", "ratio", "envelope_corrected_ratio"])
        for row in rows:
            writer.writerow([repr(v) for v in row])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(
        [r[0] for r in rows], [abs(r[3]) for r in rows], "o-", label="raw ratio"
    )
    ax.semilogy(
        [r[0] for r in rows],
        [abs(r[4]) for r in rows],
        "s-",
        label="ratio / exp(-N(1+log 2)) envelope",
    )
    ax.set_xlabel("N")
    ax.set_ylabel("second moment / asymptotic prediction")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "moment_ratio.png", dpi=150)
    plt.close(fig)
    man.results.append(
        {"label": "moment_ratio", "method": "figure", "files": ["moment_ratio.csv", "moment_ratio.png"]}
    )
    man.passed = True
    man.walltime_s = time.perf_counter() - t0
    return man


COMMANDS = {
    "mc": cmd_mc,
    "dual": cmd_dual,
    "gamma": cmd_gamma,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "compare": cmd_compare,
    "report": cmd_report,
}


def run_command(command: str, params: dict) -> RunManifest:
    """Dispatch point shared by the CLI and by manifest re-runs."""
    return COMMANDS[command](params)


def rerun_manifest(manifest: dict) -> RunManifest:
    return run_command(manifest["command"], manifest["params"])


# -- argument parsing ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charpol",
        description="Correlators of characteristic polynomials of GOE/GUE matrices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", default=None, help="write the report to this path")
        if seeded:
            p.add_argument("--threads", type=int, default=1)

    def matrixy(p):
        p.add_argument("--ensemble", choices=[GOE, GUE], required=True)
        p.add_argument("--dim", type=int, required=True, help="matrix dimension N")
        p.add_argument("--lambdas", type=str, required=True, help="comma-separated reals")
        p.add_argument("--source", type=str, default=None, help="comma-separated reals, length N")

    p = sub.add_parser("mc", help="Monte Carlo correlator estimate")
    matrixy(p)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    common(p)

    p = sub.add_parser("dual", help="exact dual-integral evaluation")
    matrixy(p)
    p.add_argument("--method", choices=["monomial", "quadrature"], default="monomial")
    p.add_argument("--nodes", type=int, default=None)
    common(p, seeded=False)

    p = sub.add_parser("gamma", help="universal constants gamma_k")
    p.add_argument("--ensemble", choices=[GOE, GUE], required=True)
    p.add_argument("--kmax", type=int, default=10)
    common(p, seeded=False)

    p = sub.add_parser("kernel", help="scaling kernels on an x grid")
    p.add_argument("--xmin", type=float, default=0.05)
    p.add_argument("--xmax", type=float, default=12.0)
    p.add_argument("--points", type=int, default=200)
    common(p, seeded=False)

    p = sub.add_parser("verify", help="named verification suites")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=20260101)
    p.add_argument("--samples", type=int, default=100000)
    common(p, seeded=False)

    p = sub.add_parser("compare", help="cross-method comparison with pass/fail")
    matrixy(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["monomial", "quadrature", "mc", "oracle", "all"], default="all")
    p.add_argument("--tol", type=float, default=None)
    common(p)

    p = sub.add_parser("report", help="figures + delimited data for the key curves")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--xmin", type=float, default=0.05)
    p.add_argument("--xmax", type=float, default=12.0)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--dims", type=str, default=None, help="comma-separated N list")
    common(p, seeded=False)

    return parser


def _params_from_args(args: argparse.Namespace) -> dict:
    params = {}
    for key, value in vars(args).items():
        if key in ("command", "format", "out") or value is None:
            continue
        if key in ("lambdas", "source"):
            params[key] = list(_parse_floats(value))
        elif key == "dims":
            params[key] = [int(v) for v in value.split(",")]
        else:
            params[key] = value
    return params


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    params = _params_from_args(args)
    try:
        manifest = run_command(args.command, params)
    except BudgetError as exc:
        print(json.dumps({"error": {"type": "budget", "message": str(exc)}}, sort_keys=True))
        return 2
    except ValueError as exc:
        print(json.dumps({"error": {"type": "usage", "message": str(exc)}}, sort_keys=True))
        return 2
    if args.command == "kernel" and args.format == "csv":
        text = _kernel_csv(manifest.results)
    elif args.format == "csv":
        text = manifest.to_csv()
    else:
        text = manifest.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(text)
    if manifest.passed is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
