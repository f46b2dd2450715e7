"""Command-line front end.

Subcommands: kernel, quad, memory-test, avg-decay, dispersion, evolve,
scatter, pheno, selftest.  Every numeric output is printed with 17
significant digits and '.' decimals; CSV and JSON files start with a
header comment carrying the tool version and a digest of the inputs, so
identical invocations produce byte-identical files.  Exit codes: 0 on
success, 2 on validation errors, 3 on numerical failures, with a JSON
error object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .averaging import atomic_no_decay_check, decay_bound_check
from .config import parse_config
from .dispersion import DEFAULT_K_GRID, mode_stability_scan, solve_branch
from .errors import NumericalError, ValidationError
from .pheno import signature_report
from .quadrature import build_quadrature
from .radial import evolve
from .resolvent import TimeSeries, apply_memory, apply_memory2
from .scattering import decay_fit, memory_limit, scattering_residual_fit
from .spectral import (BreitWigner, DiracComb, PowerLawExp, check_conditions,
                       spectral_constants)


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _digest(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".cetlab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, columns: dict, digest_src: str) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    lines = [f"# cetlab {__version__} digest={_digest(digest_src)}",
             ",".join(names)]
    for i in range(rows):
        lines.append(",".join(_fmt(float(columns[c][i])) for c in names))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, obj: dict, digest_src: str) -> None:
    obj = dict(obj)
    obj["_tool"] = {"name": "cetlab", "version": __version__,
                    "digest": _digest(digest_src)}
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=1,
                                   default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(f"not JSON serializable: {type(x)}")


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True, indent=1, default=_json_default))


def _density_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True,
                   choices=("powerlaw", "breitwigner", "diraccomb"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--mu0", type=float)
    p.add_argument("--atoms", help="semicolon list of 'alpha mu' pairs")


def _density_from_args(a) -> object:
    if a.family == "powerlaw":
        if None in (a.alpha, a.beta, a.lam):
            raise ValidationError("powerlaw needs --alpha --beta --lambda")
        return PowerLawExp(a.alpha, a.beta, a.lam)
    if a.family == "breitwigner":
        if None in (a.alpha, a.gamma, a.mu0):
            raise ValidationError("breitwigner needs --alpha --gamma --mu0")
        return BreitWigner(a.alpha, a.gamma, a.mu0)
    if not a.atoms:
        raise ValidationError("diraccomb needs --atoms 'a1 m1; a2 m2; ...'")
    pairs = []
    for chunk in a.atoms.split(";"):
        parts = chunk.replace(",", " ").split()
        if len(parts) != 2:
            raise ValidationError(f"bad atom entry '{chunk.strip()}'")
        pairs.append((float(parts[0]), float(parts[1])))
    return DiracComb(tuple(pairs))


def _cmd_kernel(a) -> int:
    rho = _density_from_args(a)
    consts = spectral_constants(rho, tol=a.tol)
    report = check_conditions(rho, consts)
    _emit({"constants": consts.as_dict(), "conditions": report.as_dict()})
    return 0


def _cmd_quad(a) -> int:
    rho = _density_from_args(a)
    quad = build_quadrature(rho, a.n_nodes, a.tol)
    src = repr((rho, a.n_nodes, a.tol))
    if a.out_csv:
        write_csv(a.out_csv, {"mu": quad.nodes, "weight": quad.weights}, src)
    if a.out_json:
        write_json(a.out_json, {"n_nodes": len(quad),
                                "moment_report": quad.moment_report}, src)
    _emit({"n_nodes": len(quad), "moment_report": quad.moment_report,
           "mu_min": float(quad.nodes.min()),
           "mu_max": float(quad.nodes.max())})
    return 0


def _cmd_memory_test(a) -> int:
    rho = _density_from_args(a)
    quad = build_quadrature(rho, a.n_nodes, 1e-10)
    dt = a.dt
    n = int(round(a.t_final / dt)) + 1
    t = dt * np.arange(n)
    src = np.where(t > a.t_on,
                   np.exp(-((t - a.t_on - 3.0) ** 2)), 0.0)
    f = TimeSeries(0.0, dt, src)
    kf = apply_memory(quad, a.xi, f)
    k2f = apply_memory2(quad, a.xi, f)
    causal = bool(np.all(kf.samples[t <= a.t_on] == 0.0))
    sup_bound = float(np.sum(quad.weights)) * f.l1()
    verdicts = {"causal_before_source": causal,
                "sup_kf": kf.sup(), "uniform_bound": sup_bound,
                "uniform_bound_holds": kf.sup() <= sup_bound}
    src_txt = repr((rho, a.n_nodes, a.xi, dt, a.t_final, a.t_on))
    if a.out_csv:
        write_csv(a.out_csv, {"t": t, "f": f.samples, "Kinv_f": kf.samples,
                              "Kinv2_f": k2f.samples}, src_txt)
    _emit(verdicts)
    return 0


def _cmd_avg_decay(a) -> int:
    rho = _density_from_args(a)
    consts = spectral_constants(rho)
    if isinstance(rho, DiracComb):
        chk = atomic_no_decay_check(rho)
        _emit({"decay": False, "no_decay_check": chk})
        return 0
    rep = decay_bound_check(rho, consts)
    src = repr((rho,))
    if a.out_csv:
        cols = {"t": [], "xi": [], "T": [], "bound": [], "ratio": []}
        for i, tv in enumerate(rep.t_grid):
            for j, xv in enumerate(rep.xi_grid):
                cols["t"].append(tv)
                cols["xi"].append(xv)
                cols["T"].append(rep.symbol[i, j])
                cols["bound"].append(rep.bound_constant)
                cols["ratio"].append(tv * abs(rep.symbol[i, j]) / 2.0
                                     / rep.bound_constant)
        write_csv(a.out_csv, cols, src)
    _emit(rep.as_dict())
    return 0


def _cmd_dispersion(a) -> int:
    rho = _density_from_args(a)
    k_grid = tuple(float(x) for x in a.k_grid.split(",")) if a.k_grid \
        else DEFAULT_K_GRID
    points = [solve_branch(rho, k, tol=a.tol) for k in k_grid]
    scan = mode_stability_scan(rho, k_grid)
    src = repr((rho, k_grid, a.tol))
    if a.out_csv:
        write_csv(a.out_csv,
                  {"k": [p.k for p in points],
                   "omega": [p.omega for p in points],
                   "sigma": [p.sigma for p in points],
                   "residual": [p.residual for p in points]}, src)
    _emit({"branch": [{"k": p.k, "omega": p.omega, "sigma": p.sigma,
                       "residual": p.residual} for p in points],
           "max_im": scan.max_im, "gaps": list(scan.gaps)})
    return 0


def _run_from_config(path):
    rc = parse_config(path)
    if rc.density is None:
        raise ValidationError(f"{path}: [density] section is required")
    cfg, grid, cadence, snaps = rc.build_model()
    out = evolve(cfg, grid, cadence=cadence, snapshot_times=snaps)
    return rc, cfg, grid, out


def _cmd_evolve(a) -> int:
    rc, cfg, grid, out = _run_from_config(a.config)
    os.makedirs(rc.output_dir, exist_ok=True)
    src = rc.source_text
    names = ("t", "E_std", "E_ghost", "flux", "sup_u", "u_origin",
             "mem_norm", "src_norm")
    if "csv" in rc.formats:
        cols = {n: out.series(n) for n in names}
        write_csv(os.path.join(rc.output_dir, "diagnostics.csv"), cols, src)
        for ts, snap in sorted(out.snapshots.items()):
            write_csv(os.path.join(rc.output_dir,
                                   f"snapshot_t{ts:g}.csv"),
                      {"r": grid.r, "u": snap["u"], "M": snap["M"],
                       "Phi": snap["Phi"]}, src)
    summary = {"completed": out.completed,
               "integrated_flux": out.integrated_flux,
               "n_records": len(out.records), "dt": out.dt}
    if out.blow_up_time is not None:
        summary["blow_up_time"] = out.blow_up_time
        summary["blow_up_radius"] = out.blow_up_radius
    if "json" in rc.formats:
        write_json(os.path.join(rc.output_dir, "summary.json"), summary, src)
    _emit(summary)
    if not out.completed:
        raise NumericalError("blow-up-detected: run did not reach t_final",
                             **summary)
    return 0


def _cmd_scatter(a) -> int:
    rc, cfg, grid, out = _run_from_config(a.config)
    rep = memory_limit(out)
    t = out.series("t")
    fits = {"sup_u": decay_fit(list(zip(t, out.series("sup_u"))),
                               (a.fit_lo, out.records[-1].t)).as_dict()}
    result = {"m_inf_norm": rep.m_inf_norm,
              "memory_residual_fit": rep.residual_fit.as_dict(),
              "observation_radius": rep.observation_radius,
              "node_beat_period": rep.beat_period,
              "decay_fits": fits}
    bases = [float(x) for x in a.residual_times.split(",") if x.strip()]
    usable = [b for b in bases if b in out.snapshots
              and 2.0 * b in out.snapshots]
    if usable:
        sfit = scattering_residual_fit(out, usable)
        result["scattering_residual_fit"] = sfit.as_dict()
    src = rc.source_text
    os.makedirs(rc.output_dir, exist_ok=True)
    if "csv" in rc.formats:
        write_csv(os.path.join(rc.output_dir, "m_inf_profile.csv"),
                  {"r": grid.r, "M_inf": rep.m_inf_profile}, src)
    if "json" in rc.formats:
        write_json(os.path.join(rc.output_dir, "scatter.json"), result, src)
    _emit(result)
    return 0


def _cmd_pheno(a) -> int:
    rep = signature_report(a.d_mpc, a.omega_hz, a.alpha, a.mstar,
                           l1=a.l1)
    _emit(rep.as_dict())
    return 0


def _cmd_selftest(a) -> int:
    from .selftest import ALL_CRITERIA, prewarm_sweep, run_all
    wanted = ALL_CRITERIA
    if a.only:
        ids = {int(x) for x in a.only.split(",")}
        wanted = tuple(fn for i, fn in enumerate(ALL_CRITERIA, start=1)
                       if i in ids)
        if not wanted:
            raise ValidationError(f"no criteria match --only {a.only}")
    if any(fn.__name__ in ("criterion_8", "criterion_9") for fn in wanted):
        prewarm_sweep()
    results = run_all(wanted)
    n_fail = sum(1 for r in results if not r.passed)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    if n_fail:
        raise NumericalError(f"selftest: {n_fail} criteria failed",
                             failed=[r.cid for r in results if not r.passed])
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cetlab",
        description="causal retarded-memory wave laboratory")
    ap.add_argument("--version", action="version",
                    version=f"cetlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="spectral constants and conditions")
    _density_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=_cmd_kernel)

    p = sub.add_parser("quad", help="mass quadrature nodes and weights")
    _density_args(p)
    p.add_argument("--n-nodes", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.set_defaults(fn=_cmd_quad)

    p = sub.add_parser("memory-test", help="memory operator checks at "
                                           "fixed wavenumber")
    _density_args(p)
    p.add_argument("--n-nodes", type=int, default=32)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-final", type=float, default=20.0)
    p.add_argument("--t-on", type=float, default=5.0)
    p.add_argument("--out-csv")
    p.set_defaults(fn=_cmd_memory_test)

    p = sub.add_parser("avg-decay", help="mass-averaged propagator decay")
    _density_args(p)
    p.add_argument("--out-csv")
    p.set_defaults(fn=_cmd_avg_decay)

    p = sub.add_parser("dispersion", help="dispersion branch and mode scan")
    _density_args(p)
    p.add_argument("--k-grid", help="comma list, default "
                                    + ",".join(map(str, DEFAULT_K_GRID)))
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out-csv")
    p.set_defaults(fn=_cmd_dispersion)

    p = sub.add_parser("evolve", help="run the radial solver from a config")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=_cmd_evolve)

    p = sub.add_parser("scatter", help="memory limit and scattering fits")
    p.add_argument("--config", required=True)
    p.add_argument("--residual-times", default="25,50,100",
                   help="base times t for the D(t,2t) fit")
    p.add_argument("--fit-lo", type=float, default=20.0)
    p.set_defaults(fn=_cmd_scatter)

    p = sub.add_parser("pheno", help="observational signature formulas")
    p.add_argument("--d-mpc", type=float, required=True)
    p.add_argument("--omega-hz", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mstar", type=float, required=True)
    p.add_argument("--l1", type=float)
    p.set_defaults(fn=_cmd_pheno)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--only", help="comma list of criterion numbers")
    p.set_defaults(fn=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the contract
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc),
                          "detail": exc.detail}, default=_json_default),
              file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc),
                          "detail": exc.detail}, default=_json_default),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
