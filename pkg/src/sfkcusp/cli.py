"""Command-line front end: ``sfkcusp <command> [--config FILE] [--out DIR] [flags]``.

Parameters are merged as defaults < JSON config < command-line flags.  Every
command writes ``report.json`` (plus CSV tables where relevant) to the
output directory and exits 0 if all its checks pass, 1 on a numeric failure
and 2 on a usage error.  ``SFKCUSP_THREADS`` sets the worker count of grid
sweeps.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = ("profile", "check-sfk", "asymptotics", "glue", "indicial", "spectrum", "topology", "biharmonic")

DEFAULTS = {
    "profile": {"n": 2, "k": 1, "beta": "0", "tau_min": 1e-2, "tau_max": 1e2, "points": 50},
    "check-sfk": {
        "n": 2, "k": 1, "beta": "0", "tau_min": 1e-2, "tau_max": 1e2, "points": 200,
        "oracle_points": 12, "tol": 1e-12, "oracle_tol": 1e-6,
    },
    "asymptotics": {"n": 2, "k": 1, "ae_window": [10.0, 1000.0], "cusp_window": [1e-300, 1e-100], "exp_tol": 0.05, "coef_rtol": 0.01},
    "glue": {"n": 2, "k": 1, "epsilons": [0.05, 0.02, 0.01], "base": "fubini-study", "measure": "raw", "count": 64},
    "indicial": {"n": 2, "j_max": 6, "eta": 0.5, "delta": 0.5, "tol": 1e-10},
    "spectrum": {"n": 2, "j_max": 6},
    "topology": {"n": 2, "epsilon": "1/10", "c1": "0", "vol": "1"},
    "biharmonic": {"n": 2, "region": "interior", "modes": [{"degree": 0, "h": 0.0, "k": 1.0}], "tol": 1e-10},
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    parameters: dict
    seed: int = 0
    out: Path = Path("out")
    failures: list = field(default_factory=list)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for key, val in self.parameters.items():
            if key.endswith("tol") or key == "coef_rtol":
                if not float(val) > 0:
                    raise UsageError(f"tolerance {key} must be positive")
            if isinstance(val, list) and not val:
                raise UsageError(f"grid {key} is empty")
            if key in ("points", "oracle_points", "count") and int(val) < 1:
                raise UsageError(f"grid {key} is empty")

    def check(self, name: str, ok: bool, detail="") -> bool:
        if not ok:
            self.failures.append({"check": name, "detail": detail})
        return ok


# ---------------------------------------------------------------- helpers


def _fraction(x) -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {x!r}") from exc


def _profile(n: int, k: int, beta):
    from .momentum import profile_cp1, profile_cpn

    beta = _fraction(beta)
    return profile_cp1(k, beta) if n == 2 else profile_cpn(n, -k, beta)


def _tau_grid(cfg: RunConfig) -> np.ndarray:
    p = cfg.parameters
    lo, hi = float(p["tau_min"]), float(p["tau_max"])
    if not 0 < lo < hi:
        raise UsageError("need 0 < tau_min < tau_max")
    return np.geomspace(lo, hi, int(p["points"]))


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SFKCUSP_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- commands


def sfk_check(p, taus, oracle_taus):
    """Momentum-formula residuals on ``taus`` and oracle disagreement on ``oracle_taus``."""
    from .curvature import potential_from_profile, rho_for_tau, scalar_curvature_radial
    from .momentum import scalar_curvature_momentum

    residuals = [(float(t), float(scalar_curvature_momentum(p, float(t)))) for t in taus]
    pot = potential_from_profile(p)
    oracle = []
    for t in oracle_taus:
        s_mom = float(scalar_curvature_momentum(p, float(t)))
        s_rad = float(scalar_curvature_radial(pot, rho_for_tau(p, float(t))).scalar)
        oracle.append((float(t), s_mom, s_rad, abs(s_mom - s_rad)))
    return residuals, oracle


def cmd_profile(cfg: RunConfig) -> dict:
    from .momentum import completeness_report, is_scalar_flat_exact, kahler_potential_f, radial_log_coordinate

    P = cfg.parameters
    p = _profile(int(P["n"]), int(P["k"]), P["beta"])
    rows = [(t, float(p.phi(t)), float(radial_log_coordinate(p, t)), float(kahler_potential_f(p, t))) for t in _tau_grid(cfg)]
    _write_csv(cfg.out / "profile.csv", ["tau", "phi", "r", "f"], rows)
    comp = completeness_report(p)
    exact = is_scalar_flat_exact(p)
    cfg.check("scalar_flat_exact", exact)
    # beta > 0 closes the fibre at tau = 0 with a cone point, a finite distance away
    expect_complete = p.cone_beta == 0
    cfg.check("completeness_as_expected", comp.complete == expect_complete, comp.to_dict())
    return {
        "profile": p.to_record(),
        "completeness": comp.to_dict(),
        "expected_complete": expect_complete,
        "scalar_flat_exact": exact,
    }


def cmd_check_sfk(cfg: RunConfig) -> dict:
    P = cfg.parameters
    p = _profile(int(P["n"]), int(P["k"]), P["beta"])
    taus = _tau_grid(cfg)
    rng = np.random.default_rng(cfg.seed)
    oracle_taus = np.sort(np.exp(rng.uniform(math.log(taus[0]), math.log(taus[-1]), int(P["oracle_points"]))))
    residuals, oracle = sfk_check(p, taus, oracle_taus)
    _write_csv(cfg.out / "residuals.csv", ["tau", "residual"], residuals)
    _write_csv(cfg.out / "oracle.csv", ["tau", "S_momentum", "S_radial", "abs_diff"], oracle)
    max_res = max(abs(r) for _, r in residuals)
    max_diff = max(d for *_, d in oracle)
    cfg.check("residual", max_res <= float(P["tol"]), max_res)
    cfg.check("oracle_agreement", max_diff <= float(P["oracle_tol"]), max_diff)
    return {"profile": p.label, "max_residual": max_res, "max_oracle_diff": max_diff, "oracle_taus": oracle_taus.tolist()}


def cmd_asymptotics(cfg: RunConfig) -> dict:
    from .asymptotics import (
        FitQualityError,
        expected_ae_exponent,
        expected_cusp_coefficient,
        fit_ae_remainder,
        fit_cusp_coefficient,
    )

    P = cfg.parameters
    n = int(P["n"])
    p = _profile(n, int(P["k"]), 0)
    out = {"profile": p.label}
    try:
        ae = fit_ae_remainder(p, tuple(P["ae_window"]))
        out["ae"] = ae.to_json()
        cfg.check("ae_exponent", abs(ae.exponent - expected_ae_exponent(n)) <= float(P["exp_tol"]), ae.exponent)
    except FitQualityError as exc:
        out["ae"] = exc.fit.to_json() if getattr(exc, "fit", None) else None
        cfg.check("ae_fit_quality", False, str(exc))
    try:
        cu = fit_cusp_coefficient(p, tuple(P["cusp_window"]))
        out["cusp"] = cu.to_json()
        want = expected_cusp_coefficient(n)
        cfg.check("cusp_coefficient", abs(cu.coefficient - want) <= float(P["coef_rtol"]) * want, cu.coefficient)
    except FitQualityError as exc:
        out["cusp"] = exc.fit.to_json() if getattr(exc, "fit", None) else None
        cfg.check("cusp_fit_quality", False, str(exc))
    return out


def cmd_glue(cfg: RunConfig) -> dict:
    from .gluing import (
        PositivityError,
        assemble_glued_potential,
        flat_base,
        fubini_study_base,
        glued_scalar_deviation,
        make_schedule,
        synthetic_base,
    )
    from .momentum import profile_cp1, profile_cpn

    P = cfg.parameters
    n, k = int(P["n"]), int(P["k"])
    bases = {"flat": flat_base, "fubini-study": fubini_study_base, "synthetic": synthetic_base}
    if P["base"] not in bases:
        raise UsageError(f"base must be one of {sorted(bases)}")
    if P["measure"] not in ("raw", "scaled"):
        raise UsageError("measure must be 'raw' or 'scaled'")
    base = bases[P["base"]]() if P["base"] == "flat" else bases[P["base"]](n)
    model = profile_cp1(k) if n == 2 else profile_cpn(n, -k)
    eps = sorted((float(e) for e in P["epsilons"]), reverse=True)
    schedules = [make_schedule(e, n) for e in eps]

    def one(s):
        try:
            return glued_scalar_deviation(assemble_glued_potential(s, base, model), count=int(P["count"]))
        except PositivityError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(one, schedules))
    bad = [str(r) for r in reports if isinstance(r, Exception)]
    if bad:
        cfg.check("positivity", False, bad)
        return {"errors": bad}
    rows = [(r.epsilon, r.r_eps, r.R_eps, r.min_margin, r.sup_deviation, r.sup_scaled_deviation) for r in reports]
    _write_csv(cfg.out / "glue.csv", ["epsilon", "r_eps", "R_eps", "min_margin", "sup_deviation", "sup_scaled_deviation"], rows)
    key = "sup_deviation" if P["measure"] == "raw" else "sup_scaled_deviation"
    vals = [getattr(r, key) for r in reports]
    cfg.check("positivity", all(r.min_margin > 0 for r in reports))
    cfg.check("deviation_decreasing", all(b < a for a, b in zip(vals, vals[1:])), vals)
    return {"reports": [r.to_json() for r in reports], "measure": P["measure"]}


def cmd_indicial(cfg: RunConfig) -> dict:
    from .cylinder import (
        IndicialProblem,
        WeightOnWallError,
        ae_local_index,
        cusp_local_index,
        fredholm_index,
        indicial_roots,
        smallest_positive_root,
        write_spectrum_table,
    )

    P = cfg.parameters
    n = int(P["n"])
    rep = smallest_positive_root(n, int(P["j_max"]))
    write_spectrum_table(cfg.out / "indicial.csv", rep)
    roots0 = indicial_roots(IndicialProblem(0.0)).roots
    golden = [(1 - math.sqrt(5)) / 2, 0.0, 1.0, (1 + math.sqrt(5)) / 2]
    err0 = max(abs(a - b) for a, b in zip(roots0, golden))
    cfg.check("lambda0_roots", err0 <= float(P["tol"]), err0)
    cfg.check("kappa_monotone", rep.monotone)
    try:
        idx = fredholm_index(n, float(P["eta"]), float(P["delta"]))
    except WeightOnWallError as exc:
        raise UsageError(str(exc)) from exc
    local = ae_local_index(float(P["delta"])) + cusp_local_index(n, float(P["eta"]), rep.kappa)
    cfg.check("index_additivity", idx.index == local, [idx.index, local])
    cfg.check("index_formula", idx.index == 1 - (n * n - 1), idx.index)
    return {
        "kappa": rep.kappa,
        "min_positive_real_part": rep.min_positive_real_part,
        "index": idx.__dict__,
        "lambda0_roots": [r.real for r in roots0],
        "sign_convention": "P(s) = 1/2 sigma^2 + lam sigma - 1/2 sigma + mu, calibrated by the kernel on the first eigenspace",
    }


def cmd_spectrum(cfg: RunConfig) -> dict:
    from .spectral import cp_spectrum, kernel_calibration_residual, ker_lichnerowicz_E, write_spectrum_csv

    P = cfg.parameters
    n = int(P["n"])
    spec = cp_spectrum(n, int(P["j_max"]))
    write_spectrum_csv(cfg.out / "spectrum.csv", spec)
    ker = ker_lichnerowicz_E(n)
    cal = kernel_calibration_residual(n)
    cfg.check("first_multiplicity", spec.entries[1].multiplicity == n * n - 1, spec.entries[1].multiplicity)
    cfg.check("calibration", cal == 0, cal)
    return {"kernel": ker.__dict__, "calibration_residual": cal}


def cmd_topology(cfg: RunConfig) -> dict:
    from .topo import KahlerClassData, topology_report

    P = cfg.parameters
    d = KahlerClassData(int(P["n"]), _fraction(P["c1"]), _fraction(P["vol"]), _fraction(P["epsilon"]))
    return topology_report(d).to_json()


def cmd_biharmonic(cfg: RunConfig) -> dict:
    from .gluing import HarmonicMode, biharmonic_exterior, biharmonic_interior

    P = cfg.parameters
    if P["region"] not in ("interior", "exterior"):
        raise UsageError("region must be 'interior' or 'exterior'")
    modes = [HarmonicMode(int(m["degree"]), float(m.get("h", 0.0)), float(m.get("k", 0.0)), m.get("label", "")) for m in P["modes"]]
    solve = biharmonic_interior if P["region"] == "interior" else biharmonic_exterior
    sol = solve(int(P["n"]), modes)
    mismatch = sol.boundary_mismatch(modes)
    bilap = [str(m.bilaplacian_symbolic()) for m in sol.modes]
    cfg.check("boundary_mismatch", mismatch <= float(P["tol"]), mismatch)
    cfg.check("biharmonic", all(b == "0" for b in bilap), bilap)
    return {
        "region": sol.region,
        "modes": [{"degree": m.degree, "exponents": m.exponents, "coefficients": m.coeffs} for m in sol.modes],
        "boundary_mismatch": mismatch,
    }


HANDLERS = {
    "profile": cmd_profile,
    "check-sfk": cmd_check_sfk,
    "asymptotics": cmd_asymptotics,
    "glue": cmd_glue,
    "indicial": cmd_indicial,
    "spectrum": cmd_spectrum,
    "topology": cmd_topology,
    "biharmonic": cmd_biharmonic,
}


def run(cfg: RunConfig) -> int:
    cfg.validate()
    cfg.out.mkdir(parents=True, exist_ok=True)
    cfg.failures = []
    try:
        body = HANDLERS[cfg.command](cfg)
    except UsageError:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}") from exc
    except ArithmeticError as exc:
        cfg.failures.append({"check": type(exc).__name__, "detail": str(exc)})
        body = {}
    report = {
        "command": cfg.command,
        "parameters": cfg.parameters,
        "seed": cfg.seed,
        "result": body,
        "failures": cfg.failures,
        "passed": not cfg.failures,
    }
    _write_json(cfg.out / "report.json", report)
    return EXIT_OK if not cfg.failures else EXIT_FAIL


# ---------------------------------------------------------------- argument parsing


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sfkcusp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, defaults in DEFAULTS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON file with parameters for this command")
        sp.add_argument("--out", type=Path, default=Path("out"))
        sp.add_argument("--seed", type=int, default=None)
        for key, val in defaults.items():
            flag = "--" + key.replace("_", "-")
            if key == "c1":
                flag = "--c1"
            if isinstance(val, list) and key != "modes":
                sp.add_argument(flag, dest=key, nargs="*", type=float, default=None)
            elif key == "modes":
                sp.add_argument(flag, dest=key, type=json.loads, default=None, help="JSON list of {degree, h, k}")
            else:
                sp.add_argument(flag, dest=key, type=type(val) if not isinstance(val, str) else str, default=None)
    return ap


def config_from_args(argv) -> RunConfig:
    ns = _parser().parse_args(argv)
    params = dict(DEFAULTS[ns.command])
    seed = 0
    if ns.config is not None:
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        data = dict(data.get("parameters", data))
        seed = int(data.pop("seed", seed))
        data.pop("command", None)
        unknown = set(data) - set(params)
        if unknown:
            raise UsageError(f"unknown parameters for {ns.command}: {sorted(unknown)}")
        params.update(data)
    for key in DEFAULTS[ns.command]:
        val = getattr(ns, key)
        if val is not None:
            params[key] = val
    if ns.seed is not None:
        seed = ns.seed
    return RunConfig(command=ns.command, parameters=params, seed=seed, out=ns.out)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        code = run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_OK
    print(json.dumps({"command": cfg.command, "passed": code == EXIT_OK, "failures": _jsonable(cfg.failures)}))
    return code


if __name__ == "__main__":
    sys.exit(main())
