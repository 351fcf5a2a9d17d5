"""Command-line driver: parse a model file, run one command, emit a JSON
report plus CSV artifacts.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage/model error,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import chain, gibbs, riesz, sft
from .errors import BudgetExceededError, ModelFormatError, SpinPressureError
from .modelio import (CheckRecord, ModelFile, RunReport, fmt, parse_model,
                      serialize_model, write_csv)

COMMANDS = ("pressure", "equilibrium", "kms-check", "evolve-check",
            "variational", "bridge", "properties", "riesz-coeffs",
            "riesz-verify")


def _digest(mf: ModelFile, args) -> str:
    blob = json.dumps([serialize_model(mf), vars(args)], sort_keys=True,
                      default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _require_kind(mf: ModelFile, kind: str, command: str):
    if mf.kind != kind:
        raise ModelFormatError(f"command {command} needs a {kind} model, "
                               f"got {mf.kind}")


def _spin_model(mf: ModelFile, args) -> chain.SpinChainModel:
    m = mf.payload
    if args.beta is not None:
        m = replace(m, beta=args.beta)
    if args.boundary is not None:
        m = replace(m, boundary=args.boundary)
    return m


def _volumes(args, default_lo: int, default_hi: int) -> tuple[int, int]:
    if args.volumes is None:
        return default_lo, default_hi
    try:
        lo, hi = (int(x) for x in args.volumes.split(":"))
    except ValueError:
        raise ModelFormatError("--volumes must look like N_MIN:N_MAX")
    return lo, hi


def cmd_pressure(mf, args, out):
    _require_kind(mf, "spin_chain", "pressure")
    model = _spin_model(mf, args)
    lo, hi = _volumes(args, model.range_, model.range_ + 6)
    pts = chain.pressure_sequence(model, lo, hi, args.budget_mib)
    write_csv(out / "pressure.csv", ["n", "log_Z", "p_n"],
              [[p.n, p.log_Z, p.p_n] for p in pts])
    value, err = (chain.pressure_estimate(model, hi, args.budget_mib)
                  if hi >= model.range_ + 2 else (pts[-1].p_n, float("nan")))
    records = (CheckRecord("pressure_finite", float(np.isfinite(value)), 1.0,
                           bool(np.isfinite(value))),)
    return records, {"estimate": value, "error_bar": err}


def cmd_equilibrium(mf, args, out):
    if mf.kind == "sft":
        beta = args.beta if args.beta is not None else 1.0
        model = mf.payload
        mu = sft.gibbs_markov_measure(model, beta)
        rpf = sft.rpf_eigendata(sft.transfer_matrix(
            model if model.word_len == 2 else sft.higher_block_recode(model),
            beta))
        h = sft.markov_entropy(mu)
        e = sft.markov_energy(mu, model.potential)
        rows = [[i, j, float(mu.kernel[i, j])]
                for i in range(mu.kernel.shape[0])
                for j in range(mu.kernel.shape[1]) if mu.kernel[i, j] > 0]
        write_csv(out / "measure.csv", ["state", "next", "probability"], rows)
        summary = {"lambda": rpf.eigenvalue,
                   "pressure": float(np.log(rpf.eigenvalue)),
                   "entropy": h, "energy": e}
        dev = abs(summary["pressure"] - (h - beta * e))
        return (CheckRecord("gibbs_attains_pressure", dev, 1e-9, dev <= 1e-9),), summary

    _require_kind(mf, "spin_chain", "equilibrium")
    model = _spin_model(mf, args)
    lo, hi = _volumes(args, model.range_, model.range_ + 4)
    rows, records = [], []
    for n in range(lo, hi + 1):
        st = gibbs.gibbs_state(model, n, budget_mib=args.budget_mib)
        s, e = gibbs.entropy(st), gibbs.energy(st)
        dev = gibbs.variational_identity_check(st)
        rows.append([n, st.log_Z / n, s / n, e / n, dev])
        records.append(CheckRecord(f"variational_identity_n{n}", dev, 1e-10,
                                   dev <= 1e-10))
    write_csv(out / "equilibrium.csv",
              ["n", "p_n", "entropy_density", "energy_density", "residual"],
              rows)
    return tuple(records), {}


def cmd_kms_check(mf, args, out):
    _require_kind(mf, "spin_chain", "kms-check")
    model = _spin_model(mf, args)
    lo, n = _volumes(args, 8, 8)
    n = max(n, model.range_ + 1)
    rng = np.random.default_rng(args.seed)
    st = gibbs.gibbs_state(model, n, budget_mib=args.budget_mib)
    from .algebra import from_matrix, op_norm
    rows, records = [], []
    for t in range(args.samples):
        width = model.range_
        dim = model.site_dim ** width
        obs = []
        for _ in range(2):
            lo_w = int(rng.integers(0, n - width + 1))
            m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            obs.append(gibbs.LocalObservable(lo_w, lo_w + width - 1,
                                             from_matrix(m)))
        a, b = obs
        res = gibbs.kms_residual(st, a, b)
        tol = 1e-10 * op_norm(a.element) * op_norm(b.element)
        rows.append([t, n, model.beta, res, tol, int(res <= tol)])
        records.append(CheckRecord(f"kms_{t}", res, tol, res <= tol))
    write_csv(out / "kms.csv",
              ["test_id", "n", "beta", "residual", "tolerance", "pass"], rows)
    return tuple(records), {}


def cmd_evolve_check(mf, args, out):
    _require_kind(mf, "spin_chain", "evolve-check")
    model = _spin_model(mf, args)
    _, n = _volumes(args, 8, 8)
    n = max(n, 2 * model.range_)
    rng = np.random.default_rng(args.seed)
    from .algebra import from_matrix, op_norm
    window = range(0, n - model.range_ + 1)
    z = 0.3
    rows, records = [], []
    for t in range(args.samples):
        width = model.range_
        dim = model.site_dim ** width
        lo_w = int(rng.integers(0, n - width + 1))
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = gibbs.LocalObservable(lo_w, lo_w + width - 1, from_matrix(m))
        series, terms, tail = gibbs.evolve_series(model, a, z, window, n,
                                                  tol=1e-12)
        oracle = gibbs.conjugation_oracle(model, a, z, window, n)
        err = op_norm(series - oracle)
        rows.append([t, n, z, err, 1e-8, int(err <= 1e-8)])
        records.append(CheckRecord(f"evolve_{t}", err, 1e-8, err <= 1e-8))
    write_csv(out / "evolve.csv",
              ["test_id", "n", "z", "error", "tolerance", "pass"], rows)
    return tuple(records), {}


def cmd_variational(mf, args, out):
    _require_kind(mf, "sft", "variational")
    model = mf.payload
    beta = args.beta if args.beta is not None else 1.0
    order = args.order if args.order is not None else max(1, model.word_len - 1)
    opts = sft.OptimizeOptions(seed=args.seed)
    result = sft.variational_optimize(model, beta, order, opts)
    pressure = sft.classical_pressure(model, beta)
    mu = result.measure
    rows = [[i, j, float(mu.kernel[i, j])]
            for i in range(mu.kernel.shape[0])
            for j in range(mu.kernel.shape[1]) if mu.kernel[i, j] > 0]
    write_csv(out / "optimal_measure.csv", ["state", "next", "probability"],
              rows)
    gap = pressure - result.value
    records = (
        CheckRecord("value_below_pressure", result.value - pressure, 1e-9,
                    result.value <= pressure + 1e-9),
        CheckRecord("value_attains_pressure", gap, opts.gap_tol,
                    gap <= opts.gap_tol),
    )
    return records, {"pressure": pressure, "value": result.value,
                     "converged": result.converged,
                     "iterations": result.iterations}


def cmd_bridge(mf, args, out):
    _require_kind(mf, "sft", "bridge")
    model = mf.payload
    beta = args.beta if args.beta is not None else 1.0
    _, n = _volumes(args, 10, 10)
    boundary = args.boundary if args.boundary is not None else "open"
    res = sft.diagonal_bridge(model, beta, n, boundary)
    records = (
        CheckRecord("pressure_gap", res["pressure_gap"], 1e-9,
                    res["pressure_gap"] <= 1e-9),
        CheckRecord("gibbs_tv_distance", res["tv_distance"], 1e-9,
                    res["tv_distance"] <= 1e-9),
    )
    return records, res


def cmd_properties(mf, args, out):
    _require_kind(mf, "spin_chain", "properties")
    model = _spin_model(mf, args)
    rng = np.random.default_rng(args.seed)
    d, r = model.site_dim, model.range_
    dim = d ** r
    k = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    k = (k + k.conj().T) / 2
    model_k = chain.SpinChainModel(d, r, k, beta=model.beta,
                                   boundary=model.boundary)
    c = float(rng.normal())
    _, n = _volumes(args, 2 * r, max(8, 2 * r))
    report = chain.check_pressure_properties(model, model_k, c, 2, n,
                                             args.budget_mib)
    rows = [[rec.check_id, rec.value, rec.bound, int(rec.passed)]
            for rec in report.records]
    write_csv(out / "properties.csv", ["check", "value", "bound", "pass"], rows)
    records = tuple(CheckRecord(rec.check_id, rec.value, rec.bound, rec.passed)
                    for rec in report.records)
    return records, {}


def cmd_riesz_coeffs(mf, args, out):
    _require_kind(mf, "riesz", "riesz-coeffs")
    spec = mf.payload
    n_max = args.n_max if args.n_max is not None else 2 * spec.frequencies[-1]
    rows = []
    for n in range(0, n_max + 1):
        try:
            rows.append([n, riesz.fourier_coefficient(spec, n)])
        except riesz.UndecidablePrefixError:
            break
    write_csv(out / "coefficients.csv", ["n", "mu_hat"], rows)
    records = (CheckRecord("normalization", rows[0][1], 0.0,
                           rows[0][1] == 1.0),)
    return records, {"coefficients_emitted": len(rows)}


def cmd_riesz_verify(mf, args, out):
    _require_kind(mf, "riesz", "riesz-verify")
    spec = mf.payload
    K = args.order if args.order is not None else len(spec)
    n_max = args.n_max if args.n_max is not None else spec.frequencies[
        min(K, len(spec)) - 1]
    err = riesz.verify_coefficients(spec, K, n_max)
    records = (CheckRecord("quadrature_vs_formula", err, 1e-10, err <= 1e-10),)
    return records, {"max_error": err, "K": K, "n_max": n_max}


HANDLERS = {
    "pressure": cmd_pressure,
    "equilibrium": cmd_equilibrium,
    "kms-check": cmd_kms_check,
    "evolve-check": cmd_evolve_check,
    "variational": cmd_variational,
    "bridge": cmd_bridge,
    "properties": cmd_properties,
    "riesz-coeffs": cmd_riesz_coeffs,
    "riesz-verify": cmd_riesz_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spinpressure",
        description="Pressure, equilibrium states and KMS diagnostics for "
                    "quantum spin chains and subshifts of finite type.")
    p.add_argument("--model", required=True, help="model file (TOML or JSON)")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--volumes", help="N_MIN:N_MAX")
    p.add_argument("--beta", type=float)
    p.add_argument("--boundary", choices=("open", "periodic"))
    p.add_argument("--order", type=int, help="Markov order / Riesz cutoff K")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20,
                   help="random trials for check commands")
    p.add_argument("--n-max", type=int, dest="n_max",
                   help="coefficient range for riesz commands")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--budget-mib", type=int, dest="budget_mib")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        mf = parse_model(args.model)
        records, summary = HANDLERS[args.command](mf, args, out)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ModelFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpinPressureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    report = RunReport(args.command, _digest(mf, args), tuple(records))
    payload = report.to_json()
    payload["summary"] = summary
    (out / "report.json").write_bytes(
        (json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
        .encode())
    for rec in records:
        status = "pass" if rec.passed else "FAIL"
        print(f"{rec.check_id}: value={fmt(rec.value)} "
              f"tolerance={fmt(rec.tolerance)} {status}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
