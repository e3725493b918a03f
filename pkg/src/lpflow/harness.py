"""Run construction, CSV/JSON persistence and sweep aggregation.

Outputs are deterministic: all randomness is drawn from the config seed
through one PCG64 stream, columns have a fixed order, and floats are
written with repr-faithful %.17g formatting, so identical configs produce
byte-identical files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from .blocks import BlockOperator, ExtendedPoint
from .config import RunConfig
from .errors import ConfigError
from .hierarchy import Generating, Hbasis, Wbasis
from .integrate import Trajectory, integrate, monitor
from .oracles import (
    FourDimState,
    four_dim_invariants,
    four_dim_state_to_point,
    grassmann_embed,
    point_to_four_dim_state,
)
from .sampling import block_operator, make_rng, skew_hermitian

__all__ = [
    "initial_point",
    "run_simulation",
    "write_run",
    "run_sweep",
]

THREAD_ENV_VAR = "LPFLOW_THREADS"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def initial_point(config: RunConfig) -> ExtendedPoint:
    """Deterministic initial condition for the configured kind and seed."""
    rng = make_rng(config.seed)
    dims = config.dims
    kind = config.init_kind
    if kind == "random":
        mu = (
            skew_hermitian(rng, dims, config.init_scale)
            if config.real_form
            else block_operator(rng, dims, config.init_scale)
        )
        return ExtendedPoint(config.gamma, mu)
    if kind == "grassmann":
        if config.init_z is not None:
            z = np.asarray(config.init_z, dtype=complex)
            if z.shape != (dims.n_minus, dims.n_plus):
                raise ConfigError(
                    f"init.z must be {dims.n_minus}x{dims.n_plus}, got {z.shape}"
                )
        else:
            z = (
                rng.standard_normal((dims.n_minus, dims.n_plus))
                + 1j * rng.standard_normal((dims.n_minus, dims.n_plus))
            ) * config.init_scale
        basis = np.vstack([np.eye(dims.n_plus, dtype=complex), z])
        return grassmann_embed(config.gamma, basis)
    if kind == "vector":
        if dims.n_plus != 1:
            raise ConfigError("init.kind = vector requires dims.n_plus = 1")
        mu = block_operator(rng, dims, config.init_scale)
        if config.real_form:
            m = (mu.matrix - mu.matrix.conj().T) / 2
            mu = BlockOperator(dims, m)
        return ExtendedPoint(config.gamma, mu)
    if kind == "fourdim":
        if (dims.n_plus, dims.n_minus) != (2, 2):
            raise ConfigError("init.kind = fourdim requires dims (2, 2)")
        if not config.real_form:
            raise ConfigError("init.kind = fourdim requires real_form = true")
        s = config.init_scale
        diag = rng.standard_normal(4)
        # generic case needs distinct diagonal entries
        while abs(diag[0] - diag[1]) < 0.1 or abs(diag[2] - diag[3]) < 0.1:
            diag = rng.standard_normal(4)
        z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) * s
        state = FourDimState(
            config.gamma.imag, *[float(v) for v in diag],
            complex(z[0, 0]), complex(z[0, 1]), complex(z[1, 0]), complex(z[1, 1]),
        )
        return four_dim_state_to_point(state)
    if kind == "explicit":
        if config.init_mu is None:
            raise ConfigError("init.kind = explicit requires init.mu")
        return ExtendedPoint(config.gamma, BlockOperator(dims, config.init_mu))
    raise ConfigError(f"unknown init kind {kind!r}")


def _observable_columns(config: RunConfig):
    """Ordered (name, extractor) pairs for the CSV schema."""
    dims = config.dims
    np_ = dims.n_plus
    cols = []
    block_shapes = {
        "pp": (0, np_, 0, np_),
        "pm": (0, np_, np_, dims.total),
        "mp": (np_, dims.total, 0, np_),
        "mm": (np_, dims.total, np_, dims.total),
    }
    for name in config.observables:
        if name in block_shapes:
            r0, r1, c0, c1 = block_shapes[name]
            for r in range(r0, r1):
                for c in range(c0, c1):
                    cols.append(
                        (
                            f"mu_{name}[{r - r0},{c - c0}]",
                            lambda p, rr=r, cc=c: complex(p.mu.matrix[rr, cc]),
                        )
                    )
        elif name == "moduli":
            def moduli(p: ExtendedPoint):
                inv = four_dim_invariants(point_to_four_dim_state(p))
                return inv

            for field_name in ("p2", "q2", "r2", "s2", "delta"):
                cols.append(
                    (
                        field_name,
                        lambda p, f=field_name: complex(getattr(moduli(p), f)),
                    )
                )
        elif name == "hamiltonian":
            from .hierarchy import hamiltonian as ham

            cols.append(("h", lambda p: complex(ham(config.flow.hid, p))))
    return cols


def run_simulation(config: RunConfig) -> tuple[Trajectory, list[str], dict[str, Any]]:
    """Integrate per config; returns (trajectory, csv lines, report dict)."""
    p0 = initial_point(config)
    cols = _observable_columns(config)
    traj = integrate(config.flow, p0, observables=dict(cols))

    from .hierarchy import casimir

    header = ["t"]
    for name, _ in cols:
        header += [f"Re[{name}]", f"Im[{name}]"]
    for k in config.casimir_ks:
        header += [f"Re[I{k}]", f"Im[I{k}]"]
    lines = [",".join(header)]
    for i, (t, p) in enumerate(zip(traj.times, traj.points)):
        row = [_fmt(t)]
        for name, _ in cols:
            v = traj.observables[name][i]
            row += [_fmt(v.real), _fmt(v.imag)]
        for k in config.casimir_ks:
            v = casimir(k, p)
            row += [_fmt(v.real), _fmt(v.imag)]
        lines.append(",".join(row))

    report = monitor(traj, list(config.casimir_ks), hid=config.flow.hid)
    hid = config.flow.hid
    hid_desc = (
        {"family": "wbasis", "k": hid.k, "n": hid.n}
        if isinstance(hid, Wbasis)
        else {"family": "hbasis", "l": hid.l, "n": hid.n}
        if isinstance(hid, Hbasis)
        else {"family": "generating", "kappa": str(hid.kappa), "lambda": str(hid.lam)}
    )
    report_dict = {
        "environment": {
            "dims": [config.dims.n_plus, config.dims.n_minus],
            "seed": config.seed,
            "gamma": str(config.gamma),
            "real_form": config.real_form,
            "flow": hid_desc,
            "form": config.flow.form.value,
            "integrator": config.flow.integrator.value,
            "dt": config.flow.dt,
            "t_end": config.flow.t_end,
        },
        "aborted": traj.aborted,
        "partial": traj.aborted,
        "recorded_points": len(traj.points),
        "casimir_drift": {str(k): report.casimir_drift[k] for k in config.casimir_ks},
        "diag_drift": report.diag_drift,
        "spectrum_drift": report.spectrum_drift,
        "hamiltonian_drift": report.hamiltonian_drift,
    }
    return traj, lines, report_dict


def write_run(config: RunConfig, out_dir: str | Path) -> dict[str, Any]:
    """Execute and persist one run: trajectory.csv + report.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj, lines, report = run_simulation(config)
    (out / "trajectory.csv").write_text("\n".join(lines) + "\n")
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def run_sweep(base_cfgs: list[dict], out_dir: str | Path) -> dict[str, Any]:
    """Run every grid point (parallel per LPFLOW_THREADS), aggregate a summary."""
    from .config import build_run_config

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = max(1, int(os.environ.get(THREAD_ENV_VAR, "1")))

    def one(idx_cfg):
        idx, cfg = idx_cfg
        run_dir = out / f"run_{idx:03d}"
        entry: dict[str, Any] = {"index": idx, "overrides": cfg, "dir": run_dir.name}
        try:
            rc = build_run_config(cfg)
            report = write_run(rc, run_dir)
            entry["status"] = "aborted" if report.get("aborted") else "ok"
            entry["casimir_drift"] = report["casimir_drift"]
            entry["diag_drift"] = report["diag_drift"]
            entry["spectrum_drift"] = report["spectrum_drift"]
            entry["dt"] = rc.flow.dt
        except Exception as exc:  # per-run failure must not kill the sweep
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
        return entry

    indexed = list(enumerate(base_cfgs))
    if workers == 1:
        entries = [one(ic) for ic in indexed]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(one, indexed))

    summary: dict[str, Any] = {"runs": entries, "n_runs": len(entries)}
    # convergence-order estimate when dt was the swept axis
    ok = [e for e in entries if e.get("status") == "ok" and "dt" in e]
    dts = sorted({e["dt"] for e in ok})
    if len(dts) >= 2 and len(ok) == len(entries):
        drifts = []
        for dt in dts:
            worst = max(
                max(float(v) for v in e["casimir_drift"].values())
                for e in ok
                if e["dt"] == dt
            )
            drifts.append(worst)
        if all(d > 0 for d in drifts):
            slope = float(
                np.polyfit(np.log(np.asarray(dts)), np.log(np.asarray(drifts)), 1)[0]
            )
            summary["casimir_drift_order"] = slope
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
