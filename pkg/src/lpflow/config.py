"""Flat key = value run configuration with dotted sections.

Grammar: one ``key = value`` per line, ``#`` comments, blank lines ignored.
Complex scalars are written ``re+imi`` (e.g. ``1.5-0.25i``, ``2i``);
matrices as rows separated by ``;`` with comma-separated entries; grid
values for sweeps as brace lists ``{1e-2, 1e-3}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any

from .blocks import Dims
from .errors import ConfigError
from .hierarchy import Generating, HamiltonianId, Hbasis, RHSForm, Wbasis
from .integrate import FlowSpec, Integrator

__all__ = [
    "parse_scalar",
    "parse_complex",
    "parse_matrix",
    "parse_config_text",
    "RunConfig",
    "build_run_config",
    "expand_grid",
]

_FORMS = {
    "w": RHSForm.W_FORM,
    "mu": RHSForm.MU_FORM,
    "pplus": RHSForm.PPLUS_FORM,
    "h": RHSForm.H_FORM,
    "real": RHSForm.REAL_FORM,
    "gen_y": RHSForm.GEN_Y_FORM,
}
_INTEGRATORS = {"rk4": Integrator.RK4, "lie_euler_conj": Integrator.LIE_EULER_CONJ}
_INIT_KINDS = ("random", "grassmann", "vector", "fourdim", "explicit")


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` notation (also plain reals and pure ``bi``)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ConfigError("empty complex literal")
    try:
        if s.endswith(("i", "I")):
            return complex(s[:-1] + "j")
        return complex(float(s))
    except ValueError as exc:
        raise ConfigError(f"bad complex literal {text!r}") from exc


def parse_scalar(text: str) -> Any:
    """Best-effort typed scalar: bool, int, float, complex, else string."""
    s = text.strip()
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    if s and (s[-1] in "iI" or ("+" in s[1:] or "-" in s[1:])):
        try:
            return parse_complex(s)
        except ConfigError:
            pass
    return s


def parse_matrix(text: str):
    """Rows split on ';', entries on ','; every entry a complex literal."""
    import numpy as np

    rows = [r for r in text.strip().split(";") if r.strip()]
    data = [[parse_complex(e) for e in row.split(",")] for row in rows]
    width = {len(r) for r in data}
    if len(width) != 1:
        raise ConfigError("ragged matrix literal")
    return np.array(data, dtype=complex)


def parse_config_text(text: str) -> dict[str, Any]:
    """Flat dict of dotted keys; brace lists become Python lists of scalars."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if value.startswith("{") and value.endswith("}"):
            items = [v.strip() for v in value[1:-1].split(",") if v.strip()]
            out[key] = [parse_scalar(v) for v in items]
        else:
            out[key] = value  # typed lazily by the consumer
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated simulation input: dims, seed, gamma, initial data, flow."""

    dims: Dims
    seed: int
    gamma: complex
    real_form: bool
    init_kind: str
    init_scale: float
    init_z: Any
    init_mu: Any
    flow: FlowSpec
    casimir_ks: tuple[int, ...]
    observables: tuple[str, ...]
    output: str = "run"


def _get(cfg: dict[str, Any], key: str, default=None, required: bool = False) -> Any:
    if key in cfg:
        return cfg[key]
    if required:
        raise ConfigError(f"missing required key {key!r}")
    return default


def _as_int(cfg, key, default=None, required=False) -> int:
    v = _get(cfg, key, default, required)
    try:
        return int(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be an integer, got {v!r}") from exc


def _as_float(cfg, key, default=None, required=False) -> float:
    v = _get(cfg, key, default, required)
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number, got {v!r}") from exc


def _hamiltonian_id(cfg: dict[str, Any]) -> HamiltonianId:
    family = str(_get(cfg, "flow.family", required=True)).strip().lower()
    if family == "wbasis":
        return Wbasis(_as_int(cfg, "flow.k", required=True), _as_int(cfg, "flow.n", required=True))
    if family == "hbasis":
        return Hbasis(_as_int(cfg, "flow.l", required=True), _as_int(cfg, "flow.n", required=True))
    if family == "generating":
        kappa = parse_complex(str(_get(cfg, "flow.kappa", required=True)))
        lam = parse_complex(str(_get(cfg, "flow.lambda", required=True)))
        return Generating(kappa, lam)
    raise ConfigError(f"unknown flow.family {family!r}")


def build_run_config(cfg: dict[str, Any]) -> RunConfig:
    dims = Dims(_as_int(cfg, "dims.n_plus", required=True), _as_int(cfg, "dims.n_minus", required=True))
    seed = _as_int(cfg, "seed", 0)
    if seed < 0:
        raise ConfigError("seed must be unsigned")
    gamma = parse_complex(str(_get(cfg, "gamma", "1")))
    real_form = str(_get(cfg, "real_form", "false")).strip().lower() == "true"
    if real_form and abs(gamma.real) > 1e-12:
        raise ConfigError("real_form requires purely imaginary gamma")

    init_kind = str(_get(cfg, "init.kind", "random")).strip().lower()
    if init_kind not in _INIT_KINDS:
        raise ConfigError(f"init.kind must be one of {_INIT_KINDS}, got {init_kind!r}")
    init_scale = _as_float(cfg, "init.scale", 0.5)
    init_z = cfg.get("init.z")
    if init_z is not None:
        init_z = parse_matrix(str(init_z))
    init_mu = cfg.get("init.mu")
    if init_mu is not None:
        init_mu = parse_matrix(str(init_mu))

    form_name = str(_get(cfg, "flow.form", required=True)).strip().lower()
    if form_name not in _FORMS:
        raise ConfigError(f"flow.form must be one of {sorted(_FORMS)}, got {form_name!r}")
    integ_name = str(_get(cfg, "flow.integrator", "rk4")).strip().lower()
    if integ_name not in _INTEGRATORS:
        raise ConfigError(f"flow.integrator must be one of {sorted(_INTEGRATORS)}")
    try:
        flow = FlowSpec(
            hid=_hamiltonian_id(cfg),
            form=_FORMS[form_name],
            dt=_as_float(cfg, "flow.dt", required=True),
            t_end=_as_float(cfg, "flow.t_end", required=True),
            integrator=_INTEGRATORS[integ_name],
            real_form=real_form,
            record_every=_as_int(cfg, "flow.record_every", 1),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid flow spec: {exc}") from exc

    ks_raw = _get(cfg, "casimir_ks", "1, 2, 3")
    if isinstance(ks_raw, list):
        ks = tuple(int(k) for k in ks_raw)
    else:
        ks = tuple(int(k) for k in str(ks_raw).split(",") if k.strip())
    obs_raw = str(_get(cfg, "observables", "pm, mp"))
    observables = tuple(o.strip().lower() for o in obs_raw.split(",") if o.strip())
    for o in observables:
        if o not in ("pp", "pm", "mp", "mm", "moduli", "hamiltonian"):
            raise ConfigError(f"unknown observable {o!r}")

    return RunConfig(
        dims=dims,
        seed=seed,
        gamma=gamma,
        real_form=real_form,
        init_kind=init_kind,
        init_scale=init_scale,
        init_z=init_z,
        init_mu=init_mu,
        flow=flow,
        casimir_ks=ks,
        observables=observables,
        output=str(_get(cfg, "output", "run")),
    )


def expand_grid(cfg: dict[str, Any]) -> list[dict[str, Any]]:
    """All combinations of brace-list values; scalars pass through."""
    grid_keys = [k for k, v in cfg.items() if isinstance(v, list)]
    if not grid_keys:
        return [dict(cfg)]
    combos = []
    value_lists = [cfg[k] for k in grid_keys]
    for values in product(*value_lists):
        combo = {k: v for k, v in cfg.items() if k not in grid_keys}
        combo.update({k: str(v) for k, v in zip(grid_keys, values)})
        combos.append(combo)
    return combos
