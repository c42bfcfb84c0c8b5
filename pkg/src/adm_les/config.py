"""Strict JSON configuration for simulations and sweeps."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

MODELS = ("adm", "filtered-nse", "plain-nse", "linear-stokes")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


@dataclass(frozen=True)
class InitSpec:
    kind: str = "taylor-green"  # taylor-green | snapshot | random
    path: str | None = None
    seed: int = 0
    band: tuple[float, float] | None = None


@dataclass(frozen=True)
class ForcingConfig:
    kind: str = "zero"  # zero | steady | modulated
    path: str | None = None
    scale: float = 1.0
    schedule: tuple = ()


@dataclass(frozen=True)
class SolverConfig:
    m: int
    nu: float
    alpha: float
    model: str
    dt: float
    t_end: float
    init: InitSpec = field(default_factory=InitSpec)
    L: float = 2 * math.pi
    N: int = 0
    sample_every: int = 10
    cfl: float = 0.5
    output_dir: str = "out"
    forcing: ForcingConfig = field(default_factory=ForcingConfig)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_(self, **changes) -> "SolverConfig":
        """Copy with fields replaced, re-validated."""
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return validate(SolverConfig(**d))


_TOP_REQUIRED = ("m", "nu", "alpha", "model", "dt", "t_end", "init")
_TOP_OPTIONAL = ("L", "N", "sample_every", "cfl", "output_dir", "forcing")


def _number(v, path, *, positive=False, nonneg=False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if positive and not v > 0:
        raise ConfigError(path, f"{path.rsplit('.', 1)[-1]} must be positive")
    if nonneg and v < 0:
        raise ConfigError(path, f"{path.rsplit('.', 1)[-1]} must be nonnegative")
    return v


def _integer(v, path, *, minimum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise ConfigError(path, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {v}")
    return v


def _string(v, path) -> str:
    if not isinstance(v, str):
        raise ConfigError(path, f"expected a string, got {type(v).__name__}")
    return v


def _check_keys(obj, path, required, optional):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected an object, got {type(obj).__name__}")
    for k in obj:
        if k not in required and k not in optional:
            raise ConfigError(f"{path}.{k}" if path else k, "unknown key")
    for k in required:
        if k not in obj:
            raise ConfigError(f"{path}.{k}" if path else k, "missing required key")


def _resolve(p: str, base_dir) -> str:
    if base_dir is None or os.path.isabs(p):
        return p
    return os.path.join(base_dir, p)


def _parse_init(v, base_dir) -> InitSpec:
    if isinstance(v, str):
        if v != "taylor-green":
            raise ConfigError("init", f"unknown init {v!r}; use 'taylor-green' or an object")
        return InitSpec()
    if not isinstance(v, dict) or "kind" not in v:
        raise ConfigError("init", "expected 'taylor-green' or an object with 'kind'")
    kind = _string(v["kind"], "init.kind")
    if kind == "taylor-green":
        _check_keys(v, "init", ("kind",), ())
        return InitSpec()
    if kind == "snapshot":
        _check_keys(v, "init", ("kind", "path"), ())
        return InitSpec("snapshot", path=_resolve(_string(v["path"], "init.path"), base_dir))
    if kind == "random":
        _check_keys(v, "init", ("kind",), ("seed", "band"))
        seed = _integer(v.get("seed", 0), "init.seed", minimum=0)
        band = v.get("band")
        if band is not None:
            if not isinstance(band, list) or len(band) != 2:
                raise ConfigError("init.band", "expected [k_low, k_high]")
            lo = _number(band[0], "init.band[0]", nonneg=True)
            hi = _number(band[1], "init.band[1]", positive=True)
            if hi < lo:
                raise ConfigError("init.band", "k_high must be >= k_low")
            band = (lo, hi)
        return InitSpec("random", seed=seed, band=band)
    raise ConfigError("init.kind", f"unknown init kind {kind!r}")


def _parse_forcing(v, base_dir) -> ForcingConfig:
    if not isinstance(v, dict) or "kind" not in v:
        raise ConfigError("forcing", "expected an object with 'kind'")
    kind = _string(v["kind"], "forcing.kind")
    if kind == "zero":
        _check_keys(v, "forcing", ("kind",), ())
        return ForcingConfig()
    if kind == "steady":
        _check_keys(v, "forcing", ("kind", "path"), ("scale",))
        schedule = ()
    elif kind == "modulated":
        _check_keys(v, "forcing", ("kind", "path", "schedule"), ("scale",))
        sched = v["schedule"]
        if not isinstance(sched, list) or not sched:
            raise ConfigError("forcing.schedule", "expected a nonempty list of [t, amplitude] pairs")
        pairs = []
        for i, p in enumerate(sched):
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigError(f"forcing.schedule[{i}]", "expected [t, amplitude]")
            pairs.append((_number(p[0], f"forcing.schedule[{i}][0]"), _number(p[1], f"forcing.schedule[{i}][1]")))
        ts = [p[0] for p in pairs]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("forcing.schedule", "times must be strictly increasing")
        schedule = tuple(pairs)
    else:
        raise ConfigError("forcing.kind", f"unknown forcing kind {kind!r}")
    path = _resolve(_string(v["path"], "forcing.path"), base_dir)
    scale = _number(v.get("scale", 1.0), "forcing.scale")
    return ForcingConfig(kind, path, scale, schedule)


def validate(cfg: SolverConfig) -> SolverConfig:
    """Cross-field invariants; returns ``cfg`` unchanged when valid."""
    if cfg.m < 2 or (2 * cfg.m) // 3 < 1:
        raise ConfigError("m", f"m={cfg.m} leaves no modes after 2/3 dealiasing (need m >= 2)")
    for name in ("nu", "alpha", "dt", "t_end", "L", "cfl"):
        if not getattr(cfg, name) > 0:
            raise ConfigError(name, f"{name} must be positive")
    if cfg.model not in MODELS:
        raise ConfigError("model", f"unknown model {cfg.model!r}; expected one of {', '.join(MODELS)}")
    if cfg.N < 0:
        raise ConfigError("N", "N must be nonnegative")
    if cfg.sample_every < 1:
        raise ConfigError("sample_every", "must be >= 1")
    steps = cfg.t_end / cfg.dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) < 1:
        raise ConfigError("t_end", f"t_end/dt = {steps!r} is not a positive integer")
    return cfg


def config_from_dict(d: dict, base_dir: str | None = None) -> SolverConfig:
    _check_keys(d, "", _TOP_REQUIRED, _TOP_OPTIONAL)
    model = _string(d["model"], "model")
    if model not in MODELS:
        raise ConfigError("model", f"unknown model {model!r}; expected one of {', '.join(MODELS)}")
    kw = dict(
        m=_integer(d["m"], "m"),
        nu=_number(d["nu"], "nu", positive=True),
        alpha=_number(d["alpha"], "alpha", positive=True),
        model=model,
        dt=_number(d["dt"], "dt", positive=True),
        t_end=_number(d["t_end"], "t_end", positive=True),
        init=_parse_init(d["init"], base_dir),
    )
    if "L" in d:
        kw["L"] = _number(d["L"], "L", positive=True)
    if "N" in d:
        kw["N"] = _integer(d["N"], "N", minimum=0)
    if "sample_every" in d:
        kw["sample_every"] = _integer(d["sample_every"], "sample_every", minimum=1)
    if "cfl" in d:
        kw["cfl"] = _number(d["cfl"], "cfl", positive=True)
    if "output_dir" in d:
        kw["output_dir"] = _resolve(_string(d["output_dir"], "output_dir"), base_dir)
    if "forcing" in d:
        kw["forcing"] = _parse_forcing(d["forcing"], base_dir)
    return validate(SolverConfig(**kw))


def parse_config(text: str, base_dir: str | None = None) -> SolverConfig:
    """Parse and validate JSON text. Relative paths resolve against ``base_dir``."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("", f"invalid JSON: {e}") from None
    return config_from_dict(d, base_dir)


def load_config(path: str) -> SolverConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)))


def check_output_dir(path: str) -> None:
    """Create ``path`` if needed and fail early when it is not writable."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ConfigError("output_dir", f"cannot create {path!r}: {e}") from None
    if not os.access(path, os.W_OK):
        raise ConfigError("output_dir", f"{path!r} is not writable")
