"""Run configuration: defaults, a key=value file, then command-line overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(Fraction(x.strip())) for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class Config:
    n_max_symbolic: int = 10        # Hankel vs recurrence, symbolic r
    n_max_numeric: int = 14         # Hankel vs recurrence, numeric r
    poly_n_max: int = 12            # polynomiality and degree law
    toda_n_max: int = 8
    pv_n_max: int = 6
    pv_symbolic_n_max: int = 4
    series_N: int = 20
    integrator_tol: float = 1e-10
    residual_tol: float = 1e-8
    lambda_samples: tuple[float, ...] = (0.5, 1.0, 1.5, 2.5)
    r_samples: tuple[float, ...] = (1 / 3, -0.5, 2.0)
    pv_r_samples: tuple[str, ...] = ("0", "1/3", "1/2", "-2/5", "7/4")
    numeric_r: str = "1/3"
    kummer_lambdas: tuple[float, ...] = (0.7, 1.0, 2.3)
    heun_lambdas: tuple[float, ...] = (0.5, 1.0)
    heun_r: tuple[float, ...] = (0.5, 1.0, -1.0)
    output_dir: str = "umemura-out"
    cache_path: str = ""
    strict_heun: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("integrator_tol", "residual_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("n_max_symbolic", "n_max_numeric", "poly_n_max", "toda_n_max", "pv_n_max", "series_N"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")

    def capped(self, max_n: int | None) -> "Config":
        """Apply a global --max-n cap to every n range (never below 2)."""
        if max_n is None:
            return self
        m = max(2, max_n)
        return replace(
            self,
            n_max_symbolic=min(self.n_max_symbolic, m),
            n_max_numeric=min(self.n_max_numeric, m),
            poly_n_max=min(self.poly_n_max, m),
            toda_n_max=min(self.toda_n_max, m),
            pv_n_max=min(self.pv_n_max, m),
            pv_symbolic_n_max=min(self.pv_symbolic_n_max, m),
        )

    def resolved_cache_path(self) -> str:
        return os.environ.get("UMEMURA_CACHE") or self.cache_path


_CONVERTERS = {
    "int": int,
    "float": lambda s: float(Fraction(s)),
    "str": str,
    "bool": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "tuple[float, ...]": _floats,
    "tuple[str, ...]": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
}


def _convert(name: str, ftype, text: str):
    conv = _CONVERTERS.get(ftype)
    if conv is None:
        raise ValueError(f"unsupported config key {name!r}")
    return conv(text)


def parse_config_text(text: str, base: Config | None = None) -> Config:
    base = base or Config()
    known = {f.name: f.type for f in fields(Config) if f.name != "extra"}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value")
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            updates[key] = _convert(key, known[key], value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return replace(base, **updates)


def load_config(path: str | None, **overrides) -> Config:
    cfg = Config()
    if path:
        with open(path, encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read(), cfg)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides) if overrides else cfg
