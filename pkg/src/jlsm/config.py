"""Run configuration and the flat key=value config file format."""

import hashlib
from dataclasses import asdict, dataclass, field, fields

from .adaptive import AdaptationSchedule
from .model import Family, PriorConfig


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything needed to reproduce one MCMC run."""

    family: Family = Family.GAUSSIAN
    mode: str = "coss"  # "coss" or "fixed-k"
    iterations: int = 25000
    burn_in: int = 10000
    thinning: int = 5
    seed: int = 0
    k: int = None  # required for fixed-k; defaults to prior.k_init for coss
    imputation: bool = False
    adaptation: bool = True
    pg_blocks: int = 1
    prior: PriorConfig = None
    schedule: AdaptationSchedule = field(default_factory=AdaptationSchedule)

    def __post_init__(self):
        self.family = Family(self.family)
        if self.mode not in ("coss", "fixed-k"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "fixed-k" and self.k is None:
            raise ConfigError("fixed-k mode requires k")
        if self.prior is None:
            self.prior = PriorConfig(k_init=self.k) if self.k else PriorConfig()
        if self.k is None:
            self.k = self.prior.k_init
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError("need 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise ConfigError("thinning must be >= 1")
        if self.pg_blocks < 1:
            raise ConfigError("pg_blocks must be >= 1")

    def flat_items(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "prior":
                out.update({k: v for k, v in asdict(value).items()})
            elif f.name == "schedule":
                out["eta0"] = value.eta0
                out["eta1"] = value.eta1
                out["adapt_burn_in"] = value.burn_in
            elif f.name == "family":
                out["family"] = value.value
            else:
                out[f.name] = value
        return out

    def digest(self):
        text = "\n".join(f"{k}={v}" for k, v in sorted(self.flat_items().items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_PRIOR_KEYS = {f.name for f in fields(PriorConfig)}
_BOOL_KEYS = {"imputation", "adaptation"}
_INT_KEYS = {"iterations", "burn_in", "thinning", "seed", "k", "k_init", "pg_blocks", "adapt_burn_in"}
_STR_KEYS = {"family", "mode"}


def _coerce(key, raw):
    if key in _STR_KEYS:
        return raw
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"cannot parse boolean for {key}: {raw!r}")
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)


def config_from_items(items):
    """Build a RunConfig from a flat {key: value} mapping."""
    items = dict(items)
    prior_kwargs = {k: items.pop(k) for k in list(items) if k in _PRIOR_KEYS}
    sched_kwargs = {}
    for src, dst in (("eta0", "eta0"), ("eta1", "eta1"), ("adapt_burn_in", "burn_in")):
        if src in items:
            sched_kwargs[dst] = items.pop(src)
    run_fields = {f.name for f in fields(RunConfig)}
    unknown = set(items) - run_fields
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(items)
    if prior_kwargs:
        if "k_init" not in prior_kwargs and "k" in kwargs and kwargs["k"]:
            prior_kwargs["k_init"] = kwargs["k"]
        kwargs["prior"] = PriorConfig(**prior_kwargs)
    if sched_kwargs:
        kwargs["schedule"] = AdaptationSchedule(**sched_kwargs)
    return RunConfig(**kwargs)


def read_config(path):
    """Parse a flat key=value config file (one pair per line, # comments)."""
    items = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            try:
                items[key] = _coerce(key, raw)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return config_from_items(items)


def write_config(config, path):
    with open(path, "w") as fh:
        for key, value in sorted(config.flat_items().items()):
            fh.write(f"{key}={value}\n")
