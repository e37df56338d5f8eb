"""JSON run configuration: parsing, validation, and object builders.

Validation failures raise ConfigError with dotted field paths so the CLI
can point at the offending entry. A parsed config serializes back to a
canonical dictionary; parse(serialize(parse(x))) == parse(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .levy import (
    AtomLevyMeasure,
    DensityTableLevyMeasure,
    GammaLevyMeasure,
)
from .spectrum import SpectralDistribution, frequency_from_config
from .synthesis import (
    deterministic_increments,
    gamma_increments,
    generate_discrete,
)
from .ergodics import make_expansion

_METHODS = ("inverse_levy", "gamma_shotnoise", "conditioned", "discrete", "gaussian_limit")
_VARIANTS = ("inverse", "shotnoise")
_INCREMENTS = ("gamma", "deterministic")


class ConfigError(ValueError):
    """A config entry failed validation; the message carries its path."""


def _need(mapping, path, key, types, default=None, required=False):
    if key not in mapping:
        if required:
            raise ConfigError(f"{path}.{key}: missing required entry")
        return default
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        names = types if isinstance(types, tuple) else (types,)
        wanted = "/".join(t.__name__ for t in names)
        raise ConfigError(f"{path}.{key}: expected {wanted}, got {type(value).__name__}")
    return value


def _positive(value, path):
    if not float(value) > 0.0:
        raise ConfigError(f"{path}: must be positive")
    return float(value)


@dataclass(frozen=True)
class ModelConfig:
    measure: dict
    freq: dict
    sigma0: float

    def to_dict(self):
        return {"measure": dict(self.measure), "freq": dict(self.freq), "sigma0": self.sigma0}


@dataclass(frozen=True)
class GenerationConfig:
    method: str
    seed: int
    level: float | None = None
    n_terms: int | None = None
    variant: str = "inverse"
    limit_scale: float | None = None
    increments: str = "gamma"
    keep: float = 0.999
    label: str = ""

    def to_dict(self):
        doc = {
            "method": self.method,
            "seed": self.seed,
            "variant": self.variant,
            "increments": self.increments,
            "keep": self.keep,
            "label": self.label,
        }
        if self.level is not None:
            doc["level"] = self.level
        if self.n_terms is not None:
            doc["n_terms"] = self.n_terms
        if self.limit_scale is not None:
            doc["limit_scale"] = self.limit_scale
        return doc


@dataclass(frozen=True)
class GridConfig:
    t0: float = 0.0
    dt: float = 0.05
    n: int = 2000

    def to_dict(self):
        return {"t0": self.t0, "dt": self.dt, "n": self.n}


@dataclass(frozen=True)
class AnalysisConfig:
    taus: tuple = (0.0, 1.0, 2.0)
    n_real: int = 200
    u_grid: tuple = (-5.0, 5.0, 101)
    x_grid: tuple = (-6.0, 6.0, 121)
    bins: int = 40
    pool: int = 50

    def to_dict(self):
        return {
            "taus": list(self.taus),
            "n_real": self.n_real,
            "u_grid": list(self.u_grid),
            "x_grid": list(self.x_grid),
            "bins": self.bins,
            "pool": self.pool,
        }


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    generation: GenerationConfig
    grid: GridConfig = field(default_factory=GridConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config: expected a JSON object")
        model_doc = _need(doc, "config", "model", dict, required=True)
        measure = _need(model_doc, "model", "measure", dict, required=True)
        freq = _need(model_doc, "model", "freq", dict, required=True)
        sigma0 = _positive(
            _need(model_doc, "model", "sigma0", (int, float), required=True), "model.sigma0"
        )
        model = ModelConfig(measure=dict(measure), freq=dict(freq), sigma0=sigma0)

        gen_doc = _need(doc, "config", "generation", dict, required=True)
        method = _need(gen_doc, "generation", "method", str, required=True)
        if method not in _METHODS:
            raise ConfigError(
                f"generation.method: {method!r} is not one of {', '.join(_METHODS)}"
            )
        seed = _need(gen_doc, "generation", "seed", int, default=0)
        level = _need(gen_doc, "generation", "level", (int, float))
        if level is not None:
            level = _positive(level, "generation.level")
        n_terms = _need(gen_doc, "generation", "n_terms", int)
        if n_terms is not None and n_terms < 1:
            raise ConfigError("generation.n_terms: must be >= 1")
        variant = _need(gen_doc, "generation", "variant", str, default="inverse")
        if variant not in _VARIANTS:
            raise ConfigError(f"generation.variant: {variant!r} is not one of {_VARIANTS}")
        limit_scale = _need(gen_doc, "generation", "limit_scale", (int, float))
        if limit_scale is not None:
            limit_scale = _positive(limit_scale, "generation.limit_scale")
        increments = _need(gen_doc, "generation", "increments", str, default="gamma")
        if increments not in _INCREMENTS:
            raise ConfigError(
                f"generation.increments: {increments!r} is not one of {_INCREMENTS}"
            )
        keep = _need(gen_doc, "generation", "keep", (int, float), default=0.999)
        if not 0.0 < float(keep) < 1.0:
            raise ConfigError("generation.keep: must be in (0, 1)")
        label = _need(gen_doc, "generation", "label", str, default="")
        if method == "conditioned":
            if n_terms is None:
                raise ConfigError("generation.n_terms: required for the conditioned method")
            if level is None:
                raise ConfigError("generation.level: required for the conditioned method")
        if method == "gaussian_limit" and limit_scale is None:
            raise ConfigError("generation.limit_scale: required for the gaussian_limit method")
        generation = GenerationConfig(
            method=method, seed=int(seed), level=level, n_terms=n_terms,
            variant=variant, limit_scale=limit_scale, increments=increments,
            keep=float(keep), label=label,
        )

        grid_doc = _need(doc, "config", "grid", dict, default={})
        grid = GridConfig(
            t0=float(_need(grid_doc, "grid", "t0", (int, float), default=0.0)),
            dt=_positive(_need(grid_doc, "grid", "dt", (int, float), default=0.05), "grid.dt"),
            n=int(_need(grid_doc, "grid", "n", int, default=2000)),
        )
        if grid.n < 1:
            raise ConfigError("grid.n: must be >= 1")

        ana_doc = _need(doc, "config", "analysis", dict, default={})
        taus = _need(ana_doc, "analysis", "taus", list, default=[0.0, 1.0, 2.0])
        for i, t in enumerate(taus):
            if not isinstance(t, (int, float)) or t < 0.0:
                raise ConfigError(f"analysis.taus[{i}]: must be a nonnegative number")
        n_real = int(_need(ana_doc, "analysis", "n_real", int, default=200))
        if n_real < 1:
            raise ConfigError("analysis.n_real: must be >= 1")

        def _grid3(key, default):
            spec3 = _need(ana_doc, "analysis", key, list, default=list(default))
            if len(spec3) != 3:
                raise ConfigError(f"analysis.{key}: expected [min, max, count]")
            lo, hi, count = float(spec3[0]), float(spec3[1]), int(spec3[2])
            if not hi > lo or count < 2:
                raise ConfigError(f"analysis.{key}: needs max > min and count >= 2")
            return (lo, hi, count)

        analysis = AnalysisConfig(
            taus=tuple(float(t) for t in taus),
            n_real=n_real,
            u_grid=_grid3("u_grid", (-5.0, 5.0, 101)),
            x_grid=_grid3("x_grid", (-6.0, 6.0, 121)),
            bins=int(_need(ana_doc, "analysis", "bins", int, default=40)),
            pool=int(_need(ana_doc, "analysis", "pool", int, default=50)),
        )
        if analysis.bins < 2:
            raise ConfigError("analysis.bins: must be >= 2")
        if analysis.pool < 1:
            raise ConfigError("analysis.pool: must be >= 1")

        cfg = cls(model=model, generation=generation, grid=grid, analysis=analysis)
        cfg.build_measure()  # surface measure/freq problems at parse time
        cfg.build_spectrum()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        return {
            "model": self.model.to_dict(),
            "generation": self.generation.to_dict(),
            "grid": self.grid.to_dict(),
            "analysis": self.analysis.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    # -- object builders -----------------------------------------------------
    def build_measure(self):
        doc = self.model.measure
        kind = _need(doc, "model.measure", "kind", str, required=True)
        try:
            if kind == "gamma":
                return GammaLevyMeasure(
                    _need(doc, "model.measure", "nu", (int, float), required=True),
                    literal_tail=bool(doc.get("literal_tail", False)),
                )
            if kind == "atoms":
                return AtomLevyMeasure(_need(doc, "model.measure", "points", list, required=True))
            if kind == "table":
                pts = _need(doc, "model.measure", "density", list, required=True)
                xs = [p[0] for p in pts]
                ds = [p[1] for p in pts]
                return DensityTableLevyMeasure(xs, ds)
        except ConfigError:
            raise
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"model.measure: {exc}") from exc
        raise ConfigError(f"model.measure.kind: unknown kind {kind!r}")

    def build_spectrum(self):
        try:
            freq = frequency_from_config(self.model.freq)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"model.freq: {exc}") from exc
        return SpectralDistribution(sigma0=self.model.sigma0, frequencies=freq)

    def build_expansion(self, stream):
        """Realize one expansion according to the generation block."""
        measure = self.build_measure()
        spectrum = self.build_spectrum()
        gen = self.generation
        if gen.method == "discrete":
            if not spectrum.frequencies.is_discrete:
                raise ConfigError("generation.method: discrete needs an atomic freq law")
            if gen.increments == "gamma":
                if not isinstance(measure, GammaLevyMeasure):
                    raise ConfigError(
                        "generation.increments: gamma increments need a gamma measure"
                    )
                sampler = gamma_increments(measure.nu)
            else:
                sampler = deterministic_increments()
            return generate_discrete(spectrum, sampler, stream)
        return make_expansion(
            gen.method, measure, spectrum, stream,
            level=gen.level, n_terms=gen.n_terms, variant=gen.variant,
            limit_scale=gen.limit_scale,
        )
