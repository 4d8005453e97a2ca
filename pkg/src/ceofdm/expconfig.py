"""Experiment configuration: INI parsing, validation, overrides, manifest echo.

Config files are INI key-value text with the sections [waveform], [region],
[optimizer], [quantization], and [run]. Unknown sections or keys are
rejected. Every run writes back a fully resolved manifest that parses to the
identical configuration.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .optimizer import OptimizerConfig
from .waveform import WaveformConfig

__all__ = [
    "ConfigError",
    "WaveformSpec",
    "RegionSpec",
    "RunSpec",
    "ExperimentConfig",
]


class ConfigError(Exception):
    """Invalid or malformed experiment configuration."""


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _parse_bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _parse_mpsk(text: str, key: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    value = _parse_int(text, key)
    if value < 2:
        raise ConfigError(f"{key}: alphabet size must be >= 2 or inf, got {value}")
    return float(value)


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == math.inf:
            return "inf"
        if float(value).is_integer() and abs(value) < 1e15:
            return str(int(value))
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class WaveformSpec:
    L: int = 24
    tbp: float | None = 200.0
    h: float | None = None
    oversample: float = 5.0
    mpsk: float = 32.0
    samples: int | None = None


@dataclass(frozen=True)
class RegionSpec:
    mode: str = "full"
    lo: float | None = None  # None means the detected first null
    hi: float | None = None


@dataclass(frozen=True)
class RunSpec:
    seed: int = 1
    seed_count: int = 1
    out: str = "out"
    threads: int = 1
    write_af: bool = True
    write_spectrogram: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    waveform: WaveformSpec = field(default_factory=WaveformSpec)
    region: RegionSpec = field(default_factory=RegionSpec)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    alphabets: tuple[float, ...] = (64.0, 32.0, 16.0, 8.0)
    run: RunSpec = field(default_factory=RunSpec)

    @classmethod
    def from_sources(
        cls,
        path: str | Path | None = None,
        overrides: tuple[str, ...] | list[str] = (),
        seed: int | None = None,
        out: str | None = None,
        threads: int | None = None,
    ) -> "ExperimentConfig":
        """Build a config from an optional INI file plus override strings.

        ``overrides`` entries look like ``section.key=value`` and take
        precedence over the file; the keyword shortcuts win over both.
        """
        raw: dict[str, dict[str, str]] = {}
        if path is not None:
            parser = configparser.ConfigParser(interpolation=None)
            parser.optionxform = str  # keys are case-sensitive (waveform.L)
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    parser.read_file(fh)
            except OSError:
                raise
            except configparser.Error as exc:
                raise ConfigError(f"cannot parse {path}: {exc}") from None
            for section in parser.sections():
                raw[section] = dict(parser.items(section))
        for item in overrides:
            if "=" not in item or "." not in item.split("=", 1)[0]:
                raise ConfigError(
                    f"override must look like section.key=value, got {item!r}"
                )
            target, value = item.split("=", 1)
            section, key = target.split(".", 1)
            raw.setdefault(section.strip(), {})[key.strip()] = value.strip()
        if seed is not None:
            raw.setdefault("run", {})["seed"] = str(seed)
        if out is not None:
            raw.setdefault("run", {})["out"] = str(out)
        if threads is not None:
            raw.setdefault("run", {})["threads"] = str(threads)
        return cls.from_raw(raw)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_sources(path=path)

    @classmethod
    def from_raw(cls, raw: dict[str, dict[str, str]]) -> "ExperimentConfig":
        known = {"waveform", "region", "optimizer", "quantization", "run"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")

        wf = dict(raw.get("waveform", {}))
        spec_wf = _parse_waveform(wf)
        spec_region = _parse_region(dict(raw.get("region", {})))
        spec_opt = _parse_optimizer(dict(raw.get("optimizer", {})))
        alphabets = _parse_quantization(dict(raw.get("quantization", {})))
        spec_run = _parse_run(dict(raw.get("run", {})))
        return cls(
            waveform=spec_wf,
            region=spec_region,
            optimizer=spec_opt,
            alphabets=alphabets,
            run=spec_run,
        )

    def to_waveform_config(self) -> WaveformConfig:
        try:
            return WaveformConfig(
                L=self.waveform.L,
                h=self.waveform.h,
                tbp=self.waveform.tbp,
                oversample=self.waveform.oversample,
                samples=self.waveform.samples,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def region_descriptor(self, null_index: int, M: int):
        """Resolve the region block to a build_weights descriptor."""
        if self.region.mode == "full":
            return "full"
        lo = self.region.lo if self.region.lo is not None else null_index / M
        return [(lo, self.region.hi)]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, run=replace(self.run, seed=seed))

    def resolved_raw(self) -> dict[str, dict[str, str]]:
        """Fully resolved key-value image of this config (defaults filled in)."""
        cfg = self.to_waveform_config()
        wf = {
            "L": _format_value(cfg.L),
            "tbp": _format_value(cfg.tbp),
            "h": _format_value(cfg.h),
            "oversample": _format_value(cfg.oversample),
            "mpsk": _format_value(self.waveform.mpsk),
        }
        if self.waveform.samples is not None:
            wf["samples"] = _format_value(self.waveform.samples)
        region = {"mode": self.region.mode}
        if self.region.mode == "interval":
            region["lo"] = "null" if self.region.lo is None else _format_value(self.region.lo)
            region["hi"] = _format_value(self.region.hi)
        opt = self.optimizer
        optimizer = {
            "p": _format_value(opt.p),
            "beta": _format_value(opt.beta),
            "mu0": _format_value(opt.mu0),
            "rho_down": _format_value(opt.rho_down),
            "rho_up": _format_value(opt.rho_up),
            "c": _format_value(opt.c),
            "max_iters": _format_value(opt.max_iters),
            "g_min": _format_value(opt.g_min),
            "max_backtracks": _format_value(opt.max_backtracks),
            "mu_cap": _format_value(opt.mu_cap),
        }
        quant = {"alphabets": ", ".join(_format_value(a) for a in self.alphabets)}
        run = {
            "seed": _format_value(self.run.seed),
            "seed_count": _format_value(self.run.seed_count),
            "out": self.run.out,
            "threads": _format_value(self.run.threads),
            "write_af": _format_value(self.run.write_af),
            "write_spectrogram": _format_value(self.run.write_spectrogram),
        }
        return {
            "waveform": wf,
            "region": region,
            "optimizer": optimizer,
            "quantization": quant,
            "run": run,
        }

    def write_manifest(self, path: str | Path) -> None:
        sections = self.resolved_raw()
        lines = []
        for name in ("waveform", "region", "optimizer", "quantization", "run"):
            lines.append(f"[{name}]")
            for key, value in sections[name].items():
                lines.append(f"{key} = {value}")
            lines.append("")
        Path(path).write_text("\n".join(lines), encoding="utf-8")


def _take(block: dict[str, str], section: str, allowed: set[str]) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")


def _parse_waveform(block: dict[str, str]) -> WaveformSpec:
    _take(block, "waveform", {"L", "tbp", "h", "oversample", "mpsk", "samples"})
    has_bw = "tbp" in block or "h" in block
    spec = WaveformSpec(
        L=_parse_int(block["L"], "waveform.L") if "L" in block else 24,
        # the built-in tbp default applies only when neither tbp nor h is given
        tbp=_parse_float(block["tbp"], "waveform.tbp") if "tbp" in block else (None if has_bw else 200.0),
        h=_parse_float(block["h"], "waveform.h") if "h" in block else None,
        oversample=_parse_float(block["oversample"], "waveform.oversample") if "oversample" in block else 5.0,
        mpsk=_parse_mpsk(block["mpsk"], "waveform.mpsk") if "mpsk" in block else 32.0,
        samples=_parse_int(block["samples"], "waveform.samples") if "samples" in block else None,
    )
    if spec.tbp is None and spec.h is None:
        raise ConfigError("waveform: either tbp or h is required")
    return spec


def _parse_region(block: dict[str, str]) -> RegionSpec:
    _take(block, "region", {"mode", "lo", "hi"})
    mode = block.get("mode", "full").strip().lower()
    if mode not in ("full", "interval"):
        raise ConfigError(f"region.mode must be 'full' or 'interval', got {mode!r}")
    if mode == "full":
        if "lo" in block or "hi" in block:
            raise ConfigError("region: lo/hi are only valid with mode = interval")
        return RegionSpec(mode="full")
    lo_text = block.get("lo", "null").strip().lower()
    lo = None if lo_text == "null" else _parse_float(lo_text, "region.lo")
    if "hi" not in block:
        raise ConfigError("region: hi is required with mode = interval")
    hi = _parse_float(block["hi"], "region.hi")
    if lo is not None and not 0.0 <= lo <= 1.0:
        raise ConfigError(f"region.lo must be in [0, 1], got {lo}")
    if not 0.0 < hi <= 1.0:
        raise ConfigError(f"region.hi must be in (0, 1], got {hi}")
    if lo is not None and lo >= hi:
        raise ConfigError(f"region: lo ({lo}) must be below hi ({hi})")
    return RegionSpec(mode="interval", lo=lo, hi=hi)


def _parse_optimizer(block: dict[str, str]) -> OptimizerConfig:
    allowed = {
        "p", "beta", "mu0", "rho_down", "rho_up", "c",
        "max_iters", "g_min", "max_backtracks", "mu_cap",
    }
    _take(block, "optimizer", allowed)
    kwargs = {}
    for key in ("p", "max_iters", "max_backtracks"):
        if key in block:
            kwargs[key] = _parse_int(block[key], f"optimizer.{key}")
    for key in ("beta", "mu0", "rho_down", "rho_up", "c", "g_min", "mu_cap"):
        if key in block:
            kwargs[key] = _parse_float(block[key], f"optimizer.{key}")
    try:
        return OptimizerConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"optimizer: {exc}") from None


def _parse_quantization(block: dict[str, str]) -> tuple[float, ...]:
    _take(block, "quantization", {"alphabets"})
    if "alphabets" not in block:
        return (64.0, 32.0, 16.0, 8.0)
    tokens = [t.strip() for t in block["alphabets"].split(",") if t.strip()]
    if not tokens:
        raise ConfigError("quantization.alphabets must list at least one size")
    return tuple(_parse_mpsk(t, "quantization.alphabets") for t in tokens)


def _parse_run(block: dict[str, str]) -> RunSpec:
    allowed = {"seed", "seed_count", "out", "threads", "write_af", "write_spectrogram"}
    _take(block, "run", allowed)
    spec = RunSpec(
        seed=_parse_int(block["seed"], "run.seed") if "seed" in block else 1,
        seed_count=_parse_int(block["seed_count"], "run.seed_count") if "seed_count" in block else 1,
        out=block.get("out", "out"),
        threads=_parse_int(block["threads"], "run.threads") if "threads" in block else 1,
        write_af=_parse_bool(block["write_af"], "run.write_af") if "write_af" in block else True,
        write_spectrogram=_parse_bool(block["write_spectrogram"], "run.write_spectrogram") if "write_spectrogram" in block else True,
    )
    if spec.seed_count < 1:
        raise ConfigError("run.seed_count must be >= 1")
    if spec.threads < 1:
        raise ConfigError("run.threads must be >= 1")
    return spec
