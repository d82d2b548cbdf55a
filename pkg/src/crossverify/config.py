"""Experiment configuration: flat ``key = value`` text plus command-line overrides.

A config file is a list of ``key = value`` lines (``#`` comments allowed, an
optional ``[experiment]`` section header is ignored).  Overrides are applied
on top and win.  Every violation is reported with the offending key.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass

from .noise import NoiseModel, UnphysicalParameters
from .protocols.report import PROTOCOLS

EXPERIMENTS = ("ghz-fidelity", "phase-sweep", "scaling", "budget", "unitary-fidelity")

# reproduction targets as discoverable aliases
ALIASES = {
    "fig4ab": "phase-sweep",
    "fig4cd": "phase-sweep",
    "fig4ef": "scaling",
    "tableA2": "budget",
    "figA3": "unitary-fidelity",
}
ALIAS_PROTOCOLS = {"fig4ab": ("qst",), "fig4cd": ("bbm",)}

DEFAULT_QUBITS = {
    "ghz-fidelity": (3,),
    "phase-sweep": (1, 2, 3),
    "scaling": (1, 2, 3),
    "budget": (1, 2, 3),
    "unitary-fidelity": (1, 2),
}

_NOISE = NoiseModel()

DEFAULTS = {
    "experiment": None,
    "n": None,
    "protocol": None,
    "shots": 10_000,
    "phases": 15,
    "seed": 0,
    "out": "out",
    "noiseless": False,
    "save_datasets": False,
    "p_1q": _NOISE.p_1q,
    "p_2q": _NOISE.p_2q,
    "eps_ro": _NOISE.eps_ro,
    "t1": _NOISE.t1,
    "t2": _NOISE.t2,
    "p_th": _NOISE.p_th,
    "t_1q": _NOISE.t_1q,
    "t_2q": _NOISE.t_2q,
    "rate_conversion": _NOISE.rate_conversion,
    "noise_scale": 1.0,
    "repetitions": None,
    "resamples": 100,
    "target": 1e-3,
}


class ConfigError(ValueError):
    """One or more invalid config entries; ``errors`` holds ``(key, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{k}: {m}" for k, m in self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: tuple
    protocol: tuple
    shots: int
    phases: int
    seed: int
    out: str
    noiseless: bool
    save_datasets: bool
    p_1q: float
    p_2q: float
    eps_ro: float
    t1: float
    t2: float
    p_th: float
    t_1q: float
    t_2q: float
    rate_conversion: str
    noise_scale: float
    repetitions: int | None
    resamples: int
    target: float
    alias: str | None = None

    def noise_model(self) -> NoiseModel:
        if self.noiseless:
            return NoiseModel.noiseless()
        nm = NoiseModel(
            p_1q=self.p_1q,
            p_2q=self.p_2q,
            eps_ro=self.eps_ro,
            t1=self.t1,
            t2=self.t2,
            p_th=self.p_th,
            t_1q=self.t_1q,
            t_2q=self.t_2q,
            rate_conversion=self.rate_conversion,
        )
        return nm if self.noise_scale == 1.0 else nm.scaled(self.noise_scale)

    def resolved(self) -> dict:
        """JSON-ready view of every field, embedded in output headers.

        The output directory is left out so that identical experiments
        written to different places produce identical files.
        """
        out = asdict(self)
        del out["out"]
        for key in ("n", "protocol"):
            out[key] = list(out[key])
        for key in ("t1", "t2"):
            if math.isinf(out[key]):
                out[key] = "inf"
        return out


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _parse_optional_int(text: str):
    return None if text.strip().lower() in ("", "auto", "none") else _parse_int(text)


def _parse_list(item):
    def parse(text: str) -> tuple:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty list")
        return tuple(item(p) for p in parts)

    return parse


_PARSERS = {
    "experiment": str.strip,
    "n": _parse_list(_parse_int),
    "protocol": _parse_list(lambda s: s.lower()),
    "shots": _parse_int,
    "phases": _parse_int,
    "seed": _parse_int,
    "out": str.strip,
    "noiseless": _parse_bool,
    "save_datasets": _parse_bool,
    "p_1q": float,
    "p_2q": float,
    "eps_ro": float,
    "t1": float,
    "t2": float,
    "p_th": float,
    "t_1q": float,
    "t_2q": float,
    "rate_conversion": str.strip,
    "noise_scale": float,
    "repetitions": _parse_optional_int,
    "resamples": _parse_int,
    "target": float,
}


def parse_text(raw: str) -> dict[str, str]:
    """Raw ``key -> value`` strings from config text."""
    text = raw if raw.lstrip().startswith("[") else "[experiment]\n" + raw
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([("<file>", str(exc).splitlines()[0])]) from exc
    values = {}
    for section in parser.sections():
        values.update(parser[section])
    return values


def parse_overrides(items) -> dict[str, str]:
    """``["key=value", ...]`` from ``--set`` into a dict."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([(item, "override must look like key=value")])
        out[key.strip()] = value.strip()
    return out


def _check_range(errors, values, key, lo, hi):
    v = values[key]
    if not lo <= v <= hi:
        errors.append((key, f"{v} outside [{lo}, {hi}]"))


def validate_config(raw: str = "", overrides: dict | None = None) -> ExperimentConfig:
    """Parse, merge overrides, fill defaults and validate.

    ``overrides`` maps keys to strings (as from the command line) or already
    typed values.
    """
    merged = {**parse_text(raw), **(overrides or {})}
    errors = []
    values = dict(DEFAULTS)
    for key, text in merged.items():
        key_name = key.replace("-", "_")
        if key_name not in _PARSERS:
            errors.append((key, "unknown key"))
            continue
        if text is None:
            continue
        try:
            values[key_name] = _PARSERS[key_name](text) if isinstance(text, str) else text
        except (TypeError, ValueError) as exc:
            errors.append((key_name, str(exc)))
    if errors:
        raise ConfigError(errors)

    alias = None
    experiment = values["experiment"]
    if experiment is None or experiment == "":
        errors.append(("experiment", f"required; choose one of {', '.join(EXPERIMENTS)}"))
    elif experiment in ALIASES:
        alias, experiment = experiment, ALIASES[experiment]
    elif experiment not in EXPERIMENTS:
        errors.append(("experiment", f"unknown experiment {experiment!r}"))

    for key in ("p_1q", "p_2q", "eps_ro"):
        _check_range(errors, values, key, 0.0, 1.0)
    _check_range(errors, values, "p_th", 0.0, 0.5)
    for key in ("t1", "t2"):
        if not values[key] > 0:
            errors.append((key, f"{values[key]} must be positive"))
    if values["t1"] > 0 and values["t2"] > 2 * values["t1"]:
        errors.append(("t2", f"unphysical parameters: T2 = {values['t2']} exceeds 2 T1 = {2 * values['t1']}"))
    for key in ("t_1q", "t_2q"):
        if values[key] < 0:
            errors.append((key, "gate duration must be non-negative"))
    if values["noise_scale"] < 0:
        errors.append(("noise_scale", "must be non-negative"))
    for key, lo in (("shots", 1), ("phases", 1), ("resamples", 2), ("seed", 0)):
        if values[key] < lo:
            errors.append((key, f"must be at least {lo}"))
    if values["repetitions"] is not None and values["repetitions"] < 2:
        errors.append(("repetitions", "must be at least 2"))
    if not values["target"] > 0:
        errors.append(("target", "must be positive"))

    experiment_ok = experiment in EXPERIMENTS
    if values["protocol"] is None:
        values["protocol"] = ALIAS_PROTOCOLS.get(alias, PROTOCOLS)
    for p in values["protocol"]:
        if p not in PROTOCOLS:
            errors.append(("protocol", f"unknown protocol {p!r}"))
    if values["n"] is None and experiment_ok:
        values["n"] = DEFAULT_QUBITS[experiment]
    limit = 2 if experiment == "unitary-fidelity" else 3
    for n in values["n"] or ():
        if not 1 <= n <= limit:
            errors.append(("n", f"{n} outside [1, {limit}]"))
    if errors:
        raise ConfigError(errors)

    config = ExperimentConfig(**{**values, "experiment": experiment}, alias=alias)
    try:
        config.noise_model()
    except UnphysicalParameters as exc:
        raise ConfigError([("noise", str(exc))]) from exc
    return config
