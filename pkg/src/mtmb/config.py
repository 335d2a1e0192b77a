"""Experiment config files.

INI-style text, one section per concern::

    [experiment]
    algorithm = mtmb            ; mtmb | random | grid | taskwise
    replications = 25
    base_seed = 0
    snapshot_every = 500
    output_dir = results/paper_scale

    [domain]
    type = planted_disks        ; planted_disks | planar_arm
    n_situations = 100
    ...

    [budget]
    B = 25000

    [variation]
    sigma_frac = 0.1

Keys are case-sensitive, order does not matter and unknown sections or keys
are errors. Overrides use ``section.key=value``; a bare key addresses the
``experiment`` section (``algorithm=grid``).
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from .algorithms import ALGORITHMS, BudgetConfig
from .domains import SimilarityParams, planar_arm_build, planted_disks_build
from .domains.base import DEFAULT_PROBE_CAP, TaskDomain
from .errors import ConfigError
from .variation import VariationConfig

_REQUIRED = object()
_EXECUTION_KEYS = ("workers", "output_dir")


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_int(text: str) -> Optional[int]:
    return None if text.strip() in ("", "none") else int(text)


def _algorithm(text: str) -> str:
    if text not in ALGORITHMS:
        raise ValueError(f"expected one of {', '.join(ALGORITHMS)}")
    return text


def _domain_type(text: str) -> str:
    if text not in ("planted_disks", "planar_arm"):
        raise ValueError("expected planted_disks or planar_arm")
    return text


COMMON_SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], Any]]] = {
    "experiment": {
        "algorithm": (_algorithm, _REQUIRED),
        "replications": (int, 1),
        "base_seed": (int, 0),
        "snapshot_every": (int, 500),
        "output_dir": (str, ""),
        "workers": (int, 1),
    },
    "budget": {
        "B": (int, _REQUIRED),
        "init_target_elites": (_optional_int, None),
        "init_cap": (_optional_int, None),
    },
    "variation": {
        "crossover_rate": (float, 0.5),
        "mutation_rate": (float, 1.0),
        "sigma_frac": (float, 0.1),
    },
    "oracle": {
        "probes": (int, 32),
        "cap": (int, DEFAULT_PROBE_CAP),
    },
}

DOMAIN_SCHEMAS: dict[str, dict[str, tuple[Callable[[str], Any], Any]]] = {
    "planted_disks": {
        "type": (_domain_type, _REQUIRED),
        "n_situations": (int, 100),
        "disks_per_task": (int, 3),
        "dispersion": (float, 0.15),
        "r": (float, 0.08),
        "lam": (float, 0.2),
        "delta": (float, 0.05),
        "h": (float, 0.1),
        "f_max": (float, 10.0),
        "general_position": (_bool, True),
    },
    "planar_arm": {
        "type": (_domain_type, _REQUIRED),
        "n_situations": (int, 100),
        "link1": (float, 0.5),
        "link2": (float, 0.4),
        "wall_lo": (float, 0.4),
        "wall_hi": (float, 0.8),
        "h": (float, 0.1),
        "delta": (float, 0.05),
        "f_max": (float, 10.0),
        "lattice_cells": (int, 8),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    replications: int
    base_seed: int
    snapshot_every: int
    output_dir: str
    workers: int
    domain: dict[str, Any]
    budget: BudgetConfig
    variation: VariationConfig
    oracle_probes: int
    oracle_cap: int
    raw: dict[str, dict[str, str]] = field(repr=False)
    overrides: tuple[str, ...] = ()

    def canonical_text(self) -> str:
        """Sorted ``section.key = value`` lines of the effective raw config.

        Execution-only keys (workers, output_dir) are left out so they do
        not change the config hash.
        """
        lines = []
        for section in sorted(self.raw):
            for key in sorted(self.raw[section]):
                if section == "experiment" and key in _EXECUTION_KEYS:
                    continue
                lines.append(f"{section}.{key} = {self.raw[section][key]}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def build_domain(self) -> TaskDomain:
        return build_domain(self.domain, self.base_seed)


def build_domain(params: dict[str, Any], seed: int) -> TaskDomain:
    p = dict(params)
    kind = p.pop("type")
    if kind == "planted_disks":
        sim = SimilarityParams(p.pop("dispersion"), p.pop("disks_per_task"))
        return planted_disks_build(p.pop("n_situations"), sim, r=p.pop("r"), lam=p.pop("lam"),
                                   delta=p.pop("delta"), h=p.pop("h"), seed=seed,
                                   f_max=p.pop("f_max"),
                                   general_position=p.pop("general_position"))
    return planar_arm_build(p.pop("n_situations"), (p.pop("link1"), p.pop("link2")),
                            (p.pop("wall_lo"), p.pop("wall_hi")), h=p.pop("h"), seed=seed,
                            delta=p.pop("delta"), f_max=p.pop("f_max"),
                            lattice_cells=p.pop("lattice_cells"))


def _split_override(item: str) -> tuple[str, str, str]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, value = item.split("=", 1)
    key = key.strip()
    section, _, name = key.rpartition(".")
    return section or "experiment", name, value.strip()


def _typed(section: str, schema, raw: dict[str, str]) -> dict[str, Any]:
    out = {}
    for name, (conv, default) in schema.items():
        if name in raw:
            try:
                out[name] = conv(raw[name])
            except ValueError as exc:
                raise ConfigError(f"{section}.{name}: invalid value {raw[name]!r} ({exc})") from None
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {section}.{name}")
        else:
            out[name] = default
    for name in raw:
        if name not in schema:
            raise ConfigError(f"unknown config key {section}.{name}")
    return out


def parse_config(text: str, overrides: Sequence[str] = (), source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"),
                                       default_section="__none__")
    parser.optionxform = str  # keep "B" upper case
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    raw: dict[str, dict[str, str]] = {s: dict(parser[s]) for s in parser.sections()}
    for item in overrides:
        section, name, value = _split_override(item)
        raw.setdefault(section, {})[name] = value

    known = set(COMMON_SCHEMA) | {"domain"}
    for section in raw:
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
    sections = {s: _typed(s, COMMON_SCHEMA[s], raw.get(s, {})) for s in COMMON_SCHEMA}
    domain_raw = raw.get("domain", {})
    if "type" not in domain_raw:
        raise ConfigError("missing required key domain.type")
    try:
        kind = _domain_type(domain_raw["type"])
    except ValueError as exc:
        raise ConfigError(f"domain.type: invalid value {domain_raw['type']!r} ({exc})") from None
    domain = _typed("domain", DOMAIN_SCHEMAS[kind], domain_raw)

    exp = sections["experiment"]
    if exp["replications"] < 1:
        raise ConfigError("experiment.replications must be >= 1")
    if exp["workers"] < 1:
        raise ConfigError("experiment.workers must be >= 1")
    bud = sections["budget"]
    try:
        budget = BudgetConfig(bud["B"], bud["init_target_elites"], bud["init_cap"],
                              exp["snapshot_every"])
        variation = VariationConfig(**sections["variation"])
        # every domain pairs a single and a dual task per situation
        budget.resolve(2 * domain["n_situations"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(
        algorithm=exp["algorithm"], replications=exp["replications"],
        base_seed=exp["base_seed"], snapshot_every=exp["snapshot_every"],
        output_dir=exp["output_dir"], workers=exp["workers"], domain=domain, budget=budget,
        variation=variation, oracle_probes=sections["oracle"]["probes"],
        oracle_cap=sections["oracle"]["cap"], raw=raw, overrides=tuple(overrides),
    )


def load_config(path: str | Path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, overrides, source=str(path))
