"""Scenario configuration files and the experiment runner behind the CLI."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .allocation import DEFAULT_ADMIN_RATE
from .game import MODE_EXPECTED, MODE_MONTE_CARLO, better_point, evaluate_policy, point_seed
from .incentives import OfferPolicy
from .model import ModelConstants
from .population import (
    Population,
    PopulationConfig,
    RNG_ALGORITHM,
    generate,
    write_population_csv,
)


class ConfigError(ValueError):
    """Bad scenario file or invariant violation; maps to exit code 1."""


@dataclass(frozen=True)
class SweepSpec:
    k_values: tuple = (0,)
    m_values: tuple = (0,)
    mu_values: tuple = (1.0,)
    sigma_values: tuple = (0.5,)
    h_values: tuple = (0.0,)
    budgets: tuple = (1000.0,)
    mu_sigma_pairs: tuple = ()  # overrides the mu x sigma product when set

    def policy_points(self):
        """(index, mu, sigma) triples; the index feeds the offer seed."""
        if self.mu_sigma_pairs:
            return [(i, mu, sg) for i, (mu, sg) in enumerate(self.mu_sigma_pairs)]
        return [
            (ui * len(self.sigma_values) + si, mu, sg)
            for ui, mu in enumerate(self.mu_values)
            for si, sg in enumerate(self.sigma_values)
        ]

    def validate(self):
        for name in ("k_values", "m_values", "budgets", "h_values"):
            if not getattr(self, name):
                raise ConfigError(f"sweep.{name} must be non-empty")
        if not self.mu_sigma_pairs and (not self.mu_values or not self.sigma_values):
            raise ConfigError("sweep needs mu_values and sigma_values (or mu_sigma_pairs)")
        if any(b < 0 for b in self.budgets):
            raise ConfigError("budgets must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    title: str = ""
    kind: str = "sweep"  # "sweep" or "stackelberg" (adds per-user bitrate dump)
    population: PopulationConfig = field(default_factory=PopulationConfig)
    policy: OfferPolicy = field(default_factory=OfferPolicy)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    mode: str = MODE_EXPECTED
    replications: int = 20
    mc_reps: int = 20
    admin_rate: float = DEFAULT_ADMIN_RATE
    base_seed: int = 1

    def validate(self):
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.mode not in (MODE_EXPECTED, MODE_MONTE_CARLO):
            raise ConfigError(f"unknown mode {self.mode!r}")
        self.sweep.validate()
        try:
            self.population.validate()
            self.policy.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        n = self.population.n_users
        if all(k + m > n for k in self.sweep.k_values for m in self.sweep.m_values):
            raise ConfigError("no (k, m) pair fits the population size")


def _build_consts(data: dict) -> ModelConstants:
    base = ModelConstants()
    known = set(base.__dataclass_fields__)
    bad = set(data) - known
    if bad:
        raise ConfigError(f"unknown model constants: {sorted(bad)}")
    return replace(base, **data)


def _build_population(data: dict) -> PopulationConfig:
    data = dict(data)
    consts = _build_consts(data.pop("consts", {}))
    base = PopulationConfig(consts=consts)
    known = set(base.__dataclass_fields__) - {"consts"}
    bad = set(data) - known
    if bad:
        raise ConfigError(f"unknown population fields: {sorted(bad)}")
    for key in ("high_set", "low_set", "gamma_range", "delta_range"):
        if key in data:
            data[key] = tuple(data[key])
    return replace(base, **data)


def _build_policy(data: dict) -> OfferPolicy:
    base = OfferPolicy()
    bad = set(data) - set(base.__dataclass_fields__)
    if bad:
        raise ConfigError(f"unknown policy fields: {sorted(bad)}")
    return replace(base, **data)


def _build_sweep(data: dict) -> SweepSpec:
    base = SweepSpec()
    bad = set(data) - set(base.__dataclass_fields__)
    if bad:
        raise ConfigError(f"unknown sweep fields: {sorted(bad)}")
    fields = {}
    for key, value in data.items():
        if key == "mu_sigma_pairs":
            fields[key] = tuple((float(a), float(b)) for a, b in value)
        else:
            fields[key] = tuple(value)
    return replace(base, **fields)


def load_scenario(source) -> ScenarioConfig:
    """Parse a scenario YAML file (path or text) into a validated config."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc
    if not isinstance(raw, dict) or "name" not in raw:
        raise ConfigError("scenario file must be a mapping with a 'name'")
    known = {"name", "title", "kind", "population", "policy", "sweep", "mode",
             "replications", "mc_reps", "admin_rate", "base_seed"}
    bad = set(raw) - known
    if bad:
        raise ConfigError(f"unknown scenario fields: {sorted(bad)}")
    cfg = ScenarioConfig(
        name=str(raw["name"]),
        title=str(raw.get("title", "")),
        kind=str(raw.get("kind", "sweep")),
        population=_build_population(raw.get("population", {})),
        policy=_build_policy(raw.get("policy", {})),
        sweep=_build_sweep(raw.get("sweep", {})),
        mode=str(raw.get("mode", MODE_EXPECTED)),
        replications=int(raw.get("replications", 20)),
        mc_reps=int(raw.get("mc_reps", 20)),
        admin_rate=float(raw.get("admin_rate", DEFAULT_ADMIN_RATE)),
        base_seed=int(raw.get("base_seed", 1)),
    )
    cfg.validate()
    return cfg


def bundled_scenarios() -> dict[str, Path]:
    """Name -> config path for every scenario shipped with the package."""
    root = resources.files("greenstream") / "scenarios"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            out[entry.name[: -len(".yaml")]] = Path(str(entry))
    return out


def resolve_scenario(name_or_path) -> ScenarioConfig:
    catalog = bundled_scenarios()
    if str(name_or_path) in catalog:
        return load_scenario(catalog[str(name_or_path)])
    path = Path(name_or_path)
    if not path.exists():
        raise ConfigError(f"no bundled scenario or file named {name_or_path!r}")
    return load_scenario(path)


SWEEP_CSV_HEADER = [
    "rep", "k", "m", "mu", "sigma", "h", "budget", "seed", "spend",
    "traffic_kbps", "traffic_pct", "energy_w", "co2_g",
    "switchers_expected", "switchers_realized",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def run_scenario(cfg: ScenarioConfig, out_dir, base_seed=None, replications=None,
                 mode=None) -> dict:
    """Execute a scenario and write its artifact files.

    Writes population.csv (+ .json sidecar), sweep.csv, summary.json and
    meta.json into out_dir; stackelberg-kind scenarios additionally write
    bitrates.csv with the first replication's best-response bitrates at the
    winning grid point. Returns the summary dict.
    """
    cfg.validate()
    seed0 = cfg.base_seed if base_seed is None else int(base_seed)
    reps = cfg.replications if replications is None else int(replications)
    mode = cfg.mode if mode is None else str(mode)
    if reps < 1:
        raise ConfigError("replications must be >= 1")
    if mode not in (MODE_EXPECTED, MODE_MONTE_CARLO):
        raise ConfigError(f"unknown mode {mode!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sweep = cfg.sweep
    pop_seeds = [point_seed(seed0, rep) for rep in range(reps)]
    rows = []
    argmax_rows = []
    bitrate_dump = None
    for rep in range(reps):
        pop_cfg = replace(cfg.population, seed=pop_seeds[rep])
        pop: Population = generate(pop_cfg)
        if rep == 0:
            write_population_csv(pop, out / "population.csv")
        best = None
        best_ev = None
        for pi, mu, sigma in sweep.policy_points():
            offers_seed = point_seed(seed0, rep, 100 + pi)
            policy = replace(cfg.policy, mu=mu, sigma=sigma)
            for h in sweep.h_values:
                for ki, k in enumerate(sweep.k_values):
                    for mi, m in enumerate(sweep.m_values):
                        if k + m > pop.n:
                            continue
                        for budget in sweep.budgets:
                            ev = evaluate_policy(
                                pop, policy, k, m, h, budget, offers_seed,
                                mode=mode, reps=cfg.mc_reps,
                                admin_rate=cfg.admin_rate,
                            )
                            me = ev.metrics
                            row = {
                                "rep": rep, "k": k, "m": m, "mu": mu, "sigma": sigma,
                                "h": h, "budget": budget, "seed": offers_seed,
                                "spend": me.expected_spend,
                                "traffic_kbps": me.expected_traffic_reduction,
                                "traffic_pct": me.traffic_reduction_pct,
                                "energy_w": me.expected_energy_reduction,
                                "co2_g": me.expected_co2_reduction,
                                "switchers_expected": me.expected_switchers,
                                "switchers_realized": ev.realized_switchers,
                            }
                            rows.append(row)
                            if best is None or better_point(row, best):
                                best, best_ev = row, ev
        argmax_rows.append(best)
        if rep == 0 and cfg.kind == "stackelberg":
            bitrate_dump = (pop, best_ev)

    rows.sort(key=lambda r: (r["k"], r["m"], r["mu"], r["sigma"], r["h"],
                             r["budget"], r["rep"]))
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in SWEEP_CSV_HEADER])

    summary = _summarize(cfg, rows, argmax_rows, reps, seed0, mode)
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    meta = {
        "scenario": _scenario_dict(cfg),
        "engine_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "base_seed": seed0,
        "replications": reps,
        "mode": mode,
        "population_seeds": pop_seeds,
    }
    (out / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    if bitrate_dump is not None:
        pop, ev = bitrate_dump
        with (out / "bitrates.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "x_h", "x_star"])
            for i in range(pop.n):
                writer.writerow([i, _fmt(pop.x_h[i]), _fmt(ev.x_star[i])])
    return summary


def _group_key(row):
    return (row["k"], row["m"], row["mu"], row["sigma"], row["h"], row["budget"])


def _summarize(cfg, rows, argmax_rows, reps, seed0, mode) -> dict:
    groups = {}
    for row in rows:
        groups.setdefault(_group_key(row), []).append(row)
    group_stats = []
    for key in sorted(groups):
        members = groups[key]
        stat = {name: key[i] for i, name in enumerate(("k", "m", "mu", "sigma", "h", "budget"))}
        for col in ("spend", "traffic_kbps", "traffic_pct", "energy_w", "co2_g",
                    "switchers_expected"):
            vals = np.array([r[col] for r in members], dtype=float)
            stat[f"{col}_mean"] = float(vals.mean())
            stat[f"{col}_std"] = float(vals.std(ddof=0))
        if mode == MODE_MONTE_CARLO:
            vals = np.array([r["switchers_realized"] for r in members], dtype=float)
            stat["switchers_realized_mean"] = float(vals.mean())
        group_stats.append(stat)

    per_rep = [
        {"rep": i, "k": b["k"], "m": b["m"], "mu": b["mu"], "sigma": b["sigma"],
         "h": b["h"], "budget": b["budget"], "energy_w": b["energy_w"],
         "traffic_pct": b["traffic_pct"], "spend": b["spend"],
         "switchers_expected": b["switchers_expected"],
         "switchers_rounded": int(round(b["switchers_expected"])),
         "switchers_realized": b["switchers_realized"]}
        for i, b in enumerate(argmax_rows)
    ]
    return {
        "scenario": cfg.name,
        "base_seed": seed0,
        "replications": reps,
        "mode": mode,
        "groups": group_stats,
        "argmax": {
            "per_rep": per_rep,
            "energy_w_mean": float(np.mean([b["energy_w"] for b in argmax_rows])),
            "traffic_pct_mean": float(np.mean([b["traffic_pct"] for b in argmax_rows])),
            "switchers_expected_mean": float(np.mean([b["switchers_expected"] for b in argmax_rows])),
        },
    }


def _scenario_dict(cfg: ScenarioConfig) -> dict:
    data = {
        "name": cfg.name, "title": cfg.title, "kind": cfg.kind,
        "mode": cfg.mode, "replications": cfg.replications,
        "mc_reps": cfg.mc_reps, "admin_rate": cfg.admin_rate,
        "base_seed": cfg.base_seed,
        "population": asdict(cfg.population),
        "policy": asdict(cfg.policy),
        "sweep": asdict(cfg.sweep),
    }
    return data
