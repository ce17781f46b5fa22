"""End-to-end evaluation protocol for generalist and specialist agents.

For each (seed, context) cell: train the agent, build its approximate
front, and score it against the context's reference front with NHGR,
EUGR, EUM, and raw hypervolume; then aggregate the per-cell scores with
the interquartile mean and the optimality gap. Reference fronts come from
exact backward induction when tractable, falling back to specialist
aggregation, with the provenance recorded. Reports serialize
deterministically: identical configurations reproduce byte-identical
output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__, agents, oracle
from .fronts import (
    DegenerateRangeError,
    FrontBounds,
    ParetoFront,
    UndefinedRatioError,
    eum,
    hypervolume,
    nhgr,
    pareto_filter,
)
from .lavagrid import DEFAULT_GAMMA, DEFAULT_MAX_STEPS, LavaGridContext, LavaGridSpace
from .stats import GENERATOR_ID, RandomStream, iqm, optimality_gap, sample_simplex_batch

# Stream-id lanes, so every randomness consumer has a stable coordinate.
_TRAIN, _EUM, _SPECIALIST, _RANDOM, _REFERENCE = 0, 1, 2, 3, 4

REPORT_SCHEMA_VERSION = 1


@dataclass
class EvalConfig:
    """Everything needed to reproduce one evaluation run."""

    contexts: list[tuple[str, LavaGridContext]]
    seeds: list[int]
    eval_episodes: int = 100
    eum_weight_samples: int = 100
    gamma: float = DEFAULT_GAMMA
    max_steps: int = DEFAULT_MAX_STEPS
    train_episodes: int = 5000
    weight_grid_resolution: int = 10
    alpha: float = 0.1
    oracle_cap: int = 32
    oracle_state_limit: int = 2_000_000
    reference_specialist_episodes: int = 20000
    reference_seed: int = 0
    dr_width: int = 11
    dr_height: int = 11
    dr_lava_range: tuple[int, int] = (0, 30)

    def __post_init__(self):
        if not self.contexts:
            raise ValueError("config must declare at least one context")
        if not self.seeds:
            raise ValueError("config must declare at least one seed")
        if self.eval_episodes < 1 or self.eum_weight_samples < 1:
            raise ValueError("episode and weight-sample counts must be positive")
        if self.train_episodes < 1:
            raise ValueError("train_episodes must be positive")

    def dr_space(self) -> LavaGridSpace:
        return LavaGridSpace(self.dr_width, self.dr_height, tuple(self.dr_lava_range))

    def weight_grid(self) -> np.ndarray:
        return agents.weight_grid(self.weight_grid_resolution, 3)

    def to_json_obj(self) -> dict:
        return {
            "contexts": [
                {"name": name, "context": ctx.to_json_obj()}
                for name, ctx in self.contexts
            ],
            "seeds": list(self.seeds),
            "eval_episodes": self.eval_episodes,
            "eum_weight_samples": self.eum_weight_samples,
            "gamma": self.gamma,
            "max_steps": self.max_steps,
            "train_episodes": self.train_episodes,
            "weight_grid_resolution": self.weight_grid_resolution,
            "alpha": self.alpha,
            "oracle_cap": self.oracle_cap,
            "oracle_state_limit": self.oracle_state_limit,
            "reference_specialist_episodes": self.reference_specialist_episodes,
            "reference_seed": self.reference_seed,
            "dr_width": self.dr_width,
            "dr_height": self.dr_height,
            "dr_lava_range": list(self.dr_lava_range),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EvalConfig":
        from .lavagrid import builtin_context

        try:
            contexts = []
            for item in obj["contexts"]:
                if "builtin" in item:
                    name = item["builtin"]
                    contexts.append((item.get("name", name), builtin_context(name)))
                else:
                    ctx = LavaGridContext.from_json_obj(item["context"])
                    contexts.append((item.get("name", ctx.name or "context"), ctx))
            kwargs = {
                k: obj[k]
                for k in (
                    "eval_episodes",
                    "eum_weight_samples",
                    "gamma",
                    "max_steps",
                    "train_episodes",
                    "weight_grid_resolution",
                    "alpha",
                    "oracle_cap",
                    "oracle_state_limit",
                    "reference_specialist_episodes",
                    "reference_seed",
                    "dr_width",
                    "dr_height",
                )
                if k in obj
            }
            if "dr_lava_range" in obj:
                kwargs["dr_lava_range"] = tuple(obj["dr_lava_range"])
            return cls(contexts=contexts, seeds=list(obj["seeds"]), **kwargs)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"invalid config: {exc}") from None


@dataclass
class ReferenceFront:
    """An optimal-front estimate for one context plus its provenance."""

    front: ParetoFront
    provenance: str  # oracle-exact | oracle-eps-pruned | specialist
    epsilon: float = 0.0
    witnesses: tuple[str, ...] | None = None


def make_reference_fronts(config: EvalConfig) -> dict[str, ReferenceFront]:
    """Best obtainable reference front per context, provenance recorded.

    Exact backward induction is attempted when the time-expanded state
    count fits the configured limit; a cap-bound (epsilon-pruned) result
    is unioned with a specialist front. Oversized contexts use the
    specialist approximation alone.
    """
    refs: dict[str, ReferenceFront] = {}
    ref_stream = RandomStream(config.reference_seed, (_REFERENCE,))
    for i, (name, ctx) in enumerate(config.contexts):
        layout = ctx.layout
        n_goals = len(layout.goal_positions())
        state_layers = (
            layout.width * layout.height * 4 * (1 << n_goals) * config.max_steps
        )
        if state_layers <= config.oracle_state_limit:
            orf = oracle.pareto_backward_induction(
                ctx, config.gamma, config.max_steps, cap=config.oracle_cap
            )
            if orf.exact:
                refs[name] = ReferenceFront(
                    orf.front, "oracle-exact", witnesses=orf.witnesses
                )
                continue
            spec = oracle.specialist_front(
                ctx,
                config.reference_specialist_episodes,
                config.gamma,
                ref_stream.substream(i),
                weight_grid_resolution=config.weight_grid_resolution,
                max_steps=config.max_steps,
                alpha=config.alpha,
            )
            union = pareto_filter(
                np.vstack([orf.front.points, spec.points])
            )
            refs[name] = ReferenceFront(union, "oracle-eps-pruned", epsilon=orf.epsilon)
        else:
            spec = oracle.specialist_front(
                ctx,
                config.reference_specialist_episodes,
                config.gamma,
                ref_stream.substream(i),
                weight_grid_resolution=config.weight_grid_resolution,
                max_steps=config.max_steps,
                alpha=config.alpha,
            )
            refs[name] = ReferenceFront(spec, "specialist")
    return refs


@dataclass
class EvalReport:
    """Per-cell fronts and metrics plus cross-context aggregates."""

    agent_kind: str
    cells: list[dict]
    reference_fronts: dict[str, dict]
    excluded_contexts: list[str]
    aggregates: dict[str, float]
    config_echo: dict
    rng_generator: str = GENERATOR_ID
    software_version: str = __version__
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_json_obj(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "software_version": self.software_version,
            "rng_generator": self.rng_generator,
            "agent_kind": self.agent_kind,
            "config": self.config_echo,
            "reference_fronts": self.reference_fronts,
            "excluded_contexts": self.excluded_contexts,
            "cells": self.cells,
            "aggregates": self.aggregates,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EvalReport":
        if obj.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError(
                f"unsupported report schema version {obj.get('schema_version')!r}"
            )
        return cls(
            agent_kind=obj["agent_kind"],
            cells=obj["cells"],
            reference_fronts=obj["reference_fronts"],
            excluded_contexts=obj["excluded_contexts"],
            aggregates=obj["aggregates"],
            config_echo=obj["config"],
            rng_generator=obj["rng_generator"],
            software_version=obj["software_version"],
        )

    def write_csv(self, path) -> None:
        """Flat per-cell metric rows: seed, context, metric, value, provenance."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["seed", "context", "metric", "value", "provenance"])
            for cell in self.cells:
                for metric in ("hypervolume", "eum", "nhgr", "eugr"):
                    value = cell[metric]
                    writer.writerow(
                        [
                            cell["seed"],
                            cell["context"],
                            metric,
                            "" if value is None else repr(value),
                            cell["provenance"],
                        ]
                    )

    def recompute_aggregates(self) -> dict[str, float]:
        """Aggregates rebuilt from the stored per-cell scores."""
        return _aggregate(self.cells)


def _aggregate(cells: list[dict]) -> dict[str, float]:
    out: dict[str, float] = {}
    for metric in ("nhgr", "eugr"):
        scores = [c[metric] for c in cells if c[metric] is not None]
        if scores:
            out[f"{metric}_iqm"] = iqm(scores)
            out[f"{metric}_optimality_gap"] = optimality_gap(scores)
        else:
            out[f"{metric}_iqm"] = None
            out[f"{metric}_optimality_gap"] = None
    return out


def _reference_valid(ref: ReferenceFront) -> bool:
    """A reference front supports NHGR iff its bounds and HV are nondegenerate."""
    try:
        bounds = FrontBounds.of_front(ref.front)
    except (DegenerateRangeError, ValueError):
        return False
    from .fronts import hv_norm

    return hv_norm(ref.front, bounds) > 0.0


def evaluate_custom(
    config: EvalConfig,
    refs: dict[str, ReferenceFront],
    agent_kind: str,
    front_for_cell,
) -> EvalReport:
    """Score `front_for_cell(seed, index, name, context)` over all cells."""
    ordered = sorted(enumerate(config.contexts), key=lambda item: item[1][0])
    valid = {name: _reference_valid(refs[name]) for _, (name, _) in ordered}
    excluded = sorted(name for name, ok in valid.items() if not ok)

    cells: list[dict] = []
    for seed in config.seeds:
        for idx, (name, ctx) in ordered:
            if not valid[name]:
                continue
            ref = refs[name]
            front = front_for_cell(seed, idx, name, ctx)
            weights = sample_simplex_batch(
                RandomStream(seed, (_EUM, idx)), 3, config.eum_weight_samples
            )
            ref_point = ref.front.points.min(axis=0)
            cell_nhgr = nhgr(front, ref.front)
            eum_ref = eum(ref.front, weights)
            cell_eum = eum(front, weights) if len(front) else None
            if cell_eum is None or eum_ref == 0.0:
                cell_eugr = None
            else:
                cell_eugr = cell_eum / eum_ref
            cells.append(
                {
                    "seed": seed,
                    "context": name,
                    "provenance": ref.provenance,
                    "nhgr": cell_nhgr,
                    "eugr": cell_eugr,
                    "eugr_denominator_negative": bool(eum_ref < 0.0),
                    "eum": cell_eum,
                    "hypervolume": hypervolume(front, ref_point),
                    "front": front.to_json_obj(),
                }
            )
    report = EvalReport(
        agent_kind=agent_kind,
        cells=cells,
        reference_fronts={
            name: {
                "provenance": refs[name].provenance,
                "epsilon": refs[name].epsilon,
                "front": refs[name].front.to_json_obj(),
            }
            for _, (name, _) in ordered
        },
        excluded_contexts=excluded,
        aggregates=_aggregate(cells),
        config_echo=config.to_json_obj(),
    )
    return report


def evaluate_generalist(
    config: EvalConfig, refs: dict[str, ReferenceFront] | None = None
) -> EvalReport:
    """Train one domain-randomized generalist per seed and score it."""
    refs = make_reference_fronts(config) if refs is None else refs
    grid = config.weight_grid()
    space = config.dr_space()
    agents_by_seed = {
        seed: agents.train_scalarized_q(
            context_source=space,
            weight_grid=grid,
            episodes=config.train_episodes,
            gamma=config.gamma,
            stream=RandomStream(seed, (_TRAIN,)),
            alpha=config.alpha,
            max_steps=config.max_steps,
        )
        for seed in config.seeds
    }

    def front_for_cell(seed, idx, name, ctx):
        return agents.build_front(
            agents_by_seed[seed],
            grid,
            ctx,
            config.gamma,
            max_steps=config.max_steps,
            max_weights=config.eval_episodes,
        )

    return evaluate_custom(config, refs, "generalist", front_for_cell)


def evaluate_specialists(
    config: EvalConfig, refs: dict[str, ReferenceFront] | None = None
) -> EvalReport:
    """Train one fixed-context specialist per (seed, context) and score it."""
    refs = make_reference_fronts(config) if refs is None else refs
    grid = config.weight_grid()
    trained: dict[tuple[int, int], agents.TabularQ] = {}

    def front_for_cell(seed, idx, name, ctx):
        key = (seed, idx)
        if key not in trained:
            trained[key] = agents.train_scalarized_q(
                context_source=ctx,
                weight_grid=grid,
                episodes=config.train_episodes,
                gamma=config.gamma,
                stream=RandomStream(seed, (_SPECIALIST, idx)),
                alpha=config.alpha,
                max_steps=config.max_steps,
            )
        return agents.build_front(
            trained[key],
            grid,
            ctx,
            config.gamma,
            max_steps=config.max_steps,
            max_weights=config.eval_episodes,
        )

    return evaluate_custom(config, refs, "specialist", front_for_cell)


def evaluate_random_baseline(
    config: EvalConfig, refs: dict[str, ReferenceFront] | None = None
) -> EvalReport:
    """Score the uniform-random-policy floor baseline."""
    refs = make_reference_fronts(config) if refs is None else refs

    def front_for_cell(seed, idx, name, ctx):
        return agents.random_policy_front(
            ctx,
            config.eval_episodes,
            config.gamma,
            RandomStream(seed, (_RANDOM, idx)),
            max_steps=config.max_steps,
        )

    return evaluate_custom(config, refs, "random", front_for_cell)


def evaluate_reference_self_test(
    config: EvalConfig, refs: dict[str, ReferenceFront] | None = None
) -> EvalReport:
    """Self-test: score the reference fronts against themselves (NHGR = 1)."""
    refs = make_reference_fronts(config) if refs is None else refs

    def front_for_cell(seed, idx, name, ctx):
        return refs[name].front

    return evaluate_custom(config, refs, "reference-self-test", front_for_cell)
