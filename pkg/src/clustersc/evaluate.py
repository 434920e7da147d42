"""Placebo harnesses, benchmark baselines, and Monte-Carlo spectrum checks.

Two placebo protocols produce the same report shape. The leave-one-out
harness works on synthetic panels: each sampled group-A unit becomes the
target, the rest form the donor pool, and errors are measured against the
target's noiseless signal. The split harness works on observed panels:
units are repeatedly split into donors and targets, and errors are measured
against the observations themselves (there is no signal to compare with).
The report records which reference was used.

Alongside the placebo machinery live the two Monte-Carlo experiments that
back the method's premises: the singular value gap between the full pool and
a subgroup, and the recovery rate of the planted two-group structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cluster import assign_target, fit_cluster_model, Partition, partition_symmetric_difference
from .datagen import NoiseSpec, SignalSpec, SyntheticDataset, gen_dataset, gen_group
from .engine import cluster_sc, sc_infer, sc_learn, ScFit, EffectEstimate
from .errors import (
    DegenerateClusterError,
    InvalidInputError,
    InvalidParamsError,
    ShapeError,
    UndefinedPrecisionError,
)
from .linalg import RankRule
from .panel import TimePanel
from .regression import RegressionSpec, active_set

__all__ = [
    "VARIANT_NAMES",
    "MethodVariant",
    "PlaceboRow",
    "PlaceboReport",
    "GapExperimentResult",
    "RecoveryCell",
    "RecoveryResult",
    "mse",
    "pairwise_improvement",
    "std_error",
    "random_subset_variant",
    "donor_selection_scores",
    "leave_one_out_placebo",
    "split_placebo",
    "singular_gap_experiment",
    "cluster_recovery_experiment",
]

VARIANT_NAMES = ("sc_full", "sc_random_subset", "cluster_sc")

# child seeds for per-target work are drawn upfront so results do not depend
# on execution order (targets could run in parallel)
SEED_CEILING = 2**63 - 1


def mse(predicted, reference) -> float:
    """Mean squared difference between two equal-length vectors."""
    predicted = np.asarray(predicted, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if predicted.shape != reference.shape or predicted.ndim != 1:
        raise ShapeError(
            f"mse needs two equally long vectors, got {predicted.shape} "
            f"and {reference.shape}"
        )
    if predicted.size == 0:
        raise ShapeError("mse needs at least one entry")
    diff = predicted - reference
    return float(diff @ diff / diff.size)


def pairwise_improvement(post_mse_full: float, post_mse_cluster: float) -> float:
    """I = full-pool error minus cluster error; positive favors the cluster."""
    if post_mse_full < 0 or post_mse_cluster < 0:
        raise InvalidInputError("MSE values cannot be negative")
    return post_mse_full - post_mse_cluster


def std_error(values) -> float:
    """Standard error of the mean; 0 for a single value."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


@dataclass(frozen=True)
class MethodVariant:
    """One estimator configuration to run inside a placebo harness.

    name
        "sc_full" fits on the whole donor pool, "cluster_sc" on the target's
        cluster, "sc_random_subset" on a uniform donor sample whose size is
        copied from the cluster_sc run for the same target (so a
        sc_random_subset entry requires a cluster_sc entry before it).
    """

    name: str
    reg: RegressionSpec
    rule: RankRule
    k: int | str = "auto"

    def __post_init__(self):
        if self.name not in VARIANT_NAMES:
            raise InvalidParamsError(
                f"variant name must be one of {VARIANT_NAMES}, got {self.name!r}"
            )
        if self.k != "auto" and (not isinstance(self.k, (int, np.integer)) or self.k < 1):
            raise InvalidParamsError(f"k must be 'auto' or a positive integer, got {self.k!r}")


@dataclass
class PlaceboRow:
    """One (iteration, target, variant) cell of a placebo run.

    iteration is 0 for the leave-one-out harness and 1-based for the split
    harness. The precision/recall fields are filled only when group labels
    exist (synthetic data) and the fitted weights have a nonempty active set.
    """

    iteration: int
    target_id: str
    variant: str
    pre_mse: float
    post_mse: float
    selected_donor_count: int
    cluster_label: int | None = None
    active_donor_precision: float | None = None
    active_donor_recall: float | None = None


@dataclass
class PlaceboReport:
    """Placebo rows plus the aggregates the figures are drawn from.

    medians: per variant name, the median pre/post MSE over complete cells
    (an (iteration, target) cell is complete when no variant was skipped on
    it, so all variants aggregate over the same targets). improvements holds
    the per-cell I values (full minus cluster) and their median. skipped
    lists the cells a variant could not run on, with the reason. reference
    is "true_signal" or "observed". per_iteration holds the split harness's
    per-iteration medians and is empty for leave-one-out runs.
    """

    rows: list[PlaceboRow]
    medians: dict
    improvements: dict
    skipped: list[dict]
    reference: str
    config: dict
    per_iteration: list[dict] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.iteration, row.target_id, row.variant)
            if key in seen:
                raise InvalidInputError(f"duplicate placebo cell {key}")
            seen.add(key)

    def recomputed_medians(self) -> dict:
        """Recompute the per-variant medians from the stored rows."""
        return _medians_from_rows(self.rows, self.skipped)

    def recomputed_improvements(self) -> dict:
        """Recompute the pairwise improvements from the stored rows."""
        return _improvements_from_rows(self.rows, self.skipped)


def _skipped_cells(skipped) -> set:
    return {(entry["iteration"], entry["target_id"]) for entry in skipped}


def _medians_from_rows(rows, skipped) -> dict:
    bad = _skipped_cells(skipped)
    by_variant: dict[str, list[PlaceboRow]] = {}
    for row in rows:
        if (row.iteration, row.target_id) in bad:
            continue
        by_variant.setdefault(row.variant, []).append(row)
    medians = {}
    for name, kept in by_variant.items():
        medians[name] = {
            "pre_mse": float(np.median([r.pre_mse for r in kept])),
            "post_mse": float(np.median([r.post_mse for r in kept])),
        }
    return medians


def _improvements_from_rows(rows, skipped) -> dict:
    bad = _skipped_cells(skipped)
    cells: dict[tuple, dict] = {}
    for row in rows:
        cell = (row.iteration, row.target_id)
        if cell in bad:
            continue
        cells.setdefault(cell, {})[row.variant] = row.post_mse
    values = []
    for post in cells.values():
        if "sc_full" in post and "cluster_sc" in post:
            values.append(pairwise_improvement(post["sc_full"], post["cluster_sc"]))
    return {
        "values": values,
        "median": float(np.median(values)) if values else None,
    }


def _check_variants(variants) -> None:
    if not variants:
        raise InvalidParamsError("need at least one variant")
    names = [v.name for v in variants]
    if len(set(names)) != len(names):
        raise InvalidParamsError(f"variant names must be distinct, got {names}")
    for i, v in enumerate(variants):
        if v.name == "sc_random_subset" and "cluster_sc" not in names[:i]:
            raise InvalidParamsError(
                "sc_random_subset needs a cluster_sc variant before it "
                "to define the subset size"
            )


def _rule_config(rule: RankRule) -> dict:
    if rule.kind == "fixed":
        return {"kind": "fixed", "r": rule.r}
    return {"kind": "energy", "threshold": rule.threshold, "squared": rule.squared}


def _variant_config(v: MethodVariant) -> dict:
    return {
        "name": v.name,
        "method": v.reg.method,
        "lam": v.reg.lam,
        "rule": _rule_config(v.rule),
        "k": v.k,
    }


def _noise_config(noise: NoiseSpec) -> dict:
    return {"kind": noise.kind, "params": list(noise.params)}


def random_subset_variant(pool, subset_size: int, rng) -> list[int]:
    """Uniform donor sample without replacement; returns sorted row indices."""
    pool = np.asarray(pool, dtype=float)
    if pool.ndim != 2:
        raise ShapeError(f"pool must be a matrix, got shape {pool.shape}")
    n = pool.shape[0]
    if not 1 <= subset_size <= n:
        raise InvalidInputError(
            f"subset_size must be in 1..{n}, got {subset_size}"
        )
    rng = np.random.default_rng(rng)
    idx = rng.choice(n, size=subset_size, replace=False)
    return sorted(int(i) for i in idx)


def donor_selection_scores(selected, truth_labels, target_group) -> tuple[float, float]:
    """Precision and recall of a donor selection against group labels.

    selected holds integer positions into truth_labels; duplicates are
    collapsed. Precision is the share of selected units carrying
    target_group; recall is the share of the group that was selected.
    """
    labels = list(truth_labels)
    chosen = {int(i) for i in selected}
    if not chosen:
        raise UndefinedPrecisionError("empty selection has no precision")
    if any(i < 0 or i >= len(labels) for i in chosen):
        raise InvalidInputError("selected indices out of range")
    group = {i for i, g in enumerate(labels) if g == target_group}
    if not group:
        raise InvalidInputError(f"no units labeled {target_group!r}")
    hits = len(chosen & group)
    return hits / len(chosen), hits / len(group)


def _fit_scores(fit: ScFit, estimate: EffectEstimate, t0: int, pre_ref, post_ref):
    pre_prediction = fit.denoised_donors[:, :t0].T @ fit.weights.values
    return mse(pre_prediction, pre_ref), mse(estimate.counterfactual_post, post_ref)


def _selection_scores(fit: ScFit, id_to_row: dict, truth_labels, target_group):
    positions = [id_to_row[u] for u in active_set(fit.weights)]
    try:
        return donor_selection_scores(positions, truth_labels, target_group)
    except UndefinedPrecisionError:
        return None, None


def leave_one_out_placebo(
    dataset: SyntheticDataset,
    target_fraction: float,
    variants: list[MethodVariant],
    rng,
    *,
    cluster_mode: str = "per_target",
    restarts: int = 10,
    k_range: tuple[int, int] = (2, 8),
) -> PlaceboReport:
    """Placebo test on a synthetic panel with group-A units as targets.

    A target_fraction share of group A (at least one unit) is sampled
    without replacement; each sampled unit is removed from the pool and every
    variant predicts its post-intervention path from the remaining units.
    Errors are measured against the unit's noiseless signal.

    cluster_mode "per_target" re-clusters each target's donor pool, which is
    the protocol the harness models; "per_dataset" clusters the full panel
    once per distinct (rule, k) and reuses the assignments, trading a little
    fidelity (the target participates in the clustering) for a large
    speedup on wide benchmark grids.

    Targets whose cluster collapses below two donors are recorded under
    skipped, and that cell is excluded from every variant's aggregates.
    """
    if not 0.0 < target_fraction <= 1.0:
        raise InvalidParamsError(
            f"target_fraction must be in (0, 1], got {target_fraction}"
        )
    if cluster_mode not in ("per_target", "per_dataset"):
        raise InvalidParamsError(f"unknown cluster_mode {cluster_mode!r}")
    _check_variants(variants)
    rng = np.random.default_rng(rng)

    panel = dataset.panel
    split = panel.split
    values = panel.values
    id_to_row = {u: i for i, u in enumerate(panel.unit_ids)}
    a_rows = [i for i, g in enumerate(dataset.group_labels) if g == "A"]
    if not a_rows:
        raise InvalidInputError("dataset has no group-A units to target")

    n_targets = max(1, int(round(target_fraction * len(a_rows))))
    target_rows = np.sort(rng.choice(a_rows, size=n_targets, replace=False))
    seeds = rng.integers(0, SEED_CEILING, size=(n_targets, len(variants)))

    pool_models = {}
    if cluster_mode == "per_dataset":
        for v in variants:
            if v.name != "cluster_sc" or (v.rule, v.k) in pool_models:
                continue
            model_rng = np.random.default_rng(rng.integers(0, SEED_CEILING))
            pool_models[(v.rule, v.k)] = fit_cluster_model(
                panel.pre, v.rule, k=v.k, rng=model_rng,
                restarts=restarts, k_range=k_range,
            )

    rows: list[PlaceboRow] = []
    skipped: list[dict] = []
    for ti, tr in enumerate(target_rows):
        tr = int(tr)
        target_id = panel.unit_ids[tr]
        pool_rows = [i for i in range(values.shape[0]) if i != tr]
        donors = values[pool_rows]
        donor_ids = [panel.unit_ids[i] for i in pool_rows]
        target_full = values[tr]
        signal_pre = dataset.true_signal[tr, : split.t0]
        signal_post = dataset.true_signal[tr, split.t0 :]

        cluster_size = None
        for vj, v in enumerate(variants):
            child = np.random.default_rng(seeds[ti, vj])
            try:
                if v.name == "sc_full":
                    fit = sc_learn(
                        donors, split, target_full[: split.t0], v.rule, v.reg,
                        donor_ids=donor_ids,
                    )
                    estimate = sc_infer(fit, split, target_full)
                elif v.name == "cluster_sc":
                    if cluster_mode == "per_target":
                        estimate, fit, _ = cluster_sc(
                            donors, split, target_full, v.rule, v.reg,
                            k=v.k, rng=child, restarts=restarts,
                            donor_ids=donor_ids, k_range=k_range,
                        )
                    else:
                        model = pool_models[(v.rule, v.k)]
                        label = int(model.assignments.labels[tr])
                        members = [
                            int(i)
                            for i in np.flatnonzero(model.assignments.labels == label)
                            if i != tr
                        ]
                        if len(members) < 2:
                            raise DegenerateClusterError(label, len(members))
                        fit = sc_learn(
                            values[members], split, target_full[: split.t0],
                            v.rule, v.reg,
                            donor_ids=[panel.unit_ids[i] for i in members],
                            cluster_label=label,
                        )
                        estimate = sc_infer(fit, split, target_full)
                    cluster_size = len(fit.donor_ids)
                else:
                    if cluster_size is None:
                        raise DegenerateClusterError(0, 0)
                    idx = random_subset_variant(donors, cluster_size, child)
                    fit = sc_learn(
                        donors[idx], split, target_full[: split.t0], v.rule, v.reg,
                        donor_ids=[donor_ids[i] for i in idx],
                    )
                    estimate = sc_infer(fit, split, target_full)
            except DegenerateClusterError as exc:
                skipped.append(
                    {
                        "iteration": 0,
                        "target_id": target_id,
                        "variant": v.name,
                        "reason": str(exc) if v.name == "cluster_sc"
                        else "paired cluster_sc run was skipped",
                    }
                )
                continue

            pre_mse, post_mse = _fit_scores(fit, estimate, split.t0, signal_pre, signal_post)
            precision, recall = _selection_scores(
                fit, id_to_row, dataset.group_labels, dataset.group_labels[tr]
            )
            rows.append(
                PlaceboRow(
                    iteration=0,
                    target_id=target_id,
                    variant=v.name,
                    pre_mse=pre_mse,
                    post_mse=post_mse,
                    selected_donor_count=len(fit.donor_ids),
                    cluster_label=fit.cluster_label,
                    active_donor_precision=precision,
                    active_donor_recall=recall,
                )
            )

    config = {
        "harness": "leave_one_out",
        "target_fraction": target_fraction,
        "n_targets": n_targets,
        "cluster_mode": cluster_mode,
        "restarts": restarts,
        "k_range": list(k_range),
        "dataset_seed": dataset.seed,
        "noise": _noise_config(dataset.noise),
        "variants": [_variant_config(v) for v in variants],
    }
    return PlaceboReport(
        rows=rows,
        medians=_medians_from_rows(rows, skipped),
        improvements=_improvements_from_rows(rows, skipped),
        skipped=skipped,
        reference="true_signal",
        config=config,
    )


def split_placebo(
    panel: TimePanel,
    train_fraction: float,
    iterations: int,
    variants: list[MethodVariant],
    rng,
    *,
    restarts: int = 10,
    k_range: tuple[int, int] = (2, 8),
) -> PlaceboReport:
    """Repeated random donor/target splits of an observed panel.

    Each iteration assigns round(train_fraction * n) units to the donor pool
    and the rest to the target set, fits every variant on every target, and
    stores its own median errors next to the pooled ones. With no noiseless
    signal available, errors are measured against the observations.

    Cluster models are fitted once per iteration per distinct (rule, k) on
    the donor pool alone; targets are then embedded on the model's basis, so
    no target influences the clustering.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidParamsError(
            f"train_fraction must be in (0, 1), got {train_fraction}"
        )
    if iterations < 1:
        raise InvalidParamsError(f"iterations must be >= 1, got {iterations}")
    _check_variants(variants)
    rng = np.random.default_rng(rng)

    split = panel.split
    values = panel.values
    n = values.shape[0]
    n_train = int(round(train_fraction * n))
    if not 1 <= n_train <= n - 1:
        raise InvalidParamsError(
            f"train_fraction {train_fraction} leaves no donors or no targets "
            f"for {n} units"
        )

    iteration_seeds = rng.integers(0, SEED_CEILING, size=iterations)
    rows: list[PlaceboRow] = []
    skipped: list[dict] = []
    per_iteration: list[dict] = []

    for it in range(1, iterations + 1):
        it_rng = np.random.default_rng(iteration_seeds[it - 1])
        perm = it_rng.permutation(n)
        train_rows = np.sort(perm[:n_train])
        test_rows = np.sort(perm[n_train:])
        donors = values[train_rows]
        donor_ids = [panel.unit_ids[i] for i in train_rows]
        seeds = it_rng.integers(0, SEED_CEILING, size=(test_rows.size, len(variants)))

        models = {}
        for v in variants:
            if v.name != "cluster_sc" or (v.rule, v.k) in models:
                continue
            model_rng = np.random.default_rng(it_rng.integers(0, SEED_CEILING))
            models[(v.rule, v.k)] = fit_cluster_model(
                donors[:, : split.t0], v.rule, k=v.k, rng=model_rng,
                restarts=restarts, k_range=k_range,
            )

        it_rows: list[PlaceboRow] = []
        it_skipped: list[dict] = []
        for ti, tr in enumerate(test_rows):
            tr = int(tr)
            target_id = panel.unit_ids[tr]
            target_full = values[tr]
            observed_pre = target_full[: split.t0]
            observed_post = target_full[split.t0 :]

            cluster_size = None
            for vj, v in enumerate(variants):
                child = np.random.default_rng(seeds[ti, vj])
                try:
                    if v.name == "sc_full":
                        fit = sc_learn(
                            donors, split, observed_pre, v.rule, v.reg,
                            donor_ids=donor_ids,
                        )
                    elif v.name == "cluster_sc":
                        model = models[(v.rule, v.k)]
                        label = assign_target(model, observed_pre)
                        members = np.flatnonzero(model.assignments.labels == label)
                        if members.size < 2:
                            raise DegenerateClusterError(label, int(members.size))
                        fit = sc_learn(
                            donors[members], split, observed_pre, v.rule, v.reg,
                            donor_ids=[donor_ids[i] for i in members],
                            cluster_label=label,
                        )
                        cluster_size = len(fit.donor_ids)
                    else:
                        if cluster_size is None:
                            raise DegenerateClusterError(0, 0)
                        idx = random_subset_variant(donors, cluster_size, child)
                        fit = sc_learn(
                            donors[idx], split, observed_pre, v.rule, v.reg,
                            donor_ids=[donor_ids[i] for i in idx],
                        )
                except DegenerateClusterError as exc:
                    it_skipped.append(
                        {
                            "iteration": it,
                            "target_id": target_id,
                            "variant": v.name,
                            "reason": str(exc) if v.name == "cluster_sc"
                            else "paired cluster_sc run was skipped",
                        }
                    )
                    continue

                estimate = sc_infer(fit, split, target_full)
                pre_mse, post_mse = _fit_scores(
                    fit, estimate, split.t0, observed_pre, observed_post
                )
                it_rows.append(
                    PlaceboRow(
                        iteration=it,
                        target_id=target_id,
                        variant=v.name,
                        pre_mse=pre_mse,
                        post_mse=post_mse,
                        selected_donor_count=len(fit.donor_ids),
                        cluster_label=fit.cluster_label,
                    )
                )

        rows.extend(it_rows)
        skipped.extend(it_skipped)
        per_iteration.append(
            {
                "iteration": it,
                "n_targets": int(test_rows.size),
                "n_skipped_cells": len(_skipped_cells(it_skipped)),
                "medians": _medians_from_rows(it_rows, it_skipped),
                "improvements": _improvements_from_rows(it_rows, it_skipped),
            }
        )

    config = {
        "harness": "split",
        "train_fraction": train_fraction,
        "iterations": iterations,
        "n_train": n_train,
        "restarts": restarts,
        "k_range": list(k_range),
        "variants": [_variant_config(v) for v in variants],
    }
    return PlaceboReport(
        rows=rows,
        medians=_medians_from_rows(rows, skipped),
        improvements=_improvements_from_rows(rows, skipped),
        skipped=skipped,
        reference="observed",
        config=config,
        per_iteration=per_iteration,
    )


@dataclass
class GapExperimentResult:
    """Monte-Carlo estimate of the (r+1)-th singular value gap.

    Each trial draws a rank-r signal with the sinusoid generator, adds
    noise, and records sigma_{r+1} of the full matrix minus sigma_{r+1} of
    its first n_a rows. theoretical_bound is the Gaussian lower bound
    s * (sqrt(n) - sqrt(n_a) - 2 sqrt(T)) on the expected gap and is None
    for other noise kinds, where only positivity is claimed.
    precondition_ok reports whether n_a < n + 4T - 4 sqrt(nT) held, the
    regime the bound is stated for.
    """

    n: int
    n_a: int
    t_count: int
    rank_r: int
    noise: NoiseSpec
    trials: int
    gaps: list[float]
    empirical_mean_gap: float
    gap_std_error: float
    theoretical_bound: float | None
    precondition_ok: bool


def singular_gap_experiment(
    n: int,
    n_a: int,
    t_count: int,
    rank_r: int,
    noise: NoiseSpec,
    trials: int,
    rng,
) -> GapExperimentResult:
    """Measure sigma_{r+1}(full pool) - sigma_{r+1}(subgroup) over trials."""
    if not 1 <= rank_r < t_count:
        raise InvalidParamsError(
            f"need 1 <= rank_r < t_count, got rank_r={rank_r}, t_count={t_count}"
        )
    if not 1 <= n_a < n:
        raise InvalidParamsError(f"need 1 <= n_a < n, got n_a={n_a}, n={n}")
    if trials < 1:
        raise InvalidParamsError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(rng)

    spec = SignalSpec(rank_r, (2.0, 2.0), (1.0, 3.0), (0.0, 1.0))
    trial_seeds = rng.integers(0, SEED_CEILING, size=trials)
    gaps = []
    for seed in trial_seeds:
        trial_rng = np.random.default_rng(seed)
        signal = gen_group(spec, n, t_count, trial_rng)
        observed = signal + noise.sample(signal.shape, trial_rng)
        sigma_full = np.linalg.svd(observed, compute_uv=False)
        sigma_sub = np.linalg.svd(observed[:n_a], compute_uv=False)
        gaps.append(float(sigma_full[rank_r] - sigma_sub[rank_r]))

    bound = None
    if noise.kind == "gaussian":
        bound = noise.scale * (
            math.sqrt(n) - math.sqrt(n_a) - 2.0 * math.sqrt(t_count)
        )
    return GapExperimentResult(
        n=n,
        n_a=n_a,
        t_count=t_count,
        rank_r=rank_r,
        noise=noise,
        trials=trials,
        gaps=gaps,
        empirical_mean_gap=float(np.mean(gaps)),
        gap_std_error=std_error(gaps),
        theoretical_bound=bound,
        precondition_ok=bool(n_a < n + 4 * t_count - 4.0 * math.sqrt(n * t_count)),
    )


@dataclass
class RecoveryCell:
    """Recovery quality at one noise level, over datasets_per_cell panels.

    fractions holds per-dataset misassignment shares: the symmetric
    difference between the fitted partition and the planted two-group
    partition, divided by 2n. median_precisions holds, per dataset, the
    median over group-A units of their cluster's group-A share; the
    precision_one_share is the fraction of datasets where that median is
    exactly 1 (the cluster around a typical A unit contains only A units).
    """

    noise: NoiseSpec
    fractions: list[float]
    mean_fraction: float
    median_precisions: list[float]
    precision_one_share: float


@dataclass
class RecoveryResult:
    """Planted-partition recovery across a noise grid."""

    n_a: int
    n_b: int
    t_count: int
    t0: int
    k: int
    datasets_per_cell: int
    rule: RankRule
    cells: list[RecoveryCell]

    def mean_fractions(self) -> list[float]:
        return [cell.mean_fraction for cell in self.cells]


def cluster_recovery_experiment(
    spec_a: SignalSpec,
    spec_b: SignalSpec,
    n_a: int,
    n_b: int,
    t_count: int,
    t0: int,
    rule: RankRule,
    noise_grid,
    datasets_per_cell: int,
    rng,
    *,
    k: int = 2,
    restarts: int = 10,
) -> RecoveryResult:
    """How well clustering the pre block recovers the planted groups.

    For each noise level, datasets_per_cell panels are generated and
    clustered; the misassignment fraction compares the fitted partition to
    the planted one. Group sizes must be at least 2 so a perfect partition
    is a valid clustering.
    """
    noise_grid = list(noise_grid)
    if not noise_grid:
        raise InvalidParamsError("noise_grid must be nonempty")
    if datasets_per_cell < 1:
        raise InvalidParamsError(
            f"datasets_per_cell must be >= 1, got {datasets_per_cell}"
        )
    if min(n_a, n_b) < 2:
        raise InvalidParamsError("each group needs at least 2 units")
    rng = np.random.default_rng(rng)

    n = n_a + n_b
    truth = Partition(np.array([1] * n_a + [2] * n_b), k=2)
    a_slice = slice(0, n_a)
    seeds = rng.integers(0, SEED_CEILING, size=(len(noise_grid), datasets_per_cell, 2))

    cells = []
    for gi, noise in enumerate(noise_grid):
        fractions = []
        median_precisions = []
        for di in range(datasets_per_cell):
            dataset = gen_dataset(
                spec_a, spec_b, n_a, n_b, t_count, t0, noise, int(seeds[gi, di, 0])
            )
            model = fit_cluster_model(
                dataset.panel.pre,
                rule,
                k=k,
                rng=np.random.default_rng(seeds[gi, di, 1]),
                restarts=restarts,
            )
            distance = partition_symmetric_difference(truth, model.assignments)
            fractions.append(distance / (2 * n))

            labels = model.assignments.labels
            purity = {}
            for label in np.unique(labels):
                members = labels == label
                purity[int(label)] = float(members[a_slice].sum() / members.sum())
            median_precisions.append(
                float(np.median([purity[int(label)] for label in labels[a_slice]]))
            )
        cells.append(
            RecoveryCell(
                noise=noise,
                fractions=fractions,
                mean_fraction=float(np.mean(fractions)),
                median_precisions=median_precisions,
                precision_one_share=float(np.mean([p == 1.0 for p in median_precisions])),
            )
        )
    return RecoveryResult(
        n_a=n_a,
        n_b=n_b,
        t_count=t_count,
        t0=t0,
        k=k,
        datasets_per_cell=datasets_per_cell,
        rule=rule,
        cells=cells,
    )
