"""Batch front end: parse a TOML run configuration, dispatch to the library,
and serialize summary tables plus plot-ready columns.

A run is described by a single config file with a top-level ``subcommand``
(one of pool / evidence / combine / predict / elicit / regress / robustness /
asymptotics), optional ``seed`` and ``out`` keys, and one section named after
the subcommand holding its inputs.  The ``--subcommand``, ``--seed`` and
``--out`` flags override the file.  All randomness flows from the single
seed; outputs are pure functions of (config, fixtures, build).  The pooling
degree accepts decimal reals or the strings ``"inf"`` / ``"-inf"``.

Exit codes: 0 success, 2 configuration error, 3 failure inside the
dispatched operation.  Column orders of every emitted file are documented in
the README.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .distributions import FiniteDensity, FiniteModel, GridDensity, NormalConjugateSpec
from .elicitation import (
    ElicitationInput,
    RegressionPrior,
    elicit,
    gamma_cdf,
    normal_quantile,
)
from .ensembles import (
    conjugate_ensemble,
    jeffrey_posterior,
    mixture_rb,
    predict,
    resolve_weights,
)
from .evidence import relative_belief, rb_power_mean, summarize
from .pooling import (
    InferenceBase,
    PoolSpec,
    normal_location_bases,
    pool_constant,
    pool_priors,
    pooled_posterior,
    posterior_pool_weights,
)
from .regression import (
    ErrorFamily,
    MonteCarloConfig,
    beta2_evidence,
    load_zellner,
    model_weights_regression,
    preprocess,
)
from .studies import asymptotics_context1, asymptotics_context2, weight_robustness

__all__ = ["RunConfig", "ConfigError", "load_config", "run", "emit_table", "read_table", "main"]

SUBCOMMANDS = (
    "pool",
    "evidence",
    "combine",
    "predict",
    "elicit",
    "regress",
    "robustness",
    "asymptotics",
)


class ConfigError(Exception):
    """Configuration problem; the message names the offending key or line."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    seed: int
    out: Path
    options: dict

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(
                f"unknown subcommand {self.subcommand!r}; expected one of {', '.join(SUBCOMMANDS)}"
            )
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "out", Path(self.out))
        if not isinstance(self.options, dict):
            raise ConfigError(f"[{self.subcommand}] section must be a table of options")


# ---------------------------------------------------------------------------
# table serialization


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip form
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def emit_table(path, header, rows) -> Path:
    """Write one header row plus data rows as comma-separated values."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([str(h) for h in header])
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])
    return path


def read_table(path):
    """Inverse of emit_table: (header tuple, list of string-cell row tuples)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [tuple(row) for row in reader]
    if not rows:
        raise ValueError(f"{path}: empty table")
    return rows[0], rows[1:]


def _plausible_str(plausible) -> str:
    if not plausible:
        return ""
    if isinstance(plausible[0], tuple):
        return ";".join(f"{_fmt(lo)}..{_fmt(hi)}" for lo, hi in plausible)
    return ";".join(str(lab) for lab in plausible)


# ---------------------------------------------------------------------------
# config parsing


def _need(section: dict, key: str, anchor: str):
    if key not in section:
        raise ConfigError(f"[{anchor}] missing required key {key!r}")
    return section[key]


def _parse_t(value, anchor: str) -> float:
    if isinstance(value, str):
        if value in ("inf", "+inf"):
            return math.inf
        if value == "-inf":
            return -math.inf
        raise ConfigError(f"[{anchor}] t: expected a real or 'inf'/'-inf', got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{anchor}] t: expected a real or 'inf'/'-inf', got {value!r}")
    t = float(value)
    if math.isnan(t):
        raise ConfigError(f"[{anchor}] t: NaN is not a valid pooling degree")
    return t


def _parse_simplex(value, anchor: str, key: str = "alpha", size: int = None) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"[{anchor}] {key}: expected a list of reals") from None
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigError(f"[{anchor}] {key}: expected a non-empty list of reals")
    if size is not None and arr.size != size:
        raise ConfigError(f"[{anchor}] {key}: expected {size} entries, got {arr.size}")
    if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
        raise ConfigError(
            f"[{anchor}] {key}: must be a simplex; entries sum to {arr.sum()!r}"
        )
    return arr


def _parse_grid(value, anchor: str, key: str = "grid"):
    try:
        lo, hi, nodes = value
        lo, hi, nodes = float(lo), float(hi), int(nodes)
    except (TypeError, ValueError):
        raise ConfigError(f"[{anchor}] {key}: expected [lo, hi, nodes]") from None
    if not (hi > lo) or nodes < 2:
        raise ConfigError(f"[{anchor}] {key}: need hi > lo and at least 2 nodes")
    return np.linspace(lo, hi, nodes)


def _finite_model(section: dict, anchor: str) -> FiniteModel:
    theta = _need(section, "theta", anchor)
    outcomes = _need(section, "outcomes", anchor)
    table = _need(section, "table", anchor)
    try:
        return FiniteModel(tuple(theta), tuple(outcomes), table)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{anchor}] model: {e}") from None


def _prior_rows(section: dict, labels, anchor: str):
    rows = _need(section, "priors", anchor)
    try:
        return [FiniteDensity(labels, row) for row in rows]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{anchor}] priors: {e}") from None


def _conjugate_specs(section: dict, anchor: str):
    rows = _need(section, "specs", anchor)
    n = _need(section, "n", anchor)
    xbar = _need(section, "xbar", anchor)
    try:
        return [
            NormalConjugateSpec(float(mu), float(t2), float(s2), int(n), float(xbar))
            for mu, t2, s2 in rows
        ]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{anchor}] specs: {e}") from None


def _parse_families(values, anchor: str):
    fams = []
    for spec in values:
        if spec == "normal":
            fams.append(ErrorFamily.normal())
            continue
        if isinstance(spec, str) and spec.startswith("student:"):
            try:
                fams.append(ErrorFamily.student(float(spec.split(":", 1)[1])))
                continue
            except ValueError as e:
                raise ConfigError(f"[{anchor}] families: {e}") from None
        raise ConfigError(
            f"[{anchor}] families: expected 'normal' or 'student:<dof>', got {spec!r}"
        )
    return fams


def load_config(path, subcommand=None, seed=None, out=None) -> RunConfig:
    """Parse and validate a run configuration, applying flag overrides."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None

    sub = subcommand or raw.get("subcommand")
    if sub is None:
        raise ConfigError(f"{path}: no subcommand (config key 'subcommand' or --subcommand)")
    if sub not in SUBCOMMANDS:
        raise ConfigError(
            f"{path}: unknown subcommand {sub!r}; expected one of {', '.join(SUBCOMMANDS)}"
        )
    if seed is None:
        seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"{path}: seed must be an integer")
    if out is None:
        out = raw.get("out", ".")
    if sub not in raw:
        raise ConfigError(f"{path}: missing [{sub}] section for the requested subcommand")
    return RunConfig(subcommand=sub, seed=int(seed), out=Path(out), options=raw[sub])


# ---------------------------------------------------------------------------
# dispatchers


def _build_priors(opts: dict, anchor: str):
    """Grid-normal or finite-label prior ensemble from a config section."""
    if "grid" in opts:
        grid = _parse_grid(opts["grid"], anchor)
        normals = _need(opts, "normals", anchor)
        priors = []
        try:
            for mean, var in normals:
                if not var > 0:
                    raise ValueError(f"variance must be positive, got {var}")
                vals = stats.norm.pdf(grid, float(mean), math.sqrt(float(var)))
                priors.append(GridDensity.normalized(grid, vals))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[{anchor}] normals: {e}") from None
        return priors, grid
    labels = tuple(_need(opts, "labels", anchor))
    masses = _need(opts, "masses", anchor)
    try:
        return [FiniteDensity(labels, row) for row in masses], labels
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{anchor}] masses: {e}") from None


def _run_pool(opts: dict, seed: int, out: Path):
    t = _parse_t(_need(opts, "t", "pool"), "pool")
    priors, support = _build_priors(opts, "pool")
    alpha = _parse_simplex(_need(opts, "alpha", "pool"), "pool", size=len(priors))
    spec = PoolSpec(t, alpha)
    pooled = pool_priors(priors, spec)
    constant = pool_constant(priors, spec)

    summary = emit_table(
        out / "pool_summary.csv",
        ["t"] + [f"alpha_{i + 1}" for i in range(len(priors))] + ["c_t"],
        [tuple([t] + list(alpha) + [constant])],
    )
    values = pooled.masses if isinstance(pooled, FiniteDensity) else pooled.values
    prior_cols = [
        p.masses if isinstance(p, FiniteDensity) else p.values for p in priors
    ]
    rows = [
        tuple([s] + [col[i] for col in prior_cols] + [values[i]])
        for i, s in enumerate(support)
    ]
    density = emit_table(
        out / "pool_density.csv",
        ["support"] + [f"prior_{i + 1}" for i in range(len(priors))] + ["pooled"],
        rows,
    )
    return [summary, density]


def _summary_row(label, weight, summary):
    return (
        label,
        "" if weight is None else weight,
        "" if summary.estimate is None else summary.estimate,
        _plausible_str(summary.plausible),
        summary.prior_content,
        summary.posterior_content,
        "" if summary.strength is None else summary.strength,
    )


_SUMMARY_HEADER = (
    "label",
    "weight",
    "estimate",
    "plausible",
    "prior_content",
    "posterior_content",
    "strength",
)


def _run_evidence(opts: dict, seed: int, out: Path):
    model = _finite_model(_need(opts, "model", "evidence"), "evidence.model")
    priors = _prior_rows(opts, model.theta_labels, "evidence")
    t = _parse_t(_need(opts, "t", "evidence"), "evidence")
    alpha = _parse_simplex(_need(opts, "alpha", "evidence"), "evidence", size=len(priors))
    x = _need(opts, "x", "evidence")
    if x not in model.x_labels:
        raise ConfigError(f"[evidence] x: {x!r} is not an outcome of the model")
    psi0 = opts.get("psi0")
    if psi0 is not None and psi0 not in model.theta_labels:
        raise ConfigError(f"[evidence] psi0: {psi0!r} is not a parameter label")

    bases = [InferenceBase(model=model, prior=p, x=x) for p in priors]
    spec = PoolSpec(t, alpha)
    evfn = rb_power_mean(bases, spec)
    pooled_prior = pool_priors(priors, spec)
    pooled_post = pooled_posterior(bases, spec)
    pooled_summary = summarize(evfn, pooled_prior, pooled_post, psi0)
    weights = posterior_pool_weights(bases, PoolSpec(1.0, alpha))

    rows, rb_cols = [], []
    for i, b in enumerate(bases):
        rb_i = relative_belief(b.prior, b.posterior())
        rb_cols.append(rb_i.values)
        rows.append(_summary_row(f"base_{i + 1}", weights[i], summarize(rb_i, b.prior, b.posterior(), psi0)))
    rows.append(_summary_row("pooled", None, pooled_summary))
    summary = emit_table(out / "evidence_summary.csv", _SUMMARY_HEADER, rows)

    header = ["psi", "pooled_prior", "pooled_posterior", "rb_pooled"]
    header += [f"rb_base_{i + 1}" for i in range(len(bases))]
    data = [
        tuple(
            [lab, pooled_prior.masses[i], pooled_post.masses[i], evfn.values[i]]
            + [col[i] for col in rb_cols]
        )
        for i, lab in enumerate(model.theta_labels)
    ]
    rb_file = emit_table(out / "evidence_rb.csv", header, data)
    return [summary, rb_file]


def _run_combine(opts: dict, seed: int, out: Path):
    specs = _conjugate_specs(opts, "combine")
    alpha = _parse_simplex(
        opts.get("alpha", [1.0 / len(specs)] * len(specs)), "combine", size=len(specs)
    )
    nodes = int(opts.get("nodes", 2**12 + 1))
    span = float(opts.get("span", 8.0))
    psi0 = opts.get("psi0")
    ens = conjugate_ensemble(specs, alpha, nodes=nodes, span=span)
    w = resolve_weights(ens)
    evfn = mixture_rb(ens)
    jeff = jeffrey_posterior(ens)
    pooled_prior = pool_priors([b.prior for b in ens.bases], PoolSpec(1.0, ens.alpha))
    combined = summarize(evfn, pooled_prior, jeff, psi0)

    rows = [
        (f"base_{i + 1}", w[i], "", "", "", "", "")
        for i in range(len(specs))
    ]
    rows.append(_summary_row("combined", None, combined))
    summary = emit_table(out / "combine_summary.csv", _SUMMARY_HEADER, rows)

    rb_bases = [relative_belief(b.prior, b.posterior()) for b in ens.bases]
    header = ["psi", "pooled_prior", "jeffrey_posterior", "rb_combined"]
    header += [f"rb_base_{i + 1}" for i in range(len(specs))]
    grid = pooled_prior.grid
    data = [
        tuple(
            [grid[i], pooled_prior.values[i], jeff.values[i], evfn.values[i]]
            + [rb.values[i] for rb in rb_bases]
        )
        for i in range(grid.size)
    ]
    rb_file = emit_table(out / "combine_rb.csv", header, data)
    return [summary, rb_file]


def _run_predict(opts: dict, seed: int, out: Path):
    specs = _conjugate_specs(opts, "predict")
    alpha = _parse_simplex(
        opts.get("alpha", [1.0 / len(specs)] * len(specs)), "predict", size=len(specs)
    )
    mode = opts.get("mode", "finite")
    if mode not in ("finite", "limit"):
        raise ConfigError(f"[predict] mode: expected 'finite' or 'limit', got {mode!r}")
    mu_limit = opts.get("mu_limit")
    if mode == "limit" and mu_limit is None:
        raise ConfigError("[predict] mu_limit: required when mode = 'limit'")
    if mu_limit is not None:
        mu_limit = float(mu_limit)
    nodes = int(opts.get("nodes", 2**13 + 1))
    y_range = opts.get("y_range")
    if y_range is not None:
        lo, hi = (float(v) for v in y_range)
        y_range = (lo, hi)
    psi0 = opts.get("psi0")

    ens = conjugate_ensemble(specs, alpha)
    evfn, summary = predict(
        ens, mode=mode, mu_limit=mu_limit, nodes=nodes, y_range=y_range, psi0=psi0
    )
    if mode == "finite":
        w = resolve_weights(ens)
    else:
        raw = alpha * np.array(
            [stats.norm.pdf(float(mu_limit), s.mu, math.sqrt(s.tau2)) for s in specs]
        )
        w = raw / raw.sum()

    rows = [(f"base_{i + 1}", w[i], "", "", "", "", "") for i in range(len(specs))]
    rows.append(_summary_row("combined", None, summary))
    summary_file = emit_table(out / "predict_summary.csv", _SUMMARY_HEADER, rows)
    data = [(evfn.support[i], evfn.values[i]) for i in range(evfn.support.size)]
    rb_file = emit_table(out / "predict_rb.csv", ("y", "rb_combined"), data)
    return [summary_file, rb_file]


def _run_elicit(opts: dict, seed: int, out: Path):
    try:
        inp = ElicitationInput(
            gamma=float(_need(opts, "gamma", "elicit")),
            m0=float(_need(opts, "m0", "elicit")),
            s1=float(_need(opts, "s1", "elicit")),
            s2=float(_need(opts, "s2", "elicit")),
            zeta0=float(_need(opts, "zeta0", "elicit")),
        )
    except ValueError as e:
        raise ConfigError(f"[elicit] {e}") from None
    prior = elicit(inp)
    z_sq = normal_quantile((1.0 + inp.gamma) / 2.0) ** 2
    eq1 = gamma_cdf(prior.alpha1, 1.0, prior.alpha2 * z_sq / inp.s1**2) - (1 + inp.gamma) / 2
    eq2 = gamma_cdf(prior.alpha1, 1.0, prior.alpha2 * z_sq / inp.s2**2) - (1 - inp.gamma) / 2
    path = emit_table(
        out / "elicit_summary.csv",
        ("tau0", "alpha1", "alpha2", "interest_scale", "eq1_residual", "eq2_residual"),
        [(prior.tau0, prior.alpha1, prior.alpha2, prior.interest_scale(), eq1, eq2)],
    )
    return [path]


def _load_regression_data(opts: dict):
    source = opts.get("data", "zellner")
    if source == "zellner":
        _, income, investment = load_zellner()
        raw_x, raw_y = income, investment
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"[regress] data: fixture file {source!r} does not exist")
        cols = opts.get("columns", [0, 1])
        table = np.loadtxt(path, comments="#", ndmin=2)
        try:
            raw_x, raw_y = table[:, int(cols[0])], table[:, int(cols[1])]
        except IndexError:
            raise ConfigError(f"[regress] columns: {cols!r} outside the file's table") from None
    center = opts.get("center", [0.0, 0.0])
    try:
        c0, c1 = (float(v) for v in center)
    except (TypeError, ValueError):
        raise ConfigError("[regress] center: expected [intercept, slope]") from None
    return preprocess(raw_y, raw_x, (c0, c1))


def _run_regress(opts: dict, seed: int, out: Path):
    data = _load_regression_data(opts)
    tau0, a1, a2 = (float(v) for v in _need(opts, "prior", "regress"))
    try:
        prior = RegressionPrior(tau0, a1, a2)
    except ValueError as e:
        raise ConfigError(f"[regress] prior: {e}") from None
    draws = int(opts.get("draws", 100_000))
    ess_floor = float(opts.get("ess_floor", 500.0))
    mc = MonteCarloConfig(draws=draws, seed=seed, ess_floor=ess_floor)
    mode = opts.get("mode", "weights")

    if mode == "weights":
        fams = _parse_families(_need(opts, "families", "regress"), "regress")
        alpha = _parse_simplex(
            opts.get("alpha", [1.0 / len(fams)] * len(fams)), "regress", size=len(fams)
        )
        est = model_weights_regression(data, prior, fams, alpha, mc)
        path = emit_table(
            out / "regress_weights.csv",
            ("family", "weight", "std_error", "ess", "den_ess"),
            [
                (est.labels[i], est.weights[i], est.standard_errors[i], est.ess[i], est.den_ess[i])
                for i in range(len(est.labels))
            ],
        )
        return [path]
    if mode == "evidence":
        fams = _parse_families([opts.get("family", "normal")], "regress")
        grid = _parse_grid(opts["grid"], "regress") if "grid" in opts else None
        psi0 = opts.get("psi0")
        evfn, summary = beta2_evidence(data, prior, fams[0], grid=grid, mc=mc, psi0=psi0)
        summary_file = emit_table(
            out / "regress_summary.csv", _SUMMARY_HEADER, [_summary_row("slope", None, summary)]
        )
        prior_vals = prior.interest_prior_density(evfn.support)
        data_rows = [
            (evfn.support[i], prior_vals[i], prior_vals[i] * evfn.values[i], evfn.values[i])
            for i in range(evfn.support.size)
        ]
        rb_file = emit_table(
            out / "regress_rb.csv", ("psi", "prior", "posterior", "rb"), data_rows
        )
        return [summary_file, rb_file]
    raise ConfigError(f"[regress] mode: expected 'weights' or 'evidence', got {mode!r}")


def _robustness_bases(opts: dict):
    if "specs" in opts:
        return normal_location_bases(_conjugate_specs(opts, "robustness"))
    model = _finite_model(_need(opts, "model", "robustness"), "robustness.model")
    priors = _prior_rows(opts, model.theta_labels, "robustness")
    x = _need(opts, "x", "robustness")
    if x not in model.x_labels:
        raise ConfigError(f"[robustness] x: {x!r} is not an outcome of the model")
    return [InferenceBase(model=model, prior=p, x=x) for p in priors]


def _run_robustness(opts: dict, seed: int, out: Path):
    bases = _robustness_bases(opts)
    alpha0 = _parse_simplex(_need(opts, "alpha0", "robustness"), "robustness", key="alpha0", size=len(bases))
    concentration = float(_need(opts, "concentration", "robustness"))
    replicates = int(_need(opts, "replicates", "robustness"))
    psi0 = _need(opts, "psi0", "robustness")
    report = weight_robustness(bases, alpha0, concentration, replicates, psi0, seed)

    summary = emit_table(
        out / "robustness_summary.csv",
        (
            "baseline_verdict",
            "agreement",
            "prop_favor",
            "prop_against",
            "prop_none",
            "concentration",
            "replicates",
        ),
        [
            (
                report.baseline_verdict,
                report.agreement,
                report.verdict_proportions["favor"],
                report.verdict_proportions["against"],
                report.verdict_proportions["none"],
                report.concentration,
                report.replicates,
            )
        ],
    )
    k = report.weight_draws.shape[1]
    reps = emit_table(
        out / "robustness_replicates.csv",
        ["replicate", "verdict", "strength"] + [f"w{i + 1}" for i in range(k)],
        [
            tuple([r, report.verdicts[r], report.strengths[r]] + list(report.weight_draws[r]))
            for r in range(report.replicates)
        ],
    )
    return [summary, reps]


def _run_asymptotics(opts: dict, seed: int, out: Path):
    context = _need(opts, "context", "asymptotics")
    schedule = [int(n) for n in _need(opts, "schedule", "asymptotics")]
    replicates = int(_need(opts, "replicates", "asymptotics"))
    if context == 1:
        model = _finite_model(_need(opts, "model", "asymptotics"), "asymptotics.model")
        priors = _prior_rows(opts, model.theta_labels, "asymptotics")
        alpha = _parse_simplex(_need(opts, "alpha", "asymptotics"), "asymptotics", size=len(priors))
        theta_true = _need(opts, "theta_true", "asymptotics")
        t_grid = tuple(
            _parse_t(t, "asymptotics") for t in opts.get("t_grid", [0.0, 2.0])
        )
        traj = asymptotics_context1(
            model,
            priors,
            alpha,
            theta_true,
            schedule,
            replicates,
            seed,
            psi0=opts.get("psi0"),
            t_grid=t_grid,
        )
    elif context == 2:
        models = [
            _finite_model(sec, "asymptotics.models")
            for sec in _need(opts, "models", "asymptotics")
        ]
        if not models:
            raise ConfigError("[asymptotics] models: need at least one model table")
        priors = _prior_rows(opts, models[0].theta_labels, "asymptotics")
        alpha = _parse_simplex(_need(opts, "alpha", "asymptotics"), "asymptotics", size=len(models))
        true_probs = np.asarray(_need(opts, "true_probs", "asymptotics"), dtype=float)
        partition = opts.get("partition")
        if partition is not None:
            partition = tuple(tuple(cell) for cell in partition)
        traj = asymptotics_context2(
            models, priors, alpha, true_probs, schedule, replicates, seed, partition=partition
        )
    else:
        raise ConfigError(f"[asymptotics] context: expected 1 or 2, got {context!r}")

    k = traj.weights.shape[2]
    header = ["context", "tracked_psi", "rb_limit", "mass_limit", "weight_hit_rate"]
    header += [f"w_limit_{i + 1}" for i in range(k)]
    summary = emit_table(
        out / "asymptotics_summary.csv",
        header,
        [
            tuple(
                [context, traj.tracked_psi, traj.rb_limit, traj.mass_limit, traj.terminal_weight_hit_rate()]
                + list(traj.weight_limits)
            )
        ],
    )
    traj_header, traj_rows = traj.table()
    trajectory = emit_table(out / "asymptotics_trajectory.csv", traj_header, traj_rows)
    return [summary, trajectory]


_DISPATCH = {
    "pool": _run_pool,
    "evidence": _run_evidence,
    "combine": _run_combine,
    "predict": _run_predict,
    "elicit": _run_elicit,
    "regress": _run_regress,
    "robustness": _run_robustness,
    "asymptotics": _run_asymptotics,
}


def run(config: RunConfig):
    """Execute one validated run; returns the written file paths."""
    config.out.mkdir(parents=True, exist_ok=True)
    return _DISPATCH[config.subcommand](config.options, config.seed, config.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evidencepool",
        description="Batch runner: pool priors, combine evidence, and verify limits.",
    )
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--subcommand", choices=SUBCOMMANDS, help="override the config's subcommand")
    parser.add_argument("--seed", type=int, help="override the config's seed")
    parser.add_argument("--out", help="override the config's output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.subcommand, args.seed, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        paths = run(config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, ArithmeticError, OSError) as e:
        print(f"error in '{config.subcommand}': {e}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
