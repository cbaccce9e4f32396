"""Command-line runner: ``hydrodim {gaps,scan,subseq,dynamics,verify}``.

Every subcommand reads an INI config, writes CSV/JSON into ``--out`` and
exits 0 on success, 1 when a recorded check fails and 2 on a config error.
Outputs depend only on the config and the seed, not on ``--threads``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from .config import ConfigError, ExperimentConfig, defaults_text, load_config, parse_n_list
from .dimensions import (_jsonable, box_integral, correlation_sum, resolution_floor, scan,
                         subsequence_scan, upper_envelope_check)
from .measure import AtomicMeasure
from .oracle import (compare, euler_maclaurin_partial_sum, highprec_partial_sums,
                     naive_correlation_sum, power_tail, quad_box_integral)
from .spectra import family_from_dict
from .states import (BoundState, eigen_state, hybrid_state, power_state, random_state,
                     sigma_state, spectral_measure)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


def _dump_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _qtag(q: float) -> str:
    return f"q{q:g}"


def build_family(cfg: ExperimentConfig):
    try:
        return family_from_dict(cfg.family.as_spec())
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[family] {exc}") from exc


def build_state(cfg: ExperimentConfig, n_max: int | None = None) -> BoundState:
    """The configured state, optionally at a different truncation level."""
    st = cfg.state
    n_max = st.n_max if n_max is None else n_max
    try:
        if st.recipe == "power":
            return power_state(st.j, n_max, st.normalized)
        if st.recipe == "hybrid":
            prefix = power_state(st.j, max(st.k, 2)) if st.k > 1 else None
            state = hybrid_state(prefix, st.k, st.s, st.q_check, n_max)
        elif st.recipe == "sigma":
            base = power_state(st.j, st.base_n_max, normalized=True)
            state = sigma_state(base, st.j, st.sigma, n_max)
        elif st.recipe == "eigen":
            return eigen_state(st.level, n_max)
        elif st.recipe == "random":
            rng = np.random.default_rng(cfg.run.seed)
            return random_state(rng, n_max, (st.decay_min, st.decay_max), st.normalized)
        elif st.recipe == "csv":
            if st.path is None:
                raise ValueError("recipe 'csv' needs path")
            state = BoundState.from_csv(st.path)
        else:
            raise ValueError(f"unknown recipe {st.recipe!r}")
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[state] {exc}") from exc
    return state.normalize() if st.normalized else state


def run_gaps(cfg: ExperimentConfig, out: Path) -> int:
    family = build_family(cfg)
    n = np.arange(1, cfg.gaps.n_max + 1)
    try:
        gaps = family.gaps(cfg.gaps.n_max)
    except ValueError as exc:
        raise ConfigError(f"[gaps] {exc}") from exc
    scaled = n.astype(np.float64) ** family.gap_exponent * gaps
    with open(out / "gaps.csv", "w") as fh:
        fh.write("n,gap,scaled_gap\n")
        for row in zip(n.tolist(), gaps.tolist(), scaled.tolist()):
            fh.write(f"{row[0]},{row[1]:.17g},{row[2]:.17g}\n")
    return EXIT_OK


def _eps_grid(cfg: ExperimentConfig, mu: AtomicMeasure):
    sc = cfg.scan
    if sc.eps_max is None and sc.eps_min is None:
        return None
    top = sc.eps_max if sc.eps_max is not None else float(np.max(np.diff(mu.positions)))
    bottom = sc.eps_min if sc.eps_min is not None else resolution_floor(mu)
    if not 0 < bottom <= top:
        raise ConfigError("[scan] need 0 < eps_min <= eps_max")
    k = int(math.floor(math.log(bottom / top) / math.log(sc.ratio) + 1e-9))
    return top * sc.ratio ** np.arange(k + 1)


def run_scan(cfg: ExperimentConfig, out: Path) -> int:
    family = build_family(cfg)
    state = build_state(cfg)
    mu = spectral_measure(state, family)
    grid = _eps_grid(cfg, mu)
    floor = resolution_floor(mu)
    window = (cfg.scan.window_lo if cfg.scan.window_lo is not None else floor,
              cfg.scan.window_hi if cfg.scan.window_hi is not None else math.inf)
    ok = True
    for q in cfg.scan.q_values:
        res = scan(mu, q, grid, window, threads=cfg.run.threads)
        if q < 1:
            # every ball holds its own atom, so I <= sum w^q at any scale
            bound = math.fsum((mu.weights**q).tolist())
            res.checks["power_sum_bound"] = bound
            res.checks["power_sum_bound_holds"] = bool(np.all(res.I <= bound * (1 + 1e-12)))
            env = upper_envelope_check(res, family.dimension_ceiling, cfg.scan.ceiling_slack)
            res.checks["ceiling"] = env
            ok &= res.checks["power_sum_bound_holds"] and env["passed"]
        res.checks["state"] = state.provenance
        res.to_csv(out / f"scan_{_qtag(q)}.csv")
        res.write_summary(out / f"summary_{_qtag(q)}.json")
    return EXIT_OK if ok else EXIT_CHECK


def run_subseq(cfg: ExperimentConfig, out: Path) -> int:
    family = build_family(cfg)
    state = build_state(cfg)
    levels = cfg.scan.levels
    ok = True
    for q in cfg.scan.q_values:
        try:
            res = subsequence_scan(state, family, q, levels, threads=cfg.run.threads)
        except ValueError as exc:
            raise ConfigError(f"[scan] {exc}") from exc
        env = upper_envelope_check(res, family.dimension_ceiling, cfg.scan.ceiling_slack)
        res.checks["ceiling"] = env
        res.checks["form_gap"] = abs(res.regression_D("I") - res.regression_D("L"))
        res.checks["state"] = state.provenance
        ok &= env["passed"] and res.checks.get("lower_bound_holds", True)
        res.to_csv(out / f"subseq_{_qtag(q)}.csv")
        res.write_summary(out / f"subseq_summary_{_qtag(q)}.json")
    return EXIT_OK if ok else EXIT_CHECK


def run_dynamics(cfg: ExperimentConfig, out: Path) -> int:
    dc = cfg.dynamics
    family = build_family(cfg)
    if dc.initial == "eigen":
        state = eigen_state(dc.level, cfg.state.n_max)
    elif dc.initial == "state":
        state = build_state(cfg)
    else:
        raise ConfigError(f"[dynamics] unknown initial {dc.initial!r}")
    N = cfg.state.n_max
    a = np.zeros(N)
    a[: state.n_max] = state.normalize().amplitudes[:N]
    K = dc.k or N
    if not 1 <= K <= N:
        raise ConfigError(f"[dynamics] need 1 <= k <= n_max, got {K}")
    if dc.basis == "eigen":
        basis = dyn.Basis.eigen(N, K)
    elif dc.basis == "scrambled":
        basis = dyn.Basis.scrambled(N, K)
    elif dc.basis == "random_orthogonal":
        basis = dyn.Basis.random_orthogonal(N, K, cfg.run.seed)
    else:
        raise ConfigError(f"[dynamics] unknown basis {dc.basis!r}")

    levels = family.eigenvalues(N)
    t_sat = dyn.saturation_time(levels, a)
    t_end = dc.t_end if dc.t_end is not None else t_sat
    times = dyn.default_time_grid(t_end, dc.decades, dc.points_per_decade)
    trace = dyn.moment_trace(a, family, basis, dc.p, times, threads=cfg.run.threads)
    window = (dc.window_lo if dc.window_lo is not None else times[0],
              dc.window_hi if dc.window_hi is not None else min(times[-1], t_sat))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        exps = dyn.transport_exponents(trace, window)

    mass = trace.W.sum(axis=0)
    checks = {"mass_drift": float(np.max(np.abs(mass - mass[0]))),
              "gram_deviation": basis.gram_deviation()}
    ok = True
    if K == N:
        checks["mass_conserved"] = bool(checks["mass_drift"] <= 1e-10)
        ok &= checks["mass_conserved"]

    gsb = None
    if dc.initial == "state" and np.count_nonzero(a) > 1:
        q = 1.0 / (1.0 + dc.p)
        dim_state = build_state(cfg, n_max=dc.dimension_n_max)
        sub = subsequence_scan(dim_state, family, q, parse_n_list(dc.dimension_n_list),
                               threads=cfg.run.threads)
        gsb = dyn.gsb_check(exps["beta_plus_est"], sub.regression_D("I"), dc.gsb_slack)
        gsb["q"] = q
        checks["gsb"] = gsb
        if dc.gsb_gate:
            ok &= gsb["passed"]
    trace.to_csv(out / "trace.csv", include_w=dc.write_w)
    summary = {"p": trace.p, "saturation_time": t_sat, "K": K, "N": N, "basis": basis.kind,
               **exps, "gsb_margin": None if gsb is None else gsb["margin"], "checks": checks}
    _dump_json(out / "dynamics_summary.json", summary)
    return EXIT_OK if ok else EXIT_CHECK


def _lattice_measure(rng: np.random.Generator, n_atoms: int, unit: float = 2.0**-12):
    """Atoms on a dyadic lattice, so the quadrature grid can align with every breakpoint."""
    cells = rng.choice(4096, size=n_atoms, replace=False)
    mu = AtomicMeasure(cells * unit, rng.uniform(0.1, 1.0, n_atoms))
    eps = int(rng.integers(1, 200)) * unit
    span_units = int(round((mu.positions[-1] - mu.positions[0] + 2 * eps) / unit))
    grid = span_units
    while grid < 1000:
        grid *= 2
    return mu, eps, grid


def verify_reports(cfg: ExperimentConfig):
    """Yield one :class:`OracleReport` per oracle check of the corpus."""
    vc = cfg.verify
    rng = np.random.default_rng(cfg.run.seed)
    bump = 1.0 + 1e-4 if vc.inject_failure else 1.0

    for i in range(vc.trials):
        mu, eps, grid = _lattice_measure(rng, vc.n_atoms)
        q = float(rng.choice([0.3, 0.5, 0.7, 1.5, 2.0, 3.0]))
        val, conv, trail = quad_box_integral(mu, q, eps, grid_points=grid)
        yield compare(f"box_integral/quad/{i}", box_integral(mu, q, eps) * bump, val, 1e-6,
                      trail, conv)

    for i in range(vc.naive_trials):
        n = int(rng.integers(2, 200))
        mu = AtomicMeasure(np.sort(rng.uniform(-1, 1, n)), rng.uniform(0.01, 1, n))
        q = float(rng.uniform(0.1, 3.0))
        eps = float(10 ** rng.uniform(-4, 0.5))
        yield compare(f"correlation_sum/naive/{i}", correlation_sum(mu, q, eps) * bump,
                      naive_correlation_sum(mu, q, eps), 0.0)

    two = AtomicMeasure([0.0, 1.0], [0.5, 0.5])
    # 1200 cells put all four ball edges of the support [-0.1, 1.1] on cell boundaries
    val, conv, trail = quad_box_integral(two, 0.5, 0.1, grid_points=1200)
    yield compare("box_integral/quad/two_atoms", val, 2 * math.sqrt(2), 1e-6, trail, conv)
    one = AtomicMeasure([0.3], [1.0])
    val, conv, trail = quad_box_integral(one, 0.5, 0.01)
    yield compare("box_integral/quad/single_atom", val, 2.0, 1e-7, trail, conv)

    mu = AtomicMeasure(np.sort(rng.uniform(0, 1, 50)), rng.uniform(0.1, 1, 50))
    eps = 0.5 * resolution_floor(mu)
    iso = math.fsum((mu.weights**0.5).tolist())
    yield compare("correlation_sum/isolated", correlation_sum(mu, 0.5, eps) * bump, iso, 1e-12)
    yield compare("box_integral/isolated", box_integral(mu, 0.5, eps) * bump, 2 * iso, 1e-12)

    yield compare("partial_sum/r2_N4", highprec_partial_sums(2.0, [4])[0],
                  1 + 1 / 4 + 1 / 9 + 1 / 16, 1e-15)
    yield compare("partial_sum/euler_maclaurin", highprec_partial_sums(0.55, [2**18])[0],
                  euler_maclaurin_partial_sum(0.55, 2**18), 1e-8)
    yield compare("partial_sum/tail_integral", power_tail(1.1, 1000),
                  1000**-0.1 / 0.1, 1e-2)


def run_verify(cfg: ExperimentConfig, out: Path) -> int:
    passed = total = 0
    with open(out / "verify.jsonl", "w") as fh:
        for rep in verify_reports(cfg):
            line = json.dumps(_jsonable(rep.to_dict()), sort_keys=True)
            fh.write(line + "\n")
            print(line)
            total += 1
            passed += rep.passed
    print(f"verify: {passed}/{total} passed", file=sys.stderr)
    return EXIT_OK if passed == total else EXIT_CHECK


COMMANDS = {"gaps": run_gaps, "scan": run_scan, "subseq": run_subseq,
            "dynamics": run_dynamics, "verify": run_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hydrodim", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="INI file; defaults apply to missing keys")
    ap.add_argument("--out", type=Path, help="output directory (overrides [run] out)")
    ap.add_argument("--seed", type=int, help="seed for randomized components")
    ap.add_argument("--threads", type=int, help="worker threads for per-sample work")
    ap.add_argument("--print-defaults", action="store_true",
                    help="print the default configuration and exit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(defaults_text())
        return EXIT_OK
    if args.command is None:
        print("hydrodim: a command is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            cfg.run.seed = args.seed
        if args.threads is not None:
            cfg.run.threads = args.threads
        if cfg.run.threads < 1:
            raise ConfigError("threads must be at least 1")
        needs_seed = cfg.randomized or args.command == "verify"
        if needs_seed and cfg.run.seed is None:
            raise ConfigError("a seed is required for randomized components (--seed)")
        out = args.out if args.out is not None else Path(cfg.run.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"hydrodim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
