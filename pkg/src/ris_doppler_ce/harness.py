"""Monte-Carlo harness: scenario runners, aggregation, delimited output.

Each run r derives its generator from (master seed, r) alone, so runs are
independent of execution order and worker count, and sweep points share
common random numbers.  Aggregation walks runs in index order, making
serial and parallel execution byte-identical.

Noise bookkeeping: ``noise_dbm`` is the total in-band noise power.  The
pilot path works in the unit-modulus-pilot domain, where the per-subcarrier
noise variance is lin(noise_dbm - processing_gain_db - tx_power_dbm): both
the per-subcarrier transmit power and the per-subcarrier noise carry a 1/N
that cancels.  The rate path uses the physical per-subcarrier receiver
noise lin(noise_dbm - processing_gain_db)/N against transmit power P/N.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import (
    draw_linkset,
    evolve_ue_motion,
    gen_single_path,
    link_budget_db,
)
from .config import (
    ConfigError,
    PowerSweep,
    SimConfig,
    db_to_linear,
    dbm_to_milliwatts,
)
from .estimators import (
    SuperimposedEstimates,
    bm1_estimate,
    bm2_estimate,
    dsa_estimate,
    per_symbol_cfr,
    single_path_estimate,
)
from .metrics import (
    achievable_rate,
    nmse,
    rate_from_cfr,
    rate_ratio,
    strongest_tap_beam,
)
from .signal import (
    RxSymbol,
    awgn,
    dft_reflection_pattern,
    receive_symbol,
    single_on_pattern,
    zadoff_chu,
)

CSV_HEADER = "scenario,param,value,scheme,metric,mean,stderr,n_runs,seed"

POWER_GRID_DEFAULT = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
ETA_GRID_DEFAULT = (0.1, 0.25, 0.5, 0.75, 1.0)
M_GRID_DEFAULT = (16, 64, 144)

_SCHEME_ORDER = ("bm1", "bm2", "proposed", "perfect")
_METRIC_ORDER = ("nmse", "rate_bpshz", "rate_ratio", "latency_symbols")


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    param: str
    value: float
    scheme: str
    metric: str
    mean: float
    stderr: float
    n_runs: int
    seed: int


@dataclass
class SweepResult:
    """Aggregated sweep output, row order fixed by (value, scheme, metric)."""

    rows: list[SweepRow]

    def csv_text(self) -> str:
        out = [CSV_HEADER]
        for r in self.rows:
            out.append(
                f"{r.scenario},{r.param},{_fmt(r.value)},{r.scheme},{r.metric},"
                f"{_fmt(r.mean)},{_fmt(r.stderr)},{r.n_runs},{r.seed}"
            )
        return "\n".join(out) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.csv_text())


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Generator for one run, derived from (master seed, run index) only."""
    return np.random.default_rng([seed, run_index])


def pilot_noise_var(cfg: SimConfig, tx_power_dbm: float) -> float:
    """Per-subcarrier noise variance in the unit-pilot domain."""
    return db_to_linear(cfg.noise_dbm - cfg.processing_gain_db - tx_power_dbm)


def rx_noise_var_mw(cfg: SimConfig) -> float:
    """Physical per-subcarrier receiver noise (mW) after processing gain."""
    return dbm_to_milliwatts(
        cfg.noise_dbm - cfg.processing_gain_db
    ) / cfg.ofdm.n_subcarriers


def _require_scalar_tx(cfg: SimConfig, scenario: str) -> float:
    if isinstance(cfg.tx_power_dbm, PowerSweep):
        raise ConfigError(f"scenario {scenario} requires a scalar tx_power_dbm")
    return float(cfg.tx_power_dbm)


def _multipath_run(cfg: SimConfig, run_index: int) -> dict[tuple[str, str], float]:
    """One multi-path Monte-Carlo run; returns (scheme, metric) -> value."""
    tx = float(cfg.tx_power_dbm)
    rng = run_rng(cfg.seed, run_index)
    m = cfg.n_subsurfaces
    n = cfg.ofdm.n_subcarriers
    lam = cfg.geometry.wavelength_m
    dt = cfg.ofdm.symbol_duration_s
    v = cfg.velocity_mps
    theta = dft_reflection_pattern(m)
    pilot = zadoff_chu(n)
    sigma = pilot_noise_var(cfg, tx)

    links = draw_linkset(cfg, rng)
    truth_q1 = None
    cols = []
    # symbols 0..M+1: the extra symbol 0 repeats training column 0
    for i in range(m + 2):
        if i > 0:
            links = evolve_ue_motion(links, v, dt, lam)
        if i == 1:
            truth_q1 = links
        phi = theta.phi_column(0 if i == 0 else i - 1)
        rx = receive_symbol(links, phi, pilot, sigma, rng, symbol_index=i)
        cols.append(per_symbol_cfr(rx, pilot))
    links_data = evolve_ue_motion(links, v, dt, lam)  # first data symbol

    est = SuperimposedEstimates(np.column_stack(cols))
    res_bm1 = bm1_estimate(est.h_hat[:, 1:], theta)
    res_bm2 = bm2_estimate(est, theta, q=1)
    res_prop = dsa_estimate(est, theta, cfg.threshold, q=1)

    truth_urg = truth_q1.cascade_cfrs()
    out: dict[tuple[str, str], float] = {
        ("bm1", "nmse"): nmse(res_bm1.h_urg_hat, truth_urg),
        ("bm2", "nmse"): nmse(res_bm2.h_urg_hat, truth_urg),
        ("proposed", "nmse"): nmse(res_prop.h_urg_hat, truth_urg),
        ("bm1", "latency_symbols"): float(res_bm1.symbols_used),
        ("bm2", "latency_symbols"): float(res_bm2.symbols_used),
        ("proposed", "latency_symbols"): float(res_prop.symbols_used),
    }

    # rate leg: re-reference the adjustable schemes to the freshest symbol
    q_rate = m + 1
    res_bm2_r = bm2_estimate(est, theta, q=q_rate)
    res_prop_r = dsa_estimate(est, theta, cfg.threshold, q=q_rate)
    nv = rx_noise_var_mw(cfg)

    def _rate(res) -> float:
        beam = strongest_tap_beam(res.h_ug_hat, res.h_urg_hat)
        return achievable_rate(links_data, beam, tx, nv)

    r_bm1 = _rate(res_bm1)
    r_bm2 = _rate(res_bm2_r)
    r_prop = _rate(res_prop_r)
    perf_beam = strongest_tap_beam(
        links_data.direct_cfr(), links_data.cascade_cfrs()
    )
    r_perf = achievable_rate(links_data, perf_beam, tx, nv)

    out[("bm1", "rate_bpshz")] = r_bm1
    out[("bm2", "rate_bpshz")] = r_bm2
    out[("proposed", "rate_bpshz")] = r_prop
    out[("perfect", "rate_bpshz")] = r_perf
    out[("bm1", "rate_ratio")] = rate_ratio(r_bm1, r_perf)
    out[("bm2", "rate_ratio")] = rate_ratio(r_bm2, r_perf)
    out[("proposed", "rate_ratio")] = rate_ratio(r_prop, r_perf)
    return out


def _singlepath_run(cfg: SimConfig, run_index: int) -> dict[tuple[str, str], float]:
    """One single-dominant-path run over the square grid; no direct link."""
    tx = float(cfg.tx_power_dbm)
    rng = run_rng(cfg.seed, run_index)
    m = cfg.n_subsurfaces
    n = cfg.ofdm.n_subcarriers
    lam = cfg.geometry.wavelength_m
    dt = cfg.ofdm.symbol_duration_s

    ch, _, _, _, vec_unit = gen_single_path(cfg, rng)
    _, pl_ur, pl_rg = link_budget_db(cfg)
    amp = 10.0 ** (-(pl_ur + pl_rg) / 20.0)
    cascade0 = amp * vec_unit

    travel_angle = rng.uniform(0.0, 2.0 * math.pi)
    dpsi = 2.0 * math.pi * cfg.velocity_mps * dt * math.cos(travel_angle) / lam

    pilot = zadoff_chu(n)
    sigma = pilot_noise_var(cfg, tx)
    side = ch.m_side
    # pilot 0/1: grid corner (0,0); pilot 2: row neighbor (1,0); pilot 3:
    # column neighbor (0,1); row-major flat indices
    ons = (0, 0, side, 1)
    ys = []
    for i, on in enumerate(ons):
        phi = single_on_pattern(m, on)
        h_flat = complex((cascade0 * np.exp(1j * dpsi * i)) @ phi)
        y = pilot.x * h_flat + awgn(n, sigma, rng)
        ys.append(RxSymbol(y=y, symbol_index=i, pattern_used=phi))

    est = single_path_estimate(ys, pilot, side, reference_symbol=1)
    truth_ref = cascade0 * np.exp(1j * dpsi * 1)
    nmse_val = nmse(est.cascade_hat, truth_ref)

    nv = rx_noise_var_mw(cfg)
    truth_data = cascade0 * np.exp(1j * dpsi * 4)  # first symbol after CE
    beam = np.exp(-1j * np.angle(est.cascade_hat))
    h_eff = complex(truth_data @ beam)
    r_est = rate_from_cfr(np.full(n, h_eff), tx, nv)
    h_perf = complex(truth_data @ np.exp(-1j * np.angle(truth_data)))
    r_perf = rate_from_cfr(np.full(n, h_perf), tx, nv)

    return {
        ("proposed", "nmse"): nmse_val,
        ("proposed", "rate_bpshz"): r_est,
        ("perfect", "rate_bpshz"): r_perf,
        ("proposed", "rate_ratio"): rate_ratio(r_est, r_perf),
        ("proposed", "latency_symbols"): float(est.symbols_used),
    }


def _multipath_task(args):
    cfg, run_index = args
    return _multipath_run(cfg, run_index)


def _singlepath_task(args):
    cfg, run_index = args
    return _singlepath_run(cfg, run_index)


def _map_tasks(task_fn, tasks, jobs: int):
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1:
        return [task_fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(task_fn, tasks, chunksize=8))


def _aggregate(
    scenario: str,
    param: str,
    values,
    point_results,
    n_runs: int,
    seed: int,
) -> SweepResult:
    rows = []
    for value, run_dicts in zip(values, point_results):
        keys = run_dicts[0].keys()
        for scheme in _SCHEME_ORDER:
            for metric in _METRIC_ORDER:
                if (scheme, metric) not in keys:
                    continue
                arr = np.array([d[(scheme, metric)] for d in run_dicts])
                mean = float(arr.mean())
                stderr = (
                    float(arr.std(ddof=1) / math.sqrt(arr.size))
                    if arr.size > 1
                    else 0.0
                )
                rows.append(
                    SweepRow(
                        scenario=scenario,
                        param=param,
                        value=float(value),
                        scheme=scheme,
                        metric=metric,
                        mean=mean,
                        stderr=stderr,
                        n_runs=n_runs,
                        seed=seed,
                    )
                )
    return SweepResult(rows=rows)


def run_multipath(
    cfg: SimConfig,
    sweep: str,
    values=None,
    n_runs: int | None = None,
    seed: int | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Monte-Carlo sweep over transmit power ("power") or the non-dominant
    power ratio ("eta") for the three multi-path schemes plus perfect CSI."""
    n_runs = cfg.n_runs if n_runs is None else int(n_runs)
    seed = cfg.seed if seed is None else int(seed)
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if sweep == "power":
        scenario, param = "multipath-power", "tx_power_dbm"
        if values is None:
            tx = cfg.tx_power_dbm
            values = (
                tx.values() if isinstance(tx, PowerSweep) else POWER_GRID_DEFAULT
            )
        point_cfgs = [
            replace(cfg, tx_power_dbm=float(p), seed=seed, n_runs=n_runs)
            for p in values
        ]
    elif sweep == "eta":
        scenario, param = "multipath-eta", "eta"
        tx = _require_scalar_tx(cfg, scenario)
        if values is None:
            values = ETA_GRID_DEFAULT
        point_cfgs = [
            replace(cfg, eta=float(e), tx_power_dbm=tx, seed=seed, n_runs=n_runs)
            for e in values
        ]
    else:
        raise ValueError(f"unknown sweep {sweep!r}; use 'power' or 'eta'")

    tasks = [(pc, r) for pc in point_cfgs for r in range(n_runs)]
    flat = _map_tasks(_multipath_task, tasks, jobs)
    point_results = [
        flat[i * n_runs : (i + 1) * n_runs] for i in range(len(point_cfgs))
    ]
    return _aggregate(scenario, param, values, point_results, n_runs, seed)


def run_singlepath(
    cfg: SimConfig,
    m_list=None,
    n_runs: int | None = None,
    seed: int | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Monte-Carlo sweep over the sub-surface count for the four-pilot
    single-path scheme plus perfect CSI."""
    n_runs = cfg.n_runs if n_runs is None else int(n_runs)
    seed = cfg.seed if seed is None else int(seed)
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    tx = _require_scalar_tx(cfg, "singlepath-m")
    if m_list is None:
        m_list = M_GRID_DEFAULT
    point_cfgs = [
        replace(
            cfg, n_subsurfaces=int(mm), tx_power_dbm=tx, seed=seed, n_runs=n_runs
        )
        for mm in m_list
    ]
    tasks = [(pc, r) for pc in point_cfgs for r in range(n_runs)]
    flat = _map_tasks(_singlepath_task, tasks, jobs)
    point_results = [
        flat[i * n_runs : (i + 1) * n_runs] for i in range(len(point_cfgs))
    ]
    return _aggregate("singlepath-m", "m", m_list, point_results, n_runs, seed)
