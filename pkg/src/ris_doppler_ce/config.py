"""Scenario parameters, validation, and the published default setup.

Config files are flat JSON objects (UTF-8 text, conventionally ``*.cfg``)
whose keys are exactly ``CONFIG_KEYS``.  ``tx_power_dbm`` is either a number
or an inclusive sweep object ``{"start": .., "stop": .., "step": ..}`` in
dBm.  Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class ConfigError(ValueError):
    """Config file parse failure or invariant violation."""


def db_to_linear(db: float) -> float:
    """dB ratio -> linear ratio."""
    return 10.0 ** (db / 10.0)


def dbm_to_milliwatts(dbm: float) -> float:
    """dBm power -> linear milliwatts."""
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM numerology. n_subcarriers must equal 12 * n_rbs."""

    n_subcarriers: int
    n_rbs: int
    scs_hz: float
    cp_len: int

    @property
    def symbol_duration_s(self) -> float:
        # one OFDM symbol including its cyclic prefix
        return (1.0 + self.cp_len / self.n_subcarriers) / self.scs_hz


@dataclass(frozen=True)
class GeometryConfig:
    """Node distances, path-loss exponents, and the carrier."""

    d_ur_m: float
    d_rg_m: float
    d_ug_m: float
    ple_ur: float
    ple_rg: float
    ple_ug: float
    fc_hz: float

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.fc_hz


@dataclass(frozen=True)
class PowerSweep:
    """Inclusive transmit-power sweep in dBm, start..stop in steps of step."""

    start: float
    stop: float
    step: float

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + k * self.step for k in range(n)]


@dataclass(frozen=True)
class SimConfig:
    """Full simulation setup: numerology, geometry, surface, channel, power."""

    ofdm: OfdmConfig
    geometry: GeometryConfig
    n_ris_elements: int
    n_subsurfaces: int
    l_taps: int
    eta: float
    velocity_mps: float
    noise_dbm: float
    processing_gain_db: float
    tx_power_dbm: float | PowerSweep
    threshold: float
    seed: int
    n_runs: int


# flat file schema, in serialization order
CONFIG_KEYS = (
    "n_subcarriers",
    "n_rbs",
    "scs_hz",
    "cp_len",
    "fc_hz",
    "d_ur_m",
    "d_rg_m",
    "d_ug_m",
    "ple_ur",
    "ple_rg",
    "ple_ug",
    "n_ris_elements",
    "n_subsurfaces",
    "l_taps",
    "eta",
    "velocity_mps",
    "noise_dbm",
    "processing_gain_db",
    "tx_power_dbm",
    "threshold",
    "seed",
    "n_runs",
)


def validate(cfg: SimConfig) -> None:
    """Raise ConfigError naming the violated invariant."""
    ofdm, geo = cfg.ofdm, cfg.geometry
    if ofdm.n_subcarriers != 12 * ofdm.n_rbs:
        raise ConfigError(
            f"n_subcarriers must equal 12 * n_rbs, got {ofdm.n_subcarriers} "
            f"vs 12 * {ofdm.n_rbs}"
        )
    if ofdm.scs_hz <= 0:
        raise ConfigError("scs_hz must be positive")
    if ofdm.cp_len <= cfg.l_taps:
        raise ConfigError(
            f"cp_len must exceed l_taps, got cp_len={ofdm.cp_len} l_taps={cfg.l_taps}"
        )
    if geo.fc_hz <= 0:
        raise ConfigError("fc_hz must be positive")
    for name in ("d_ur_m", "d_rg_m", "d_ug_m"):
        if getattr(geo, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    for name in ("ple_ur", "ple_rg", "ple_ug"):
        if getattr(geo, name) < 1.0:
            raise ConfigError(f"{name} must be >= 1")
    if cfg.n_ris_elements < 1 or cfg.n_subsurfaces < 1:
        raise ConfigError("n_ris_elements and n_subsurfaces must be >= 1")
    if cfg.n_ris_elements % cfg.n_subsurfaces != 0:
        raise ConfigError(
            f"n_ris_elements not divisible by n_subsurfaces "
            f"({cfg.n_ris_elements} / {cfg.n_subsurfaces})"
        )
    if cfg.n_subsurfaces + 1 > ofdm.n_subcarriers:
        raise ConfigError(
            "n_subsurfaces + 1 training symbols exceed the symbol budget "
            f"({cfg.n_subsurfaces + 1} > {ofdm.n_subcarriers})"
        )
    if cfg.l_taps < 1:
        raise ConfigError("l_taps must be >= 1")
    if cfg.eta < 0:
        raise ConfigError("eta must be >= 0")
    if cfg.velocity_mps < 0:
        raise ConfigError("velocity_mps must be >= 0")
    if not 0.0 < cfg.threshold <= 1.0:
        raise ConfigError(f"threshold must lie in (0, 1], got {cfg.threshold}")
    if cfg.n_runs < 1:
        raise ConfigError("n_runs must be >= 1")
    if isinstance(cfg.tx_power_dbm, PowerSweep):
        sw = cfg.tx_power_dbm
        if sw.step <= 0:
            raise ConfigError("tx_power_dbm sweep step must be positive")
        if sw.stop < sw.start:
            raise ConfigError("tx_power_dbm sweep stop must be >= start")


def paper_preset() -> SimConfig:
    """Default setup: 16 RBs at 30 kHz / 28 GHz, 576-element surface in 16
    sub-surfaces, 6-tap links, UE at 10 m/s."""
    cfg = SimConfig(
        ofdm=OfdmConfig(n_subcarriers=192, n_rbs=16, scs_hz=30e3, cp_len=16),
        geometry=GeometryConfig(
            d_ur_m=5.0,
            d_rg_m=50.0,
            d_ug_m=160.0,
            ple_ur=2.0,
            ple_rg=2.1,
            ple_ug=3.5,
            fc_hz=28e9,
        ),
        n_ris_elements=576,
        n_subsurfaces=16,
        l_taps=6,
        eta=0.1,
        velocity_mps=10.0,
        noise_dbm=-106.0,
        processing_gain_db=40.0,
        tx_power_dbm=10.0,
        threshold=0.1,
        seed=1,
        n_runs=200,
    )
    validate(cfg)
    return cfg


def _config_from_mapping(data: dict) -> SimConfig:
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    missing = [k for k in CONFIG_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")

    tx = data["tx_power_dbm"]
    if isinstance(tx, dict):
        extra = sorted(set(tx) - {"start", "stop", "step"})
        if extra:
            raise ConfigError(
                f"tx_power_dbm sweep has unknown key(s): {', '.join(extra)}"
            )
        try:
            tx = PowerSweep(
                float(tx["start"]), float(tx["stop"]), float(tx["step"])
            )
        except KeyError as exc:
            raise ConfigError(f"tx_power_dbm sweep missing key {exc}") from None
    elif isinstance(tx, (int, float)) and not isinstance(tx, bool):
        tx = float(tx)
    else:
        raise ConfigError(
            "tx_power_dbm must be a number or a {start, stop, step} object"
        )

    def _num(key: str) -> float:
        v = data[key]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{key} must be a number, got {v!r}")
        return float(v)

    def _int(key: str) -> int:
        v = data[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{key} must be an integer, got {v!r}")
        return v

    cfg = SimConfig(
        ofdm=OfdmConfig(
            n_subcarriers=_int("n_subcarriers"),
            n_rbs=_int("n_rbs"),
            scs_hz=_num("scs_hz"),
            cp_len=_int("cp_len"),
        ),
        geometry=GeometryConfig(
            d_ur_m=_num("d_ur_m"),
            d_rg_m=_num("d_rg_m"),
            d_ug_m=_num("d_ug_m"),
            ple_ur=_num("ple_ur"),
            ple_rg=_num("ple_rg"),
            ple_ug=_num("ple_ug"),
            fc_hz=_num("fc_hz"),
        ),
        n_ris_elements=_int("n_ris_elements"),
        n_subsurfaces=_int("n_subsurfaces"),
        l_taps=_int("l_taps"),
        eta=_num("eta"),
        velocity_mps=_num("velocity_mps"),
        noise_dbm=_num("noise_dbm"),
        processing_gain_db=_num("processing_gain_db"),
        tx_power_dbm=tx,
        threshold=_num("threshold"),
        seed=_int("seed"),
        n_runs=_int("n_runs"),
    )
    validate(cfg)
    return cfg


def loads_config(text: str) -> SimConfig:
    """Parse config text; raise ConfigError with line context on bad JSON."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object of key-value pairs")
    return _config_from_mapping(data)


def load_config(path: str) -> SimConfig:
    """Load and validate a config file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def serialize(cfg: SimConfig) -> str:
    """Serialize to config-file text; loads_config(serialize(c)) == c."""
    tx = cfg.tx_power_dbm
    if isinstance(tx, PowerSweep):
        tx_out: float | dict = {"start": tx.start, "stop": tx.stop, "step": tx.step}
    else:
        tx_out = tx
    out = {
        "n_subcarriers": cfg.ofdm.n_subcarriers,
        "n_rbs": cfg.ofdm.n_rbs,
        "scs_hz": cfg.ofdm.scs_hz,
        "cp_len": cfg.ofdm.cp_len,
        "fc_hz": cfg.geometry.fc_hz,
        "d_ur_m": cfg.geometry.d_ur_m,
        "d_rg_m": cfg.geometry.d_rg_m,
        "d_ug_m": cfg.geometry.d_ug_m,
        "ple_ur": cfg.geometry.ple_ur,
        "ple_rg": cfg.geometry.ple_rg,
        "ple_ug": cfg.geometry.ple_ug,
        "n_ris_elements": cfg.n_ris_elements,
        "n_subsurfaces": cfg.n_subsurfaces,
        "l_taps": cfg.l_taps,
        "eta": cfg.eta,
        "velocity_mps": cfg.velocity_mps,
        "noise_dbm": cfg.noise_dbm,
        "processing_gain_db": cfg.processing_gain_db,
        "tx_power_dbm": tx_out,
        "threshold": cfg.threshold,
        "seed": cfg.seed,
        "n_runs": cfg.n_runs,
    }
    return json.dumps(out, indent=2) + "\n"
