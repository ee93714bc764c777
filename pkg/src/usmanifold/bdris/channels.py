"""Scenario description and channel generation for BD-RIS assisted MIMO links.

The equivalent channel is ``H_d + F Theta G^H`` with ``F`` (N_r x M) from
the surface to the receiver, ``G`` (N_t x M) from the transmitter to the
surface and ``H_d`` (N_r x N_t) the direct link.

Surface links are Rician: a deterministic rank-one line-of-sight term built
from half-wavelength uniform linear array responses (Tx/Rx arrays along the
y axis, surface array along the x axis) plus i.i.d. CN(0, 1) scattering.
The direct link is Rayleigh. Every link is scaled by the amplitude factor
``10 ** (-PL / 20)`` with ``PL = PL0 + 10 alpha log10(d)`` dB.
"""
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ..errors import DimensionError, FormatError, InvalidInput
from ..linalg import as_cmatrix

__all__ = [
    "Scenario", "MimoChannel", "gen_channels", "los_components", "h_eq",
    "path_loss_db", "noise_power_dbm", "read_scenario", "write_scenario",
]

BLOCKED_ALPHA = 8.0


@dataclass(frozen=True)
class Scenario:
    n_t: int = 2
    n_r: int = 2
    m: int = 16
    tx_pos: tuple = (0.0, 0.0, 1.5)
    rx_pos: tuple = (50.0, 0.0, 1.5)
    ris_pos: tuple = (50.0, 3.0, 3.0)
    rician_k: float = 3.0
    alpha_ris: float = 2.0
    alpha_direct: float = 3.75
    pl0_db: float = 28.0
    carrier_hz: float = 2.4e9
    bandwidth_hz: float = 20e6
    tx_power_mw: float = 100.0
    noise_psd_dbm_hz: float = -174.0

    def __post_init__(self):
        for name in ("n_t", "n_r", "m"):
            if int(getattr(self, name)) < 1:
                raise InvalidInput(f"{name} must be at least 1")
        for name in ("tx_pos", "rx_pos", "ris_pos"):
            pos = tuple(float(x) for x in getattr(self, name))
            if len(pos) != 3:
                raise InvalidInput(f"{name} must have three coordinates")
            object.__setattr__(self, name, pos)
        for name in ("alpha_ris", "alpha_direct", "carrier_hz", "bandwidth_hz", "tx_power_mw"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if not self.rician_k >= 0:
            raise InvalidInput("rician_k must be non-negative")

    def blocked(self):
        """Same scenario with the direct link blocked."""
        return replace(self, alpha_direct=BLOCKED_ALPHA)

    @property
    def noise_dbm(self):
        return noise_power_dbm(self.noise_psd_dbm_hz, self.bandwidth_hz)

    @property
    def snr_linear(self):
        return self.tx_power_mw / 10 ** (self.noise_dbm / 10)


@dataclass(frozen=True)
class MimoChannel:
    h_d: np.ndarray
    f: np.ndarray
    g: np.ndarray
    snr_linear: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        h_d, f, g = (as_cmatrix(x) for x in (self.h_d, self.f, self.g))
        if f.shape[1] != g.shape[1]:
            raise DimensionError(f"F has {f.shape[1]} surface ports, G has {g.shape[1]}")
        if h_d.shape != (f.shape[0], g.shape[0]):
            raise DimensionError(f"H_d shape {h_d.shape} != ({f.shape[0]}, {g.shape[0]})")
        if not self.snr_linear > 0:
            raise InvalidInput("snr_linear must be positive")
        object.__setattr__(self, "h_d", h_d)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    @property
    def m(self):
        return self.f.shape[1]

    @property
    def n_r(self):
        return self.f.shape[0]

    @property
    def n_t(self):
        return self.g.shape[0]

    def with_snr(self, snr_linear):
        return replace(self, snr_linear=snr_linear)


def path_loss_db(d, alpha, pl0_db=28.0):
    """Path loss in dB at distance ``d`` meters (reference distance 1 m)."""
    return pl0_db + 10 * alpha * math.log10(d)


def noise_power_dbm(psd_dbm_hz, bandwidth_hz):
    return psd_dbm_hz + 10 * math.log10(bandwidth_hz)


def _ula(n, direction, axis):
    # half-wavelength spacing: phase step pi * cos(angle to array axis)
    return np.exp(-1j * np.pi * np.arange(n) * float(np.dot(direction, axis)))


_TRX_AXIS = np.array([0.0, 1.0, 0.0])
_RIS_AXIS = np.array([1.0, 0.0, 0.0])


def _geometry(scn):
    tx, rx, ris = (np.asarray(p) for p in (scn.tx_pos, scn.rx_pos, scn.ris_pos))
    d_tr = np.linalg.norm(ris - tx)
    d_rr = np.linalg.norm(rx - ris)
    d_d = np.linalg.norm(rx - tx)
    if min(d_tr, d_rr, d_d) <= 0:
        raise InvalidInput("nodes must be at distinct positions")
    return tx, rx, ris, d_tr, d_rr, d_d


def _amp(d, alpha, pl0):
    return 10 ** (-path_loss_db(d, alpha, pl0) / 20)


def los_components(scn):
    """Path-loss scaled line-of-sight terms ``(F_los, G_los)``."""
    tx, rx, ris, d_tr, d_rr, _ = _geometry(scn)
    u_tr = (ris - tx) / d_tr
    u_rr = (rx - ris) / d_rr
    g_los = np.outer(_ula(scn.n_t, u_tr, _TRX_AXIS), _ula(scn.m, -u_tr, _RIS_AXIS).conj())
    f_los = np.outer(_ula(scn.n_r, -u_rr, _TRX_AXIS), _ula(scn.m, u_rr, _RIS_AXIS).conj())
    return (f_los * _amp(d_rr, scn.alpha_ris, scn.pl0_db),
            g_los * _amp(d_tr, scn.alpha_ris, scn.pl0_db))


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def gen_channels(scn, seed):
    """Draw one channel realization; deterministic per ``(scn, seed)``."""
    _, _, _, d_tr, d_rr, d_d = _geometry(scn)
    rng = np.random.Generator(np.random.Philox(seed))
    h_nlos = _cn(rng, (scn.n_r, scn.n_t))
    f_nlos = _cn(rng, (scn.n_r, scn.m))
    g_nlos = _cn(rng, (scn.n_t, scn.m))

    k = scn.rician_k
    if math.isinf(k):
        w_los, w_nlos = 1.0, 0.0
    else:
        w_los, w_nlos = math.sqrt(k / (k + 1)), math.sqrt(1 / (k + 1))
    f_los, g_los = los_components(scn)
    f = w_los * f_los + w_nlos * _amp(d_rr, scn.alpha_ris, scn.pl0_db) * f_nlos
    g = w_los * g_los + w_nlos * _amp(d_tr, scn.alpha_ris, scn.pl0_db) * g_nlos
    h_d = _amp(d_d, scn.alpha_direct, scn.pl0_db) * h_nlos
    meta = {"seed": seed, "noise_dbm": scn.noise_dbm, "tx_power_mw": scn.tx_power_mw,
            "alpha_direct": scn.alpha_direct}
    return MimoChannel(h_d=h_d, f=f, g=g, snr_linear=scn.snr_linear, meta=meta)


def h_eq(ch, theta):
    """Equivalent (unscaled) channel ``H_d + F Theta G^H``."""
    theta = np.asarray(getattr(theta, "u", theta), dtype=complex)
    if theta.shape != (ch.m, ch.m):
        raise DimensionError(f"Theta shape {theta.shape} != ({ch.m}, {ch.m})")
    return ch.h_d + ch.f @ theta @ ch.g.conj().T


_VECTOR_FIELDS = {"tx_pos", "rx_pos", "ris_pos"}
_INT_FIELDS = {"n_t", "n_r", "m"}


def parse_scenario_value(key, text):
    if key in _VECTOR_FIELDS:
        return tuple(float(x) for x in text.split(","))
    if key in _INT_FIELDS:
        return int(text)
    return float(text)


def read_scenario(path, base=None):
    """Read a flat ``key=value`` scenario file; unknown keys are errors."""
    known = {f.name for f in fields(Scenario)}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise FormatError(f"expected key=value, got {text!r}", line=lineno)
            key, val = (s.strip() for s in text.split("=", 1))
            if key not in known:
                raise FormatError(f"unknown scenario key {key!r}", line=lineno)
            try:
                values[key] = parse_scenario_value(key, val)
            except ValueError:
                raise FormatError(f"bad value for {key}: {val!r}", line=lineno) from None
    return replace(base or Scenario(), **values)


def write_scenario(path, scn):
    lines = []
    for key, val in asdict(scn).items():
        if isinstance(val, (tuple, list)):
            val = ",".join(repr(float(x)) for x in val)
        lines.append(f"{key}={val}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
