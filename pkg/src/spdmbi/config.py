"""Flat ``key = value`` run configuration shared by every CLI subcommand.

Grammar, one entry per line::

    # comment
    n = 20
    state = cat:0.3927
    ideal = true

Keys use underscores (``chi_r``, ``delta_span``); the matching flags use
dashes (``--chi-r``). Values set on the command line win over the file.
All physical quantities are in natural units (hbar = 1, rates in 1/T) and
angles are in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractError

__all__ = ["Key", "KEYS", "ConfigError", "parse_bool", "parse_ns", "parse_value", "load_config", "resolve"]


class ConfigError(ContractError):
    """Unknown key or malformed value; the CLI maps it to exit code 2."""


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _finite_float(text: str) -> float:
    x = float(text)
    if math.isnan(x):
        raise ValueError("nan is not allowed")
    return x


def parse_ns(text) -> list[int]:
    """Particle numbers: ``20``, ``16,36,64`` or an inclusive range ``10:100:10``."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    s = str(text).strip()
    if ":" in s:
        parts = [int(v) for v in s.split(":")]
        if len(parts) == 2:
            parts.append(1)
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"bad range {text!r}; expected start:stop[:step]")
        if parts[0] < 1:
            raise ValueError("particle numbers must be >= 1")
        return list(range(parts[0], parts[1] + 1, parts[2]))
    out = [int(v) for v in s.split(",") if v.strip()]
    if not out:
        raise ValueError("empty particle-number list")
    if min(out) < 1:
        raise ValueError("particle numbers must be >= 1")
    return out


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    help: str


# ``None`` defaults are filled in by each subcommand.
KEYS: dict[str, Key] = {
    # shared
    "n": Key(parse_ns, [20], "particle number; scaling also takes a list or start:stop:step"),
    "state": Key(str, "scs", "input state: scs, ghz or cat:THETA"),
    "protocol": Key(str, "I", "dc protocol: 1, 2, 3 or I, II, III"),
    "chi": Key(_finite_float, 0.0, "one-axis-twisting strength during interrogation"),
    "chi_r": Key(_finite_float, None, "twisting strength during readout (default: chi, or 0.04 pi if chi = 0)"),
    "t": Key(_finite_float, 1.0, "interrogation time T"),
    "t_r": Key(_finite_float, None, "readout time (default pi / (2 chi_r))"),
    "ideal": Key(parse_bool, False, "instantaneous pulses"),
    "omega": Key(_finite_float, None, "Rabi frequency of finite pulses"),
    "epsilon": Key(_finite_float, 0.0, "relative pulse-area error, applied to every pulse"),
    "gamma_z": Key(_finite_float, 0.0, "collective dephasing rate during interrogation"),
    "gamma_g": Key(_finite_float, None, "gyromagnetic ratio (dc/lockin default 1, ac default 20 pi)"),
    "closed_form": Key(parse_bool, False, "use closed-form expressions instead of matrix evolution"),
    "points": Key(int, None, "grid size"),
    "seed": Key(int, 0, "noise seed"),
    "workers": Key(int, None, "worker threads (capped by SPDMBI_THREADS)"),
    "out": Key(str, None, "CSV output path; a .json sidecar is written next to it"),
    # ramsey-dc
    "delta_span": Key(_finite_float, 2 * math.pi, "full width of the symmetric detuning grid"),
    # ramsey-ac
    "b_ac": Key(_finite_float, 1.0, "ac field amplitude"),
    "omega_sig": Key(_finite_float, 200 * math.pi, "signal angular frequency"),
    "n_cycles": Key(int, 1, "signal periods per run"),
    "n_max": Key(int, 1, "largest n in the averaged signal"),
    "mod_span": Key(_finite_float, 0.2, "full width of the relative B_dc modulation grid"),
    "full": Key(parse_bool, False, "ac: time-domain oracle instead of the closed propagator"),
    "readout": Key(str, None, "ac readout: HalfPiX or TwistX (default by state)"),
    # lockin
    "sequence": Key(str, "CPMG", "CPMG or PDD"),
    "axis": Key(str, "y", "pi-pulse axis, x or y"),
    "pulses": Key(int, 100, "number of pi pulses L"),
    "t_omega": Key(_finite_float, 0.0, "pi-pulse width"),
    "omega_s": Key(_finite_float, 200 * math.pi, "signal angular frequency"),
    "noise_sigma": Key(_finite_float, 0.0, "white-noise amplitude"),
    "ensemble": Key(int, 200, "noise trajectories per grid point"),
    "dtau_span": Key(_finite_float, None, "full width of the (tau_r - tau_s)/tau_s grid (default 4/L)"),
    "variant": Key(str, None, "effective Hamiltonian: CP_ideal, PDD_ideal, CP_finiteWidth_x, CP_finiteWidth_y"),
    "substeps": Key(int, 16, "integration substeps per finite pulse"),
    "skip_full": Key(parse_bool, False, "lockin: only the effective model"),
}


def parse_value(key: str, text):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return KEYS[key].parse(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {text!r} ({exc})") from None


def load_config(path) -> dict:
    """Parse a config file into ``{key: value}``; only keys present in the file."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            out[key] = parse_value(key, val)
    return out


def resolve(file_values: dict | None = None, flag_values: dict | None = None) -> dict:
    """Defaults, overridden by the file, overridden by flags."""
    cfg = {k: v.default for k, v in KEYS.items()}
    for src in (file_values or {}, flag_values or {}):
        for k, v in src.items():
            if k not in KEYS:
                raise ConfigError(f"unknown config key {k!r}")
            if v is not None:
                cfg[k] = v
    return cfg
