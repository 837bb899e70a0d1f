"""Command-line batch runner.

    spdmbi ramsey-dc --protocol 3 --state cat:0.3927 --chi 0.12566 --ideal --out cat.csv
    spdmbi scaling --state ghz --protocol 3 --n 10:100:10 --chi 0.12566
    spdmbi verify

Every subcommand accepts ``--config FILE`` (``key = value`` lines, see
:mod:`spdmbi.config`); flags override the file. Exit codes: 0 success,
2 configuration error, 3 numerical-contract violation.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import analytics as an
from .config import KEYS, ConfigError, load_config, parse_value, resolve
from .errors import NumericalConsistencyError, UnsupportedDomainError
from .evolution import NoiseModel
from .protocols.ac import AcProtocolParams, ac_signal
from .protocols.dc import DcProtocolParams, dc_final_state, dc_spectrum, parse_state_kind
from .protocols.lockin import LockinParams, lockin_effective, lockin_full
from .states import make_state
from .table import SpectrumTable, parallel_map

__all__ = ["main", "run", "build_parser"]

# which config keys each subcommand exposes as flags
_COMMON = ("n", "state", "gamma_g", "seed", "workers", "out")
_DC = ("protocol", "chi", "chi_r", "t", "t_r", "ideal", "omega", "epsilon", "gamma_z")
SUBCOMMANDS = {
    "ramsey-dc": _COMMON + _DC + ("closed_form", "delta_span", "points"),
    "ramsey-ac": _COMMON + ("chi", "b_ac", "omega_sig", "n_cycles", "n_max", "mod_span", "points", "full", "readout", "closed_form"),
    "lockin": _COMMON
    + ("sequence", "axis", "pulses", "t_omega", "omega_s", "b_ac", "chi", "noise_sigma", "ensemble", "dtau_span", "points", "variant", "substeps", "skip_full"),
    "scaling": _COMMON + ("protocol", "chi", "chi_r", "t"),
    "qfi": _COMMON + ("t",),
    "verify": ("out",),
}
_HELP = {
    "ramsey-dc": "dc Ramsey spectrum <Jz>, <Jz^2> and precision against detuning",
    "ramsey-ac": "ac-field signal against the relative B_dc modulation",
    "lockin": "quantum lock-in spectrum, full square-pulse model and effective Hamiltonian",
    "scaling": "precision at delta = 0 against N and the fitted exponent",
    "qfi": "quantum Fisher information and Cramer-Rao bound of an input state",
    "verify": "closed-form vs matrix-evolution oracle suite",
}
_BOOL_KEYS = {k for k, v in KEYS.items() if v.parse.__name__ == "parse_bool"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spdmbi", description="Symmetry-protected many-body Ramsey interferometry.")
    ap.add_argument("--version", action="version", version=f"spdmbi {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, keys in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        sp.add_argument("--config", help="key = value file; flags override it")
        for key in keys:
            flag = "--" + key.replace("_", "-")
            if key in _BOOL_KEYS:
                sp.add_argument(flag, dest=key, action="store_const", const="true", default=None, help=KEYS[key].help)
            else:
                sp.add_argument(flag, dest=key, default=None, metavar=key.upper(), help=KEYS[key].help)
    return ap


def _resolve_args(ns) -> dict:
    allowed = set(SUBCOMMANDS[ns.command])
    file_vals = load_config(ns.config) if ns.config else {}
    flags = {k: parse_value(k, v) for k, v in vars(ns).items() if k in allowed and v is not None}
    return resolve(file_vals, flags)


def _single_n(cfg) -> int:
    ns = cfg["n"]
    if len(ns) != 1:
        raise ConfigError("'n' must be a single particle number for this subcommand")
    return ns[0]


def _grid(span, points, default_points):
    points = default_points if points is None else points
    if points < 3:
        raise ConfigError("'points' must be >= 3")
    if not span > 0:
        raise ConfigError("grid span must be > 0")
    return np.linspace(-span / 2, span / 2, points)


def _chi_r(cfg, protocol):
    if protocol == "I":
        return 0.0
    if cfg["chi_r"] is not None:
        return cfg["chi_r"]
    return cfg["chi"] if cfg["chi"] > 0 else 0.04 * math.pi


def _omega(cfg):
    """``None`` means ideal pulses: either ``ideal`` is set or no Rabi frequency
    was given, which keeps an empty config on the ideal-pulse defaults."""
    if cfg["ideal"] and cfg["omega"] is not None:
        raise ConfigError("'ideal' and 'omega' contradict each other; pick one")
    return None if cfg["ideal"] else cfg["omega"]


# ------------------------------------------------------------------ commands


def _cmd_ramsey_dc(cfg):
    n = _single_n(cfg)
    proto = DcProtocolParams(cfg["protocol"], n, 0.0, 1.0).protocol  # normalizes 1/2/3
    p = DcProtocolParams(
        proto, n, cfg["chi"], _chi_r(cfg, proto), cfg["t"], cfg["t_r"], _omega(cfg), cfg["epsilon"], cfg["gamma_z"]
    )
    gamma = 1.0 if cfg["gamma_g"] is None else cfg["gamma_g"]
    deltas = _grid(cfg["delta_span"], cfg["points"], 101)
    kind, theta = parse_state_kind(cfg["state"])
    psi = make_state(n, kind, theta)
    if cfg["closed_form"]:
        table = _dc_closed(p, kind, theta, deltas)
        table.columns["delta"] = deltas
    else:
        table = dc_spectrum(p, None, deltas, psi0=psi, workers=cfg["workers"])
    prec = an.precision_curve(table, gamma)
    qc = _dc_qcrb(p, psi, deltas, gamma, cfg["workers"])
    return SpectrumTable(
        {"delta": deltas, "jz": table["jz"], "jz2": table["jz2"], "precision": prec, "qcrb": qc}
    ), {}


def _dc_closed(p: DcProtocolParams, kind, theta, deltas):
    if not p.ideal or p.gamma_z > 0:
        raise UnsupportedDomainError("closed forms assume ideal pulses and no dephasing")
    n = p.n_particles
    if p.protocol == "I":
        if kind != "SCS":
            raise UnsupportedDomainError("the protocol-I closed form is for coherent-state input")
        return SpectrumTable({"jz": an.jz_scs_closed(n, p.chi, deltas, p.T), "jz2": an.jz2_scs_closed(n, p.chi, deltas, p.T)})
    if kind == "SCS":
        raise UnsupportedDomainError(f"the protocol-{p.protocol} closed form is for cat or GHZ input")
    th = 0.0 if kind == "GHZ" else theta
    if p.protocol == "III":
        an._need_even(n, "protocol-III closed form")
        jz, jz2 = an.cat_closed_III(n, th, deltas, p.T)
    else:
        if abs(p.chi_r * p.readout_time - math.pi / 2) > 1e-12:
            raise UnsupportedDomainError("the protocol-II closed form needs chi_r t_r = pi/2")
        jz, jz2 = an.cat_closed_II(n, th, p.chi, deltas, p.T, p.readout_time)
    return SpectrumTable({"jz": jz, "jz2": jz2})


def _dc_qcrb(p, psi, deltas, gamma, workers):
    """Bound from the QFI of the whole delta-dependent output state.

    With dephasing the output is mixed, so the input-state bound
    ``1 / (gamma T sqrt(4 Var Jz))`` is reported instead.
    """
    if p.gamma_z > 0:
        return np.full(len(deltas), an.qcrb(an.qfi_variance(psi, p.T, gamma)))

    def one(d):
        def evolution(b):
            return dc_final_state(p, psi, d + gamma * b)

        f = an.qfi_derivative(psi, p.T, gamma, evolution=evolution)
        return an.qcrb(f) if f > 1e-12 else math.inf

    return np.array(parallel_map(one, deltas, workers))


def _cmd_ramsey_ac(cfg):
    n = _single_n(cfg)
    gamma = 20 * math.pi if cfg["gamma_g"] is None else cfg["gamma_g"]
    base = AcProtocolParams(
        b_ac=cfg["b_ac"], omega_sig=cfg["omega_sig"], gamma_g=gamma, n_cycles=cfg["n_cycles"],
        n_max=cfg["n_max"], chi=cfg["chi"], n_particles=n,
    )
    xs = _grid(cfg["mod_span"], cfg["points"], 101)
    kind, theta = parse_state_kind(cfg["state"])
    psi = make_state(n, kind, theta)
    if cfg["closed_form"] and cfg["full"]:
        raise ConfigError("'closed_form' and 'full' are mutually exclusive")

    def one(x):
        q = base.at_modulation(x)
        if cfg["closed_form"]:
            if cfg["readout"] is not None:
                raise ConfigError("closed forms use the default readout for each state")
            return an.ac_closed_signals(kind, n, theta, q.n_cycles, q.n_max, q.phi, q.chi, q.omega_sig)
        return ac_signal(q, (kind, theta), cfg["readout"], cfg["full"], psi_in=psi)

    res = parallel_map(one, xs, cfg["workers"])
    return SpectrumTable({"phi_mod": xs, "jz_n": [r[0] for r in res], "jz_avg": [r[1] for r in res]}), {}


def _cmd_lockin(cfg):
    n = _single_n(cfg)
    gamma = 1.0 if cfg["gamma_g"] is None else cfg["gamma_g"]
    noise = NoiseModel(white_noise_sigma=cfg["noise_sigma"], seed=cfg["seed"], ensemble_size=cfg["ensemble"])
    p = LockinParams(
        sequence=cfg["sequence"].upper(), pulse_axis=cfg["axis"].lower(), L=cfg["pulses"], t_omega=cfg["t_omega"],
        omega_s=cfg["omega_s"], b_ac=cfg["b_ac"], chi=cfg["chi"], gamma_g=gamma, n_particles=n,
        substeps=cfg["substeps"], noise=noise,
    )
    span = cfg["dtau_span"] if cfg["dtau_span"] is not None else 4.0 / p.L
    grid = _grid(span, cfg["points"], 201)
    variant = cfg["variant"]
    if variant is None:
        if p.t_omega > 0:
            variant = f"CP_finiteWidth_{p.pulse_axis}"
        else:
            variant = "PDD_ideal" if p.sequence == "PDD" else "CP_ideal"
    eff = lockin_effective(p, variant, cfg["state"], grid)["signal_eff"]
    if cfg["skip_full"]:
        full = np.full(len(grid), np.nan)
    else:
        full = lockin_full(p, cfg["state"], grid, workers=cfg["workers"])["signal_full"]
    return SpectrumTable({"dtau_rel": grid, "signal_full": full, "signal_eff": eff}), {"variant": variant}


def _cmd_scaling(cfg):
    proto = DcProtocolParams(cfg["protocol"], 2, 0.0, 1.0).protocol
    gamma = 1.0 if cfg["gamma_g"] is None else cfg["gamma_g"]
    chi_r = None if proto == "I" else cfg["chi_r"]
    pts, expo = an.scaling_scan(cfg["state"], proto, cfg["n"], cfg["chi"], cfg["t"], gamma, chi_r, workers=cfg["workers"])
    table = SpectrumTable(
        {"n": [q.n_particles for q in pts], "precision": [q.precision for q in pts], "qcrb": [q.qcrb for q in pts]}
    )
    return table, {"exponent": expo, "stencils": [q.stencil for q in pts]}


def _cmd_qfi(cfg):
    kind, theta = parse_state_kind(cfg["state"])
    gamma = 1.0 if cfg["gamma_g"] is None else cfg["gamma_g"]
    rows = {"n": [], "qfi_variance": [], "qfi_derivative": [], "qcrb": []}
    for n in cfg["n"]:
        psi = make_state(n, kind, theta)
        fv = an.qfi_variance(psi, cfg["t"], gamma)
        rows["n"].append(n)
        rows["qfi_variance"].append(fv)
        rows["qfi_derivative"].append(an.qfi_derivative(psi, cfg["t"], gamma))
        rows["qcrb"].append(an.qcrb(fv))
    return SpectrumTable(rows), {}


def _cmd_verify(cfg):
    from .verify import run_checks

    res = run_checks()
    table = SpectrumTable({"error": [r.error for r in res], "tol": [r.tol for r in res]})
    failed = [r.name for r in res if not r.ok]
    print(f"{len(res) - len(failed)}/{len(res)} checks passed")
    return table, {"checks": [r.name for r in res], "failed": failed}


_COMMANDS = {
    "ramsey-dc": _cmd_ramsey_dc,
    "ramsey-ac": _cmd_ramsey_ac,
    "lockin": _cmd_lockin,
    "scaling": _cmd_scaling,
    "qfi": _cmd_qfi,
    "verify": _cmd_verify,
}


def _write(table: SpectrumTable, cfg: dict, command: str, extra: dict, wall: float) -> None:
    out = cfg["out"]
    text = table.to_csv(out)
    if out is None:
        if command != "verify":
            sys.stdout.write(text)
        return
    meta = {
        "command": command,
        "config": cfg,
        "seed": cfg["seed"],
        "version": __version__,
        "wall_time_s": wall,
        **extra,
    }
    with open(out + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def run(argv=None) -> int:
    """Parse ``argv``, execute one subcommand, return the exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        cfg = _resolve_args(ns)
        table, extra = _COMMANDS[ns.command](cfg)
        if ns.command == "verify" and extra["failed"]:
            _write(table, cfg, ns.command, extra, time.perf_counter() - t0)
            return 3
    except (ValueError, OSError) as exc:  # ConfigError, DomainError, bad files
        print(f"spdmbi: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalConsistencyError, ArithmeticError) as exc:
        print(f"spdmbi: numerical error: {exc}", file=sys.stderr)
        return 3
    _write(table, cfg, ns.command, extra, time.perf_counter() - t0)
    if "exponent" in extra:
        print(f"fitted exponent: {extra['exponent']:.4f}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
