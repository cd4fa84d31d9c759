"""Command-line front end.

Every run takes its parameters from (in increasing precedence) built-in
defaults, a JSON config file (--config), and command-line flags, and
emits comma-separated tables at full precision plus a JSON manifest, so
identical configurations reproduce byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cooling_dynamics import (
    CoolingParams,
    cooling_rate,
    evolve_ergodic,
    fp_coefficients,
    fp_solution,
    fp_steady,
    ld_evolve,
    ld_steady_occupations,
    ld_total_energy,
    thermal_distribution,
)
from .cooling_dynamics import LDModeState
from .ergodic_kernel import KernelParams, kernel_f
from .franck_condon import average_coupling_bruteforce
from .ion_chain import ChainConfig, chain_modes, solve_equilibrium
from .spectrum import EnergyGrid, count_states, smooth_density

_UNITS = {
    "frequency": "nu_1 (axial center-of-mass frequency)",
    "energy": "hbar nu_1",
    "time": "1/nu_1",
    "length": "(e^2 / (4 pi eps0 m nu_1^2))^(1/3)",
}

DEFAULTS = {
    "modes": {"n": 3},
    "dos": {"n": 3, "de": 0.2, "emax": 30.0},
    "fc": {
        "n": 2, "de": 3.5, "recoil": 1.0, "cos_theta0": 1.0,
        "e_from": 38.5, "e_to": [31.5, 38.5, 45.5],
    },
    "kernel": {"n": 1, "e": 1.0, "recoil": 0.5, "points": 401},
    "cool": {
        "n": 2, "gamma": 30.0, "delta": -15.0, "rabi": 3.0, "recoil": 0.1,
        "cos_theta0": 1.0, "pattern": "isotropic", "m_driven": None,
        "de": 0.5, "emax": 110.0, "t_final": 5000.0, "u0": None, "seed": 0,
    },
    "ld": {
        "n": 3, "gamma": 50.0, "delta": -25.0, "rabi": 5.0, "recoil": 0.01,
        "cos_theta0": 1.0, "pattern": "isotropic", "m_driven": None,
        "t_final": None, "n0": 20.0, "snapshots": 200, "seed": 0,
    },
    "verify": {"full": False},
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_table(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(outdir, name, header, rows):
    if outdir is None:
        sys.stdout.write(f"# {name}\n")
        _write_table(None, header, rows)
        return None
    path = Path(outdir) / f"{name}.csv"
    _write_table(path, header, rows)
    return path.name


def _manifest(outdir, subcommand, params, outputs):
    if outdir is None:
        return
    doc = {
        "subcommand": subcommand,
        "parameters": params,
        "units": _UNITS,
        "outputs": outputs,
        "version": __version__,
    }
    (Path(outdir) / "manifest.json").write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n"
    )


def _merge(sub, args):
    merged = dict(DEFAULTS[sub])
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("invalid-config", f"cannot read config file: {exc}")
        unknown = set(loaded) - set(merged)
        if unknown:
            raise CliError(
                "invalid-config",
                f"unknown keys in config file for '{sub}': {sorted(unknown)}",
            )
        merged.update(loaded)
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def cmd_modes(cfg, outdir):
    chain = ChainConfig(int(cfg["n"]))
    spec = chain_modes(chain)
    eq = solve_equilibrium(chain)
    sys.stdout.write(
        ", ".join(f"{f:.4f}" for f in spec.frequencies) + "\n"
    )
    outputs = []
    outputs.append(
        _emit(outdir, "frequencies", ["mode", "frequency"],
              [(a + 1, f) for a, f in enumerate(spec.frequencies)])
    )
    outputs.append(
        _emit(outdir, "eigenvectors",
              ["ion", "position"] + [f"b_mode{a+1}" for a in range(chain.n_ions)],
              [
                  (j + 1, eq.positions[j], *spec.eigenvectors[j])
                  for j in range(chain.n_ions)
              ])
    )
    return cfg, [o for o in outputs if o]


def cmd_dos(cfg, outdir):
    chain = ChainConfig(int(cfg["n"]))
    spec = chain_modes(chain)
    grid = EnergyGrid.for_spectrum(spec, float(cfg["de"]), float(cfg["emax"]))
    census = count_states(spec, grid)
    g_de = smooth_density(spec, grid.centers) * grid.delta_e
    outputs = [
        _emit(outdir, "dos_census", ["energy", "count"],
              zip(grid.centers, census.counts)),
        _emit(outdir, "dos_smooth", ["energy", "smooth_count"],
              zip(grid.centers, g_de)),
    ]
    return cfg, [o for o in outputs if o]


def cmd_fc(cfg, outdir):
    chain = ChainConfig(int(cfg["n"]), recoil_frequency=float(cfg["recoil"]))
    spec = chain_modes(chain)
    e_tos = cfg["e_to"] if isinstance(cfg["e_to"], (list, tuple)) else [cfg["e_to"]]
    e_max = max([float(cfg["e_from"])] + [float(e) for e in e_tos])
    grid = EnergyGrid.for_spectrum(spec, float(cfg["de"]), e_max + float(cfg["de"]))
    rows = []
    for e_to in e_tos:
        c = average_coupling_bruteforce(
            float(cfg["e_from"]), float(e_to), grid, spec, chain,
            float(cfg["cos_theta0"]),
        )
        rows.append((c.e_from, c.e_to, c.q))
    outputs = [_emit(outdir, "shell_coupling", ["e_from", "e_to", "q"], rows)]
    return cfg, [o for o in outputs if o]


def cmd_kernel(cfg, outdir):
    params = KernelParams(
        e=float(cfg["e"]), recoil=float(cfg["recoil"]), n_ions=int(cfg["n"])
    )
    lo, hi = params.support
    pts = int(cfg["points"])
    e_prime = np.linspace(lo, hi, pts + 2)[1:-1]  # open interval: N=1 edges diverge
    f = kernel_f(params, e_prime)
    outputs = [
        _emit(outdir, "kernel", ["e_prime", "g_times_q"], zip(e_prime, f)),
    ]
    return cfg, [o for o in outputs if o]


def _cooling_params(cfg):
    n = int(cfg["n"])
    m = cfg.get("m_driven")
    return CoolingParams(
        gamma=float(cfg["gamma"]),
        detuning=float(cfg["delta"]),
        rabi=float(cfg["rabi"]),
        recoil=float(cfg["recoil"]),
        cos_theta0=float(cfg["cos_theta0"]),
        n_ions=n,
        m_driven=int(m) if m is not None else None,
        pattern=cfg["pattern"],
    )


def cmd_cool(cfg, outdir):
    params = _cooling_params(cfg)
    chain = ChainConfig(int(cfg["n"]), recoil_frequency=params.recoil)
    spec = chain_modes(chain)
    grid = EnergyGrid.for_spectrum(spec, float(cfg["de"]), float(cfg["emax"]))
    coeff = fp_coefficients(params)
    if coeff.c >= 0:
        raise CliError("invalid-config", "cool requires red detuning (delta < 0)")
    u_ss = 1.0 / abs(coeff.c)
    u0 = float(cfg["u0"]) if cfg["u0"] is not None else 2.0 * u_ss
    cfg = dict(cfg, u0=u0)
    p_init = thermal_distribution(grid, params.n_ions, u0)
    sol = fp_solution(params, u0)
    history = []
    final = evolve_ergodic(
        p_init, params, spec, t_final=float(cfg["t_final"]),
        callback=lambda t, d: history.append((t, d.mean_energy())),
        callback_interval=float(cfg["t_final"]) / 400.0,
    )
    steady = fp_steady(params, grid)
    l1 = final.l1_distance(steady)
    rate = cooling_rate(params)
    sys.stdout.write(
        f"steady-state L1 distance to the Fokker-Planck oracle: {l1:.6f}\n"
        f"mean energy: simulated {final.mean_energy():.6f}, "
        f"Fokker-Planck N/|C| = {params.n_ions / abs(coeff.c):.6f}\n"
        f"cooling rate (formula): {rate:.6e}\n"
    )
    outputs = [
        _emit(outdir, "trajectory",
              ["time", "mean_energy", "fp_mean_energy"],
              [(t, e, sol.mean_energy(t)) for t, e in history]),
        _emit(outdir, "steady",
              ["energy", "p_simulated", "p_fokker_planck"],
              zip(grid.centers, final.p, steady.p)),
    ]
    return cfg, [o for o in outputs if o]


def cmd_ld(cfg, outdir):
    params = _cooling_params(cfg)
    chain = ChainConfig(int(cfg["n"]), recoil_frequency=params.recoil)
    spec = chain_modes(chain)
    n0 = cfg["n0"]
    if isinstance(n0, (int, float)):
        init = np.full(spec.n_modes, float(n0))
    else:
        init = np.asarray([float(v) for v in n0], dtype=float)
        if init.size != spec.n_modes:
            raise CliError(
                "invalid-config", f"n0 needs 1 or {spec.n_modes} values"
            )
    steady = ld_steady_occupations(params, spec)
    rate = cooling_rate(params) * params.n_ions  # slowest per-mode scale
    t_final = float(cfg["t_final"]) if cfg["t_final"] is not None else 20.0 / rate
    cfg = dict(cfg, t_final=t_final)
    times = np.linspace(0.0, t_final, int(cfg["snapshots"]) + 1)
    rows = []
    state = LDModeState(init)
    rows.append((0.0, *state.mean_occupations, ld_total_energy(state, spec)))
    for t0, t1 in zip(times[:-1], times[1:]):
        state = ld_evolve(spec, params, state, t=float(t1 - t0))
        rows.append((t1, *state.mean_occupations, ld_total_energy(state, spec)))
    sys.stdout.write(
        "steady occupations: "
        + ", ".join(f"{v:.6f}" for v in steady)
        + f"\nfinal total energy: {rows[-1][-1]:.6f}\n"
    )
    outputs = [
        _emit(outdir, "ld_trajectory",
              ["time"] + [f"n_mode{a+1}" for a in range(spec.n_modes)] + ["total_energy"],
              rows),
        _emit(outdir, "ld_steady",
              ["mode", "frequency", "steady_occupation"],
              [(a + 1, spec.frequencies[a], steady[a]) for a in range(spec.n_modes)]),
    ]
    return cfg, [o for o in outputs if o]


def cmd_verify(cfg, outdir):
    from .verification import run_checks

    failures = 0
    for name, ok, detail in run_checks(full=bool(cfg["full"])):
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
        failures += not ok
    if failures:
        raise CliError("verification-failed", f"{failures} check(s) failed")
    return cfg, []


_COMMANDS = {
    "modes": cmd_modes,
    "dos": cmd_dos,
    "fc": cmd_fc,
    "kernel": cmd_kernel,
    "cool": cmd_cool,
    "ld": cmd_ld,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ioncool",
        description=(
            "Doppler cooling of a 1-D trapped-ion Coulomb crystal on a "
            "coarse-grained energy scale. All quantities are in natural "
            "units: hbar = 1, energies in hbar nu_1, rates in nu_1. "
            "Precedence: command-line flags override --config entries, "
            "which override built-in defaults."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with parameter overrides")
        p.add_argument("--out", help="output directory (created if missing)")

    p = sub.add_parser("modes", help="normal-mode frequencies and eigenvectors")
    p.add_argument("--n", type=int, help="number of ions")
    common(p)

    p = sub.add_parser("dos", help="exact state census and smooth density of states")
    p.add_argument("--n", type=int, help="number of ions")
    p.add_argument("--de", type=float, help="shell width")
    p.add_argument("--emax", type=float, help="top of the energy grid")
    common(p)

    p = sub.add_parser("fc", help="brute-force shell-averaged couplings Q(E, E')")
    p.add_argument("--n", type=int, help="number of ions")
    p.add_argument("--de", type=float, help="shell width")
    p.add_argument("--e-from", dest="e_from", type=float, help="source shell center")
    p.add_argument("--e-to", dest="e_to", type=float, nargs="+", help="target shell centers")
    p.add_argument("--recoil", type=float, help="recoil frequency omega_R")
    p.add_argument("--cos-theta0", dest="cos_theta0", type=float, help="laser projection")
    common(p)

    p = sub.add_parser("kernel", help="classical energy-transfer kernel g(E') Q(E, E')")
    p.add_argument("--n", type=int, help="number of modes")
    p.add_argument("--e", type=float, help="initial energy")
    p.add_argument("--recoil", type=float, help="effective recoil")
    p.add_argument("--points", type=int, help="samples across the support")
    common(p)

    for name, extra in (
        ("cool", ["de", "emax", "t_final", "u0"]),
        ("ld", ["t_final", "n0", "snapshots"]),
    ):
        p = sub.add_parser(
            name,
            help=(
                "shell rate-equation evolution with Fokker-Planck oracles"
                if name == "cool"
                else "Lamb-Dicke per-mode rate equations"
            ),
        )
        p.add_argument("--n", type=int, help="number of ions")
        p.add_argument("--gamma", type=float, help="linewidth")
        p.add_argument("--delta", type=float, help="detuning (signed)")
        p.add_argument("--rabi", type=float, help="Rabi frequency")
        p.add_argument("--recoil", type=float, help="recoil frequency omega_R")
        p.add_argument("--cos-theta0", dest="cos_theta0", type=float, help="laser projection")
        p.add_argument("--pattern", help="emission pattern preset")
        p.add_argument("--m-driven", dest="m_driven", type=int, help="number of driven ions")
        p.add_argument("--seed", type=int, help="random seed recorded in the manifest")
        if "de" in extra:
            p.add_argument("--de", type=float, help="shell width")
            p.add_argument("--emax", type=float, help="top of the energy grid")
            p.add_argument("--u0", type=float, help="initial thermal parameter U0")
        if "t_final" in extra:
            p.add_argument("--t-final", dest="t_final", type=float, help="integration time")
        if "n0" in extra:
            p.add_argument("--n0", type=float, nargs="+", help="initial occupations")
            p.add_argument("--snapshots", type=int, help="trajectory rows")
        common(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--full", action="store_true", default=None,
                   help="include the slow cross-layer equivalence runs")
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge(args.subcommand, args)
        outdir = getattr(args, "out", None)
        if outdir:
            Path(outdir).mkdir(parents=True, exist_ok=True)
        cfg_used, outputs = _COMMANDS[args.subcommand](cfg, outdir)
        _manifest(outdir, args.subcommand, cfg_used, outputs)
    except CliError as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        return 2
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"invalid-config: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
