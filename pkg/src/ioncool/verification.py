"""Named invariant checks shared by the `verify` CLI subcommand and the
acceptance test suite.

Every check returns (passed, detail). The fast set runs in a few seconds;
the full set adds the cross-layer equivalence runs (shell rate equation
vs Fokker-Planck, brute-force vs classical coupling, M-scaling fits) and
takes a few minutes.
"""
from __future__ import annotations

import warnings

import numpy as np

from . import (
    ChainConfig,
    CoolingParams,
    EnergyGrid,
    FockState,
    KernelParams,
    LDModeState,
    average_coupling_bruteforce,
    chain_modes,
    cooling_rate,
    count_in_band,
    count_states,
    evolve_ergodic,
    fc_single,
    fp_coefficients,
    fp_evolution,
    fp_steady,
    hessian,
    kernel_f,
    kernel_moments,
    kernel_sample,
    lamb_dicke,
    ld_evolve,
    ld_steady_occupations,
    ld_total_energy,
    ld_weights,
    lorentzian,
    moments_bruteforce,
    q_classical,
    smooth_density,
    solve_equilibrium,
    steady_energy,
    thermal_distribution,
)
from .cooling_dynamics import lorentzian_derivative
from .ion_chain import potential_gradient

# Frozen regression bounds, calibrated once from the exact enumerations.
# Observed: top-third mean relative deviation 0.058 for the 3-ion census
# against g(E) dE up to 30 hbar nu; brute-force vs closed-form coupling
# within 0.030 for N = 2, 3 on shells with E >= 20 nu_N, dE >= 2 nu_N.
FIG1_TOP_THIRD_BOUND = 0.10
QC_AGREEMENT_BOUND = 0.05


def _spectrum(n, recoil=0.0):
    return chain_modes(ChainConfig(n, recoil_frequency=recoil))


# --------------------------------------------------------------------- chain


def check_mode_frequencies():
    spec = _spectrum(3)
    ref = np.array([1.0, 1.7321, 2.4083])
    rel = np.max(np.abs(spec.frequencies - ref) / ref)
    return rel < 1e-3, f"N=3 frequencies {spec.frequencies} vs {ref}, rel {rel:.2e}"


def check_equilibrium_antisymmetry():
    worst = 0.0
    for n in (2, 3, 4, 5, 6, 9):
        u = solve_equilibrium(ChainConfig(n)).positions
        worst = max(worst, float(np.max(np.abs(u + u[::-1]))))
        worst = max(worst, float(np.max(np.abs(potential_gradient(u)))))
    return worst < 1e-12, f"max antisymmetry/residual defect {worst:.2e}"


def check_hessian_finite_difference():
    cfg = ChainConfig(4)
    eq = solve_equilibrium(cfg)
    v = hessian(eq)
    u0 = eq.positions

    def pot(u):
        d = np.abs(u[:, None] - u[None, :])
        iu = np.triu_indices(len(u), 1)
        return 0.5 * np.sum(u**2) + np.sum(1.0 / d[iu])

    h = 1e-4
    num = np.zeros_like(v)
    for i in range(4):
        for j in range(4):
            for si, sj, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                du = np.zeros(4)
                du[i] += si * h
                du[j] += sj * h
                num[i, j] += w * pot(u0 + du)
    num /= 4 * h * h
    err = float(np.max(np.abs(num - v)))
    return err < 1e-6, f"analytic vs second-difference potential matrix: {err:.2e}"


def check_com_mode():
    spec = _spectrum(5)
    b1 = spec.eigenvectors[:, 0]
    defect = max(
        float(np.max(np.abs(b1 - 1 / np.sqrt(5)))),
        abs(float(spec.frequencies[0]) - 1.0),
    )
    return defect < 1e-9, f"center-of-mass mode defect {defect:.2e}"


def check_lamb_dicke_sum_rule():
    cfg = ChainConfig(4, recoil_frequency=0.07)
    spec = chain_modes(cfg)
    worst = 0.0
    for ct in (1.0, 0.5, 0.0, -0.3):
        eta = lamb_dicke(spec, cfg, ct).eta
        target = 0.07 * ct**2 / spec.frequencies
        worst = max(worst, float(np.max(np.abs((eta**2).sum(axis=0) - target))))
    return worst < 1e-12, f"sum-rule defect {worst:.2e}"


# ------------------------------------------------------------------ spectrum


def check_census_partition():
    spec = _spectrum(3)
    lo, hi = spec.ground_energy - 0.05, 15.0
    total = count_in_band(spec, lo, hi)
    pieces = 0
    cuts = np.linspace(lo, hi, 23)
    for a, b in zip(cuts[:-1], cuts[1:]):
        pieces += count_in_band(spec, a, b)
    # independent oracle: plain box scan without pruning
    nu = spec.frequencies
    g0 = spec.ground_energy
    direct = 0
    for n1 in range(int((hi - g0) / nu[0]) + 2):
        for n2 in range(int((hi - g0) / nu[1]) + 2):
            for n3 in range(int((hi - g0) / nu[2]) + 2):
                e = g0 + n1 * nu[0] + n2 * nu[1] + n3 * nu[2]
                if lo <= e < hi:
                    direct += 1
    ok = total == pieces == direct
    return ok, f"band total {total}, partitioned {pieces}, box oracle {direct}"


def check_census_vs_smooth():
    spec = _spectrum(3)
    grid = EnergyGrid.for_spectrum(spec, 0.2, 30.0)
    census = count_states(spec, grid)
    g_de = smooth_density(spec, grid.centers) * grid.delta_e
    c = grid.centers
    thirds = []
    for k in range(3):
        lo = c[0] + k * (c[-1] - c[0]) / 3
        hi = c[0] + (k + 1) * (c[-1] - c[0]) / 3
        m = (c >= lo) & (c <= hi) & (census.counts > 0)
        thirds.append(float(np.mean(np.abs(census.counts[m] - g_de[m]) / census.counts[m])))
    improving = thirds[0] > thirds[1] > thirds[2]
    ok = improving and thirds[2] < FIG1_TOP_THIRD_BOUND
    return ok, (
        f"mean relative deviation by thirds {thirds[0]:.3f} > {thirds[1]:.3f} > "
        f"{thirds[2]:.3f} (top bound {FIG1_TOP_THIRD_BOUND})"
    )


def check_smooth_density_scaling():
    spec = _spectrum(3)
    ratio = smooth_density(spec, 24.0) / smooth_density(spec, 12.0)
    return abs(ratio - 4.0) < 1e-12, f"g(2E)/g(E) = {ratio} (expect 2^(N-1) = 4)"


# -------------------------------------------------------------- franck-condon


def check_fc_pinned_values():
    checks = [
        (abs(fc_single(0, 0, 0.3) - np.exp(-0.045)), "fc(0,0,0.3)"),
        (abs(fc_single(1, 1, 0.5) - np.exp(-0.125) * 0.75), "fc(1,1,0.5)"),
        (abs(fc_single(4, 4, 0.0) - 1.0), "fc identity"),
        (abs(fc_single(4, 7, 0.0)), "fc off-diagonal at eta=0"),
    ]
    worst = max(c[0] for c in checks)
    return worst < 1e-14, f"worst pinned-value defect {worst:.2e}"


def check_fc_parity_unitarity():
    rng = np.random.default_rng(3)
    worst_parity = 0.0
    for _ in range(60):
        n, l = rng.integers(0, 40, size=2)
        eta = float(rng.uniform(0.05, 1.5))
        a = abs(fc_single(int(n), int(l), eta))
        b = abs(fc_single(int(l), int(n), eta))
        worst_parity = max(worst_parity, abs(a - b))
    from .franck_condon import fc_abs2_matrix

    w = fc_abs2_matrix(0.8, 256)
    unit = float(np.max(np.abs(w[:100].sum(axis=1) - 1.0)))
    ok = worst_parity < 1e-15 and unit < 1e-10
    return ok, f"parity defect {worst_parity:.1e}, unitarity defect {unit:.1e}"


def check_moment_identities():
    rng = np.random.default_rng(11)
    worst = 0.0
    for n in (1, 2, 3):
        cfg = ChainConfig(n, recoil_frequency=0.02)
        spec = chain_modes(cfg)
        for _ in range(6):
            st = FockState(tuple(int(x) for x in rng.integers(0, 51, size=n)))
            ct = float(rng.uniform(0.2, 1.0))
            m1, m2 = moments_bruteforce(st, spec, cfg, ct)
            r = 0.02 * ct**2
            e = st.energy(spec)
            worst = max(worst, abs(m1 - r) / r)
            ref2 = 2 * r * e / n + r * r
            worst = max(worst, abs(m2 - ref2) / ref2)
    return worst < 1e-6, f"worst relative moment defect {worst:.2e}"


def check_ld_weights():
    cfg = ChainConfig(1, recoil_frequency=0.01)
    spec = chain_modes(cfg)
    w = ld_weights(FockState((5,)), spec, cfg, 1.0)
    ok = (
        abs(w.blue[0] - 0.06) < 1e-12
        and abs(w.red[0] - 0.05) < 1e-12
        and abs(w.total() - 1.0) < 1e-15
    )
    w0 = ld_weights(FockState((0,)), spec, cfg, 1.0)
    ok = ok and w0.red[0] == 0.0
    # against the exact coefficient: the defect is O(eta^4), ~ (eta^2 (n+1))^2
    exact_blue = abs(fc_single(5, 6, 0.1)) ** 2
    ok = ok and abs(w.blue[0] - exact_blue) < 2 * (0.1**2 * 6) ** 2
    return ok, (
        f"blue {w.blue[0]:.4f} red {w.red[0]:.4f} total-1 {w.total()-1:.1e} "
        f"exact blue {exact_blue:.4f}"
    )


# -------------------------------------------------------------------- kernel


def check_kernel_contracts():
    worst_norm = worst_m1 = worst_m2 = 0.0
    for n in (1, 2, 3, 10, 100):
        p = KernelParams(e=30.0, recoil=0.2, n_ions=n)
        norm, m1, m2 = kernel_moments(p)
        worst_norm = max(worst_norm, abs(norm - 1.0))
        worst_m1 = max(worst_m1, abs(m1 - 0.2) / 0.2)
        ref2 = 0.2**2 + 2 * 0.2 * 30.0 / n
        worst_m2 = max(worst_m2, abs(m2 - ref2) / ref2)
    ok = worst_norm < 1e-8 and worst_m1 < 1e-6 and worst_m2 < 1e-6
    return ok, (
        f"norm defect {worst_norm:.1e}, first moment {worst_m1:.1e}, "
        f"second moment {worst_m2:.1e}"
    )


def check_kernel_support():
    p = KernelParams(e=10.0, recoil=0.4, n_ions=2)
    lo, hi = p.support
    eps = 1e-9
    ok = (
        kernel_f(p, lo - eps) == 0.0
        and kernel_f(p, hi + eps) == 0.0
        and kernel_f(p, 0.5 * (lo + hi)) > 0
    )
    # N >= 2 vanishes approaching the endpoint, N = 1 diverges integrably
    ok = ok and kernel_f(p, lo + 1e-10) < 1e-4
    p1 = KernelParams(e=10.0, recoil=0.4, n_ions=1)
    near, nearer = kernel_f(p1, lo + 1e-8), kernel_f(p1, lo + 1e-12)
    ok = ok and nearer > near > 1e2
    return ok, (
        f"support [{lo:.4f}, {hi:.4f}]: N=2 vanishes at the edge, "
        f"N=1 grows {near:.2e} -> {nearer:.2e} into the edge"
    )


def check_q_identity():
    spec = _spectrum(3)
    ok = True
    worst = 0.0
    for ep in (26.0, 30.0, 31.5, 34.5):
        f = kernel_f(KernelParams(30.0, 0.2, 3), ep)
        gq = smooth_density(spec, ep) * q_classical(30.0, ep, spec, 0.2)
        worst = max(worst, abs(f - gq) / f)
        ok = ok and q_classical(30.0, ep, spec, 0.2) == q_classical(ep, 30.0, spec, 0.2)
    # peak of g(E) Q(E, E') sits at E' = E + recoil
    eps = np.linspace(29.5, 31.0, 301)
    f = kernel_f(KernelParams(30.0, 0.5, 3), eps)
    peak = eps[int(np.argmax(f))]
    ok = ok and abs(peak - 30.5) < 0.01 and worst < 1e-12
    return ok, f"identity defect {worst:.1e}, kernel peak at {peak:.3f} (expect 30.5)"


def check_kernel_sampler():
    p = KernelParams(e=10.0, recoil=0.3, n_ions=1)
    draws = kernel_sample(p, np.random.default_rng(5), 100_000)
    again = kernel_sample(p, np.random.default_rng(5), 100_000)
    se = np.sqrt(2 * 0.3 * 10.0 / 1) / np.sqrt(draws.size)
    mean_ok = abs(draws.mean() - 10.0 - 0.3) < 3 * se
    big = kernel_sample(KernelParams(10.0, 0.3, 400), np.random.default_rng(4), 20_000)
    ok = mean_ok and np.array_equal(draws, again) and big.std() < draws.std()
    return ok, (
        f"mean shift {draws.mean()-10.0:.4f} vs 0.3 (3se = {3*se:.4f}); "
        f"std N=400 {big.std():.3f} < std N=1 {draws.std():.3f}"
    )


# ------------------------------------------------------------------- cooling


def _ref_params(**kw):
    base = dict(
        gamma=30.0, detuning=-15.0, rabi=3.0, recoil=0.1,
        cos_theta0=1.0, n_ions=2, m_driven=2,
    )
    base.update(kw)
    return CoolingParams(**base)


def check_lorentzian():
    p = _ref_params()
    peak = lorentzian(p.detuning, p)
    ok = abs(peak - p.m_driven * p.rabi**2 / p.gamma) < 1e-14
    ok = ok and abs(lorentzian(p.detuning + 3.3, p) - lorentzian(p.detuning - 3.3, p)) < 1e-16
    h = 1e-5
    fd = (lorentzian(h, p) - lorentzian(-h, p)) / (2 * h)
    an = lorentzian_derivative(0.0, p)
    ok = ok and abs(fd - an) / abs(an) < 1e-8
    return ok, f"peak {peak:.4f}, slope analytic {an:.5e} vs centered difference {fd:.5e}"


def check_fp_contracts():
    p = _ref_params()
    coeff = fp_coefficients(p)
    spec = _spectrum(2, recoil=p.recoil)
    grid = EnergyGrid.for_spectrum(spec, 0.5, 140.0)
    ss = fp_steady(p, grid)
    norm = float(np.sum(ss.p) * grid.delta_e)
    mean = ss.mean_energy()
    ref = 2 / abs(coeff.c)
    ok = coeff.c < 0
    ok = ok and abs(norm - 1.0) < 1e-9
    # grid-binned mean carries the truncation below the ground energy
    ok = ok and abs(mean - ref) / ref < 0.02
    ok = ok and coeff.diffusion(0.0) == 0.0
    return ok, f"C = {coeff.c:.4f} < 0, int P0 = {norm:.12f}, <E> = {mean:.3f} vs N/|C| = {ref:.3f}"


def check_steady_energy():
    # minimum over detuning at -gamma/2, independent of N, M, alpha, angle
    ok = True
    details = []
    for n, m, pat, ct in [(1, 1, "isotropic", 1.0), (3, 2, "dipole_linear", 0.6)]:
        deltas = np.linspace(-3 * 30.0, -0.05 * 30.0, 1200)
        vals = [
            steady_energy(
                CoolingParams(gamma=30.0, detuning=float(d), rabi=1.0, recoil=0.1,
                              cos_theta0=ct, n_ions=n, m_driven=m, pattern=pat)
            )
            for d in deltas
        ]
        dmin = float(deltas[int(np.argmin(vals))])
        ok = ok and abs(dmin + 15.0) <= (deltas[1] - deltas[0]) + 1e-9
        details.append(f"argmin {dmin:.2f}")
    # linear scaling in N and the reference value gamma * N / 3
    e1 = steady_energy(_ref_params(n_ions=1, m_driven=1))
    for n in (1, 2, 3, 5, 10):
        en = steady_energy(_ref_params(n_ions=n, m_driven=n))
        ok = ok and abs(en - n * e1) < 1e-9 * n * e1
    ok = ok and abs(e1 - 30.0 / 3.0) < 1e-12
    details.append(f"E(N=1) = {e1:.6f} (expect gamma/3 = 10 at delta = -gamma/2, alpha = 1/3)")
    return ok, "; ".join(details)


def check_cooling_rate():
    p1 = _ref_params(n_ions=4, m_driven=1)
    rates = [cooling_rate(_ref_params(n_ions=4, m_driven=m)) for m in (1, 2, 3, 4)]
    lin = all(abs(rates[m - 1] - m * rates[0]) < 1e-15 for m in (2, 3, 4))
    p = _ref_params(n_ions=1, m_driven=1)
    val = cooling_rate(p)
    ref = 2 * p.recoil * p.rabi**2 / p.gamma**2
    quad = abs(cooling_rate(_ref_params(n_ions=1, m_driven=1, rabi=6.0)) - 4 * val) < 1e-12
    ok = lin and quad and abs(val - ref) / ref < 1e-12
    return ok, f"M-linearity exact, Omega^2 scaling exact, rate {val:.6e} vs 2 w_R Omega^2/gamma^2 = {ref:.6e}"


def check_fp_evolution():
    from .cooling_dynamics import fp_solution

    p = _ref_params()
    spec = _spectrum(2, recoil=p.recoil)
    grid = EnergyGrid.for_spectrum(spec, 0.5, 140.0)
    u0 = 2.0 / abs(fp_coefficients(p).c)
    sol = fp_solution(p, u0)
    ok = sol.mean_energy(0.0) == 2 * u0  # <E(0)> = N U0 exactly
    ut0, dist0 = fp_evolution(p, u0, 0.0, grid)
    ok = ok and abs(dist0.mean_energy() - 2 * u0) / (2 * u0) < 0.05
    t_long = 40.0 / cooling_rate(p)
    ut, dist = fp_evolution(p, u0, t_long, grid)
    ss = fp_steady(p, grid)
    ok = ok and dist.l1_distance(ss) < 1e-9
    t1 = 1.0 / cooling_rate(p)
    u1, _ = fp_evolution(p, u0, t1, grid)
    u_inf = 1.0 / abs(fp_coefficients(p).c)
    measured = -np.log((u1 - u_inf) / (u0 - u_inf)) / t1
    ok = ok and abs(measured - cooling_rate(p)) / cooling_rate(p) < 1e-9
    return ok, (
        f"<E(0)> = N U0 exact; t->inf L1 to steady {dist.l1_distance(ss):.1e}; "
        f"decay rate {measured:.3e} = formula"
    )


def check_ld_detailed_balance():
    cfg = ChainConfig(3, recoil_frequency=0.01)
    spec = chain_modes(cfg)
    p = CoolingParams(gamma=50.0, detuning=-25.0, rabi=5.0, recoil=0.01,
                      cos_theta0=1.0, n_ions=3, m_driven=3)
    target = ld_steady_occupations(p, spec)
    start = LDModeState(np.array([40.0, 5.0, 0.0]))
    rate = cooling_rate(p) * 3  # per-mode decay scale
    out = ld_evolve(spec, p, start, t=60.0 / rate)
    rel = float(np.max(np.abs(out.mean_occupations - target) / target))
    return rel < 1e-6, f"relative departure from detailed balance {rel:.2e}"


def check_ld_vs_doppler_limit():
    cfg = ChainConfig(3, recoil_frequency=0.01)
    spec = chain_modes(cfg)
    gamma = 20.0 * float(spec.frequencies[-1])
    p = CoolingParams(gamma=gamma, detuning=-gamma / 2, rabi=0.1 * gamma,
                      recoil=0.01, cos_theta0=1.0, n_ions=3, m_driven=3)
    e_ld = ld_total_energy(LDModeState(ld_steady_occupations(p, spec)), spec)
    e_fp = steady_energy(p)
    rel = abs(e_ld - e_fp) / e_fp
    return rel < 0.05, f"LD steady energy {e_ld:.3f} vs Fokker-Planck {e_fp:.3f} (rel {rel:.3f})"


def check_ergodic_conservation():
    spec = _spectrum(2, recoil=0.1)
    p = _ref_params()
    grid = EnergyGrid.for_spectrum(spec, 1.0, 60.0)
    p0 = thermal_distribution(grid, 2, 12.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = evolve_ergodic(p0, p, spec, t_final=50.0)
        frozen = evolve_ergodic(p0, _ref_params(rabi=0.0), spec, t_final=50.0)
    total = float(np.sum(out.p) * grid.delta_e)
    ok = abs(total - 1.0) < 1e-9 and out.p.min() >= 0.0
    ok = ok and np.array_equal(frozen.p, p0.p)
    return ok, f"probability after 50 time units: {total:.12f}; Omega=0 leaves P untouched"


# ------------------------------------------------------------- slow (full)


def check_fp_oracle_equivalence():
    """Shell rate equation vs Fokker-Planck: steady L1 and relaxation rate."""
    spec = _spectrum(2, recoil=0.1)
    p = _ref_params()
    grid = EnergyGrid.for_spectrum(spec, 0.5, 110.0)
    u_ss = 1.0 / abs(fp_coefficients(p).c)
    p0 = thermal_distribution(grid, 2, 2.0 * u_ss)
    hist = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        final = evolve_ergodic(
            p0, p, spec, t_final=5000.0,
            callback=lambda t, d: hist.append((t, d.mean_energy())),
            callback_interval=10.0,
        )
    l1 = final.l1_distance(fp_steady(p, grid))
    ts = np.array([h[0] for h in hist])
    es = np.array([h[1] for h in hist])
    off = es - final.mean_energy()
    sel = (off > 0.08 * off[0]) & (off < 0.6 * off[0])
    slope = np.polyfit(ts[sel], np.log(off[sel]), 1)[0]
    ref = cooling_rate(p)
    rate_rel = abs(-slope - ref) / ref
    ok = l1 < 0.05 and rate_rel < 0.05
    return ok, (
        f"steady-state L1 = {l1:.4f} (< 0.05); fitted rate {-slope:.3e} vs "
        f"{ref:.3e} (rel {rate_rel:.3f} < 0.05)"
    )


def check_quantum_classical_coupling():
    """Brute-force shell-averaged Q against the closed classical form."""
    worst = 0.0
    details = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n, de, e_from, e_tos in [
            (2, 3.5, 38.5, [31.5, 38.5, 45.5]),
            (3, 5.0, 50.0, [40.0, 50.0, 60.0]),
        ]:
            cfg = ChainConfig(n, recoil_frequency=1.0)
            spec = chain_modes(cfg)
            grid = EnergyGrid.for_spectrum(spec, de, 80.0)
            for e_to in e_tos:
                qb = average_coupling_bruteforce(e_from, e_to, grid, spec, cfg, 1.0)
                qc = q_classical(qb.e_from, qb.e_to, spec, 1.0)
                rel = abs(qb.q - qc) / qb.q
                worst = max(worst, rel)
                details.append(f"N={n} E'={e_to:.0f}: {rel:.4f}")
    return worst < QC_AGREEMENT_BOUND, (
        f"worst relative deviation {worst:.4f} (bound {QC_AGREEMENT_BOUND}); "
        + "; ".join(details)
    )


def check_m_scaling():
    """Cooling-rate fits of the shell integrator at M = 1 vs M = N."""
    spec = _spectrum(2, recoil=0.1)
    grid = EnergyGrid.for_spectrum(spec, 0.5, 110.0)
    rates = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for m in (1, 2):
            p = _ref_params(m_driven=m)
            u_ss = 1.0 / abs(fp_coefficients(p).c)
            p0 = thermal_distribution(grid, 2, 2.0 * u_ss)
            hist = []
            final = evolve_ergodic(
                p0, p, spec, t_final=5000.0 * 2 / m,
                callback=lambda t, d: hist.append((t, d.mean_energy())),
                callback_interval=10.0,
            )
            ts = np.array([h[0] for h in hist])
            off = np.array([h[1] for h in hist]) - final.mean_energy()
            sel = (off > 0.08 * off[0]) & (off < 0.6 * off[0])
            rates[m] = -np.polyfit(ts[sel], np.log(off[sel]), 1)[0]
    formula_ratio = cooling_rate(_ref_params(m_driven=2)) / cooling_rate(_ref_params(m_driven=1))
    fit_ratio = rates[2] / rates[1]
    ok = abs(fit_ratio - formula_ratio) / formula_ratio < 0.05
    return ok, (
        f"fitted rates M=1: {rates[1]:.3e}, M=2: {rates[2]:.3e}; ratio "
        f"{fit_ratio:.3f} vs formula {formula_ratio:.3f}"
    )


FAST_CHECKS = [
    ("mode-frequencies-n3", check_mode_frequencies),
    ("equilibrium-antisymmetry", check_equilibrium_antisymmetry),
    ("hessian-finite-difference", check_hessian_finite_difference),
    ("center-of-mass-mode", check_com_mode),
    ("lamb-dicke-sum-rule", check_lamb_dicke_sum_rule),
    ("census-partition-and-oracle", check_census_partition),
    ("census-vs-smooth-density", check_census_vs_smooth),
    ("smooth-density-scaling", check_smooth_density_scaling),
    ("fc-pinned-values", check_fc_pinned_values),
    ("fc-parity-unitarity", check_fc_parity_unitarity),
    ("moment-identities", check_moment_identities),
    ("lamb-dicke-weights", check_ld_weights),
    ("kernel-contracts", check_kernel_contracts),
    ("kernel-support", check_kernel_support),
    ("coupling-identity-symmetry", check_q_identity),
    ("kernel-sampler", check_kernel_sampler),
    ("lorentzian", check_lorentzian),
    ("fokker-planck-steady", check_fp_contracts),
    ("steady-energy", check_steady_energy),
    ("cooling-rate", check_cooling_rate),
    ("fokker-planck-evolution", check_fp_evolution),
    ("ld-detailed-balance", check_ld_detailed_balance),
    ("ld-vs-doppler-limit", check_ld_vs_doppler_limit),
    ("ergodic-conservation", check_ergodic_conservation),
]

FULL_CHECKS = [
    ("fp-oracle-equivalence", check_fp_oracle_equivalence),
    ("quantum-classical-coupling", check_quantum_classical_coupling),
    ("m-scaling", check_m_scaling),
]


def run_checks(full: bool = False):
    """Yield (name, passed, detail) for every registered check."""
    checks = FAST_CHECKS + (FULL_CHECKS if full else [])
    for name, fn in checks:
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        yield name, passed, detail
