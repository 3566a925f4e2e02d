"""Verification gates: closed-form laws against simulation and quadrature.

The transient law started from mu_0 is the independent superposition of a
Poisson field of newcomers and the survived-and-aged initial law.  For the
initial laws shipped here (point mass, Poisson, convolutions of those) both

    mu_t(F_theta)        and        mu_t(L F_theta)

have closed forms: the first from the explicit semigroup action, the second
from the factorization of expectations of F_theta times an additive particle
sum (for a Poisson field E[F * sum phi] = E[F] * int phi (1+theta) d rho;
for an independently thinned point mass the product form telescopes).

Each check returns a VerificationReport holding the measured statistic, the
threshold it was held to, and a pass flag; report lists can be rendered to
CSV or text.  Statistical gates use a 4-standard-error band unless the
criterion states otherwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .config_space import MarkedConfiguration
from .generator import ArrivalExponent, FlowedTheta, flow, resolvent
from .habitat import chi_integral, cumulative_hazard, gauss_profile_nodes, survival_factor
from .sampler import (
    PathBundle,
    _sample_points,
    event_driven_simulate,
    sample_poisson,
    stationary_intensity,
    transient_intensity,
)
from .test_functions import F_theta

__all__ = [
    "VerificationReport",
    "write_reports_csv",
    "format_reports",
    "DiracLaw",
    "PoissonLaw",
    "ConvolutionLaw",
    "ExplicitLaw",
    "survival_weighted_integral",
    "fokker_planck_check",
    "laplace_uniqueness_check",
    "martingale_residual",
    "ergodicity_gap_curve",
    "ergodicity_check",
    "chapman_kolmogorov_check",
    "cross_sampler_check",
    "count_law_oracle",
]


@dataclass(frozen=True)
class VerificationReport:
    name: str
    statistic: str
    value: float
    threshold: float
    passed: bool
    seed: int | None = None
    n_samples: int | None = None
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.note}]" if self.note else ""
        return (
            f"{status}  {self.name}: {self.statistic} = {self.value:.6e} "
            f"(threshold {self.threshold:.6e}){extra}"
        )


def write_reports_csv(reports, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "statistic", "value", "threshold", "passed", "seed", "n_samples", "note"])
        for r in reports:
            writer.writerow(
                [r.name, r.statistic, repr(r.value), repr(r.threshold), r.passed, r.seed, r.n_samples, r.note]
            )


def format_reports(reports):
    lines = [r.line() for r in reports]
    bad = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - bad}/{len(reports)} checks passed")
    return "\n".join(lines)


def survival_weighted_integral(habitat, model, h, a_lo, a_hi, breakpoints=(), tol=1e-11):
    """int_{a_lo}^{a_hi} int_window h(x, u) exp(-M(x, u)) chi(dx) du.

    Gauss-Legendre in space (split at the supplied kinks), adaptive in age.
    """
    if a_hi <= a_lo:
        return 0.0
    nodes, weights = gauss_profile_nodes(habitat, breakpoints=breakpoints)
    M = model.cumulative

    def slice_at(a):
        ages = np.full(nodes.shape[0], a)
        Ms = M(nodes, ages) if M is not None else cumulative_hazard(model, nodes, ages)
        return float(np.sum(weights * h(nodes, ages) * np.exp(-Ms)))

    val, _ = integrate.quad(slice_at, a_lo, a_hi, epsabs=tol, limit=400)
    return val


class DiracLaw:
    """Point mass at a fixed configuration."""

    def __init__(self, config):
        self.config = config

    def expect_F(self, vtheta):
        return F_theta(vtheta, self.config)

    def expect_weighted(self, vtheta, phi):
        cfg = self.config
        if not len(cfg):
            return 0.0
        F = F_theta(vtheta, cfg)
        return F * float(np.sum(phi(cfg.positions, cfg.ages)))

    def aged(self, t, model):
        return ThinnedDiracLaw(self.config, t, model) if t > 0 else self

    def sample_points(self, n_paths, rng):
        n = len(self.config)
        ids = np.repeat(np.arange(n_paths, dtype=np.int64), n)
        pos = np.tile(self.config.positions, (n_paths, 1))
        ages = np.tile(self.config.ages, n_paths)
        return ids, pos, ages


class ThinnedDiracLaw:
    """A point mass pushed through t of independent survival and aging."""

    def __init__(self, config, t, model):
        self.config = config
        self.t = float(t)
        self.model = model

    def _pieces(self, vtheta):
        cfg = self.config
        shifted = cfg.ages + self.t
        q = survival_factor(self.model, cfg.positions, cfg.ages, self.t)
        th = vtheta.theta(cfg.positions, shifted)
        return cfg.positions, shifted, q, th

    def expect_F(self, vtheta):
        if not len(self.config):
            return 1.0
        _, _, q, th = self._pieces(vtheta)
        return float(np.prod(1.0 + q * th))

    def expect_weighted(self, vtheta, phi):
        if not len(self.config):
            return 0.0
        pos, shifted, q, th = self._pieces(vtheta)
        base = np.prod(1.0 + q * th)
        contrib = q * phi(pos, shifted) * (1.0 + th) / (1.0 + q * th)
        return float(base * np.sum(contrib))

    def aged(self, s, model):
        return ThinnedDiracLaw(self.config, self.t + s, model)

    def sample_points(self, n_paths, rng):
        cfg = self.config
        n = len(cfg)
        ids = np.repeat(np.arange(n_paths, dtype=np.int64), n)
        pos = np.tile(cfg.positions, (n_paths, 1))
        ages = np.tile(cfg.ages, n_paths)
        q = survival_factor(self.model, pos, ages, self.t)
        keep = rng.random(ids.size) < q
        return ids[keep], pos[keep], ages[keep] + self.t


class PoissonLaw:
    """Poisson field over an intensity, optionally pushed through age_offset.

    Pushing a Poisson field through survival-and-aging yields the Poisson
    field of the pushed intensity, which for the survival-weighted densities
    used here is just the same integrand over a shifted age window.
    """

    def __init__(self, intensity, age_offset=0.0):
        self.intensity = intensity
        self.age_offset = float(age_offset)

    def _window(self):
        lo = self.age_offset
        return lo, lo + self.intensity.age_upper

    def _integral(self, h, vtheta_breaks=()):
        lo, hi = self._window()
        return survival_weighted_integral(
            self.intensity.habitat, self.intensity.model, h, lo, hi, breakpoints=vtheta_breaks
        )

    def expect_F(self, vtheta):
        breaks = getattr(vtheta, "x_breakpoints", ())
        return float(np.exp(self._integral(vtheta.theta, breaks)))

    def expect_weighted(self, vtheta, phi):
        breaks = getattr(vtheta, "x_breakpoints", ())

        def h(x, a):
            return phi(x, a) * (1.0 + vtheta.theta(x, a))

        return self.expect_F(vtheta) * self._integral(h, breaks)

    def aged(self, s, model):
        return PoissonLaw(self.intensity, self.age_offset + s)

    def sample_points(self, n_paths, rng):
        counts = rng.poisson(self.intensity.total_mass, n_paths)
        total = int(counts.sum())
        ids = np.repeat(np.arange(n_paths, dtype=np.int64), counts)
        if total == 0:
            return ids, np.empty((0, self.intensity.habitat.dim)), np.empty(0)
        pos, ages = _sample_points(self.intensity, total, rng)
        if self.age_offset > 0:
            q = survival_factor(self.intensity.model, pos, ages, self.age_offset)
            keep = rng.random(total) < q
            ids, pos, ages = ids[keep], pos[keep], ages[keep] + self.age_offset
        return ids, pos, ages


class ConvolutionLaw:
    """Law of the union of independent draws from the component laws."""

    def __init__(self, parts):
        self.parts = list(parts)

    def expect_F(self, vtheta):
        out = 1.0
        for p in self.parts:
            out *= p.expect_F(vtheta)
        return out

    def expect_weighted(self, vtheta, phi):
        fs = [p.expect_F(vtheta) for p in self.parts]
        ws = [p.expect_weighted(vtheta, phi) for p in self.parts]
        total = 0.0
        prod_all = float(np.prod(fs))
        for i, (f, w) in enumerate(zip(fs, ws)):
            if f == 0.0:
                return 0.0
            total += prod_all / f * w
        return total

    def aged(self, s, model):
        return ConvolutionLaw([p.aged(s, model) for p in self.parts])

    def sample_points(self, n_paths, rng):
        ids_all, pos_all, ages_all = [], [], []
        dim = None
        for p in self.parts:
            ids, pos, ages = p.sample_points(n_paths, rng)
            ids_all.append(ids)
            pos_all.append(pos)
            ages_all.append(ages)
            dim = pos.shape[1]
        return (
            np.concatenate(ids_all),
            np.vstack(pos_all) if pos_all else np.empty((0, dim or 1)),
            np.concatenate(ages_all),
        )


class ExplicitLaw:
    """Closed-form transient law from an initial law under a test function.

    expect_F(t) evaluates mu_t(F_theta) exactly (up to quadrature);
    expect_LF(t) evaluates mu_t(L F_theta) through the factorized particle
    sums, an independent route from differentiating expect_F.
    """

    def __init__(self, initial, theta, habitat, model):
        self.initial = initial
        self.theta = theta
        self.habitat = habitat
        self.model = model
        self.exponent = ArrivalExponent(theta, habitat, model)
        self._c3 = chi_integral(
            habitat,
            lambda x: theta.theta(x, np.zeros(x.shape[:-1])),
            tol=1e-12,
            points=theta.x_breakpoints,
        )

    def _phi(self, pos, ages):
        g = self.theta.g(pos, ages)
        gp = self.theta.g_age_derivative(pos, ages)
        m = self.model.rate(pos, ages)
        return -gp + m * np.expm1(g)

    def expect_F(self, t):
        pre = math.exp(self.exponent.H_quad(t))
        return pre * self.initial.aged(t, self.model).expect_F(self.theta)

    def expect_LF(self, t):
        theta = self.theta
        pre = math.exp(self.exponent.H_quad(t))
        aged = self.initial.aged(t, self.model)
        d_f = aged.expect_F(theta)
        d_w = aged.expect_weighted(theta, self._phi)

        def h(x, a):
            return self._phi(x, a) * (1.0 + theta.theta(x, a))

        p_w = survival_weighted_integral(
            self.habitat, self.model, h, 0.0, t, breakpoints=theta.x_breakpoints
        )
        mu_f = pre * d_f
        return mu_f * self._c3 + pre * (p_w * d_f + d_w)

    def law_at(self, t):
        parts = []
        if t > 0:
            parts.append(PoissonLaw(transient_intensity(self.habitat, self.model, t)))
        parts.append(self.initial.aged(t, self.model))
        return ConvolutionLaw(parts)


def fokker_planck_check(theta, initial, t, habitat, model, n_grid=64, name="fokker-planck"):
    """Residual of mu_t(F) = mu_0(F) + int_0^t mu_s(L F) ds, Simpson in s."""
    law = ExplicitLaw(initial, theta, habitat, model)
    grid = np.linspace(0.0, t, n_grid + 1)
    lf = np.array([law.expect_LF(s) for s in grid])
    integral = integrate.simpson(lf, x=grid)
    residual = abs(law.expect_F(t) - law.expect_F(0.0) - integral)
    return VerificationReport(
        name=name,
        statistic="|mu_t(F) - mu_0(F) - simpson(mu_s(LF))|",
        value=residual,
        threshold=1e-8,
        passed=residual < 1e-8,
        note=f"n_grid={n_grid}, t={t}",
    )


def laplace_uniqueness_check(theta, config, lam, habitat, model, name="laplace-uniqueness"):
    """Resolvent at a configuration vs the Laplace transform of the explicit law."""
    law = ExplicitLaw(DiracLaw(config), theta, habitat, model)
    lhs = resolvent(theta, 0.0, lam, config, habitat, model, exponent=law.exponent)
    horizon = 40.0 / lam
    rhs, _ = integrate.quad(
        lambda s: math.exp(-lam * s) * law.expect_F(s), 0.0, horizon, epsabs=1e-10, limit=400
    )
    residual = abs(lhs - rhs)
    return VerificationReport(
        name=name,
        statistic="|mu_0(resolvent) - laplace(mu_s(F))|",
        value=residual,
        threshold=1e-6,
        passed=residual < 1e-6,
        note=f"lambda={lam}",
    )


def martingale_residual(
    theta,
    initial,
    t1,
    t2,
    witness,
    habitat,
    model,
    n_paths,
    rng,
    n_grid=64,
    seed=None,
    name="martingale",
):
    """MC test that F(X_t) - int_0^t (L F)(X_u) du has flat expectation.

    Estimates E[(F(X_{t2}) - F(X_{t1}) - int_{t1}^{t2} L F(X_u) du) * W] with
    W = F_witness(X_{t1}); the time integral uses the midpoint rule on n_grid
    cells, fine enough that its bias is far below the Monte Carlo error.
    """
    if not (0.0 <= t1 < t2):
        raise ValueError("need 0 <= t1 < t2")
    c3 = chi_integral(
        habitat,
        lambda x: theta.theta(x, np.zeros(x.shape[:-1])),
        tol=1e-12,
        points=theta.x_breakpoints,
    )
    bundle = PathBundle(n_paths, habitat.dim)
    ids, pos, ages = initial.sample_points(n_paths, rng)
    bundle.path_ids, bundle.positions, bundle.ages = ids, pos, ages
    if t1 > 0:
        bundle.transition(t1, transient_intensity(habitat, model, t1), model, rng)
    w_vals = bundle.f_theta(witness) if witness is not None else np.ones(n_paths)
    f1 = bundle.f_theta(theta)

    def lf_by_path():
        if bundle.path_ids.size == 0:
            return np.full(n_paths, c3)
        g = theta.g(bundle.positions, bundle.ages)
        gp = theta.g_age_derivative(bundle.positions, bundle.ages)
        m = model.rate(bundle.positions, bundle.ages)
        sums = bundle.sum_by_path(g)
        aging = bundle.sum_by_path(gp)
        dep = bundle.sum_by_path(m * np.expm1(g))
        return np.exp(-sums) * (-aging + dep + c3)

    delta = (t2 - t1) / n_grid
    half_int = transient_intensity(habitat, model, delta / 2.0)
    full_int = transient_intensity(habitat, model, delta)
    integral = np.zeros(n_paths)
    bundle.transition(delta / 2.0, half_int, model, rng)
    for j in range(n_grid):
        integral += delta * lf_by_path()
        if j < n_grid - 1:
            bundle.transition(delta, full_int, model, rng)
    bundle.transition(delta / 2.0, half_int, model, rng)
    f2 = bundle.f_theta(theta)
    residuals = (f2 - f1 - integral) * w_vals
    est = float(residuals.mean())
    se = float(residuals.std(ddof=1) / math.sqrt(n_paths))
    return VerificationReport(
        name=name,
        statistic="|mean martingale increment|",
        value=abs(est),
        threshold=4.0 * se,
        passed=abs(est) < 4.0 * se,
        seed=seed,
        n_samples=n_paths,
        note=f"t1={t1}, t2={t2}, SE={se:.3e}",
    )


def ergodicity_gap_curve(theta, habitat, model, times):
    """Gaps |mu_t(F_theta) - pi(F_theta)| from the empty start, plus metadata.

    Returns (gaps, pi_value, tail_bound).  Requires m_zero > 0.
    """
    if model.m_zero <= 0:
        raise ValueError("ergodicity requires a positive hazard floor m_zero")
    exponent = ArrivalExponent(theta, habitat, model)
    h_inf, tail = exponent.H_limit()
    pi_value = math.exp(h_inf)
    gaps = np.array([abs(math.exp(exponent.H_quad(t)) - pi_value) for t in times])
    return gaps, pi_value, tail


def ergodicity_check(theta, habitat, model, times=None, name="ergodicity"):
    """Exponential convergence to the invariant value from the empty start.

    Fits the log-gap slope (should be close to -m_zero) and checks the final
    gap against the closed-form envelope chi_mass/m_zero * exp(-m_zero t)
    carried through the exponential.
    """
    if times is None:
        times = np.linspace(1.0, 10.0, 10)
    times = np.asarray(times, dtype=float)
    gaps, pi_value, _ = ergodicity_gap_curve(theta, habitat, model, times)
    m0 = model.m_zero
    t_max = float(times[-1])
    delta = habitat.chi_mass / m0 * math.exp(-m0 * t_max)
    envelope = pi_value * math.expm1(delta)
    positive = gaps > 0
    slope = float(np.polyfit(times[positive], np.log(gaps[positive]), 1)[0])
    ok = gaps[-1] <= envelope and abs(slope + m0) <= 0.1 * max(1.0, m0)
    return VerificationReport(
        name=name,
        statistic="final gap",
        value=float(gaps[-1]),
        threshold=envelope,
        passed=bool(ok),
        note=f"log-slope {slope:.4f} vs -m_zero {-m0}",
    )


def stationarity_check(theta, habitat, model, times, name="stationarity"):
    """Starting from the invariant Poisson law, mu_t(F_theta) stays flat."""
    intensity = stationary_intensity(habitat, model)
    law = ExplicitLaw(PoissonLaw(intensity), theta, habitat, model)
    pi_value = law.expect_F(0.0)
    worst = max(abs(law.expect_F(t) - pi_value) for t in times)
    tol = 1e-6
    return VerificationReport(
        name=name,
        statistic="max_t |mu_t(F) - pi(F)|",
        value=worst,
        threshold=tol,
        passed=worst < tol,
        note=f"pi(F)={pi_value:.8f}, age window truncation error {intensity.truncation_error:.2e}",
    )


def chapman_kolmogorov_check(theta, config, s, t, habitat, model, name="chapman-kolmogorov"):
    """Two-leg vs one-leg closed forms of the transition expectation."""
    one = ArrivalExponent(theta, habitat, model)
    lhs = math.exp(one.H_quad(s + t)) * DiracLaw(config).aged(s + t, model).expect_F(theta)
    flowed = FlowedTheta(theta, s, model)
    two_stage = ArrivalExponent(flowed, habitat, model)
    rhs = (
        math.exp(one.H_quad(s))
        * math.exp(two_stage.H_quad(t))
        * DiracLaw(config).aged(t, model).expect_F(flowed)
    )
    residual = abs(lhs - rhs)
    return VerificationReport(
        name=name,
        statistic="|one-leg - two-leg|",
        value=residual,
        threshold=1e-8,
        passed=residual < 1e-8,
        note=f"s={s}, t={t}",
    )


def _poisson_bins(counts, mean, min_expected=5.0):
    """Pool Poisson(mean) pmf bins so each expected cell count is >= 5."""
    n = counts.size
    kmax = int(max(counts.max(initial=0), math.ceil(mean + 10 * math.sqrt(mean + 1.0))))
    ks = np.arange(kmax + 1)
    pmf = stats.poisson.pmf(ks, mean)
    pmf = np.append(pmf, max(1.0 - pmf.sum(), 0.0))  # right tail
    observed = np.bincount(counts, minlength=kmax + 2)[: kmax + 2]
    # pool from the right and the left until expected >= min_expected
    exp_counts = pmf * n
    obs_pool, exp_pool = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, exp_counts):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_pool.append(acc_o)
            exp_pool.append(acc_e)
            acc_o = acc_e = 0.0
    if exp_pool:
        obs_pool[-1] += acc_o
        exp_pool[-1] += acc_e
    return np.asarray(obs_pool), np.asarray(exp_pool)


def count_law_oracle(
    habitat, model, times, n_paths, rng, seed=None, ks_samples=100_000, name="count-law"
):
    """Immigration-death oracle for a constant hazard.

    With m constant and total arrival mass chi_mass, the count started empty
    is Poisson(chi_mass (1 - e^{-mt})/m) at every t, the stationary count is
    Poisson(chi_mass/m), and the stationary age marginal is Exponential(m)
    (truncated at the sampler's age window).  The transient means are checked
    on event-driven trajectories; the stationary draws exercise the rejection
    sampler.
    """
    m = model.m_star
    if model.m_zero != m:
        raise ValueError("the count oracle applies to constant hazards")
    reports = []
    times = sorted(times)
    horizon = times[-1]
    counts = np.zeros((len(times), n_paths), dtype=np.int64)
    empty = MarkedConfiguration.empty(habitat.dim)
    for p in range(n_paths):
        traj = event_driven_simulate(empty, horizon, habitat, model, rng)
        for i, t in enumerate(times):
            counts[i, p] = sum(
                1
                for pid, (x, birth) in traj.births.items()
                if birth <= t and traj.deaths.get(pid, math.inf) > t
            )
    for i, t in enumerate(times):
        lam = habitat.chi_mass * (-math.expm1(-m * t)) / m
        err = abs(counts[i].mean() - lam)
        band = 3.0 * math.sqrt(lam / n_paths)
        reports.append(
            VerificationReport(
                name=f"{name}-transient-mean",
                statistic=f"|mean count - {lam:.4f}| at t={t}",
                value=err,
                threshold=band,
                passed=err < band,
                seed=seed,
                n_samples=n_paths,
            )
        )
    # stationary count distribution via the rejection sampler
    intensity = stationary_intensity(habitat, model)
    lam_st = habitat.chi_mass / m
    draw_counts = rng.poisson(intensity.total_mass, n_paths).astype(np.int64)
    obs, exp = _poisson_bins(draw_counts, lam_st)
    chi2 = float(np.sum((obs - exp) ** 2 / exp))
    dof = max(len(obs) - 1, 1)
    p_value = float(stats.chi2.sf(chi2, dof))
    reports.append(
        VerificationReport(
            name=f"{name}-stationary-count",
            statistic="chi2 p-value vs Poisson",
            value=p_value,
            threshold=0.01,
            passed=p_value > 0.01,
            seed=seed,
            n_samples=n_paths,
            note=f"chi2={chi2:.2f}, dof={dof}",
        )
    )
    # stationary age marginal: truncated exponential
    _, ages = _sample_points(intensity, ks_samples, rng)
    a_max = intensity.age_upper

    def cdf(a):
        return -np.expm1(-m * np.asarray(a)) / -math.expm1(-m * a_max)

    ks_stat = float(stats.kstest(ages, cdf).statistic)
    ks_threshold = 1.63 / math.sqrt(ks_samples)
    reports.append(
        VerificationReport(
            name=f"{name}-stationary-ages",
            statistic="KS statistic vs Exponential",
            value=ks_stat,
            threshold=ks_threshold,
            passed=ks_stat < ks_threshold,
            seed=seed,
            n_samples=ks_samples,
        )
    )
    return reports


def cross_sampler_check(theta, t, habitat, model, n_paths, rng, seed=None, name="cross-sampler"):
    """Event-driven vs one-shot transition sampling from the empty start.

    Compares the mean of F_theta (4 SE band on the difference) and the count
    histograms (two-sample chi-squared at the 1% level).
    """
    bundle = PathBundle(n_paths, habitat.dim)
    bundle.add_poisson(transient_intensity(habitat, model, t), rng)
    f_one = bundle.f_theta(theta)
    counts_one = bundle.counts()
    f_evt = np.empty(n_paths)
    counts_evt = np.empty(n_paths, dtype=np.int64)
    empty = MarkedConfiguration.empty(habitat.dim)
    for p in range(n_paths):
        traj = event_driven_simulate(empty, t, habitat, model, rng)
        state = traj.state_at(t)
        f_evt[p] = F_theta(theta, state)
        counts_evt[p] = len(state)
    diff = f_one.mean() - f_evt.mean()
    se = math.sqrt(f_one.var(ddof=1) / n_paths + f_evt.var(ddof=1) / n_paths)
    reports = [
        VerificationReport(
            name=f"{name}-f-mean",
            statistic="|mean F one-shot - mean F event|",
            value=abs(float(diff)),
            threshold=4.0 * se,
            passed=abs(diff) < 4.0 * se,
            seed=seed,
            n_samples=n_paths,
            note=f"t={t}",
        )
    ]
    kmax = int(max(counts_one.max(initial=0), counts_evt.max(initial=0)))
    table = np.vstack(
        [np.bincount(counts_one, minlength=kmax + 1), np.bincount(counts_evt, minlength=kmax + 1)]
    )
    keep = table.sum(axis=0) > 0
    table = table[:, keep]
    # pool sparse cells so expected counts stay reasonable
    col_tot = table.sum(axis=0)
    pooled = [np.zeros(2)]
    acc = np.zeros(2)
    for c in range(table.shape[1]):
        acc = acc + table[:, c]
        if acc.sum() >= 10:
            pooled.append(acc.copy())
            acc[:] = 0
    pooled[0] += acc
    table = np.stack([p for p in pooled if p.sum() > 0], axis=1)
    if table.shape[1] > 1:
        _, p_value, _, _ = stats.chi2_contingency(table)
    else:
        p_value = 1.0
    reports.append(
        VerificationReport(
            name=f"{name}-counts",
            statistic="two-sample chi2 p-value",
            value=float(p_value),
            threshold=0.01,
            passed=p_value > 0.01,
            seed=seed,
            n_samples=n_paths,
            note=f"t={t}",
        )
    )
    return reports
