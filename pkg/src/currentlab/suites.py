"""Named bundles of residual checks with machine-readable reports.

Every check computes one nonnegative residual; it passes when the residual
is at or below its tolerance.  Checks are pure given (config, stream), so a
fixed RunConfig reproduces every residual bit for bit; only runtime_ms
varies between runs.  Suites may execute checks concurrently — each check
owns a private seeded stream derived from (config.seed, registry index)."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import group as G
from . import measures as M
from . import process as P
from . import quadrature as Q
from . import reps as R
from . import specfun
from .errors import DomainError
from .gridfn import CellGrid, GridFunction, grid_1d_sqrt, tabulate
from .process import SeededStream
from .specfun import Dimensions


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by every suite run; flags override config-file values,
    which override these defaults."""

    n: int = 2
    partition: tuple = (0.5, 0.3)
    seed: int = 2024
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "json"
    workers: int = 4
    trials: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be at least 2")
        if any(m <= 0 for m in self.partition):
            raise DomainError("partition masses must be positive")
        if any(t <= 0 for t in self.tolerances.values()):
            raise DomainError("tolerances must be positive")
        if self.format not in ("json", "csv"):
            raise DomainError("format must be json or csv")


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    paper_anchor: str
    residual: float
    tolerance: float
    passed: bool
    runtime_ms: int

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "paper_anchor": self.paper_anchor,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    suite: str
    anchor: str
    tolerance: float
    fn: object


_REGISTRY: list = []

SUITE_NAMES = (
    "specfun", "fourier", "levy-khinchin", "measures", "coherence",
    "invariance", "group", "reps", "spherical", "all",
)


def _check(suite: str, check_id: str, anchor: str, tolerance: float):
    def deco(fn):
        _REGISTRY.append(CheckSpec(check_id, suite, anchor, tolerance, fn))
        return fn
    return deco


# ---------------------------------------------------------------------------
# special-function checks
# ---------------------------------------------------------------------------

@_check("specfun", "v-half-exponential", "17-7", 1e-12)
def _v_half_exp(cfg, stream):
    worst = 0.0
    for x in np.linspace(0.0, 5.0, 26):
        want = math.exp(2.0 * x)
        worst = max(worst, abs(specfun.v_rho(0.5, float(x)) - want) / want)
    return worst


@_check("specfun", "v-at-zero", "17-7", 1e-14)
def _v_zero(cfg, stream):
    return max(abs(specfun.v_rho(rho, 0.0) - 1.0) for rho in (0.5, 1.0, 2.0))


@_check("specfun", "k-half-integer", "17-5", 1e-10)
def _k_half_int(cfg, stream):
    worst = 0.0
    for z in (0.5, 1.0, 2.0):
        want = math.sqrt(math.pi / (4.0 * z)) * math.exp(-2.0 * z)
        worst = max(worst, abs(specfun.bessel_k(0.5, z) - want) / want)
        want32 = want * (1.0 + 1.0 / (2.0 * z))
        worst = max(worst, abs(specfun.bessel_k(1.5, z) - want32) / want32)
    return worst


@_check("specfun", "k-order-symmetry", "17-5", 1e-10)
def _k_symmetry(cfg, stream):
    worst = 0.0
    for rho in (0.3, 0.8, 1.7, 2.4):
        for x in (0.1, 1.0, 5.0):
            a = specfun.bessel_k(rho, x)
            b = specfun.bessel_k(-rho, x)
            worst = max(worst, abs(a - b) / abs(a))
    return worst


@_check("specfun", "v-bessel-product", "17-7", 1e-10)
def _v_k_product(cfg, stream):
    worst = 0.0
    for rho in (0.5, 0.75, 1.0, 2.0):
        for x in (0.1, 0.5, 1.0, 3.0):
            prod = (specfun.v_rho(rho, x) * 2.0 / math.gamma(rho)
                    * x ** rho * specfun.bessel_k(rho, x))
            worst = max(worst, abs(prod - 1.0))
    return worst


@_check("specfun", "v-small-x-asymptotic", "17-8", 1e-2)
def _v_asymptotic(cfg, stream):
    worst = 0.0
    for rho in (0.5, 1.0, 2.0):
        x = 1e-3
        exact = specfun.v_rho(rho, x)
        approx = specfun.v_rho_asymptotic(rho, x)
        worst = max(worst, abs(exact - approx) / abs(exact - 1.0))
    return worst


@_check("specfun", "k-integer-order-continuity", "17-5", 1e-8)
def _k_continuity(cfg, stream):
    # the order-derivative is finite, so the two-sided mean across the
    # integer-order branch switch agrees with the limit value to O(eps^2)
    worst = 0.0
    for m in (1.0, 2.0):
        for x in (0.5, 2.0):
            mid = specfun.bessel_k(m, x)
            two = 0.5 * (specfun.bessel_k(m + 2e-6, x)
                         + specfun.bessel_k(m - 2e-6, x))
            worst = max(worst, abs(two - mid) / mid)
    return worst


@_check("specfun", "marginal-density-total-mass", "17-9", 1e-8)
def _marginal_mass(cfg, stream):
    worst = 0.0
    for n, lam in ((2, 1.0), (3, 0.7)):
        dims = Dimensions(n)
        d = dims.d
        area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
        val, _ = integrate.quad(
            lambda r: area * r ** (d - 1)
            * math.exp(specfun.log_marginal_radial_density(dims, lam, r)),
            0.0, 40.0, limit=300, points=[1e-4, 0.01, 0.1, 1.0, 5.0],
        )
        worst = max(worst, abs(val - 1.0))
    return worst


@_check("specfun", "jump-density-closed-form", "345-1", 1e-10)
def _levy_value(cfg, stream):
    got = specfun.levy_density_radial(Dimensions(2), 0.5)
    want = 0.5 ** -0.5 * math.sqrt(math.pi / 2.0) * math.exp(-1.0)
    return abs(got - want) / want


# ---------------------------------------------------------------------------
# Fourier identities
# ---------------------------------------------------------------------------

@_check("fourier", "fourier-constant-n2", "17-3", 1e-6)
def _cn_2(cfg, stream):
    return Q.cached_cn(2).spread


@_check("fourier", "fourier-constant-n3", "17-3", 1e-6)
def _cn_3(cfg, stream):
    return Q.cached_cn(3).spread


@_check("fourier", "power-pairing-n2", "17-4", 1e-5)
def _pairing_2(cfg, stream):
    return Q.power_pairing_residual(Dimensions(2), 0.5, Q.cached_cn(2).value)


@_check("fourier", "power-pairing-n3", "17-4", 1e-5)
def _pairing_3(cfg, stream):
    dims = Dimensions(3)
    cn = Q.cached_cn(3).value
    return max(Q.power_pairing_residual(dims, lam, cn) for lam in (0.5, 1.0, 1.5))


@_check("fourier", "v-inverse-transform-n2", "727-7", 1e-5)
def _vinv_2(cfg, stream):
    return max(Q.fourier_vrho_inverse_check(Dimensions(2), 0.5, Q.cached_cn(2).value))


@_check("fourier", "v-inverse-transform-n3", "727-7", 1e-5)
def _vinv_3(cfg, stream):
    return max(Q.fourier_vrho_inverse_check(Dimensions(3), 1.0, Q.cached_cn(3).value))


# ---------------------------------------------------------------------------
# Levy-Khinchin representation
# ---------------------------------------------------------------------------

def _lk_worst(n: int) -> float:
    dims = Dimensions(n)
    kappa = Q.fit_levy_khinchin_kappa(n)
    return max(Q.levy_khinchin_residual(dims, g, kappa) for g in (0.5, 1.0, 2.0, 4.0))


@_check("levy-khinchin", "levy-khinchin-n2", "345-1", 1e-4)
def _lk_2(cfg, stream):
    return _lk_worst(2)


@_check("levy-khinchin", "levy-khinchin-n3", "345-1", 1e-4)
def _lk_3(cfg, stream):
    return _lk_worst(3)


def _lk_kappa_dev(n: int) -> float:
    want = -2.0 * math.pi ** (-(n - 1) / 2.0)
    return abs(Q.fit_levy_khinchin_kappa(n) - want) / abs(want)


@_check("levy-khinchin", "levy-khinchin-constant-n2", "345-1", 1e-6)
def _lk_kappa_2(cfg, stream):
    return _lk_kappa_dev(2)


@_check("levy-khinchin", "levy-khinchin-constant-n3", "345-1", 1e-6)
def _lk_kappa_3(cfg, stream):
    return _lk_kappa_dev(3)


# ---------------------------------------------------------------------------
# group laws
# ---------------------------------------------------------------------------

def _group_trials(cfg) -> int:
    return cfg.trials if cfg.trials else 100


def _random_point(rng, d):
    return rng.standard_normal(d)


@_check("group", "membership-closure", "1-1", 1e-9)
def _membership(cfg, stream):
    worst = 0.0
    for n in (2, 3):
        dims = Dimensions(n)
        for _ in range(20):
            g = G.random_element(dims, stream.rng)
            h = G.random_element(dims, stream.rng)
            worst = max(worst, (g @ h).membership_residual(),
                        g.inverse().membership_residual())
    return worst


@_check("group", "cocycle-law", "1-4", 1e-9)
def _cocycle_law(cfg, stream):
    worst = 0.0
    done = 0
    while done < _group_trials(cfg):
        n = 2 + done % 2
        dims = Dimensions(n)
        g1 = G.random_element(dims, stream.rng)
        g2 = G.random_element(dims, stream.rng)
        x = _random_point(stream.rng, dims.d)
        try:
            lhs = G.cocycle_beta(x, g1 @ g2)
            rhs = G.cocycle_beta(x, g1) * G.cocycle_beta(G.act(x, g1), g2)
        except Exception:
            continue
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        done += 1
    return worst


@_check("group", "action-composition", "1-2", 1e-9)
def _action_law(cfg, stream):
    worst = 0.0
    done = 0
    while done < _group_trials(cfg):
        n = 2 + done % 2
        dims = Dimensions(n)
        g1 = G.random_element(dims, stream.rng)
        g2 = G.random_element(dims, stream.rng)
        x = _random_point(stream.rng, dims.d)
        try:
            lhs = G.act(G.act(x, g1), g2)
            rhs = G.act(x, g1 @ g2)
        except Exception:
            continue
        scale = max(1.0, float(np.abs(rhs).max()))
        worst = max(worst, float(np.abs(lhs - rhs).max()) / scale)
        done += 1
    return worst


def _measure_relation_worst(cfg, stream, which: int) -> float:
    worst = 0.0
    done = 0
    while done < max(25, _group_trials(cfg) // 4):
        n = 2 + done % 2
        dims = Dimensions(n)
        g = G.random_element(dims, stream.rng)
        x = _random_point(stream.rng, dims.d)
        y = _random_point(stream.rng, dims.d)
        try:
            res = G.measure_relation_check(g, x, y)
        except Exception:
            continue
        worst = max(worst, res[which])
        done += 1
    return worst


@_check("group", "jacobian-cocycle-relation", "1-5", 1e-6)
def _jacobian_beta(cfg, stream):
    return _measure_relation_worst(cfg, stream, 0)


@_check("group", "distance-cocycle-relation", "1-6", 1e-6)
def _distance_beta(cfg, stream):
    return _measure_relation_worst(cfg, stream, 1)


@_check("group", "exchange-identity-matrix", "364", 1e-10)
def _exchange_matrix(cfg, stream):
    worst = 0.0
    for d in (1, 2):
        for _ in range(20):
            gamma = stream.rng.standard_normal(d)
            if float(gamma @ gamma) < 1e-4:
                continue
            worst = max(worst, G.word_identity_residual(gamma))
    return worst


@_check("group", "factor-word-roundtrip", "1-1", 1e-8)
def _factor_roundtrip(cfg, stream):
    worst = 0.0
    done = 0
    while done < _group_trials(cfg):
        n = 2 + done % 2
        dims = Dimensions(n)
        g = G.random_element(dims, stream.rng)
        try:
            w = G.factor_word(g)
        except Exception:
            continue
        scale = max(1.0, float(np.abs(g.m).max()))
        worst = max(worst, float(np.abs(w.evaluate().m - g.m).max()) / scale)
        done += 1
    return worst


@_check("group", "triangular-composition", "1-1", 1e-10)
def _triangular_composition(cfg, stream):
    worst = 0.0
    for d in (1, 2):
        for _ in range(20):
            def rand_t():
                eps = math.exp(stream.rng.uniform(-1, 1))
                if stream.rng.random() < 0.5:
                    eps = -eps
                return G.TriangularElement(
                    eps, G.random_orthogonal(d, stream.rng),
                    stream.rng.standard_normal(d))
            t1, t2 = rand_t(), rand_t()
            lhs = t1.compose(t2).matrix().m
            rhs = (t1.matrix() @ t2.matrix()).m
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


@_check("group", "inversion-squared", "1-1", 1e-15)
def _s_squared(cfg, stream):
    worst = 0.0
    for n in (2, 3):
        s = G.make_s(n)
        worst = max(worst, float(np.abs((s @ s).m - np.eye(n + 1)).max()))
    return worst


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@_check("measures", "density-ratio-consistency", "17-91", 1e-10)
def _rn_ratio(cfg, stream):
    worst = 0.0
    for n, masses in ((2, (0.5, 0.3)), (3, (0.5, 0.7))):
        dims = Dimensions(n)
        part = M.Partition(masses)
        for _ in range(50):
            xi = stream.rng.standard_normal((part.size, dims.d))
            a = M.log_rn_derivative(dims, part, xi)
            b = M.log_nu_alpha_density(dims, part, xi) - M.log_mu_alpha_density(dims, part, xi)
            worst = max(worst, abs(a - b))
    return worst


@_check("measures", "characteristic-product-form", "1-12", 1e-12)
def _psi_product(cfg, stream):
    worst = 0.0
    dims = Dimensions(3)
    part = M.Partition((0.5, 0.7, 1.2))
    for _ in range(20):
        gamma = stream.rng.standard_normal((3, 2))
        direct = 1.0
        for lam, g in zip(part.masses, gamma):
            direct *= (1.0 + float(g @ g) / 4.0) ** (-lam / 2.0)
        got = M.big_psi(part, dims, gamma)
        worst = max(worst, abs(got - direct) / direct)
    return worst


@_check("measures", "nu-transform-single-cell", "30-1", 1e-12)
def _nu_char_value(cfg, stream):
    got = M.nu_char(M.Partition((1.0,)), Dimensions(2), np.array([[2.0]]))
    return abs(got - 0.5)


@_check("measures", "refinement-limit-of-density", "29", 1e-2)
def _refinement_limit(cfg, stream):
    dims = Dimensions(2)
    config = P.PointConfiguration(
        total_mass=1.0,
        positions=np.array([0.15, 0.5, 0.85]),
        amplitudes=np.array([[0.6], [-0.4], [0.9]]),
    )
    want = M.log_density_v(dims, 1.0, config.radii)
    part = M.Partition((1.0,))
    got = None
    for _ in range(4):
        part = M.split_evenly(part, 5).fine
        xi = P.project_config(config, part)
        got = M.log_rn_derivative(dims, part, xi)
    return abs(math.exp(got - want) - 1.0)


@_check("measures", "characteristic-positive-definite", "181-1", 1e-10)
def _char_l_psd(cfg, stream):
    pts = stream.rng.standard_normal((20, 2)) * 1.5
    gram = np.empty((20, 20))
    for i in range(20):
        for j in range(20):
            gram[i, j] = M.char_l(pts[i] - pts[j])
    return max(0.0, -float(np.linalg.eigvalsh(gram).min()))


@_check("measures", "characteristic-value", "181-1", 1e-14)
def _char_l_value(cfg, stream):
    return abs(M.char_l([2.0]) - 2.0 ** -0.5)


# ---------------------------------------------------------------------------
# coherence under refinement
# ---------------------------------------------------------------------------

def _coherence(n: int, stream, n_samples: int = 200_000) -> dict:
    dims = Dimensions(n)
    coarse = M.Partition((0.5,) if n == 2 else (0.5, 0.7))
    ref = M.split_evenly(coarse, 2)
    return M.check_coherence(dims, ref, stream=stream, n_samples=n_samples)


@_check("coherence", "nu-exact-refinement-n2", "30-1", 1e-12)
def _coh_nu_2(cfg, stream):
    r = _coherence(2, stream, n_samples=100)
    return max(r["nu_char_residual"], r["big_psi_residual"])


@_check("coherence", "nu-exact-refinement-n3", "30-1", 1e-12)
def _coh_nu_3(cfg, stream):
    r = _coherence(3, stream, n_samples=100)
    return max(r["nu_char_residual"], r["big_psi_residual"])


@_check("coherence", "mu-projection-mc-n2", "17-9", 3.0)
def _coh_mu_2(cfg, stream):
    return _coherence(2, stream)["mc_sigmas"]


@_check("coherence", "mu-projection-mc-n3", "17-9", 3.0)
def _coh_mu_3(cfg, stream):
    return _coherence(3, stream)["mc_sigmas"]


@_check("coherence", "trivial-refinement", "30-1", 1e-15)
def _coh_trivial(cfg, stream):
    dims = Dimensions(2)
    coarse = M.Partition((0.5, 0.3))
    ref = M.split_evenly(coarse, 1)
    r = M.check_coherence(dims, ref, stream=stream, n_samples=100)
    return max(r["nu_char_residual"], r["big_psi_residual"])


@_check("coherence", "two-level-chain", "30-1", 1e-12)
def _coh_chain(cfg, stream):
    dims = Dimensions(3)
    alpha = M.Partition((0.6, 0.9))
    beta = M.split_evenly(alpha, 2).fine
    delta_ref = M.split_evenly(beta, 2)
    gamma_a = stream.rng.standard_normal((alpha.size, dims.d))
    gamma_d = np.asarray([gamma_a[j // 4] for j in range(delta_ref.fine.size)])
    lhs = math.log(M.nu_char(delta_ref.fine, dims, gamma_d))
    rhs = math.log(M.nu_char(alpha, dims, gamma_a))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# invariance laws
# ---------------------------------------------------------------------------

@_check("invariance", "nu-rotation-invariance", "18-33", 1e-12)
def _nu_rotation(cfg, stream):
    dims = Dimensions(3)
    part = M.Partition((0.5, 0.7))
    worst = 0.0
    for _ in range(20):
        xi = stream.rng.standard_normal((2, 2))
        rotated = np.asarray([
            xi[i] @ G.random_orthogonal(2, stream.rng) for i in range(2)
        ])
        worst = max(worst, abs(
            M.log_nu_alpha_density(dims, part, rotated)
            - M.log_nu_alpha_density(dims, part, xi)
        ))
    return worst


@_check("invariance", "nu-scaling-covariance", "18-3", 1e-12)
def _nu_scaling(cfg, stream):
    worst = 0.0
    for n, masses in ((2, (0.5, 0.3)), (3, (0.5, 0.7))):
        dims = Dimensions(n)
        part = M.Partition(masses)
        for _ in range(20):
            xi = stream.rng.standard_normal((part.size, dims.d))
            eps = np.exp(stream.rng.uniform(-1.0, 1.0, size=part.size))
            lhs = (M.log_nu_alpha_density(dims, part, eps[:, None] * xi)
                   + dims.d * float(np.log(eps).sum()))
            rhs = (M.log_nu_alpha_density(dims, part, xi)
                   + float(np.dot(part.masses, np.log(eps))))
            worst = max(worst, abs(lhs - rhs))
    return worst


@_check("invariance", "mu-rotation-invariance", "17-9", 1e-12)
def _mu_rotation(cfg, stream):
    dims = Dimensions(3)
    part = M.Partition((0.5, 0.7))
    worst = 0.0
    for _ in range(20):
        xi = stream.rng.standard_normal((2, 2))
        u = G.random_orthogonal(2, stream.rng)
        worst = max(worst, abs(
            M.log_mu_alpha_density(dims, part, xi @ u)
            - M.log_mu_alpha_density(dims, part, xi)
        ))
    return worst


@_check("invariance", "configuration-rotation-radii", "29", 1e-12)
def _config_rotation(cfg, stream):
    dims = Dimensions(3)
    config = P.sample_process(dims, 1.0, 0.05, stream)
    u = G.random_orthogonal(dims.d, stream.rng)
    rotated = P.rotate_config(config, u)
    if len(config.positions) == 0:
        return 0.0
    return float(np.abs(rotated.radii - config.radii).max())


# ---------------------------------------------------------------------------
# representation operators (single cell n = 2 unless stated)
# ---------------------------------------------------------------------------

_D2 = Dimensions(2)
_LAM = 0.5


def _grid64() -> CellGrid:
    return grid_1d_sqrt(25.0, 64)


def _grid320() -> CellGrid:
    return grid_1d_sqrt(60.0, 320)


def _bump_phi(grid: CellGrid) -> GridFunction:
    return tabulate([grid], lambda xi: np.exp(-np.sum((xi - 0.8) ** 2, axis=-1)))


@_check("reps", "z-letter-unitarity", "1-14-1", 1e-12)
def _z_unitarity(cfg, stream):
    phi = _bump_phi(_grid64())
    out = R.t_comm_apply(_D2, _LAM, G.TriangularElement(1.0, np.eye(1), [0.7]), phi)
    n0 = R.comm_norm(_D2, _LAM, phi)
    return abs(math.sqrt(R.comm_norm(_D2, _LAM, out) / n0) - 1.0)


@_check("reps", "d-letter-unitarity", "1-15-1", 1e-12)
def _d_unitarity(cfg, stream):
    phi = _bump_phi(_grid64())
    out = R.t_comm_apply(_D2, _LAM, G.TriangularElement(2.0, np.eye(1), [0.0]), phi)
    n0 = R.comm_norm(_D2, _LAM, phi)
    return abs(math.sqrt(R.comm_norm(_D2, _LAM, out) / n0) - 1.0)


@_check("reps", "current-letter-unitarity", "17-13", 1e-12)
def _current_unitarity(cfg, stream):
    part = M.Partition((0.5, 0.3))
    cells = [_grid64(), _grid64()]
    phi = R._product_bump(cells)
    letters = [
        G.TriangularElement(2.0, np.eye(1), [0.4]),
        G.TriangularElement(-0.7, np.eye(1), [-1.1]),
    ]
    out = R.u_current_apply(_D2, part, letters, phi)
    n0 = R.nu_norm(_D2, part, phi)
    return abs(math.sqrt(R.nu_norm(_D2, part, out) / n0) - 1.0)


@_check("reps", "kernel-involution", "73-1", 1e-3)
def _s_involution(cfg, stream):
    return R.involution_residual(_D2, _LAM, _grid64())[0]


@_check("reps", "kernel-unitarity", "73-1", 1e-3)
def _s_unitarity(cfg, stream):
    return R.involution_residual(_D2, _LAM, _grid64())[1]


@_check("reps", "inversion-dilation-conjugation", "363", 1e-3)
def _s_d_conj(cfg, stream):
    return R.s_dilation_conjugation_residual(_D2, _LAM, _grid64(), 2.0)


@_check("reps", "inversion-translation-exchange", "364", 1e-3)
def _z_exchange(cfg, stream):
    return R.z_exchange_residual(_D2, _LAM, _grid320(), [0.7])


@_check("reps", "vacuum-identities-n2", "342-1", 1e-6)
def _vacuum_2(cfg, stream):
    r = R.vacuum_checks(_D2, 0.5, Q.cached_cn(2).value)
    return max(r["ratio_residual"], r["norm_residual"])


@_check("reps", "vacuum-identities-n3", "342-1", 1e-6)
def _vacuum_3(cfg, stream):
    r = R.vacuum_checks(Dimensions(3), 1.0, Q.cached_cn(3).value)
    return max(r["ratio_residual"], r["norm_residual"])


@_check("reps", "tensor-embedding-z-commutation", "31-21", 1e-12)
def _tau_z(cfg, stream):
    cells = [grid_1d_sqrt(10.0, 24), grid_1d_sqrt(10.0, 24)]
    return R.tau_z_commutation_residual(
        _D2, cells, lambda xi: np.exp(-np.sum(np.atleast_1d(xi) ** 2)), [0.4])


@_check("reps", "tensor-embedding-isometry", "31-21", 3.0)
def _tau_isometry(cfg, stream):
    dims = Dimensions(3)
    f = lambda g: math.exp(-float(np.dot(g, g)))
    s2 = SeededStream(stream.seed, stream.stream_id + 1000)
    e1, s1, e2, ss2 = R.tau_isometry_mc(dims, (0.5, 0.7), f, stream, s2, n_mc=100_000)
    return abs(e1 - e2) / math.sqrt(s1 ** 2 + ss2 ** 2)


def _r_cov_setup():
    part = M.Partition((0.5, 0.3))
    cells = [_grid320(), _grid320()]
    gamma = np.array([[0.7], [-1.1]])
    return part, cells, gamma


@_check("reps", "dual-transform-translation", "444", 1e-12)
def _r_cov_z(cfg, stream):
    part, cells, gamma = _r_cov_setup()
    return R.r_covariance_z_residual(_D2, part, cells, [[0.4], [-0.6]], gamma)


@_check("reps", "dual-transform-dilation", "257", 1e-6)
def _r_cov_d(cfg, stream):
    part, cells, gamma = _r_cov_setup()
    return R.r_covariance_d_residual(_D2, part, cells, [2.0, -0.7], gamma)


@_check("reps", "dual-transform-inversion", "2561", 1e-3)
def _r_cov_s(cfg, stream):
    part, cells, gamma = _r_cov_setup()
    return R.r_covariance_s_residual(_D2, part, cells, gamma)


@_check("reps", "special-cocycle-law", "11-13", 1e-8)
def _special_cocycle(cfg, stream):
    ident = np.eye(1)
    g1 = [G.TriangularElement(1.0, ident, [0.6])]
    g2 = [G.TriangularElement(1.7, ident, [-0.3])]
    return R.special_cocycle_law_residual(_D2, g1, g2, _grid64())


@_check("reps", "special-limit-continuity", "11-13", 1e-6)
def _lambda_zero_limit(cfg, stream):
    phi = _bump_phi(_grid64())
    letter = G.TriangularElement(1.01, np.eye(1), [0.5])
    small = R.t_comm_apply(_D2, 1e-4, letter, phi)
    zero = R.t_comm_apply(_D2, 0.0, letter, phi)
    return float(np.abs(small.values - zero.values).max()
                 / np.abs(zero.values).max())


# ---------------------------------------------------------------------------
# spherical-function reproduction (the headline equivalence)
# ---------------------------------------------------------------------------

def _spherical_case(n: int, masses: tuple, radius: float, stream) -> float:
    dims = Dimensions(n)
    part = M.Partition(masses)
    g = np.full((len(masses), dims.d), radius / math.sqrt(dims.d))
    est, se, target = R.spherical_reproduce(dims, part, g, stream, n_draws=200_000)
    if se == 0.0:
        return 0.0 if abs(est - target) <= 1e-12 else math.inf
    return abs(est - target) / se


def _register_spherical():
    for n in (2, 3):
        for masses in ((1.0,), (0.5, 0.5)):
            for radius in (0.0, 1.0, 2.0):
                cid = (f"spherical-n{n}-l{len(masses)}-"
                       f"g{radius:g}".replace(".", "p"))

                @_check("spherical", cid, "1-12", 3.0)
                def _sph(cfg, stream, n=n, masses=masses, radius=radius):
                    return _spherical_case(n, masses, radius, stream)


_register_spherical()


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def suite_specs(suite: str) -> list:
    if suite not in SUITE_NAMES:
        raise DomainError(f"unknown suite {suite!r}; choose from {SUITE_NAMES}")
    if suite == "all":
        return list(_REGISTRY)
    return [s for s in _REGISTRY if s.suite == suite]


def _run_one(spec: CheckSpec, cfg: RunConfig, index: int) -> CheckReport:
    stream = SeededStream(cfg.seed, index)
    t0 = time.perf_counter()
    residual = float(spec.fn(cfg, stream))
    ms = int(round((time.perf_counter() - t0) * 1000.0))
    tol = float(cfg.tolerances.get(spec.check_id, spec.tolerance))
    return CheckReport(spec.check_id, spec.anchor, residual, tol,
                       residual <= tol, ms)


def run_suite(config: RunConfig, suite: str) -> list:
    """Run every check of the suite; returns the reports in registry order
    and, when config.output_path is set, writes the report file atomically
    (no partial file on failure)."""
    specs = suite_specs(suite)
    indices = {id(s): _REGISTRY.index(s) for s in specs}
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(
                lambda s: _run_one(s, config, indices[id(s)]), specs))
    else:
        reports = [_run_one(s, config, indices[id(s)]) for s in specs]
    if config.output_path:
        write_report(config, suite, reports)
    return reports


def write_report(config: RunConfig, suite: str, reports: list) -> None:
    tmp = config.output_path + ".tmp"
    if config.format == "csv":
        lines = ["check_id,paper_anchor,residual,tolerance,pass,runtime_ms"]
        for r in reports:
            lines.append(f"{r.check_id},{r.paper_anchor},{r.residual!r},"
                         f"{r.tolerance!r},{str(r.passed).lower()},{r.runtime_ms}")
        body = "\n".join(lines) + "\n"
    else:
        body = json.dumps({
            "suite": suite,
            "n": config.n,
            "seed": config.seed,
            "all_pass": all(r.passed for r in reports),
            "reports": [r.to_dict() for r in reports],
        }, indent=2) + "\n"
    with open(tmp, "w") as fh:
        fh.write(body)
    os.replace(tmp, config.output_path)
