"""The complementary-series representations T^lambda of the rank-one group,
their commutative (Fourier) model on grid functions, the current-group
operators over a partition, the involution, and the R transform.

Standard model: T_g f(gamma) = f(gamma.g) beta(gamma, g)^(1-n+lambda/2) on
functions over R^d with the pairing  <f1,f2> = integral integral
|gamma' - gamma''|^(-lambda) f1 f2.  Commutative model on the Fourier side:

    z(gamma0):  phi(xi) -> e^{i<xi,gamma0>} phi(xi)
    d(eps,u) :  phi(xi) -> |eps|^(lambda/2) phi(eps xi u)
    s        :  phi(xi) -> integral A_op(xi, xi') phi(xi') dxi'

with squared norm  (2^-lambda Gamma((d-lambda)/2)/Gamma(lambda/2))
integral |xi|^(lambda-d) |phi|^2 dxi  (coefficient 1 at lambda = 0).

The operator kernel A_op carries the constant (2/pi) 2^(-lambda/2) in front
of the raw oscillatory integrals of the quadrature module; this is the
normalisation forced by Fourier inversion (the (2 pi)^d of the inverse
transform), and it is what makes s an involution numerically."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma, gammaln

from . import group as G
from . import measures as M
from . import quadrature as Q
from . import specfun
from .errors import DomainError
from .gridfn import CellGrid, GridFunction, default_grid, tabulate
from .specfun import Dimensions


# ---------------------------------------------------------------------------
# norms and inner products
# ---------------------------------------------------------------------------

def _norm_coeff(dims: Dimensions, lam: float) -> float:
    if lam == 0.0:
        return 1.0
    return 2.0 ** (-lam) * math.exp(gammaln((dims.d - lam) / 2.0) - gammaln(lam / 2.0))


def comm_inner(dims: Dimensions, lam: float, phi1: GridFunction,
               phi2: GridFunction) -> complex:
    """Single-cell commutative-model pairing
    coeff(lam) * sum w |xi|^(lam-d) phi1 conj(phi2)."""
    if phi1.l != 1 or phi2.l != 1:
        raise DomainError("comm_inner is the single-cell pairing")
    c = phi1.cells[0]
    weight = c.weights * c.radii ** (lam - dims.d)
    return _norm_coeff(dims, lam) * complex(np.sum(weight * phi1.values * np.conj(phi2.values)))


def comm_norm(dims: Dimensions, lam: float, phi: GridFunction) -> float:
    """Squared norm in the commutative model."""
    return float(comm_inner(dims, lam, phi, phi).real)


def nu_inner(dims: Dimensions, partition: M.Partition, phi1: GridFunction,
             phi2: GridFunction) -> complex:
    """L^2(nu_alpha) pairing on the product grid."""
    vals = phi1.values * np.conj(phi2.values)
    for axis, (lam, c) in enumerate(zip(partition.masses, phi1.cells)):
        dens = (
            math.pi ** (-dims.d / 2.0)
            * _norm_coeff(dims, lam)
            * c.radii ** (lam - dims.d)
        )
        shape = [1] * vals.ndim
        shape[axis] = -1
        vals = vals * (c.weights * dens).reshape(shape)
    return complex(vals.sum())


def nu_norm(dims: Dimensions, partition: M.Partition, phi: GridFunction) -> float:
    return float(nu_inner(dims, partition, phi, phi).real)


# ---------------------------------------------------------------------------
# standard model
# ---------------------------------------------------------------------------

def t_std_apply(dims: Dimensions, lam: float, g: G.GroupElement, f):
    """T^lambda_g in the standard model: returns the callable
    gamma -> f(gamma.g) beta(gamma,g)^(1-n+lambda/2)."""
    expo = 1.0 - dims.n + lam / 2.0

    def out(gamma):
        return f(G.act(gamma, g)) * G.cocycle_beta(gamma, g) ** expo

    return out


def _sample_difference(dims: Dimensions, rng: np.random.Generator, lam: float,
                       count: int, r0: float = 1.0, sigma: float = 2.0,
                       p_sing: float = 0.5):
    """Importance proposal for the singular factor |u|^(-lam): a mixture of
    the normalized density ~ r^(d-1-lam) on [0, r0] (which integrates the
    singularity exactly) and a Gaussian; returns (u, q(u)) with q the mixture
    density in R^d."""
    d = dims.d
    area = 2.0 * math.pi ** (d / 2.0) / _gamma(d / 2.0)
    pick = rng.random(count) < p_sing
    r = r0 * rng.random(count) ** (1.0 / (d - lam))
    if d == 1:
        dirs = np.where(rng.random(count) < 0.5, -1.0, 1.0)[:, None]
    else:
        raw = rng.standard_normal((count, d))
        dirs = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    u_sing = r[:, None] * dirs
    u_gauss = sigma * rng.standard_normal((count, d))
    u = np.where(pick[:, None], u_sing, u_gauss)
    rr = np.linalg.norm(u, axis=1)
    q_sing = np.where(
        rr <= r0,
        (d - lam) / (area * r0 ** (d - lam)) * rr ** (-lam),
        0.0,
    )
    q_gauss = (2 * math.pi * sigma ** 2) ** (-d / 2.0) * np.exp(-rr ** 2 / (2 * sigma ** 2))
    return u, p_sing * q_sing + (1 - p_sing) * q_gauss


def inner_std(dims: Dimensions, lam: float, f1, f2, stream, n_mc: int = 200_000,
              sigma: float = 2.0):
    """Monte Carlo estimate of the standard-model pairing
    integral integral |g' - g''|^(-lam) f1(g') f2(g'') dg' dg''.

    The difference variable is importance-sampled with an |u|^(-lam)-exact
    proposal near 0 so the estimator has finite variance for all lam < d.
    Returns (estimate, standard_error)."""
    if not 0 < lam < dims.d:
        raise DomainError("inner_std needs 0 < lam < d")
    rng = stream.rng
    d = dims.d
    u, qu = _sample_difference(dims, rng, lam, n_mc, sigma=sigma)
    gpp = sigma * rng.standard_normal((n_mc, d))
    q_gpp = (2 * math.pi * sigma ** 2) ** (-d / 2.0) * np.exp(
        -np.sum(gpp ** 2, axis=1) / (2 * sigma ** 2)
    )
    gp = gpp + u
    rr = np.linalg.norm(u, axis=1)
    vals = (
        rr ** (-lam)
        * np.asarray([f1(x) for x in gp])
        * np.asarray([f2(x) for x in gpp])
        / (qu * q_gpp)
    )
    return float(np.mean(vals)), float(np.std(vals) / math.sqrt(n_mc))


# ---------------------------------------------------------------------------
# operator kernel and its discretization
# ---------------------------------------------------------------------------

def op_kernel(dims: Dimensions, lam: float, xi, xi_prime) -> float:
    """Kernel of T^lambda_s in the commutative model,
    (2/pi) 2^(-lam/2) * (raw kernel integral).  For n = 2 the Bessel closed
    form of the integral is used (exact and stable at large |xi xi'|); for
    n = 3 the oscillatory quadrature."""
    if dims.n == 2:
        v = Q.kernel_closed_form_n2(lam, float(xi), float(xi_prime))
    elif dims.n == 3:
        v, _, _ = Q.kernel_integral_n3(lam, xi, xi_prime)
    else:
        raise DomainError("operator kernel implemented for n in {2, 3}")
    return (2.0 / math.pi) * 2.0 ** (-lam / 2.0) * v


def op_kernel_quadrature(dims: Dimensions, lam: float, xi, xi_prime) -> float:
    """Same kernel evaluated by oscillatory quadrature of the defining
    integral for every n — the independent route cross-checked against
    op_kernel in the test suite."""
    if dims.n == 2:
        v, _, _ = Q.kernel_integral_n2(lam, float(xi), float(xi_prime))
    elif dims.n == 3:
        v, _, _ = Q.kernel_integral_n3(lam, xi, xi_prime)
    else:
        raise DomainError("operator kernel implemented for n in {2, 3}")
    return (2.0 / math.pi) * 2.0 ** (-lam / 2.0) * v


def _kernel_block_n2(lam: float, xi: np.ndarray, xi_prime: np.ndarray) -> np.ndarray:
    """Vectorized n = 2 closed-form kernel block A_op(xi_i, xi'_j)."""
    from scipy.special import jv, kv

    x = xi[:, None]
    y = xi_prime[None, :]
    s = x * y
    w = 2.0 ** 1.5 * np.sqrt(np.abs(s))
    amp = np.abs(2.0 * y / x) ** ((lam - 1.0) / 2.0)
    const = math.pi / (2.0 * math.cos(0.5 * math.pi * lam))
    with np.errstate(under="ignore"):
        same = const * (jv(lam - 1.0, w) - jv(1.0 - lam, w))
        cross = 2.0 * math.sin(0.5 * math.pi * lam) * kv(lam - 1.0, np.where(s > 0, 1.0, w))
    d = np.where(s > 0, same, cross)
    return (2.0 / math.pi) * 2.0 ** (-lam / 2.0) * amp * d


_KERNEL_CACHE: dict = {}


def kernel_matrix(dims: Dimensions, lam: float, target: CellGrid,
                  source: CellGrid) -> np.ndarray:
    """M[i, j] = A_op(target_i, source_j) * w_j, cached on grid content."""
    key = (
        dims.n, round(lam, 12),
        target.nodes.tobytes(), source.nodes.tobytes(), source.weights.tobytes(),
    )
    got = _KERNEL_CACHE.get(key)
    if got is not None:
        return got
    if dims.n == 2:
        m = _kernel_block_n2(lam, target.nodes[:, 0], source.nodes[:, 0])
    else:
        m = np.empty((target.size, source.size))
        for i, xi in enumerate(target.nodes):
            for j, xp in enumerate(source.nodes):
                m[i, j] = op_kernel(dims, lam, xi, xp)
    m = m * source.weights[None, :]
    _KERNEL_CACHE[key] = m
    return m


# ---------------------------------------------------------------------------
# commutative model operators
# ---------------------------------------------------------------------------

def _apply_z(phi: GridFunction, axis: int, gamma0: np.ndarray) -> GridFunction:
    c = phi.cells[axis]
    phase = np.exp(1j * c.nodes @ gamma0)
    factors = [None] * phi.l
    factors[axis] = phase
    return phi.scale_values(factors)


def _apply_d(dims: Dimensions, lam: float, phi: GridFunction, axis: int,
             eps: float, u: np.ndarray) -> GridFunction:
    """|eps|^(lam/2) phi(eps xi u) by transporting the node set: the result
    is known exactly at xi = p u^T / eps for each node p, with the quadrature
    weights rescaled by |eps|^(-d) — change of variables is exact."""
    c = phi.cells[axis]
    new_nodes = (c.nodes @ u.T) / eps
    new_weights = c.weights * abs(eps) ** (-dims.d)
    cells = list(phi.cells)
    cells[axis] = CellGrid(new_nodes, new_weights)
    return GridFunction(cells, phi.values * abs(eps) ** (lam / 2.0))


def _apply_s(dims: Dimensions, lam: float, phi: GridFunction, axis: int,
             target: CellGrid) -> GridFunction:
    mat = kernel_matrix(dims, lam, target, phi.cells[axis])
    vals = np.tensordot(mat, phi.values, axes=([1], [axis]))
    vals = np.moveaxis(vals, 0, axis)
    cells = list(phi.cells)
    cells[axis] = target
    return GridFunction(cells, vals)


def t_comm_apply(dims: Dimensions, lam: float, g, phi: GridFunction,
                 target: CellGrid | None = None) -> GridFunction:
    """Apply T^lambda_g in the commutative model to a single-cell grid
    function.  g may be a GroupWord, a single letter (TriangularElement or
    "s"), or a GroupElement (factored first).  Kernel letters land on the
    target grid (default: the function's own current grid)."""
    if phi.l != 1:
        raise DomainError("t_comm_apply acts on single-cell functions")
    letters = _as_letters(dims, g)
    out = phi
    # T is a homomorphism: T_{l1 l2} = T_{l1} T_{l2}, so the last letter
    # of the word acts first
    for let in reversed(letters):
        if isinstance(let, str):
            out = _apply_s(dims, lam, out, 0, target or out.cells[0])
        else:
            # triangular letter z(gamma) d(eps, u): apply d first, then the phase
            if abs(let.epsilon - 1.0) > 0 or np.abs(let.u - np.eye(dims.d)).max() > 0:
                out = _apply_d(dims, lam, out, 0, let.epsilon, let.u)
            if np.abs(let.gamma).max() > 0:
                out = _apply_z(out, 0, let.gamma)
    return out


def _as_letters(dims: Dimensions, g) -> list:
    if isinstance(g, G.GroupWord):
        return list(g.letters)
    if isinstance(g, (G.TriangularElement, str)):
        return [g]
    if isinstance(g, G.GroupElement):
        return list(G.factor_word(g).letters)
    raise DomainError(f"cannot interpret {type(g)} as a group word")


# ---------------------------------------------------------------------------
# operator identity residuals (single cell, n = 2)
# ---------------------------------------------------------------------------

def involution_residual(dims: Dimensions, lam: float, grid: CellGrid,
                        center: float = 0.8):
    """Relative L^2 error of applying the kernel letter twice to a Gaussian
    bump, and the relative norm defect of a single application:
    (||T_s T_s phi - phi|| / ||phi||, | ||T_s phi||/||phi|| - 1 |)."""
    phi = tabulate([grid], lambda xi: np.exp(-np.sum((xi - center) ** 2, axis=-1)))
    s1 = t_comm_apply(dims, lam, "s", phi, target=grid)
    s2 = t_comm_apply(dims, lam, "s", s1, target=grid)
    den = math.sqrt(comm_norm(dims, lam, phi))
    diff = GridFunction(phi.cells, s2.values - phi.values)
    inv = math.sqrt(comm_norm(dims, lam, diff)) / den
    uni = abs(math.sqrt(comm_norm(dims, lam, s1)) / den - 1.0)
    return inv, uni


def s_dilation_conjugation_residual(dims: Dimensions, lam: float,
                                    grid: CellGrid, eps: float) -> float:
    """T_s T_{d(eps,1)} = T_{d(1/eps,1)} T_s, both sides evaluated on the
    same node set (the inner kernel target of the right side is pre-scaled
    so the final dilation transport lands the nodes back on the grid)."""
    ident = np.eye(dims.d)
    phi = tabulate([grid], lambda xi: np.exp(-np.sum((xi - 0.8) ** 2, axis=-1)))
    d_el = G.TriangularElement(eps, ident, np.zeros(dims.d))
    d_inv = G.TriangularElement(1.0 / eps, ident, np.zeros(dims.d))
    lhs = t_comm_apply(dims, lam, "s", t_comm_apply(dims, lam, d_el, phi),
                       target=grid)
    pre = CellGrid(grid.nodes / eps, grid.weights / abs(eps) ** dims.d)
    rhs = t_comm_apply(dims, lam, d_inv,
                       t_comm_apply(dims, lam, "s", phi, target=pre))
    diff = GridFunction([grid], lhs.values - rhs.values)
    return math.sqrt(comm_norm(dims, lam, diff) / comm_norm(dims, lam, phi))


def z_exchange_residual(dims: Dimensions, lam: float, grid: CellGrid,
                        gamma) -> float:
    """The exchange identity z(gamma) s = d(gamma) s z(-gamma) s z(j gamma)
    as operators (two kernel applications on the right side), relative L^2
    on the grid."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    gn2 = float(gamma @ gamma)
    if gn2 == 0.0:
        raise DomainError("exchange identity needs gamma != 0")
    ident = np.eye(dims.d)
    eps_g = -gn2 / 2.0
    u_g = ident - 2.0 * np.outer(gamma, gamma) / gn2
    j_gamma = -2.0 * gamma / gn2

    def z_el(v):
        return G.TriangularElement(1.0, ident, np.asarray(v, dtype=float))

    phi = tabulate([grid], lambda xi: np.exp(-np.sum((xi - 0.8) ** 2, axis=-1)))
    lhs = t_comm_apply(dims, lam, z_el(gamma),
                       t_comm_apply(dims, lam, "s", phi, target=grid))
    t1 = t_comm_apply(dims, lam, z_el(j_gamma), phi)
    t2 = t_comm_apply(dims, lam, "s", t1, target=grid)
    t3 = t_comm_apply(dims, lam, z_el(-gamma), t2)
    pre = CellGrid((grid.nodes @ u_g) * eps_g, grid.weights * abs(eps_g) ** dims.d)
    t4 = t_comm_apply(dims, lam, "s", t3, target=pre)
    rhs = t_comm_apply(dims, lam,
                       G.TriangularElement(eps_g, u_g, np.zeros(dims.d)), t4)
    diff = GridFunction([grid], lhs.values - rhs.values)
    return math.sqrt(comm_norm(dims, lam, diff) / comm_norm(dims, lam, phi))


# ---------------------------------------------------------------------------
# vacuum vector
# ---------------------------------------------------------------------------

def vacuum_evaluator(dims: Dimensions, lam: float):
    """f_lambda(xi) = (|xi|^((lam-d)/2) K_{(d-lam)/2}(2|xi|))^(1/2); at
    lam = 0 this is the square root of the jump density g.  (The power
    carries the (lam-d)/2 exponent: that is the choice whose squared
    Fourier transform reproduces (1+|gamma|^2/4)^(-lam/2), and at lam = 0
    it degenerates to the jump density.)"""
    rho = (dims.d - lam) / 2.0

    def f(xi):
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        r = np.linalg.norm(xi, axis=1)
        return np.asarray([
            math.sqrt(s ** (-rho) * specfun.bessel_k(rho, s)) if s > 0 else 0.0
            for s in r
        ])

    return f


def vacuum(dims: Dimensions, lam: float, grid: CellGrid) -> GridFunction:
    return tabulate([grid], vacuum_evaluator(dims, lam))


def vacuum_checks(dims: Dimensions, lam: float, cn: float,
                  gamma_norms=(0.5, 1.0, 2.0)):
    """Two quadrature identities for the vacuum vector:

    (ratio)  integral e^{i<xi,gamma>} f_lambda^2 dxi /
             integral f_lambda^2 dxi  =  (1 + |gamma|^2/4)^(-lambda/2)

    (norm)   integral f_lambda^2 dxi  =  Gamma(lam/2) (2 pi)^d / (2 c_n),

    the norm value being the gamma-independent constant (with the inversion
    factor (2 pi)^d written out).  Returns dict of worst residuals."""
    d = dims.d
    rho = (d - lam) / 2.0

    def prof(r):
        r = np.atleast_1d(r)
        return np.asarray([s ** (-rho) * specfun.bessel_k(rho, s) for s in r])

    profile = Q.RadialProfile(prof, lam - d)
    norm0 = Q.radial_fourier(dims, profile, 0.0).value
    want_norm = _gamma(lam / 2.0) * (2.0 * math.pi) ** d / (2.0 * cn)
    norm_resid = abs(norm0 - want_norm) / want_norm
    ratio_resid = 0.0
    for gn in gamma_norms:
        got = Q.radial_fourier(dims, profile, gn).value / norm0
        want = (1.0 + gn * gn / 4.0) ** (-lam / 2.0)
        ratio_resid = max(ratio_resid, abs(got - want) / want)
    return {"ratio_residual": ratio_resid, "norm_residual": norm_resid}


# ---------------------------------------------------------------------------
# tensor products and the multiplicative embedding
# ---------------------------------------------------------------------------

def tau_embed(phi, l: int):
    """tau phi (xi_1, ..., xi_l) = phi(xi_1 + ... + xi_l): the Fourier-side
    form of multiplying l independent copies along a refinement."""

    def out(*xis):
        return phi(np.sum(np.asarray(xis, dtype=float), axis=0))

    return out


def tau_z_commutation_residual(dims: Dimensions, cells: list, phi, gamma0) -> float:
    """Exact node identity: applying the current z-letter (same gamma0 in
    every cell) to tau(phi) equals tau applied to the z-shifted phi."""
    gamma0 = np.atleast_1d(np.asarray(gamma0, dtype=float))
    tphi = tabulate(cells, tau_embed(phi, len(cells)))
    lhs = tphi
    for axis in range(len(cells)):
        lhs = _apply_z(lhs, axis, gamma0)

    def phi_shifted(xi):
        return phi(xi) * np.exp(1j * float(np.dot(xi, gamma0)))

    rhs = tabulate(cells, tau_embed(phi_shifted, len(cells)))
    denom = np.abs(tphi.values).max()
    return float(np.abs(lhs.values - rhs.values).max() / denom)


def tau_isometry_mc(dims: Dimensions, lambdas, f, stream, stream2,
                    n_mc: int = 200_000, sigma: float = 2.0):
    """Compare the standard-model pairing of f under the single mass
    lam = sum(lambdas) with the pairing of the embedded tensor, whose kernel
    is the per-cell product prod_i |g'-g''|^(-lam_i) (the diagonal support of
    the embedding collapses every factor onto the same pair of points).
    Independent MC streams; agreement within joint standard errors is the
    isometry check.  Returns (est1, se1, est2, se2)."""
    lam = float(np.sum(lambdas))
    e1, s1 = inner_std(dims, lam, f, f, stream, n_mc, sigma=sigma)

    rng = stream2.rng
    d = dims.d
    u, qu = _sample_difference(dims, rng, lam, n_mc, sigma=sigma)
    gpp = sigma * rng.standard_normal((n_mc, d))
    q_gpp = (2 * math.pi * sigma ** 2) ** (-d / 2.0) * np.exp(
        -np.sum(gpp ** 2, axis=1) / (2 * sigma ** 2)
    )
    gp = gpp + u
    rr = np.linalg.norm(u, axis=1)
    kern = np.ones(n_mc)
    for li in lambdas:
        kern = kern * rr ** (-float(li))
    vals = (
        kern
        * np.asarray([f(x) for x in gp])
        * np.asarray([f(x) for x in gpp])
        / (qu * q_gpp)
    )
    e2 = float(np.mean(vals))
    s2 = float(np.std(vals) / math.sqrt(n_mc))
    return e1, s1, e2, s2


# ---------------------------------------------------------------------------
# current group operators, involution, R transform
# ---------------------------------------------------------------------------

def u_current_apply(dims: Dimensions, partition: M.Partition, letters: list,
                    phi: GridFunction) -> GridFunction:
    """U_b for a cell-wise triangular current b = (eps_i, u_i, gamma_i):
    multiply by exp(1/2 sum lam_i log|eps_i|) e^{i sum <xi^i, gamma^i>} and
    substitute xi^i -> eps_i xi^i u_i."""
    if len(letters) != phi.l or phi.l != partition.size:
        raise DomainError("need one triangular letter per cell")
    out = phi
    log_amp = 0.0
    for axis, (lam, let) in enumerate(zip(partition.masses, letters)):
        if isinstance(let, str):
            raise DomainError("u_current_apply takes triangular letters only")
        out = _apply_d(dims, 0.0, out, axis, let.epsilon, let.u)
        out = _apply_z(out, axis, let.gamma)
        log_amp += 0.5 * lam * math.log(abs(let.epsilon))
    return GridFunction(out.cells, out.values * math.exp(log_amp))


def involution_apply(dims: Dimensions, partition: M.Partition,
                     phi: GridFunction, targets: list | None = None) -> GridFunction:
    """The involution I = tensor product over cells of T^{lam_i}_s."""
    partition.require_nu_valid(dims)
    out = phi
    for axis, lam in enumerate(partition.masses):
        tgt = targets[axis] if targets else out.cells[axis]
        out = _apply_s(dims, lam, out, axis, tgt)
    return out


def r_transform(dims: Dimensions, partition: M.Partition, phi: GridFunction,
                gamma) -> complex:
    """R phi(gamma) = integral phi(xi) e^{i<xi,gamma>} d nu_alpha(xi) by node
    quadrature on the product grid."""
    gamma = np.asarray(gamma, dtype=float).reshape(partition.size, dims.d)
    vals = phi.values.astype(complex)
    for axis, (lam, c) in enumerate(zip(partition.masses, phi.cells)):
        dens = (
            math.pi ** (-dims.d / 2.0)
            * _norm_coeff(dims, lam)
            * c.radii ** (lam - dims.d)
        )
        phase = np.exp(1j * c.nodes @ gamma[axis])
        shape = [1] * vals.ndim
        shape[axis] = -1
        vals = vals * (c.weights * dens * phase).reshape(shape)
    return complex(vals.sum())


def _product_bump(cells: list) -> GridFunction:
    """Odd, zero-mean product test function: per cell
    e^{-|xi - 0.8|^2} - e^{-|xi + 0.8|^2}.  The vanishing mean makes the
    R transform decay at infinity fast enough that grid truncation error
    stays far below the identity tolerances."""
    def one(nodes):
        return (np.exp(-np.sum((nodes - 0.8) ** 2, axis=-1))
                - np.exp(-np.sum((nodes + 0.8) ** 2, axis=-1)))

    vals = one(cells[0].nodes)
    for c in cells[1:]:
        vals = np.multiply.outer(vals, one(c.nodes))
    return GridFunction(cells, vals)


def r_covariance_z_residual(dims: Dimensions, partition: M.Partition,
                            cells: list, gamma0, gamma) -> float:
    """R(U_b phi)(gamma) = R phi(gamma + gamma0) for the current z-letter
    b with shift gamma0^i on cell i; exact on nodes."""
    gamma0 = np.asarray(gamma0, dtype=float).reshape(partition.size, dims.d)
    gamma = np.asarray(gamma, dtype=float).reshape(partition.size, dims.d)
    phi = _product_bump(cells)
    ident = np.eye(dims.d)
    letters = [G.TriangularElement(1.0, ident, g0) for g0 in gamma0]
    lhs = r_transform(dims, partition, u_current_apply(dims, partition, letters, phi), gamma)
    rhs = r_transform(dims, partition, phi, gamma + gamma0)
    return abs(lhs - rhs) / abs(rhs)


def r_covariance_d_residual(dims: Dimensions, partition: M.Partition,
                            cells: list, eps_list, gamma) -> float:
    """R(U_b phi)(gamma) = prod_i |eps_i|^(-lam_i/2) R phi(eps_i^{-1} gamma^i u_i)
    for the current d-letter b = (eps_i, u_i) (here u_i = identity); exact
    on nodes since the d-operator transports nodes without interpolation."""
    gamma = np.asarray(gamma, dtype=float).reshape(partition.size, dims.d)
    phi = _product_bump(cells)
    ident = np.eye(dims.d)
    letters = [G.TriangularElement(float(e), ident, np.zeros(dims.d))
               for e in eps_list]
    lhs = r_transform(dims, partition, u_current_apply(dims, partition, letters, phi), gamma)
    amp = math.exp(sum(-0.5 * lam * math.log(abs(float(e)))
                       for lam, e in zip(partition.masses, eps_list)))
    shifted = np.asarray([g / float(e) for g, e in zip(gamma, eps_list)])
    rhs = amp * r_transform(dims, partition, phi, shifted)
    return abs(lhs - rhs) / abs(rhs)


def r_covariance_s_residual(dims: Dimensions, partition: M.Partition,
                            cells: list, gamma) -> float:
    """R(I phi)(gamma) = 2^(m(X)/2) prod_i |gamma^i|^(-lam_i) R phi(j gamma)
    with j gamma^i = -2 gamma^i / |gamma^i|^2 (inversion covariance of the
    dual transform); kernel quadrature on both cells."""
    gamma = np.asarray(gamma, dtype=float).reshape(partition.size, dims.d)
    phi = _product_bump(cells)
    inv = involution_apply(dims, partition, phi, targets=list(cells))
    lhs = r_transform(dims, partition, inv, gamma)
    log_amp = 0.5 * partition.total_mass * math.log(2.0)
    jg = np.empty_like(gamma)
    for i, (lam, g) in enumerate(zip(partition.masses, gamma)):
        g2 = float(g @ g)
        if g2 == 0.0:
            raise DomainError("the inversion covariance needs gamma^i != 0")
        jg[i] = -2.0 * g / g2
        log_amp += -lam * 0.5 * math.log(g2)
    rhs = math.exp(log_amp) * r_transform(dims, partition, phi, jg)
    return abs(lhs - rhs) / abs(rhs)


def spherical_reproduce(dims: Dimensions, partition: M.Partition, gamma,
                        stream, n_draws: int = 100_000):
    """Headline equivalence check: the matrix coefficient of the current
    z-letter against the normalized vacuum 1/sqrt(v) of L^2(nu_alpha) equals
    the characteristic functional Psi(gamma).  By the density ratio
    v = d nu/d mu the coefficient is E_mu[e^{i<xi,gamma>}], estimated here by
    importance Monte Carlo over mu draws with the v-weights evaluated
    explicitly (they cancel only up to floating point).  Returns
    (estimate_re, se, target)."""
    from .process import sample_marginal

    gamma = np.asarray(gamma, dtype=float).reshape(partition.size, dims.d)
    draws = sample_marginal(dims, partition, stream, size=n_draws)
    nu_valid = all(lam < dims.d for lam in partition.masses)
    if nu_valid:
        log_v = np.zeros(n_draws)
        for i, lam in enumerate(partition.masses):
            r = np.linalg.norm(draws[:, i, :], axis=1)
            rho = (dims.d - lam) / 2.0
            log_v += specfun.log_v_rho_bulk(rho, r)
            log_v -= lam * math.log(2.0)
        # f = v^(-1/2): integrand e^{i xi gamma} f^2 v = e^{i(..)} e^{-log v + log v},
        # assembled from the explicitly computed log-density (sum in log space
        # so the e^(2r) growth of v cannot overflow)
        weights = np.exp(-log_v + log_v)
    else:
        # cells with lam_i >= d have no sigma-finite nu factor; the matrix
        # coefficient is computed directly as the mu-average of the phases
        weights = np.ones(n_draws)
    phases = np.exp(1j * np.einsum("nld,ld->n", draws, gamma)) * weights
    est = phases.real.mean()
    se = float(phases.real.std() / math.sqrt(n_draws))
    target = M.big_psi(partition, dims, gamma)
    return est, se, target


# ---------------------------------------------------------------------------
# special representation at lambda = 0
# ---------------------------------------------------------------------------

def special_apply(dims: Dimensions, letters, f):
    """T^0_g on analytic evaluators for words in {z, d}: z multiplies by the
    phase, d substitutes xi -> eps xi u with no amplitude factor."""

    def build(let, inner):
        if isinstance(let, str):
            raise DomainError("special_apply supports z and d letters")
        eps, u, gamma0 = let.epsilon, let.u, let.gamma

        def out(xi):
            xi = np.asarray(xi, dtype=float)
            val = inner(eps * xi @ u)
            if np.abs(gamma0).max() > 0:
                val = val * np.exp(1j * float(xi @ gamma0))
            return val

        return out

    # T_{l1 l2 ...} = T_{l1}(T_{l2}(...)): wrap from the innermost letter out
    g = f
    for let in reversed(list(letters)):
        g = build(let, g)
    return g


def special_cocycle(dims: Dimensions, letters, grid: CellGrid) -> GridFunction:
    """b(g) = T^0_g f_0 - f_0 tabulated on the grid (f_0 the lambda = 0
    vacuum), for words over the triangular letters."""
    f0v = vacuum_evaluator(dims, 0.0)

    def f0(xi):
        return complex(f0v(np.atleast_2d(xi))[0])

    moved = special_apply(dims, letters, f0)
    return tabulate([grid], lambda nodes: np.asarray(
        [moved(x) - f0(x) for x in nodes], dtype=complex))


def special_cocycle_law_residual(dims: Dimensions, g1_letters, g2_letters,
                                 grid: CellGrid) -> float:
    """b(g1 g2) = T^0_{g1} b(g2) + b(g1) pointwise on the nodes."""
    b12 = special_cocycle(dims, list(g1_letters) + list(g2_letters), grid)
    b2 = special_cocycle(dims, g2_letters, grid)
    f0v = vacuum_evaluator(dims, 0.0)

    def b2_eval(xi):
        # evaluate b(g2) analytically at arbitrary points
        moved = special_apply(dims, g2_letters, lambda x: complex(
            f0v(np.atleast_2d(x))[0]))
        return moved(xi) - complex(f0v(np.atleast_2d(xi))[0])

    t1_b2 = special_apply(dims, g1_letters, b2_eval)
    b1 = special_cocycle(dims, g1_letters, grid)
    rhs = np.asarray([t1_b2(x) for x in grid.nodes]) + b1.values
    denom = max(float(np.abs(b12.values).max()), 1e-12)
    return float(np.abs(b12.values - rhs).max() / denom)
