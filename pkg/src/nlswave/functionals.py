"""Conserved quantities, action functionals, the Galilean boost and Pohozaev residuals.

Conventions: ``M = |u|^2 + 3 gamma |v|^2`` (integrated), ``K = |grad u|^2 +
|grad v|^2``, ``P = (i grad u, u) + gamma (i grad v, v)`` with the real pairing
``(f, g) = Re int f conj(g)``, and

    D = int |u|^4/36 + 9|v|^4/4 + |u|^2|v|^2 + Re(conj(u)^3 v)/9.

The quadratic part ``Q_{omega,c} = K/2 + omega M/2 + c.P/2`` is evaluated with
the same spectral symbols the ground-state solver uses, so the functional
gradient returned by :func:`action_gradient` is exact for the discrete action.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from .grid import FieldPair, ModelParams, SpectralGrid, qsum

__all__ = [
    "FunctionalReport",
    "BoostCompatibilityError",
    "mass",
    "component_norms",
    "kinetic",
    "interaction_d",
    "interaction_d_uncoupled",
    "momentum",
    "quadratic_q",
    "action_suite",
    "galilean_boost",
    "boost_phase_mismatch",
    "snap_velocity",
    "pohozaev_residuals",
    "action_gradient",
    "nonlinear_terms",
]


class BoostCompatibilityError(ValueError):
    """Boost phase is not periodic on the box."""


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    kinetic: float
    interaction: float
    energy: float
    momentum: tuple[float, ...]
    action: float
    quadratic: float
    nehari: float

    def as_dict(self) -> dict:
        return asdict(self)


def _spec_weight(grid: SpectralGrid) -> float:
    # Parseval factor for unnormalized fftn
    return grid.cell_volume / np.prod(grid.shape)


def component_norms(state: FieldPair) -> tuple[float, float]:
    """``(||u||^2, ||v||^2)``."""
    g = state.grid
    return (
        qsum(np.abs(state.u) ** 2) * g.cell_volume,
        qsum(np.abs(state.v) ** 2) * g.cell_volume,
    )


def mass(state: FieldPair, gamma: float) -> float:
    nu, nv = component_norms(state)
    return nu + 3 * gamma * nv


def _kinetic_hat(uh: np.ndarray, vh: np.ndarray, grid: SpectralGrid) -> float:
    return qsum(grid.k2 * (np.abs(uh) ** 2 + np.abs(vh) ** 2)) * _spec_weight(grid)


def kinetic(state: FieldPair) -> float:
    g = state.grid
    return _kinetic_hat(g.fft(state.u), g.fft(state.v), g)


def interaction_d(state: FieldPair) -> float:
    u, v = state.u, state.v
    au, av = np.abs(u) ** 2, np.abs(v) ** 2
    dens = au**2 / 36 + 9 * av**2 / 4 + au * av + np.real(np.conj(u) ** 3 * v) / 9
    return state.grid.integrate(dens)


def interaction_d_uncoupled(state: FieldPair) -> float:
    """``D`` without the harmonic-transfer term ``Re(conj(u)^3 v)/9``."""
    au, av = np.abs(state.u) ** 2, np.abs(state.v) ** 2
    return state.grid.integrate(au**2 / 36 + 9 * av**2 / 4 + au * av)


def _momentum_hat(uh, vh, gamma, grid) -> np.ndarray:
    w = _spec_weight(grid)
    dens = np.abs(uh) ** 2 + gamma * np.abs(vh) ** 2
    # (i d_j f, f) = -sum k_j |f_k|^2 in frequency space
    return np.array([-qsum(kd * dens) * w for kd in grid.k_deriv])


def momentum(state: FieldPair, gamma: float) -> np.ndarray:
    g = state.grid
    return _momentum_hat(g.fft(state.u), g.fft(state.v), gamma, g)


def quadratic_q(state: FieldPair, params: ModelParams) -> float:
    g = state.grid
    uh, vh = g.fft(state.u), g.fft(state.v)
    K = _kinetic_hat(uh, vh, g)
    P = _momentum_hat(uh, vh, params.gamma, g)
    return K / 2 + params.omega * mass(state, params.gamma) / 2 + float(np.dot(params.velocity, P)) / 2


def action_suite(state: FieldPair, params: ModelParams) -> FunctionalReport:
    g = state.grid
    uh, vh = g.fft(state.u), g.fft(state.v)
    M = mass(state, params.gamma)
    K = _kinetic_hat(uh, vh, g)
    P = _momentum_hat(uh, vh, params.gamma, g)
    D = interaction_d(state)
    Q = K / 2 + params.omega * M / 2 + float(np.dot(params.velocity, P)) / 2
    return FunctionalReport(
        mass=M,
        kinetic=K,
        interaction=D,
        energy=K / 2 - D,
        momentum=tuple(float(p) for p in P),
        action=Q - D,
        quadratic=Q,
        nehari=2 * Q - 4 * D,
    )


def boost_phase_mismatch(c: Sequence[float], gamma: float, grid: SpectralGrid) -> float:
    """Largest boundary phase jump (radians, folded into [0, pi]) of the boost."""
    worst = 0.0
    for cj, L in zip(c, grid.box_lengths):
        for phase in (cj * L / 2, gamma * cj * L / 2):
            r = np.mod(phase, 2 * np.pi)
            worst = max(worst, float(min(r, 2 * np.pi - r)))
    return worst


def galilean_boost(state: FieldPair, c: Sequence[float], gamma: float, sign: int = 1,
                   allow_mismatch: bool = False) -> FieldPair:
    """Return ``(e^{sign i c.x/2} u, e^{sign i gamma c.x/2} v)``.

    Raises :class:`BoostCompatibilityError` unless both phases are periodic on
    the box; ``allow_mismatch=True`` downgrades that to a warning.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = state.grid
    c = tuple(float(x) for x in c)
    if len(c) != g.dims:
        raise ValueError("velocity dimension does not match grid")
    mismatch = boost_phase_mismatch(c, gamma, g)
    if mismatch > 1e-9:
        msg = f"boost phase not periodic on the box (boundary mismatch {mismatch:.3e} rad)"
        if not allow_mismatch:
            raise BoostCompatibilityError(msg)
        warnings.warn(msg, stacklevel=2)
    cx = sum(cj * xj for cj, xj in zip(c, g.coords))
    cx = np.broadcast_to(cx, g.shape)
    return FieldPair(
        np.exp(sign * 0.5j * cx) * state.u,
        np.exp(sign * 0.5j * gamma * cx) * state.v,
        g,
    )


def snap_velocity(c: Sequence[float], grid: SpectralGrid, lattice_scale: float = 1.0):
    """Snap ``c`` to the boost-compatible lattice ``(4 pi / L_j) Z``.

    ``lattice_scale`` multiplies the lattice spacing (used when ``c / s`` must
    itself remain compatible). Returns ``(snapped, distance)``.
    """
    c = np.asarray(c, dtype=float)
    step = lattice_scale * 4 * np.pi / np.asarray(grid.box_lengths)
    snapped = np.round(c / step) * step
    return tuple(float(x) for x in snapped), float(np.linalg.norm(snapped - c))


def pohozaev_residuals(state: FieldPair, params: ModelParams) -> tuple[float, float, float]:
    """Relative residuals of the two Pohozaev identities and their combination."""
    r = action_suite(state, params)
    N = params.dims
    om = params.omega
    cP = float(np.dot(params.velocity, r.momentum))
    K, M, D = r.kinetic, r.mass, r.interaction
    r1 = K + om * M + cP - 4 * D
    r2 = (N - 2) * K / 2 + (N / 2) * om * M + ((N - 1) / 2) * cP - N * D
    r3 = (4 - N) * K - N * om * M - (N - 2) * cP
    scale = max(abs(K), abs(4 * D), abs(om) * M, 1e-300)
    return r1 / scale, r2 / scale, r3 / scale


def nonlinear_terms(u: np.ndarray, v: np.ndarray, coupled: bool = True):
    """Gradient of ``D`` in the real pairing: the right-hand sides of the stationary system."""
    au, av = np.abs(u) ** 2, np.abs(v) ** 2
    fu = (au / 9 + 2 * av) * u
    fv = (9 * av + 2 * au) * v
    if coupled:
        fu = fu + np.conj(u) ** 2 * v / 3
        fv = fv + u**3 / 9
    return fu, fv


def action_gradient(state: FieldPair, params: ModelParams, coupled: bool = True) -> FieldPair:
    """Functional derivative of ``S_{omega,c}`` (left-hand side of the stationary system)."""
    g = state.grid
    cs = g.advection_symbol(params.velocity)
    uh, vh = g.fft(state.u), g.fft(state.v)
    lu = g.ifft((g.k2 + params.omega - cs) * uh)
    lv = g.ifft((g.k2 + 3 * params.gamma * params.omega - params.gamma * cs) * vh)
    fu, fv = nonlinear_terms(state.u, state.v, coupled)
    return FieldPair(lu - fu, lv - fv, g)
