"""Numerical linearization of the 6DOF model into the coupled 9-state
structure and the block-spectrum coupling check.

State ordering: (u, w, q, theta, h | v, p, r, phi) with the longitudinal
5-block first and the lateral 4-block second; inputs are (delta_e,
delta_r, thrust).  The A12/A21 off-diagonal blocks carry the
longitudinal/lateral cross coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import AeroConfig
from .dynamics import sixdof_derivative
from .state import (RigidBodyState, NINE_STATE_LABELS, N_LONGITUDINAL,
                    apply_nine_state, nine_state_vector)
from .trim import TrimPoint

INPUT_LABELS = ("delta_e", "delta_r", "thrust")


class LinearizationError(RuntimeError):
    pass


@dataclass
class LinearModel:
    A: np.ndarray   # 9x9 state matrix
    B: np.ndarray   # 9x3 input matrix
    state_labels: tuple = NINE_STATE_LABELS
    input_labels: tuple = INPUT_LABELS

    @property
    def A11(self) -> np.ndarray:
        return self.A[:N_LONGITUDINAL, :N_LONGITUDINAL]

    @property
    def A12(self) -> np.ndarray:
        return self.A[:N_LONGITUDINAL, N_LONGITUDINAL:]

    @property
    def A21(self) -> np.ndarray:
        return self.A[N_LONGITUDINAL:, :N_LONGITUDINAL]

    @property
    def A22(self) -> np.ndarray:
        return self.A[N_LONGITUDINAL:, N_LONGITUDINAL:]


def nine_state_derivative(vec, controls, trim: TrimPoint, cfg: AeroConfig):
    """Derivative of the 9 linear-model states at a perturbed point."""
    state = apply_nine_state(trim.state, vec)
    de, dr, thr = controls
    d = sixdof_derivative(state, de, dr, thr, cfg)
    return np.array([d.u, d.w, d.q, d.theta, d.h, d.v, d.p, d.r, d.phi])


# Perturbation scale per 9-state entry (velocities vs angles vs altitude).
_STATE_STEPS = np.array([1e-5, 1e-5, 1e-6, 1e-6, 1e-4, 1e-5, 1e-6, 1e-6, 1e-6])
_INPUT_STEPS = np.array([1e-6, 1e-6, 1e-6])


def linearize(trim: TrimPoint, cfg: AeroConfig,
              step_scale: float = 1.0) -> LinearModel:
    """Central finite-difference Jacobians about a trim point.

    ``step_scale`` multiplies the built-in perturbation steps; doubling it
    should leave the result unchanged to second order, which the tests use
    as a Richardson-style convergence check.
    """
    x0 = np.array(nine_state_vector(trim.state))
    u0 = np.array(trim.controls())

    A = np.empty((9, 9))
    for j in range(9):
        h = _STATE_STEPS[j] * step_scale
        xp, xm = x0.copy(), x0.copy()
        xp[j] += h
        xm[j] -= h
        fp = nine_state_derivative(xp, u0, trim, cfg)
        fm = nine_state_derivative(xm, u0, trim, cfg)
        A[:, j] = (fp - fm) / (2.0 * h)

    B = np.empty((9, 3))
    for j in range(3):
        h = _INPUT_STEPS[j] * step_scale
        up, um = u0.copy(), u0.copy()
        up[j] += h
        um[j] -= h
        fp = nine_state_derivative(x0, up, trim, cfg)
        fm = nine_state_derivative(x0, um, trim, cfg)
        B[:, j] = (fp - fm) / (2.0 * h)

    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise LinearizationError("non-finite entries in the Jacobians")
    return LinearModel(A=A, B=B)


@dataclass
class CouplingReport:
    union_holds: bool
    eig_full: np.ndarray
    eig_longitudinal: np.ndarray
    eig_lateral: np.ndarray
    max_mismatch: float
    tolerance: float


def coupling_spectrum_check(model: LinearModel,
                            tol: float = 1e-6) -> CouplingReport:
    """Compare the full spectrum against the union of the block spectra.

    The union holds when an optimal pairing of the two eigenvalue sets has
    maximum distance below ``tol`` scaled by the spectral radius.
    """
    eig_full = np.linalg.eigvals(model.A)
    eig_lon = np.linalg.eigvals(model.A11)
    eig_lat = np.linalg.eigvals(model.A22)
    union = np.concatenate([eig_lon, eig_lat])

    cost = np.abs(eig_full[:, None] - union[None, :])
    rows, cols = linear_sum_assignment(cost)
    mismatch = float(cost[rows, cols].max())
    scale = max(1.0, float(np.abs(eig_full).max()))
    return CouplingReport(
        union_holds=bool(mismatch <= tol * scale),
        eig_full=eig_full,
        eig_longitudinal=eig_lon,
        eig_lateral=eig_lat,
        max_mismatch=mismatch,
        tolerance=tol * scale,
    )
