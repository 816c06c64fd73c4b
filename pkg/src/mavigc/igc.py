"""Augmented guidance-and-control linear model.

The 15 states stack the 9 vehicle states, the two guidance states
(x1 = miss distance, x2 = its rate) and the four servo states (position
and rate for elevator and rudder):

    [u, w, q, theta, h, v, p, r, phi, x1, x2, de_p, de_p1, dr_p, dr_p1]

Inputs are the commanded (delta_e, delta_r, thrust); the surface commands
drive the servos whose positions feed the vehicle, while thrust acts
directly.  The guidance rows implement x1' = x2 and
x2' = (N - 1) * a_c with a_c = Va (psi_dot + beta_dot) linearized
analytically about the trim.

The measured output vector is [q, theta, h, p, r, phi, x1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .config import AeroConfig, ServoParams
from .guidance import PpnParams, accel_gradient
from .linear import LinearModel
from .state import NINE_STATE_LABELS
from .trim import TrimPoint

IGC_STATE_LABELS = NINE_STATE_LABELS + (
    "x1", "x2", "de_p", "de_p1", "dr_p", "dr_p1")
OUTPUT_LABELS = ("q", "theta", "h", "p", "r", "phi", "x1")
INPUT_LABELS = ("delta_e_cmd", "delta_r_cmd", "thrust_cmd")

# measured-output rows in the 15-state ordering
OUTPUT_STATE_INDEX = (2, 3, 4, 6, 7, 8, 9)

N_VEHICLE = 9
IDX_X1, IDX_X2 = 9, 10
IDX_DE, IDX_DE1, IDX_DR, IDX_DR1 = 11, 12, 13, 14


@dataclass
class IgcLinearModel:
    A: np.ndarray            # 15x15
    B: np.ndarray            # 15x3
    C: np.ndarray            # 7x15
    trim: TrimPoint
    params: PpnParams
    servo: ServoParams
    state_labels: tuple = IGC_STATE_LABELS
    output_labels: tuple = OUTPUT_LABELS
    input_labels: tuple = INPUT_LABELS


@dataclass
class DiscreteModel:
    A_d: np.ndarray          # 15x15
    B_d: np.ndarray          # 15x3
    C: np.ndarray            # 7x15
    Ts: float                # sample period (s)
    model: IgcLinearModel


def augment(lin: LinearModel, trim: TrimPoint, cfg: AeroConfig,
            params: PpnParams, servo: ServoParams | None = None) -> IgcLinearModel:
    """Assemble the 15-state model from the vehicle linearization.

    The (1:9, 1:9) block is the vehicle A matrix unchanged; servo
    positions replace the surface-deflection columns of B; the guidance
    acceleration row is the analytic gradient of Va (psi_dot + beta_dot).
    """
    if trim.state.airspeed() <= 0.0:
        raise ValueError("cannot augment about a zero-airspeed trim")
    servo = servo or cfg.servo
    params.validate()

    A = np.zeros((15, 15))
    B = np.zeros((15, 3))

    A[:9, :9] = lin.A
    # surface deflections are servo states; thrust stays a direct input
    A[:9, IDX_DE] = lin.B[:, 0]
    A[:9, IDX_DR] = lin.B[:, 1]
    B[:9, 2] = lin.B[:, 2]

    # guidance rows: x1' = x2, x2' = (N - 1) a_c
    grad9, d_ddr = accel_gradient(trim.state, cfg, trim.delta_r)
    gain = params.N - 1.0
    A[IDX_X1, IDX_X2] = 1.0
    A[IDX_X2, :9] = gain * np.asarray(grad9)
    A[IDX_X2, IDX_DR] = gain * d_ddr

    # two decoupled second-order servo companion blocks
    w2 = servo.omega ** 2
    tz = 2.0 * servo.zeta * servo.omega
    for pos, rate, col in ((IDX_DE, IDX_DE1, 0), (IDX_DR, IDX_DR1, 1)):
        A[pos, rate] = 1.0
        A[rate, pos] = -w2
        A[rate, rate] = -tz
        B[rate, col] = w2

    C = np.zeros((7, 15))
    for row, idx in enumerate(OUTPUT_STATE_INDEX):
        C[row, idx] = 1.0

    return IgcLinearModel(A=A, B=B, C=C, trim=trim, params=params,
                          servo=servo)


def discretize(model: IgcLinearModel, Ts: float = 0.02) -> DiscreteModel:
    """Exact zero-order-hold discretization via the augmented exponential."""
    if Ts <= 0.0:
        raise ValueError("sample period must be positive")
    n, m = model.A.shape[0], model.B.shape[1]
    M = np.zeros((n + m, n + m))
    M[:n, :n] = model.A
    M[:n, n:] = model.B
    phi = expm(M * Ts)
    return DiscreteModel(A_d=phi[:n, :n], B_d=phi[:n, n:],
                         C=model.C.copy(), Ts=Ts, model=model)
