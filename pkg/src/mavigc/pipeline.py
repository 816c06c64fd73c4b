"""End-to-end model building shared by the CLI and the test suite:
trim -> linearize -> augment -> discretize -> generalized plant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import AeroConfig, default_config
from .guidance import PpnParams, default_min_turn_radius
from .igc import DiscreteModel, IgcLinearModel, augment, discretize
from .linear import LinearModel, linearize
from .matio import read_matrices
from .synthesis import (GaConfig, GeneralizedPlant, SofGain, SynthesisResult,
                        WeightConfig, build_generalized_plant, ga_search,
                        paper_gain)
from .trim import TrimPoint, trim_solve


@dataclass
class TrimSpec:
    Va: float = 8.0
    psi_dot: float = 0.8
    h_dot: float = 1.0


@dataclass
class ModelSet:
    cfg: AeroConfig
    trim: TrimPoint
    linear: LinearModel
    igc: IgcLinearModel
    discrete: DiscreteModel
    plant: GeneralizedPlant
    params: PpnParams
    weights: WeightConfig
    # straight-and-level operating point used for feedback references in
    # simulation and as an off-design validation model in synthesis
    ref_trim: TrimPoint
    discrete_straight: DiscreteModel


def build_models(cfg: AeroConfig | None = None,
                 trim_spec: TrimSpec | None = None,
                 params: PpnParams | None = None,
                 weights: WeightConfig | None = None,
                 Ts: float = 0.02) -> ModelSet:
    cfg = cfg or default_config()
    trim_spec = trim_spec or TrimSpec()
    trim = trim_solve(trim_spec.Va, trim_spec.psi_dot, trim_spec.h_dot, cfg)
    params = params or PpnParams(R_min=default_min_turn_radius(trim_spec.Va))
    weights = weights or WeightConfig()
    lin = linearize(trim, cfg)
    igc_model = augment(lin, trim, cfg, params)
    dm = discretize(igc_model, Ts)
    plant = build_generalized_plant(dm, weights)

    ref_trim = trim_solve(trim_spec.Va, 0.0, 0.0, cfg)
    lin_s = linearize(ref_trim, cfg)
    dm_s = discretize(augment(lin_s, ref_trim, cfg, params), Ts)
    return ModelSet(cfg=cfg, trim=trim, linear=lin, igc=igc_model,
                    discrete=dm, plant=plant, params=params, weights=weights,
                    ref_trim=ref_trim, discrete_straight=dm_s)


def synthesize(models: ModelSet, ga: GaConfig | None = None) -> SynthesisResult:
    return ga_search(models.plant, ga or GaConfig(),
                     validation=(models.discrete_straight,))


def resolve_gain(source: str, models: ModelSet,
                 ga: GaConfig | None = None) -> SofGain:
    """Gain source selector: ``synth``, ``fixture`` or ``file:<path>``."""
    if source == "synth":
        return synthesize(models, ga).gain
    if source == "fixture":
        return paper_gain()
    if source.startswith("file:"):
        mats = read_matrices(source[5:])
        if "F_d" not in mats:
            raise ValueError(f"{source[5:]}: no 'F_d' matrix found")
        F = mats["F_d"][0]
        if F.shape != (3, 7):
            raise ValueError(f"gain in {source[5:]} has shape {F.shape}, "
                             "expected (3, 7)")
        return SofGain(F=F)
    raise ValueError(f"unknown gain source '{source}' "
                     "(use synth | fixture | file:<path>)")
