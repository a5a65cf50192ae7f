"""Feasibility toolkit for direct NGSO satellite access to 5G NR UEs in mmWave."""

__version__ = "0.1.0"

from .antenna import ApertureArray, TxRfChain, UePanel
from .channel import AttenuationModel, NoiseChain
from .geometry import EARTH, ConstellationConfig, EarthModel, GroundPoint, SatelliteState
from .linkbudget import (
    DEFAULT_MCS,
    LinkLedger,
    McsTable,
    SatellitePayload,
    ShadowSpec,
    UeTerminal,
    capacity_rollup,
    downlink_budget,
    reference_payload,
    sweep,
    uplink_budget,
    vehicular_ue,
)
from .regulatory import PfdValue, RegulatoryMask, builtin_masks

