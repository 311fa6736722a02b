"""Simulation of photonics-assisted analog self-interference cancellation.

An SI signal and a digitally built reference drive opposite arms of a
DP-MZM; a second DD-MZM carries an LO so the photodetector output is a
downconverted IF. The package covers waveform generation, the SI channel,
the optical link, delay and amplitude search (segmented, genetic, least
squares), metrics and a scenario CLI.
"""

from .channel import PathSet, Tap
from .config import list_presets, load_config, resolve, validate
from .errors import ConditioningError, ConfigurationError, EstimationError
from .ga import GaConfig, SearchSpace, ga_run
from .link import LinkConfig, SimulatedLink, make_soi, make_tx
from .ls import LsModel, construct_reference, ls_estimate
from .metrics import BandSpec, band_power, sic_depth
from .pipelines import run_config
from .signals import OfdmConfig, RealSignal, SoiConfig, gen_ofdm, gen_qpsk

__version__ = "0.1.0"

__all__ = [
    "BandSpec",
    "ConditioningError",
    "ConfigurationError",
    "EstimationError",
    "GaConfig",
    "LinkConfig",
    "LsModel",
    "OfdmConfig",
    "PathSet",
    "RealSignal",
    "SearchSpace",
    "SimulatedLink",
    "SoiConfig",
    "Tap",
    "band_power",
    "construct_reference",
    "ga_run",
    "gen_ofdm",
    "gen_qpsk",
    "list_presets",
    "load_config",
    "ls_estimate",
    "make_soi",
    "make_tx",
    "resolve",
    "run_config",
    "sic_depth",
    "validate",
]
