"""Virtual HBT and HOM experiments and their estimators."""

from .fitting import DecayFit, fit_exponential_decay
from .hbt import (
    G2Estimate,
    background_for_g2,
    g2_zero_analytic,
    g2_zero_expected,
    g2_zero_from_histogram,
    side_peak_chi2,
    simulate_hbt,
)
from .histogram import CoincidenceHistogram, make_bins, read_histogram, write_histogram
from .hom import hom_ratio_expected, hom_visibility_model, simulate_hom, visibility_curve
from .source import DelayLine, PulseTrain, SourceNoise, delay_of

__all__ = [
    "CoincidenceHistogram",
    "DecayFit",
    "DelayLine",
    "G2Estimate",
    "PulseTrain",
    "SourceNoise",
    "background_for_g2",
    "delay_of",
    "fit_exponential_decay",
    "g2_zero_analytic",
    "g2_zero_expected",
    "g2_zero_from_histogram",
    "hom_ratio_expected",
    "hom_visibility_model",
    "make_bins",
    "read_histogram",
    "side_peak_chi2",
    "simulate_hbt",
    "simulate_hom",
    "visibility_curve",
    "write_histogram",
]
