"""Unpaired bootstrap confidence-band test between groups of FRFs.

Workflow: complex frequency-response values on a common grid become real
pseudo-impulse-responses (an exact, invertible rendering), the difference of
the two group means gets a simultaneous confidence band from a nested
pivotized bootstrap, and the null hypothesis of equal means is rejected when
the zero line exits the band.  Residual spectra localize any difference in
frequency.
"""

from ._version import __version__
from .backend import kernel_backend
from .bootstrap import (BandResult, BootstrapParams, Crossing,
                        bootstrap_sigma, confidence_band_difference,
                        critical_constant, diff_of_means, max_pivot_statistic,
                        resample_indices, residual, residual_spectrum,
                        zero_crossings, zero_line)
from .calibrate import CalibrationReport, calibrate
from .errors import (AliasingError, AlignmentError, FrfBandError,
                     GroupFormatError, IncommensurableGridError,
                     NoExcitationError, ResultFormatError, ValidationError)
from .estimate import (BandSpec, PrtsStimulus, RawTransfer, band_average,
                       default_band_spec, estimate_transfer, generate_prts,
                       pipeline_group, reference_frf, reference_system,
                       synth_group, trim_cycles)
from .grids import (DEFAULT_FREQS, FrequencyGrid, TimeGrid,
                    make_frequency_grid, make_time_grid)
from .io import (ResultDocument, canonical_json, read_frf_group, read_result,
                 sha256_digest, write_frf_group, write_result)
from .streams import (PURPOSE_BAND_SIGMA, PURPOSE_CALIBRATE, PURPOSE_PIVOT,
                      PURPOSE_PRTS, PURPOSE_SYNTH, philox_stream)
from .transform import (Frf, FrfGroup, Pir, frf_from_pir, pir_from_frf,
                        pir_samples_at, pointwise_mean, pointwise_std,
                        spectrum_at)

__all__ = [
    "__version__",
    "kernel_backend",
    "AliasingError", "AlignmentError", "FrfBandError", "GroupFormatError",
    "IncommensurableGridError", "NoExcitationError", "ResultFormatError",
    "ValidationError",
    "DEFAULT_FREQS", "FrequencyGrid", "TimeGrid", "make_frequency_grid",
    "make_time_grid",
    "Frf", "FrfGroup", "Pir", "frf_from_pir", "pir_from_frf",
    "pir_samples_at", "pointwise_mean", "pointwise_std", "spectrum_at",
    "BandSpec", "PrtsStimulus", "RawTransfer", "band_average",
    "default_band_spec", "estimate_transfer", "generate_prts",
    "pipeline_group", "reference_frf", "reference_system", "synth_group",
    "trim_cycles",
    "BandResult", "BootstrapParams", "Crossing", "bootstrap_sigma",
    "confidence_band_difference", "critical_constant", "diff_of_means",
    "max_pivot_statistic", "resample_indices", "residual",
    "residual_spectrum", "zero_crossings", "zero_line",
    "CalibrationReport", "calibrate",
    "ResultDocument", "canonical_json", "read_frf_group", "read_result",
    "sha256_digest", "write_frf_group", "write_result",
    "PURPOSE_BAND_SIGMA", "PURPOSE_CALIBRATE", "PURPOSE_PIVOT",
    "PURPOSE_PRTS", "PURPOSE_SYNTH", "philox_stream",
]
