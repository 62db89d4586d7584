"""Frequency and time grids underlying the FRF <-> impulse-train transforms.

A frequency grid is a strictly increasing set of analysis frequencies that
share a common rational base; the base frequency fixes the period of the
pseudo-impulse-response and therefore the length of every time series in the
statistics downstream.  Frequencies are carried both as floats and as exact
`fractions.Fraction` values so that base-frequency and bin-alignment checks
never depend on floating-point coincidences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AliasingError, IncommensurableGridError, ValidationError

# Standard 11-frequency grid used in posture-control FRF analysis (Hz).
DEFAULT_FREQS = (0.05, 0.15, 0.3, 0.4, 0.55, 0.7, 0.9, 1.1, 1.35, 1.75, 2.2)

# Frequencies are interpreted as decimals with this denominator bound when
# recovering their exact rational values (3 decimals -> denominator 1000).
DEFAULT_MAX_DENOMINATOR = 1000


def _as_fraction(value, max_denominator, what):
    frac = Fraction(float(value)).limit_denominator(max_denominator)
    if frac <= 0:
        raise ValidationError(f"{what} must be positive, got {value!r}")
    tol = 1e-9 * max(1.0, abs(float(value)))
    if abs(float(frac) - float(value)) > tol:
        raise IncommensurableGridError(
            f"{what} {value!r} is not representable as a rational with "
            f"denominator <= {max_denominator}"
        )
    return frac


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered analysis frequencies with their common base frequency.

    Attributes
    ----------
    freqs : tuple of float
        Strictly increasing frequencies (Hz).
    base_freq : float
        Greatest common divisor of the frequencies (Hz).
    period : float
        1 / base_freq (s); the period of any pseudo-impulse-response on
        this grid.
    fracs : tuple of Fraction
        Exact rational value of each frequency.
    """

    freqs: tuple
    base_freq: float
    period: float
    fracs: tuple = field(repr=False)
    base_frac: Fraction = field(repr=False)

    def __len__(self):
        return len(self.freqs)

    @property
    def multiples(self):
        """Integer multiple of the base frequency for each grid frequency."""
        return tuple(int(f / self.base_frac) for f in self.fracs)

    @property
    def max_freq(self):
        return self.freqs[-1]


def make_frequency_grid(freqs, max_denominator=DEFAULT_MAX_DENOMINATOR) -> FrequencyGrid:
    """Build a FrequencyGrid from a strictly increasing list of frequencies.

    The base frequency is the exact rational gcd of the inputs; each input
    must be representable as a rational with denominator at most
    ``max_denominator`` (default 1000, i.e. frequencies given to 3 decimals).

    Raises
    ------
    ValidationError
        Empty, non-positive, non-finite, or non-increasing input.
    IncommensurableGridError
        Some frequency has no exact rational representation at the
        configured resolution.
    """
    freqs = [float(f) for f in freqs]
    if not freqs:
        raise ValidationError("frequency grid must not be empty")
    for f in freqs:
        if not math.isfinite(f) or f <= 0:
            raise ValidationError(f"frequencies must be finite and positive, got {f!r}")
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise ValidationError("frequencies must be strictly increasing")

    fracs = tuple(_as_fraction(f, max_denominator, "frequency") for f in freqs)
    den = math.lcm(*(f.denominator for f in fracs))
    num = math.gcd(*(f.numerator * (den // f.denominator) for f in fracs))
    base = Fraction(num, den)
    return FrequencyGrid(
        freqs=tuple(freqs),
        base_freq=float(base),
        period=float(1 / base),
        fracs=fracs,
        base_frac=base,
    )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling of one pseudo-impulse-response period.

    ``times[n] = n / sample_rate``.  The default grid is half-open,
    covering [0, period); ``inclusive_endpoint=True`` appends the t = period
    sample (a duplicated phase) for compatibility with tooling that builds
    the grid as ``0:step:period``.  Inclusive grids are not bin-aligned and
    cannot be inverted exactly.
    """

    sample_rate: float
    n_samples: int
    inclusive_endpoint: bool = False
    rate_frac: Fraction = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValidationError("time grid needs at least one sample")

    @property
    def times(self):
        """Sample times (s)."""
        return np.arange(self.n_samples, dtype=np.float64) / self.sample_rate

    @property
    def duration(self):
        return self.n_samples / self.sample_rate

    def nyquist_ok(self, freq):
        return float(freq) < self.sample_rate / 2.0

    def is_bin_aligned(self, grid: FrequencyGrid) -> bool:
        """True if every grid frequency sits on an exact DFT bin of this grid."""
        if self.inclusive_endpoint:
            return False
        n = self.n_samples
        if self.rate_frac is not None:
            bin_width = Fraction(self.rate_frac, n)
            return all((f / bin_width).denominator == 1 for f in grid.fracs)
        ratios = np.asarray(grid.freqs) * n / self.sample_rate
        return bool(np.all(np.abs(ratios - np.round(ratios)) < 1e-9))


def make_time_grid(grid: FrequencyGrid, oversample_factor=10.0,
                   inclusive_endpoint=False) -> TimeGrid:
    """Sample one period of the grid's pseudo-impulse-response.

    sample_rate = oversample_factor * max(freqs); the factor must exceed 2
    so no analysis frequency aliases.  n_samples = round(sample_rate /
    base_freq) covers exactly one period half-open (one extra duplicated
    sample when ``inclusive_endpoint``).

    Raises
    ------
    AliasingError
        oversample_factor <= 2.
    """
    factor = _as_fraction(oversample_factor, 10**6, "oversample factor")
    if factor <= 2:
        raise AliasingError(
            f"oversample factor must exceed 2 (Nyquist), got {oversample_factor!r}"
        )
    rate = factor * grid.fracs[-1]
    n = round(rate / grid.base_frac)
    if inclusive_endpoint:
        n += 1
    return TimeGrid(
        sample_rate=float(rate),
        n_samples=int(n),
        inclusive_endpoint=inclusive_endpoint,
        rate_frac=rate,
    )
