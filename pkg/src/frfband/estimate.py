"""Synthetic-data pipeline: ternary stimulus, transfer estimation, band averaging.

The experimental chain this mirrors: a pseudo-random ternary velocity profile
drives the platform, the empirical transfer function is the cross-power
spectrum of the response against the stimulus divided by the stimulus power
spectrum at the comb frequencies where the stimulus has energy, and the raw
transfer values are averaged (in the complex domain) over frequency bands
whose means are the analysis frequencies.

The ternary sequence is a maximal-length LFSR over GF(3).  Its half-period
antisymmetry (v(t + P/2) = -v(t), a trace-representation property of every
GF(3) m-sequence) puts all the stimulus power on odd harmonics of 1/P, the
comb structure the estimator relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal

from .errors import NoExcitationError, ValidationError
from .grids import DEFAULT_FREQS, FrequencyGrid, make_frequency_grid
from .streams import PURPOSE_PRTS, PURPOSE_SYNTH, philox_stream
from .transform import Frf, FrfGroup

# Primitive polynomials over GF(3), one per register degree m:
# x^m + c_{m-1} x^{m-1} + ... + c_1 x + c_0, stored as (c_0, ..., c_{m-1}).
# Each yields the full output period 3^m - 1 (verified by exhaustive cycle
# check).  The recurrence is a[n+m] = -(sum_i c_i a[n+i]) mod 3.
_PRIMITIVE_TAPS = {
    2: (2, 1),
    3: (1, 0, 2),
    4: (2, 0, 0, 1),
    5: (1, 0, 0, 0, 2),
    6: (2, 0, 0, 0, 0, 1),
    7: (1, 0, 0, 0, 0, 1, 2),
    8: (2, 0, 0, 0, 0, 1, 0, 0),
}


@dataclass(frozen=True)
class PrtsStimulus:
    """Pseudo-random ternary stimulus: velocity profile and its integral.

    velocity (deg/s) takes values in {0, +s, -s}; position (deg) is the
    cumulative integral.  One object holds exactly one sequence period.
    """

    velocity: np.ndarray
    position: np.ndarray
    sample_rate: float
    sequence_length: int
    s: float
    state_duration: float

    def __post_init__(self):
        velocity = np.asarray(self.velocity, dtype=np.float64)
        position = np.asarray(self.position, dtype=np.float64)
        object.__setattr__(self, "velocity", velocity)
        object.__setattr__(self, "position", position)
        levels = {0.0, float(self.s), -float(self.s)}
        if not all(v in levels for v in np.unique(velocity)):
            raise ValidationError("velocity must take values in {0, +s, -s}")

    @property
    def period(self):
        """Sequence period (s)."""
        return self.sequence_length * self.state_duration

    def scaled_to(self, peak_to_peak) -> "PrtsStimulus":
        """Rescale so the position signal spans exactly peak_to_peak."""
        span = float(np.ptp(self.position))
        if span == 0.0:
            raise ValidationError("cannot scale a zero-amplitude stimulus")
        factor = float(peak_to_peak) / span
        return PrtsStimulus(
            velocity=self.velocity * factor,
            position=self.position * factor,
            sample_rate=self.sample_rate,
            sequence_length=self.sequence_length,
            s=self.s * factor,
            state_duration=self.state_duration,
        )


def _ternary_sequence(n_states, seed):
    """First n_states trits of a maximal-length GF(3) LFSR output."""
    degree = next(
        (m for m, taps in sorted(_PRIMITIVE_TAPS.items()) if 3**m - 1 >= n_states),
        None,
    )
    if degree is None:
        longest = 3 ** max(_PRIMITIVE_TAPS) - 1
        raise ValidationError(
            f"n_states {n_states} exceeds the longest supported sequence ({longest})"
        )
    taps = _PRIMITIVE_TAPS[degree]
    rng = philox_stream(seed, PURPOSE_PRTS)
    # any non-zero register state starts the same cyclic sequence
    init = int(rng.integers(1, 3**degree))
    state = [(init // 3**i) % 3 for i in range(degree)]
    out = np.empty(n_states, dtype=np.int64)
    for n in range(n_states):
        out[n] = state[0]
        new = (-sum(c * x for c, x in zip(taps, state))) % 3
        state = state[1:] + [new]
    return out


def generate_prts(n_states, s, state_duration, sample_rate, seed) -> PrtsStimulus:
    """Generate one period of a pseudo-random ternary stimulus.

    The trit sequence comes from a maximal-length LFSR over GF(3) (smallest
    degree whose period covers n_states; full comb structure needs n_states
    equal to a full period 3^m - 1).  Trits map 0 -> 0, 1 -> +s, 2 -> -s;
    each state is held for state_duration seconds.

    Raises
    ------
    ValidationError
        n_states < 2, or sample_rate * state_duration not an integer.
    """
    if n_states < 2:
        raise ValidationError(f"need at least 2 states, got {n_states}")
    if s < 0:
        raise ValidationError(f"speed magnitude must be >= 0, got {s}")
    per_state = Fraction(float(sample_rate)).limit_denominator(10**6) * Fraction(
        float(state_duration)
    ).limit_denominator(10**6)
    if per_state.denominator != 1 or per_state < 1:
        raise ValidationError(
            f"sample_rate * state_duration must be a positive integer, "
            f"got {float(per_state)!r}"
        )
    trits = _ternary_sequence(int(n_states), seed)
    values = np.choose(trits, [0.0, float(s), -float(s)])
    velocity = np.repeat(values, int(per_state))
    position = np.cumsum(velocity) / float(sample_rate)
    return PrtsStimulus(
        velocity=velocity,
        position=position,
        sample_rate=float(sample_rate),
        sequence_length=int(n_states),
        s=float(s),
        state_duration=float(state_duration),
    )


def trim_cycles(series, sample_rate, cycle_duration, n_cycles=1) -> np.ndarray:
    """Drop a whole number of leading cycles from a time series.

    Mirrors the practice of discarding the first stimulus cycle of a trial
    before estimating the transfer function.
    """
    series = np.asarray(series, dtype=np.float64)
    n_drop = Fraction(float(sample_rate)).limit_denominator(10**6) * Fraction(
        float(cycle_duration)
    ).limit_denominator(10**6) * int(n_cycles)
    if n_drop.denominator != 1:
        raise ValidationError(
            "cycle_duration * sample_rate must be an integer number of samples"
        )
    n_drop = int(n_drop)
    if n_drop >= len(series):
        raise ValidationError(
            f"trimming {n_drop} samples would empty a series of {len(series)}"
        )
    return series[n_drop:]


@dataclass(frozen=True)
class RawTransfer:
    """Empirical transfer values at the comb frequencies with stimulus power."""

    freqs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.complex128)
        if freqs.shape != values.shape or freqs.ndim != 1:
            raise ValidationError("freqs and values must be 1-D and equal length")
        if np.any(np.diff(freqs) <= 0):
            raise ValidationError("freqs must be strictly increasing")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.freqs)


def estimate_transfer(stimulus, response, sample_rate,
                      power_threshold=0.1) -> RawTransfer:
    """Empirical transfer function at frequencies where the stimulus has power.

    Both series are Fourier-transformed; bins (DC excluded) whose stimulus
    power reaches power_threshold times the maximum are kept, and the
    transfer there is the cross-power spectrum of response against stimulus
    divided by the stimulus power spectrum.

    Raises
    ------
    NoExcitationError
        Stimulus carries no power outside DC.
    """
    stimulus = np.asarray(stimulus, dtype=np.float64)
    response = np.asarray(response, dtype=np.float64)
    if stimulus.shape != response.shape or stimulus.ndim != 1:
        raise ValidationError("stimulus and response must be 1-D and equal length")
    if len(stimulus) < 2:
        raise ValidationError("need at least 2 samples")
    if not (0 < power_threshold <= 1):
        raise ValidationError(
            f"power_threshold must be in (0, 1], got {power_threshold!r}"
        )
    spec_s = np.fft.rfft(stimulus)
    spec_r = np.fft.rfft(response)
    freqs = np.fft.rfftfreq(len(stimulus), 1.0 / float(sample_rate))
    power = (spec_s * spec_s.conj()).real
    power[0] = 0.0  # the transfer is undefined at DC; a constant offset is not excitation
    peak = power.max()
    if peak == 0.0:
        raise NoExcitationError("stimulus has no power outside DC")
    keep = power >= float(power_threshold) * peak
    keep[0] = False
    values = spec_r[keep] * spec_s[keep].conj() / power[keep]
    return RawTransfer(freqs=freqs[keep], values=values)


@dataclass(frozen=True)
class BandSpec:
    """Frequency ranges (Hz) whose complex means become the output FRF.

    Ranges are inclusive [lower, upper] and may overlap.
    """

    ranges: tuple

    def __post_init__(self):
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)
        if not ranges:
            raise ValidationError("band spec must contain at least one range")
        for lo, hi in ranges:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                raise ValidationError(f"invalid band range ({lo}, {hi})")
        object.__setattr__(self, "ranges", ranges)

    def __len__(self):
        return len(self.ranges)


def band_average(raw: RawTransfer, spec: BandSpec, target: FrequencyGrid) -> Frf:
    """Average raw transfer values over each band, indexed by the target grid.

    The average is taken in the complex domain.  The number of bands must
    equal the target grid length; every band must contain at least one raw
    frequency.
    """
    if len(spec) != len(target):
        raise ValidationError(
            f"{len(spec)} bands for a target grid of {len(target)} frequencies"
        )
    out = np.empty(len(target), dtype=np.complex128)
    for k, (lo, hi) in enumerate(spec.ranges):
        mask = (raw.freqs >= lo) & (raw.freqs <= hi)
        if not mask.any():
            raise ValidationError(
                f"band [{lo}, {hi}] Hz contains no estimated frequency"
            )
        out[k] = np.mean(raw.values[mask])
    return Frf(out)


# Bands reconstructed so that the mean of the comb frequencies (odd multiples
# of 0.05 Hz) inside each range lands exactly on the default analysis grid.
# A plausible reconstruction for synthetic work, not a published ground truth.
_DEFAULT_BAND_RANGES = (
    (0.04, 0.06),    # {0.05}               -> 0.05
    (0.14, 0.16),    # {0.15}               -> 0.15
    (0.24, 0.36),    # {0.25, 0.35}         -> 0.30
    (0.34, 0.46),    # {0.35, 0.45}         -> 0.40
    (0.44, 0.66),    # {0.45, 0.55, 0.65}   -> 0.55
    (0.64, 0.76),    # {0.65, 0.75}         -> 0.70
    (0.84, 0.96),    # {0.85, 0.95}         -> 0.90
    (1.04, 1.16),    # {1.05, 1.15}         -> 1.10
    (1.24, 1.46),    # {1.25, 1.35, 1.45}   -> 1.35
    (1.54, 1.96),    # {1.55 ... 1.95}      -> 1.75
    (2.04, 2.36),    # {2.05 ... 2.35}      -> 2.20
)


def default_band_spec() -> BandSpec:
    """Band ranges averaging the synthetic comb onto the default grid."""
    return BandSpec(_DEFAULT_BAND_RANGES)


def synth_group(base: Frf, grid: FrequencyGrid, noise_sigma, n_subjects,
                seed) -> FrfGroup:
    """Synthetic group: base FRF plus complex Gaussian perturbation per subject.

    Real and imaginary parts are perturbed independently with standard
    deviation noise_sigma, deterministically from seed.
    """
    if n_subjects < 2:
        raise ValidationError(f"need at least 2 subjects, got {n_subjects}")
    if noise_sigma < 0:
        raise ValidationError(f"noise_sigma must be >= 0, got {noise_sigma}")
    if len(base) != len(grid):
        raise ValidationError(
            f"base FRF has {len(base)} values, grid has {len(grid)} frequencies"
        )
    rng = philox_stream(seed, PURPOSE_SYNTH)
    noise = rng.standard_normal((int(n_subjects), 2, len(base)))
    members = base.values + float(noise_sigma) * (noise[:, 0, :] + 1j * noise[:, 1, :])
    labels = tuple(f"s{i + 1:02d}" for i in range(int(n_subjects)))
    return FrfGroup(grid=grid, members=tuple(Frf(row) for row in members),
                    labels=labels)


def reference_frf(grid: FrequencyGrid, natural_freq=1.0, damping=0.7) -> Frf:
    """Second-order low-pass response evaluated at the grid frequencies.

    H(s) = w0^2 / (s^2 + 2 z w0 s + w0^2) with w0 = 2 pi natural_freq; a
    smooth, stable stand-in for a body-sway transfer function in synthetic
    studies.
    """
    w0 = 2.0 * np.pi * float(natural_freq)
    s = 2j * np.pi * np.asarray(grid.freqs)
    return Frf(w0**2 / (s**2 + 2.0 * float(damping) * w0 * s + w0**2))


def reference_system(sample_rate, natural_freq=1.0, damping=0.7):
    """Discrete (b, a) coefficients of the reference system at sample_rate.

    Bilinear transform of the continuous second-order low-pass; use with
    scipy.signal.lfilter to simulate responses and scipy.signal.freqz for
    the analytic response oracle.
    """
    w0 = 2.0 * np.pi * float(natural_freq)
    return signal.bilinear([w0**2], [1.0, 2.0 * float(damping) * w0, w0**2],
                           fs=float(sample_rate))


def pipeline_group(n_subjects, noise_sigma, seed, grid=None, spec=None,
                   n_states=80, state_duration=0.25, sample_rate=40.0,
                   peak_to_peak=1.0, n_periods=3, trim_periods=1,
                   power_threshold=0.1, natural_freq=1.0,
                   damping=0.7) -> FrfGroup:
    """Full synthetic chain: stimulus, simulated responses, estimated FRFs.

    One ternary stimulus (defaults: 80 states of 0.25 s at 40 Hz, so a 20 s
    period with comb lines on odd multiples of 0.05 Hz) drives a reference
    second-order system once per subject; per-subject measurement noise is
    added to the response, the first period is discarded, and the
    band-averaged transfer estimate becomes that subject's FRF.
    """
    if grid is None:
        grid = make_frequency_grid(DEFAULT_FREQS)
    if spec is None:
        spec = default_band_spec()
    if n_subjects < 2:
        raise ValidationError(f"need at least 2 subjects, got {n_subjects}")
    if n_periods <= trim_periods:
        raise ValidationError("n_periods must exceed trim_periods")
    prts = generate_prts(n_states, 1.0, state_duration, sample_rate,
                         seed).scaled_to(peak_to_peak)
    period = prts.period
    # the velocity integrates to zero over one period, so tiling the
    # position continues the integral exactly
    stim = np.tile(prts.position, int(n_periods))
    b, a = reference_system(sample_rate, natural_freq, damping)
    clean = signal.lfilter(b, a, stim)
    rng = philox_stream(seed, PURPOSE_SYNTH)
    members = []
    for _ in range(int(n_subjects)):
        response = clean + float(noise_sigma) * rng.standard_normal(len(stim))
        stim_t = trim_cycles(stim, sample_rate, period, trim_periods)
        resp_t = trim_cycles(response, sample_rate, period, trim_periods)
        # estimate on circularly differenced series: the difference operator
        # cancels in the ratio at every retained bin, while the stimulus comb
        # becomes flat enough for the relative power threshold (the position
        # comb rolls off like 1/f^2 and would starve the upper bands)
        dstim = (stim_t - np.roll(stim_t, 1)) * sample_rate
        dresp = (resp_t - np.roll(resp_t, 1)) * sample_rate
        raw = estimate_transfer(dstim, dresp, sample_rate, power_threshold)
        members.append(band_average(raw, spec, grid))
    labels = tuple(f"s{i + 1:02d}" for i in range(int(n_subjects)))
    return FrfGroup(grid=grid, members=tuple(members), labels=labels)
