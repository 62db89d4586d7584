"""FRF containers and the exact transform to and from pseudo-impulse-responses.

An FRF sampled on a FrequencyGrid maps to a real periodic time series (the
pseudo-impulse-response) by summing one cosine per frequency:

    x[n] = sum_k Re(H_k) cos(2 pi F_k t_n) - Im(H_k) sin(2 pi F_k t_n)

The minus sign on the imaginary part makes the sum the real part of
``sum_k H_k exp(j 2 pi F_k t_n)`` and is what the forward projection

    H_k = (2 / n_samples) sum_n x[n] exp(-j 2 pi F_k t_n)

inverts exactly when every F_k falls on a DFT bin of the time grid and
below Nyquist.  Off-bin probing of the same projection is exposed as
``spectrum_at`` for residual analysis; it carries no exactness guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, AlignmentError, ValidationError
from .grids import FrequencyGrid, TimeGrid


@dataclass(frozen=True)
class Frf:
    """Complex frequency response values, one per grid frequency."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1:
            raise ValidationError(f"FRF values must be 1-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("FRF values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class FrfGroup:
    """FRFs of one group of subjects, all on the same frequency grid."""

    grid: FrequencyGrid
    members: tuple
    labels: tuple = None

    def __post_init__(self):
        members = tuple(
            m if isinstance(m, Frf) else Frf(m) for m in self.members
        )
        if not members:
            raise ValidationError("group must contain at least one FRF")
        m = len(self.grid)
        for i, frf in enumerate(members):
            if len(frf) != m:
                raise ValidationError(
                    f"member {i} has {len(frf)} values, grid has {m} frequencies"
                )
        object.__setattr__(self, "members", members)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != len(members):
                raise ValidationError(
                    f"{len(labels)} labels for {len(members)} members"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.members)

    def as_matrix(self):
        """Member FRFs stacked as a (n_subjects, n_freqs) complex matrix."""
        return np.stack([m.values for m in self.members])


@dataclass(frozen=True)
class Pir:
    """One period of a pseudo-impulse-response on a TimeGrid."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValidationError(f"PIR samples must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("PIR samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)


def _check_lengths(frf, grid):
    if len(frf) != len(grid):
        raise ValidationError(
            f"FRF has {len(frf)} values, grid has {len(grid)} frequencies"
        )


def _phase_matrix(grid_freqs, tg: TimeGrid):
    # (n_samples, n_freqs) angles 2 pi F_k t_n
    t = tg.times
    return 2.0 * np.pi * np.outer(t, np.asarray(grid_freqs, dtype=np.float64))


def pir_samples_at(frf: Frf, freqs, times) -> np.ndarray:
    """Evaluate the cosine sum of an FRF at arbitrary times."""
    arg = 2.0 * np.pi * np.outer(np.asarray(times, dtype=np.float64),
                                 np.asarray(freqs, dtype=np.float64))
    return np.cos(arg) @ frf.values.real - np.sin(arg) @ frf.values.imag


def pir_from_frf(frf: Frf, grid: FrequencyGrid, tg: TimeGrid) -> Pir:
    """Render an FRF as one period of its pseudo-impulse-response."""
    _check_lengths(frf, grid)
    arg = _phase_matrix(grid.freqs, tg)
    samples = np.cos(arg) @ frf.values.real - np.sin(arg) @ frf.values.imag
    return Pir(samples)


def frf_from_pir(pir: Pir, grid: FrequencyGrid, tg: TimeGrid) -> Frf:
    """Recover the FRF from a pseudo-impulse-response.

    Exact inverse of :func:`pir_from_frf` when the time grid is bin-aligned
    (every grid frequency an integer multiple of sample_rate / n_samples)
    and all frequencies are below Nyquist.

    Raises
    ------
    AlignmentError
        The time grid is not bin-aligned for this frequency grid (an
        inclusive-endpoint grid never is).
    AliasingError
        A grid frequency at or above Nyquist.
    """
    if len(pir) != tg.n_samples:
        raise ValidationError(
            f"PIR has {len(pir)} samples, time grid has {tg.n_samples}"
        )
    if not tg.is_bin_aligned(grid):
        raise AlignmentError(
            "time grid is not bin-aligned for this frequency grid; "
            "exact FRF recovery needs every frequency on a DFT bin"
        )
    for f in grid.freqs:
        if not tg.nyquist_ok(f):
            raise AliasingError(
                f"frequency {f} Hz at or above Nyquist ({tg.sample_rate / 2} Hz)"
            )
    arg = _phase_matrix(grid.freqs, tg)
    kernel = np.exp(-1j * arg)
    values = (2.0 / tg.n_samples) * (pir.samples @ kernel)
    return Frf(values)


def spectrum_at(pir: Pir, tg: TimeGrid, freqs) -> np.ndarray:
    """Project a pseudo-impulse-response onto arbitrary probe frequencies.

    Same projection as :func:`frf_from_pir` but with no bin-alignment
    requirement; off-bin values are approximations and converge to zero
    between the comb peaks of a reconstructed FRF.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    if len(pir) != tg.n_samples:
        raise ValidationError(
            f"PIR has {len(pir)} samples, time grid has {tg.n_samples}"
        )
    if not np.all(np.isfinite(freqs)):
        raise ValidationError("probe frequencies must be finite")
    for f in np.atleast_1d(freqs):
        if not tg.nyquist_ok(f):
            raise AliasingError(
                f"probe frequency {f} Hz at or above Nyquist ({tg.sample_rate / 2} Hz)"
            )
    arg = 2.0 * np.pi * np.outer(tg.times, freqs)
    kernel = np.exp(-1j * arg)
    return (2.0 / tg.n_samples) * (pir.samples @ kernel)


def pointwise_mean(pirs) -> Pir:
    """Arithmetic mean of several PIRs at each sample time."""
    mat = _stack(pirs, minimum=1)
    return Pir(np.mean(mat, axis=0))


def pointwise_std(pirs) -> np.ndarray:
    """Unbiased (1/(N-1)) standard deviation of several PIRs at each sample time."""
    mat = _stack(pirs, minimum=2)
    return np.std(mat, axis=0, ddof=1)


def _stack(pirs, minimum):
    pirs = list(pirs)
    if len(pirs) < minimum:
        raise ValidationError(f"need at least {minimum} PIRs, got {len(pirs)}")
    lengths = {len(p) for p in pirs}
    if len(lengths) > 1:
        raise ValidationError(f"PIR lengths differ: {sorted(lengths)}")
    return np.stack([p.samples for p in pirs])
