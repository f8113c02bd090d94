"""Multichannel signal preprocessing: filtering, downsampling, windowing.

All filters are Butterworth biquad cascades applied forward-backward
(zero phase), so connectivity estimates downstream are not distorted by
group delay.  Arithmetic is float64 throughout; 32-bit conversion only
happens at file boundaries (see :mod:`emoconn.formats`).
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import butter, decimate, sosfiltfilt

from .errors import DataError, ParameterError

#: Canonical EEG frequency bands (Hz).
CANONICAL_BANDS = (
    ("delta", 1.0, 4.0),
    ("theta", 4.0, 8.0),
    ("alpha", 8.0, 14.0),
    ("beta", 14.0, 31.0),
    ("gamma", 31.0, 50.0),
)


@dataclass(frozen=True)
class BandSpec:
    """A named frequency band with edges in Hz."""

    name: str
    low_hz: float
    high_hz: float

    def validate(self, fs):
        if not (0.0 < self.low_hz < self.high_hz < fs / 2.0):
            raise ParameterError(
                f"band {self.name}: need 0 < low ({self.low_hz}) < high "
                f"({self.high_hz}) < fs/2 ({fs / 2.0})"
            )


def canonical_bands(names=None):
    """Return the standard five bands, optionally restricted to ``names``."""
    bands = [BandSpec(n, lo, hi) for n, lo, hi in CANONICAL_BANDS]
    if names is None:
        return bands
    by_name = {b.name: b for b in bands}
    try:
        return [by_name[n] for n in names]
    except KeyError as exc:
        raise ParameterError(f"unknown canonical band {exc.args[0]!r}") from None


@dataclass
class Recording:
    """A multichannel recording, channel-major float64 samples in microvolts.

    Every channel row has identical length; channel labels are unique.
    """

    samples: np.ndarray
    fs: float
    channels: tuple
    trial_id: int = 0
    subject_id: str = ""
    session_id: int = 0
    label: object = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ParameterError("samples must be a 2-D channel-major array")
        self.channels = tuple(self.channels)
        if len(self.channels) != self.samples.shape[0]:
            raise ParameterError(
                f"{len(self.channels)} labels for {self.samples.shape[0]} channel rows"
            )
        if len(set(self.channels)) != len(self.channels):
            raise ParameterError("channel labels must be unique")
        if not self.fs > 0:
            raise ParameterError(f"fs must be positive, got {self.fs}")

    @property
    def n_channels(self):
        return self.samples.shape[0]

    @property
    def n_samples(self):
        return self.samples.shape[1]

    @property
    def duration_sec(self):
        return self.n_samples / self.fs

    def with_samples(self, samples, fs=None):
        """Copy of this recording with new sample data (metadata kept)."""
        return replace(self, samples=samples, fs=self.fs if fs is None else fs)


@dataclass
class Segment:
    """One fixed-length window cut from a band-filtered recording."""

    samples: np.ndarray
    fs: float
    channels: tuple
    band: BandSpec = None
    window_index: int = 0
    trial_id: int = 0
    subject_id: str = ""
    session_id: int = 0
    label: object = None

    @property
    def n_channels(self):
        return self.samples.shape[0]


def remove_mean(recording):
    """Subtract the per-channel mean (stand-in for vendor baseline correction)."""
    sam = recording.samples
    return recording.with_samples(sam - sam.mean(axis=1, keepdims=True))


def design_bandpass(low_hz, high_hz, fs, order=4):
    """Design a Butterworth bandpass as second-order sections.

    Parameters
    ----------
    low_hz, high_hz : float
        Band edges in Hz; the magnitude response is within 3 dB of unity
        at both edges (Butterworth -3 dB points).
    fs : float
        Sampling rate in Hz.
    order : int
        Total filter order; must be even and >= 2.  ``order`` poles total,
        i.e. ``order/2`` biquad sections.

    Returns
    -------
    sos : ndarray, shape (order/2, 6)
        Second-order-section coefficients for :func:`scipy.signal.sosfiltfilt`.
    """
    if not (0.0 < low_hz < high_hz < fs / 2.0):
        raise ParameterError(
            f"need 0 < low ({low_hz}) < high ({high_hz}) < fs/2 ({fs / 2.0})"
        )
    if order < 2 or order % 2 != 0:
        raise ParameterError(f"order must be even and >= 2, got {order}")
    return butter(order // 2, [low_hz, high_hz], btype="bandpass", fs=fs, output="sos")


def apply_filter_zero_phase(recording, sos):
    """Run a forward-backward (zero phase) filter over every channel."""
    sam = recording.samples
    if sam.size == 0:
        raise ParameterError("recording is empty")
    if not np.all(np.isfinite(sam)):
        raise DataError("recording contains non-finite samples")
    return recording.with_samples(sosfiltfilt(sos, sam, axis=1))


def downsample(recording, target_fs):
    """Decimate to ``target_fs`` after anti-alias lowpass filtering.

    The ratio ``fs / target_fs`` must be an integer.  ``target_fs == fs``
    returns an identical copy.
    """
    fs = recording.fs
    ratio = fs / target_fs
    if abs(ratio - round(ratio)) > 1e-9 or target_fs <= 0:
        raise ParameterError(
            f"fs ({fs}) must be an integer multiple of target_fs ({target_fs})"
        )
    q = int(round(ratio))
    if q == 1:
        return recording.with_samples(recording.samples.copy())
    out = decimate(recording.samples, q, axis=1, zero_phase=True)
    return recording.with_samples(out, fs=target_fs)


def segment(recording, window_sec, band=None):
    """Cut a recording into nonoverlapping fixed-length windows.

    Returns ``floor(T / window_sec)`` segments; a trailing partial window is
    discarded.  A recording shorter than one window yields an empty list.
    ``band`` tags the segments when the recording is a band-filtered copy.
    """
    if window_sec <= 0:
        raise ParameterError(f"window_sec must be positive, got {window_sec}")
    win = int(round(window_sec * recording.fs))
    n_win = recording.n_samples // win
    out = []
    for w in range(n_win):
        out.append(
            Segment(
                samples=recording.samples[:, w * win : (w + 1) * win].copy(),
                fs=recording.fs,
                channels=recording.channels,
                band=band,
                window_index=w,
                trial_id=recording.trial_id,
                subject_id=recording.subject_id,
                session_id=recording.session_id,
                label=recording.label,
            )
        )
    return out


def band_decompose(recording, bands, order=4):
    """Filter a recording into each band, returning ``{band: Recording}``.

    Band order is preserved (insertion-ordered dict keyed by BandSpec).
    """
    for band in bands:
        band.validate(recording.fs)
    out = {}
    for band in bands:
        sos = design_bandpass(band.low_hz, band.high_hz, recording.fs, order=order)
        out[band] = apply_filter_zero_phase(recording, sos)
    return out
