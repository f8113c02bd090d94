"""Pairwise association matrices between channels of a windowed segment.

Two metrics are supported:

* Pearson correlation, ``cov(x, y) / (sigma_x * sigma_y)``, computed in the
  time domain on one window.
* Magnitude-squared coherence, ``|Pxy(f)|^2 / (Pxx(f) Pyy(f))`` from Welch
  cross power spectral densities, averaged over the FFT bins whose center
  frequency falls inside the segment's band.

Matrices are symmetric with a zero main diagonal (self-association carries
no information and is discarded).
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import get_window

from .errors import DataError, ParameterError

#: Default reduced montage: a 10-20 subset matching common portable headsets.
#: Configurable; see :func:`subset_channels`.
DEFAULT_18_CHANNELS = (
    "FP1", "FP2", "FZ", "F3", "F4", "F7", "F8", "CZ", "C3", "C4",
    "T7", "T8", "PZ", "P3", "P4", "P7", "P8", "OZ",
)


@dataclass
class ConnectivityMatrix:
    """Symmetric N x N association matrix for one window in one band."""

    weights: np.ndarray
    metric: str
    channels: tuple
    band: object = None
    window_index: int = 0
    trial_id: int = 0
    subject_id: str = ""
    session_id: int = 0
    label: object = None

    @property
    def n_channels(self):
        return self.weights.shape[0]


@dataclass(frozen=True)
class WelchParams:
    """Spectral-estimation parameters for the coherence metric.

    ``seg_len`` <= 0 means "one second of samples" (resolved against the
    segment's sampling rate); overlap is a fraction of ``seg_len``.
    """

    seg_len: int = 0
    overlap: float = 0.5
    window_fn: str = "hann"

    def resolve(self, fs):
        n = self.seg_len if self.seg_len > 0 else int(round(fs))
        if not (0.0 <= self.overlap < 1.0):
            raise ParameterError(f"overlap must be in [0, 1), got {self.overlap}")
        hop = n - int(round(self.overlap * n))
        if hop < 1:
            raise ParameterError("overlap leaves no hop between sub-segments")
        return n, hop


def pearson_matrix(seg):
    """Pearson correlation between every channel pair of one segment.

    Raises
    ------
    DataError
        If any channel has zero variance (correlation undefined).
    """
    x = np.asarray(seg.samples, dtype=np.float64)
    if x.shape[1] < 2:
        raise ParameterError("need at least 2 samples per channel")
    sd = x.std(axis=1)
    bad = np.flatnonzero(sd == 0.0)
    if bad.size:
        names = ", ".join(seg.channels[i] for i in bad)
        raise DataError(f"zero-variance channel(s): {names}")
    w = np.corrcoef(x)
    np.clip(w, -1.0, 1.0, out=w)
    np.fill_diagonal(w, 0.0)
    w = 0.5 * (w + w.T)
    return ConnectivityMatrix(
        weights=w,
        metric="correlation",
        channels=seg.channels,
        band=seg.band,
        window_index=seg.window_index,
        trial_id=seg.trial_id,
        subject_id=seg.subject_id,
        session_id=seg.session_id,
        label=seg.label,
    )


def _welch_cross_spectra(x, fs, seg_len, hop, window_fn):
    """Averaged one-sided cross spectra ``S[i, j, f]`` for all channel pairs."""
    n_ch, n = x.shape
    n_frames = 1 + (n - seg_len) // hop
    win = get_window(window_fn, seg_len)
    frames = np.stack(
        [x[:, k * hop : k * hop + seg_len] for k in range(n_frames)], axis=1
    )
    # constant detrend per sub-segment, then taper
    frames = frames - frames.mean(axis=2, keepdims=True)
    spec = np.fft.rfft(frames * win, axis=2)
    # S[i, j, f] = mean_k Z_i Z_j*; normalization cancels in the coherence ratio
    s = np.einsum("ikf,jkf->ijf", spec, np.conj(spec)) / n_frames
    freqs = np.fft.rfftfreq(seg_len, d=1.0 / fs)
    return s, freqs


def coherence_matrix(seg, welch=WelchParams()):
    """Band-averaged magnitude-squared coherence between channel pairs.

    Welch estimation with the given sub-segment length, overlap and taper;
    the per-frequency coherence is averaged over bins with
    ``band.low_hz <= f < band.high_hz``.  Requires at least two Welch
    sub-segments (single-segment coherence is identically 1).
    """
    if seg.band is None:
        raise ParameterError("segment has no band; coherence needs band edges")
    x = np.asarray(seg.samples, dtype=np.float64)
    seg_len, hop = welch.resolve(seg.fs)
    n = x.shape[1]
    if n < seg_len + hop:
        raise ParameterError(
            f"window of {n} samples gives fewer than 2 Welch sub-segments "
            f"(seg_len={seg_len}, hop={hop})"
        )
    s, freqs = _welch_cross_spectra(x, seg.fs, seg_len, hop, welch.window_fn)
    in_band = (freqs >= seg.band.low_hz) & (freqs < seg.band.high_hz)
    if not in_band.any():
        raise ParameterError(
            f"no FFT bins inside band [{seg.band.low_hz}, {seg.band.high_hz}) Hz"
        )
    auto = np.real(np.einsum("iif->if", s))
    bad = np.flatnonzero(~(auto[:, in_band] > 0.0).all(axis=1))
    if bad.size:
        names = ", ".join(seg.channels[i] for i in bad)
        raise DataError(f"zero in-band power in channel(s): {names}")
    denom = auto[:, None, :] * auto[None, :, :]
    coh = np.abs(s) ** 2 / denom
    w = coh[:, :, in_band].mean(axis=2)
    np.clip(w, 0.0, 1.0, out=w)
    np.fill_diagonal(w, 0.0)
    w = 0.5 * (w + w.T)
    return ConnectivityMatrix(
        weights=w,
        metric="coherence",
        channels=seg.channels,
        band=seg.band,
        window_index=seg.window_index,
        trial_id=seg.trial_id,
        subject_id=seg.subject_id,
        session_id=seg.session_id,
        label=seg.label,
    )


def subset_channels(matrix, names):
    """Principal submatrix for the given channel names, in the given order.

    A full-rate montage (e.g. 62 channels) reduces to a smaller one by
    selecting rows/columns directly; no recomputation is needed.
    """
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ParameterError("subset contains duplicate channel names")
    index = {c: i for i, c in enumerate(matrix.channels)}
    missing = [n for n in names if n not in index]
    if missing:
        raise ParameterError(f"unknown channel(s): {', '.join(missing)}")
    idx = np.array([index[n] for n in names], dtype=int)
    w = matrix.weights[np.ix_(idx, idx)].copy()
    return replace(matrix, weights=w, channels=names)
