"""Post-processing: misfits, travel times, seismograms and depth-profile fits."""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks, hilbert


class PacketLost(RuntimeError):
    """A wave arrival could not be detected in a recorded series."""


def misfit(a, b):
    """Relative L2 distance ``sqrt(sum (a-b)^2 / sum b^2)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    den = np.sum(b * b)
    if den == 0.0:
        raise ZeroDivisionError("reference field is identically zero")
    return float(np.sqrt(np.sum((a - b) ** 2) / den))


def convergence_order(errors, sizes):
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    errors = np.asarray(errors, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    if len(errors) != len(sizes):
        raise ValueError("errors and sizes differ in length")
    if len(sizes) < 3:
        raise ValueError("need at least 3 grid sizes")
    if np.any(np.diff(sizes) <= 0):
        raise ValueError("grid sizes must be strictly increasing")
    if np.any(errors <= 0):
        raise ValueError("errors must be positive")
    slope, _ = np.polyfit(np.log(sizes), np.log(errors), 1)
    return float(slope)


# ---------------------------------------------------------------- seismograms

@dataclass
class Seismogram:
    station: tuple
    steps: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    def append(self, state):
        x, y = self.station
        self.steps.append(state.time_step)
        self.samples.append((float(state.j[0][x, y]), float(state.j[1][x, y])))

    def __len__(self):
        return len(self.samples)

    def as_array(self):
        return np.array(self.samples, dtype=float).reshape(-1, 2)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "jx", "jy"])
            for n, (jx, jy) in zip(self.steps, self.samples):
                w.writerow([n, repr(jx), repr(jy)])


def record_seismogram(states, station, shape=None):
    """Collect ``(jx, jy)`` at ``station`` from an iterable of states.

    ``shape`` (nx, ny) allows the bounds check before the first state
    arrives; otherwise it is taken from the first state.
    """
    seis = Seismogram(tuple(int(v) for v in station))

    def check(nx, ny):
        x, y = seis.station
        if not (0 <= x < nx and 0 <= y < ny):
            raise IndexError(f"station {seis.station} outside the {nx}x{ny} grid")

    if shape is not None:
        check(*shape)
    for i, st in enumerate(states):
        if i == 0 and shape is None:
            check(st.nx, st.ny)
        seis.append(st)
    return seis


# ---------------------------------------------------------------- travel times

def _vertex(y, i):
    """Sub-sample position of the extremum at index ``i`` (parabola)."""
    if 0 < i < len(y) - 1:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        den = y0 - 2.0 * y1 + y2
        if den != 0.0:
            return i + 0.5 * (y0 - y2) / den
    return float(i)


def first_crossing(series, threshold):
    """Fractional index where ``series`` first reaches ``threshold``."""
    s = np.asarray(series, dtype=float)
    hits = np.nonzero(s >= threshold)[0]
    if hits.size == 0:
        raise PacketLost(f"no crossing of {threshold:g}")
    i = hits[0]
    if i == 0:
        return 0.0
    return i - 1 + (threshold - s[i - 1]) / (s[i] - s[i - 1])


def lag(a, b):
    """Delay of ``b`` relative to ``a`` from the peak of their cross-correlation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.correlate(b, a, "full")
    return _vertex(c, int(np.argmax(c))) - (len(a) - 1)


def _axis_traces(frames, center, axis):
    """Time series of the x-flux along the line through ``center`` on ``axis``."""
    cx, cy = (int(round(v)) for v in center)
    if axis == 0:
        return np.asarray([fr[0][:, cy] for fr in frames])
    return np.asarray([fr[0][cx, :] for fr in frames])


def measure_speed_ratio(frames, center, offsets=(20, 48), method="xcorr", threshold=0.05):
    """P and S speeds from an x-directed point force on a periodic grid.

    ``frames`` is a sequence of flux fields ``(2, nx, ny)``, one per step.
    P waves are read along the x axis through ``center`` and S waves along
    the y axis.  ``method="xcorr"`` times the waveform between the two
    station distances in ``offsets`` by cross-correlation, which cancels
    the unknown emission time; ``method="threshold"`` takes the first
    crossing of ``threshold`` times the global peak at the grid border and
    divides the border distance by that time.

    Returns ``(vP, vS, vP / vS)``.
    """
    speeds = []
    for axis in (0, 1):
        tr = _axis_traces(frames, center, axis)
        n = tr.shape[1]
        c = int(round(center[axis]))
        if method == "xcorr":
            r1, r2 = offsets
            v = [(r2 - r1) / lag(tr[:, (c + s * r1) % n], tr[:, (c + s * r2) % n])
                 for s in (1, -1)]
        elif method == "threshold":
            thr = threshold * max(np.abs(fr).max() for fr in frames)
            v = []
            for edge in (0, n - 1):
                t = first_crossing(np.abs(tr[:, edge]), thr)
                v.append(abs(edge - c) / max(t, 1e-300))
        else:
            raise ValueError(f"unknown method {method!r}")
        speeds.append(float(np.mean(v)))
    return speeds[0], speeds[1], speeds[0] / speeds[1]


def packet_passes(series, min_separation, rel_height=0.2):
    """Step indices of envelope maxima of a recurring wave packet."""
    env = np.abs(hilbert(np.asarray(series, dtype=float)))
    if env.max() == 0.0:
        raise PacketLost("series is identically zero")
    peaks, _ = find_peaks(env, distance=max(int(min_separation), 1),
                          height=rel_height * env.max())
    return peaks


def rayleigh_speed(series, width, turns=2, start=0, half_window=None):
    """Surface-wave speed from a station on a laterally periodic strip.

    The packet passes the station once per turn.  The first pass at or
    after ``start`` and the pass ``turns`` later are located from the
    envelope, then the delay between them is refined by cross-correlating
    the signed waveform.  Speed is ``turns * width / delay``.
    """
    s = np.asarray(series, dtype=float)
    # residue released at the switch is weaker than the circulating packet
    passes = start + packet_passes(s[start:], min_separation=width / 2.0, rel_height=0.5)
    if len(passes) < turns + 1:
        raise PacketLost(f"found {len(passes)} passes after step {start}, need {turns + 1}")
    a, b = int(passes[0]), int(passes[turns])
    gap = b - a
    h = int(half_window or gap // 8)
    h = min(h, a, len(s) - 1 - b)
    if h < 2:
        raise PacketLost("passes too close to the ends of the record")
    seg = s[a - h:a + h + 1]
    search = max(h // 2, 2)
    lags = np.arange(gap - search, gap + search + 1)
    lags = lags[(a - h + lags >= 0) & (a + h + 1 + lags <= len(s))]
    corr = np.array([np.dot(seg, s[a - h + L:a + h + 1 + L]) for L in lags])
    i = int(np.argmax(corr))
    delay = lags[0] + _vertex(corr, i)
    return turns * width / delay


def crest_spacing(profile):
    """Local wavelength at the strongest extremum of a surface profile.

    Twice the distance between the two zero crossings that bracket the
    largest ``|profile|``.  Zero crossings of an enveloped wave are not
    shifted by the envelope, unlike its crests.
    """
    p = np.asarray(profile, dtype=float)
    i = int(np.argmax(np.abs(p)))
    sgn = np.sign(p[i])

    def crossing(step):
        k = i
        while 0 <= k + step < len(p) and np.sign(p[k + step]) == sgn:
            k += step
        if not 0 <= k + step < len(p):
            raise PacketLost("profile has no zero crossing on one side of its peak")
        lo, hi = (k, k + step) if step > 0 else (k + step, k)
        return lo + p[lo] / (p[lo] - p[hi])

    return 2.0 * (crossing(1) - crossing(-1))


# ---------------------------------------------------------------- fits

@dataclass
class FitResult:
    model: str
    params: dict
    residual: float
    degenerate: bool = False


def fit_exponential(depth, amplitude):
    """Fit ``A exp(-y / d)``; start from a log-linear regression."""
    y = np.asarray(depth, dtype=float)
    a = np.asarray(amplitude, dtype=float)
    if len(y) < 10:
        raise ValueError("need at least 10 depth samples")
    if np.any(a <= 0):
        raise ValueError("amplitudes must be positive")
    slope, icpt = np.polyfit(y, np.log(a), 1)
    if slope >= -1e-12:
        # flat or growing profile: no finite decay length
        return FitResult("exponential", {"A": float(np.mean(a)), "d": np.inf},
                         float(np.sum((a - np.mean(a)) ** 2)), degenerate=True)

    def resid(q):
        return q[0] * np.exp(-y / q[1]) - a

    def jac(q):
        e = np.exp(-y / q[1])
        return np.column_stack([e, q[0] * e * y / q[1] ** 2])

    sol = least_squares(resid, [np.exp(icpt), -1.0 / slope], jac=jac, method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if not sol.success:
        raise RuntimeError(f"exponential fit did not converge: {sol.message}")
    A, d = sol.x
    return FitResult("exponential", {"A": float(A), "d": float(d)},
                     float(np.sum(sol.fun ** 2)))


def decay_exponents(vR, vS, vP):
    if not vR < vS < vP:
        raise ValueError(f"need vR < vS < vP, got {vR}, {vS}, {vP}")
    return np.sqrt(1.0 - (vR / vS) ** 2), np.sqrt(1.0 - (vR / vP) ** 2)


def rayleigh_profile(depth, amplitude, wavelength, vR, vS, vP):
    """Vertical Rayleigh motion versus depth below a traction-free surface.

    ``aP [2/(1+aS^2) exp(-k aS y) - exp(-k aP y)]`` with ``k = 2 pi / wavelength``.
    """
    aS, aP = decay_exponents(vR, vS, vP)
    k = 2.0 * np.pi / wavelength
    y = np.asarray(depth, dtype=float)
    return amplitude * aP * (2.0 / (1.0 + aS**2) * np.exp(-k * aS * y) - np.exp(-k * aP * y))


def fit_rayleigh_analytical(depth, amplitude, vR, vS, vP, wavelength0=None):
    """Fit amplitude and wavelength of :func:`rayleigh_profile`."""
    y = np.asarray(depth, dtype=float)
    a = np.asarray(amplitude, dtype=float)
    aS, aP = decay_exponents(vR, vS, vP)
    g = 2.0 / (1.0 + aS**2)

    def parts(q):
        k = 2.0 * np.pi / q[1]
        eS, eP = np.exp(-k * aS * y), np.exp(-k * aP * y)
        return k, eS, eP

    def resid(q):
        _, eS, eP = parts(q)
        return q[0] * aP * (g * eS - eP) - a

    def jac(q):
        k, eS, eP = parts(q)
        dk = -k / q[1]
        d_amp = aP * (g * eS - eP)
        d_wl = q[0] * aP * (g * eS * (-aS * y) - eP * (-aP * y)) * dk
        return np.column_stack([d_amp, d_wl])

    starts = [wavelength0] if wavelength0 else [10.0, 20.0, 40.0, 80.0]
    best = None
    for wl in starts:
        shape = rayleigh_profile(y, 1.0, wl, vR, vS, vP)
        amp0 = float(np.dot(shape, a) / np.dot(shape, shape))
        sol = least_squares(resid, [amp0, wl], jac=jac, method="lm",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if sol.x[1] > 0 and (best is None or sol.cost < best.cost):
            best = sol
    if best is None:
        raise RuntimeError("Rayleigh profile fit did not converge")
    return FitResult("rayleigh", {"amplitude": float(best.x[0]), "wavelength": float(best.x[1])},
                     float(np.sum(best.fun ** 2)))


def fit_damped_cosine(t, series):
    """Fit ``A exp(-g t) cos(w t + phi)``; returns ``(A, g, w, phi)``.

    The starting frequency comes from the spectral peak of the series.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(series, dtype=float)
    spec = np.abs(np.fft.rfft(s - s.mean()))
    freqs = np.fft.rfftfreq(len(s), d=t[1] - t[0])
    w0 = 2.0 * np.pi * freqs[int(np.argmax(spec[1:])) + 1]
    phi0 = 0.0 if s[0] >= 0 else np.pi

    def resid(q):
        return q[0] * np.exp(-q[1] * t) * np.cos(q[2] * t + q[3]) - s

    def jac(q):
        e = np.exp(-q[1] * t)
        c, sn = np.cos(q[2] * t + q[3]), np.sin(q[2] * t + q[3])
        return np.column_stack([e * c, -t * q[0] * e * c, -t * q[0] * e * sn, -q[0] * e * sn])

    sol = least_squares(resid, [abs(s).max(), 0.0, w0, phi0], jac=jac, method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return tuple(float(v) for v in sol.x)
