"""Canned numerical experiments returning plain-dict summaries.

Every function is deterministic and returns JSON-serialisable scalars under
stable keys; bulky arrays go under keys starting with ``_`` so callers can
write them to files and drop them from summaries.
"""

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import core
from .boundaries import ABSORBING, FREE, PERIODIC, RIGID, BoundarySpec
from .core import MaterialParams
from .diagnostics import (
    Seismogram, convergence_order, crest_spacing, fit_damped_cosine,
    fit_exponential, fit_rayleigh_analytical, measure_speed_ratio, misfit,
    rayleigh_speed,
)
from .solver import ElasticLBM
from .sources import SourceSpec
from .spectral import SpectralOracle
from .stability import default_k_grid, stability_map

BASE_N = 128
BASE_STEPS = 70
RAYLEIGH_TARGET = np.sqrt(0.8453 / 3.0)  # v_S sqrt(0.8453) at nu = 1/4


def bulk_source(n, base=BASE_N):
    """Default x-directed source scaled from the 128-node setup to ``n`` nodes."""
    return SourceSpec(center=(base / 2, base / 2)).scaled(n / base)


# ---------------------------------------------------------------- bulk

def bulk_compare(nu=0.25, n=BASE_N, steps=BASE_STEPS, tau=0.55, source=None):
    """LBM against the spectral oracle on a periodic ``n x n`` grid."""
    params = MaterialParams(nu=nu, tau=tau)
    source = source or bulk_source(n)
    lb = ElasticLBM(n, n, params, source)
    lb.run(steps)
    jo = SpectralOracle(n, n, params, source).run(steps)
    return {
        "nu": nu, "n": n, "steps": steps, "tau": tau,
        "misfit": misfit(lb.state.jx, jo[0]),
        "_lbm": lb.state, "_oracle": jo,
    }


def _bulk_misfit(args):
    nu, n, steps, tau, scaled = args
    src = bulk_source(n) if scaled else SourceSpec(center=(n / 2, n / 2))
    return bulk_compare(nu, n, steps, tau, src)["misfit"]


def convergence(nu=0.0, sizes=(64, 128, 256, 512), tau=0.55, workers=1):
    """Grid-refinement sweep.

    The ``scaled`` series refines the physical problem: source width,
    period, delay, position and snapshot time all grow with ``N / 128``.
    The ``fixed`` series keeps the 128-node source and ``t = 70`` on every
    grid, which only enlarges the periodic box.
    """
    sizes = list(sizes)
    jobs = [(nu, n, int(round(BASE_STEPS * n / BASE_N)), tau, True) for n in sizes]
    jobs += [(nu, n, BASE_STEPS, tau, False) for n in sizes]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            errs = list(pool.map(_bulk_misfit, jobs))
    else:
        errs = [_bulk_misfit(j) for j in jobs]
    scaled, fixed = errs[:len(sizes)], errs[len(sizes):]
    return {
        "nu": nu, "sizes": sizes,
        "misfit_scaled": scaled, "slope_scaled": convergence_order(scaled, sizes),
        "misfit_fixed": fixed,
    }


def speed_ratio(nu, n=BASE_N, steps=150, tau=0.55, offsets=(20, 48), method="xcorr"):
    """Measured ``vP / vS`` from an x-directed source at the grid centre."""
    params = MaterialParams(nu=nu, tau=tau)
    c = n // 2
    lb = ElasticLBM(n, n, params, SourceSpec(center=(c, c)))
    frames = []
    lb.run(steps, callback=lambda st: frames.append(st.j.copy()))
    vP, vS, ratio = measure_speed_ratio(frames, (c, c), offsets, method)
    theory = params.speed_ratio()
    return {"nu": nu, "vP": vP, "vS": vS, "ratio": ratio, "theory": theory,
            "rel_error": ratio / theory - 1.0}


def seismogram_compare(nu=0.0, n=BASE_N, steps=200, tau=0.55):
    """Flux history at ``(2N/3, 2N/3)`` for the LBM and the oracle."""
    params = MaterialParams(nu=nu, tau=tau)
    src = bulk_source(n)
    station = (2 * n // 3, 2 * n // 3)
    lb = ElasticLBM(n, n, params, src)
    oracle = SpectralOracle(n, n, params, src)
    seis = Seismogram(station)
    ref = []
    for _ in range(steps):
        lb.step()
        oracle.step()
        seis.append(lb.state)
        ref.append(oracle.fields()[:, station[0], station[1]])
    a, b = seis.as_array()[:, 0], np.array(ref)[:, 0]
    return {"nu": nu, "station": list(station), "steps": steps,
            "rms_difference": misfit(a, b), "_lbm": seis, "_oracle": np.array(ref)}


# ---------------------------------------------------------------- stability

def stability(nu=0.25, tau=0.55, n=64):
    report = stability_map(nu, tau, default_k_grid(n))
    return {"nu": nu, "tau": tau, "k_points": len(report.k_grid),
            "unstable_count": report.n_unstable,
            "min_unstable_norm": report.min_unstable_norm(),
            "max_modulus": float(report.max_modulus.max()), "_report": report}


# ---------------------------------------------------------------- boundaries

def reflection(wall, nu=0.25, n=160, source_height=50, probe_height=90, tau=0.55, window=25):
    """Vertical P pulse reflected by a ``rigid`` or ``free`` bottom edge.

    The probe sits above the source, so it first sees the upward half of
    the pulse and later the downward half after it bounced off the wall.
    Both halves leave the source with the same sign of ``j_y``.
    """
    if wall not in (RIGID, FREE):
        raise ValueError(f"wall must be {RIGID!r} or {FREE!r}")
    params = MaterialParams(nu=nu, tau=tau)
    c = n // 2
    src = SourceSpec(center=(c, source_height), direction=(0.0, 1.0))
    bnd = BoundarySpec.from_kinds(ABSORBING, ABSORBING, wall, ABSORBING)
    lb = ElasticLBM(n, n, params, src, bnd)
    t_direct = src.t0 + (probe_height - source_height) / params.vP
    t_refl = src.t0 + (probe_height + source_height) / params.vP
    steps = int(t_refl + 2 * window)
    probe = Seismogram((c, probe_height))
    lb.run(steps, callback=probe.append)
    jy = probe.as_array()[:, 1]

    def extremum(t):
        lo, hi = int(t - window), int(t + window)
        seg = jy[lo:hi]
        return float(seg[np.argmax(np.abs(seg))])

    d, r = extremum(t_direct), extremum(t_refl)
    return {"wall": wall, "nu": nu, "direct": d, "reflected": r,
            "sign_preserved": bool(np.sign(d) == np.sign(r)), "_probe": probe}


def wall_amplitude(wall, nu=0.25, n=160, distance=80, steps=150, tau=0.55):
    """Peak ``|j_y|`` on the node row next to a bottom edge of kind ``wall``.

    For ``wall="absorbing"`` the grid is lengthened by the layer so the
    sampled row sees the same incident pulse without any wall.
    """
    params = MaterialParams(nu=nu, tau=tau)
    layer = 30
    offset = layer if wall == ABSORBING else 0
    src = SourceSpec(center=(n // 2, distance + offset), direction=(0.0, 1.0))
    bnd = BoundarySpec.from_kinds(ABSORBING, ABSORBING, wall, ABSORBING)
    lb = ElasticLBM(n, n + offset, params, src, bnd)
    peak = 0.0
    for _ in range(steps):
        lb.step()
        peak = max(peak, abs(lb.state.j[1][n // 2, offset]))
    return peak


def absorbing_reflection(nu=0.25, ny=240, thickness=30, a_max=0.1, width=20.0, tau=0.55, nx=64):
    """Plane P pulse launched into an absorbing layer; returns back/incident."""
    params = MaterialParams(nu=nu, tau=tau)
    y = np.arange(ny, dtype=float)
    y0 = ny / 2
    pulse = 1e-3 * np.exp(-((y - y0) / width) ** 2 * 4)
    # upward-travelling P pulse: rho' = j_y / vP and Pn_yy = j_y (vP - b^2 / vP)
    v = params.vP
    rho = np.broadcast_to(1.0 + pulse / v, (nx, ny)).copy()
    j = np.zeros((2, nx, ny))
    j[1] = pulse
    Pn = np.zeros((3, nx, ny))
    Pn[2] = pulse * (v - core.B2 / v)
    f = core.equilibrium(rho, j, Pn)
    bnd = BoundarySpec.from_kinds(PERIODIC, PERIODIC, ABSORBING, ABSORBING,
                                  thickness=thickness, a_max=a_max)
    lb = ElasticLBM(nx, ny, params, boundary=bnd, state=core.FieldState(f=f))
    probe = ny - 1 - thickness
    travel = (probe - y0) / params.vP
    steps = int(travel + (2 * thickness + 2 * width) / params.vP + width)
    rec = []
    lb.run(steps, callback=lambda st: rec.append(st.j[1][0, probe]))
    rec = np.abs(np.array(rec))
    split = int(travel + width / params.vP + thickness / params.vP)
    incident, back = rec[:split].max(), rec[split:].max()
    return {"incident": float(incident), "reflected": float(back),
            "ratio": float(back / incident)}


# ---------------------------------------------------------------- Rayleigh

def rayleigh(nx=300, ny=100, nu=0.25, tau=0.55, source=None, switch_step=400,
             turns=2, station=None, profile_step=1800, layer=30, depth_samples=None):
    """Surface wave on a free top edge.

    Phase one damps everything but the top edge so bulk waves and the
    backward surface packet disappear; at ``switch_step`` the lateral edges
    become periodic and the surviving packet circles the strip.  The speed
    comes from a surface station over ``turns`` passes; the depth profile
    of ``|j_y|`` at the strongest surface crest at ``profile_step`` is fitted
    by the exponential and the analytical Rayleigh models.
    """
    params = MaterialParams(nu=nu, tau=tau)
    src = source or SourceSpec(center=(45.0, ny - 1 - 5.0), direction=(0.0, 1.0),
                               sigma=8.0, period=40.0, t0=40.0)
    phase1 = BoundarySpec.from_kinds(ABSORBING, ABSORBING, ABSORBING, FREE, thickness=layer)
    phase2 = BoundarySpec.from_kinds(PERIODIC, PERIODIC, ABSORBING, FREE, thickness=layer)
    station = station or nx // 2
    lb = ElasticLBM(nx, ny, params, src, phase1)
    # enough for `turns` full passes after the switch at the slowest plausible speed
    n_steps = int(switch_step + (turns + 1.5) * nx / (0.95 * RAYLEIGH_TARGET))
    n_steps = max(n_steps, profile_step + int(src.period))
    half = int(src.period // 4)
    surface, window = [], []
    for n in range(n_steps):
        if n == switch_step:
            lb.set_boundary(phase2)
        lb.step()
        surface.append(lb.state.j[1][station, -1])
        if abs(lb.state.time_step - profile_step) <= half:
            window.append(lb.state.j[1].copy())
    vR = rayleigh_speed(surface, nx, turns, start=switch_step)

    snap = window[half]
    top = snap[:, -1]
    x0 = int(np.argmax(np.abs(top)))
    usable = depth_samples or ny - layer
    amp = np.abs(np.array(window)[:, x0, :]).max(axis=0)[::-1][:usable]
    depth = np.arange(usable) + 0.5  # wall half a link above the top row
    exp_fit = fit_exponential(depth, amp)
    ray_fit = fit_rayleigh_analytical(depth, amp, RAYLEIGH_TARGET, params.vS, params.vP)
    spacing = crest_spacing(top)
    return {
        "nu": nu, "nx": nx, "ny": ny, "vR": vR, "target": RAYLEIGH_TARGET,
        "rel_error": vR / RAYLEIGH_TARGET - 1.0,
        "profile_x": x0, "profile_step": profile_step,
        "exp_A": exp_fit.params["A"], "exp_d": exp_fit.params["d"],
        "exp_residual": exp_fit.residual,
        "rayleigh_amplitude": ray_fit.params["amplitude"],
        "rayleigh_wavelength": ray_fit.params["wavelength"],
        "rayleigh_residual": ray_fit.residual,
        "crest_spacing": spacing,
        "wavelength_rel_diff": ray_fit.params["wavelength"] / spacing - 1.0,
        "_surface": np.array(surface), "_depth": depth, "_profile": amp,
    }


# ---------------------------------------------------------------- dissipation

def shear_decay_rate(tau, ny=32, nx=4, steps=600, amplitude=1e-4, nu=0.25):
    """Decay rate of a standing shear wave ``j_x = eps sin(2 pi y / ny)``."""
    params = MaterialParams(nu=nu, tau=tau)
    y = np.arange(ny)
    mode = np.sin(2.0 * np.pi * y / ny)
    j = np.zeros((2, nx, ny))
    j[0] = amplitude * mode[None, :]
    f = core.equilibrium(np.ones((nx, ny)), j, np.zeros((3, nx, ny)))
    lb = ElasticLBM(nx, ny, params, state=core.FieldState(f=f))
    series = [lb.state.j[0][0] @ mode * 2.0 / ny]
    lb.run(steps - 1, callback=lambda st: series.append(st.j[0][0] @ mode * 2.0 / ny))
    _, rate, _, _ = fit_damped_cosine(np.arange(steps), np.array(series))
    return rate
