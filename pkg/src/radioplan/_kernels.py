"""Raster inner loops.

Two interchangeable backends compute the same per-cell quantities:

* ``numba``: an explicit loop over cells compiled with ``@njit``;
* ``numpy``: broadcasting over a (cells x sources) matrix.

Set ``RADIOPLAN_DISABLE_JIT=1`` (or uninstall numba) to force the numpy path.
Both must agree to floating-point noise; the test suite checks this.
"""
from __future__ import annotations

import os

import numpy as np

from radioplan.propagation import UmaCoefficients

try:  # pragma: no cover - exercised implicitly
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_DISABLED = os.environ.get("RADIOPLAN_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes")


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def pack_coeffs(c: UmaCoefficients) -> np.ndarray:
    return np.array([
        c.los_intercept, c.los_slope, c.los_far_slope, c.los_far_bp_coef,
        c.freq_slope, c.nlos_intercept, c.nlos_slope, c.nlos_ut_height_coef,
        c.effective_env_height, 1.0 if c.use_breakpoint else 0.0,
        c.min_distance_m, c.max_distance_m,
    ], dtype=np.float64)


# --- scalar kernels, compiled by numba when available ------------------------

def _uma_scalar(d2d, fc, h_tx, h_ut, nlos, c):
    # distances are clamped into the model's validity range
    if d2d < c[10]:
        d2d = c[10]
    elif d2d > c[11]:
        d2d = c[11]
    dh = h_tx - h_ut
    d3d = np.sqrt(d2d * d2d + dh * dh)
    lf = np.log10(fc)
    pl = c[0] + c[1] * np.log10(d3d) + c[4] * lf
    if c[9] > 0.5:
        d_bp = 4.0 * (h_tx - c[8]) * (h_ut - c[8]) * fc * 1e9 / 299792458.0
        if d2d > d_bp:
            pl = (c[0] + c[2] * np.log10(d3d) + c[4] * lf
                  - c[3] * np.log10(d_bp * d_bp + dh * dh))
    if nlos:
        pl_n = c[5] + c[6] * np.log10(d3d) + c[4] * lf - c[7] * (h_ut - 1.5)
        if pl_n > pl:
            pl = pl_n
    return pl


def _point_in_polygon_loop(px, py, vx, vy, out):
    n = vx.shape[0]
    for k in range(px.shape[0]):
        x = px[k]
        y = py[k]
        inside = False
        j = n - 1
        for i in range(n):
            if (vy[i] > y) != (vy[j] > y):
                xc = vx[i] + (y - vy[i]) * (vx[j] - vx[i]) / (vy[j] - vy[i])
                if x < xc:
                    inside = not inside
            j = i
        out[k] = inside


def _evaluate_loop(cx, cy, h_ut,
                   bs_x, bs_y, bs_eirp, bs_fc, bs_h, bs_nlos, bs_chan,
                   ris_x, ris_y, ris_h, ris_bs, ris_offset, ris_pl_br, ris_nlos,
                   coeffs, direct, via_ris, serving, signal, i_tn, i_ris):
    """Fill received-power matrices and per-cell serving/interference sums.

    Powers are written in dBW to ``direct`` (cells x BS) and ``via_ris``
    (cells x RIS). ``signal``, ``i_tn`` and ``i_ris`` are linear watts.
    """
    n_cells = cx.shape[0]
    n_bs = bs_x.shape[0]
    n_ris = ris_x.shape[0]
    per_bs = np.empty(n_bs)
    for k in range(n_cells):
        for b in range(n_bs):
            d = np.sqrt((cx[k] - bs_x[b]) ** 2 + (cy[k] - bs_y[b]) ** 2)
            p = bs_eirp[b] - _uma(d, bs_fc[b], bs_h[b], h_ut, bs_nlos[b], coeffs)
            direct[k, b] = p
            per_bs[b] = 10.0 ** (p / 10.0)
        for r in range(n_ris):
            b = ris_bs[r]
            d = np.sqrt((cx[k] - ris_x[r]) ** 2 + (cy[k] - ris_y[r]) ** 2)
            pl = ris_pl_br[r] + _uma(d, bs_fc[b], ris_h[r], h_ut, ris_nlos[r], coeffs)
            p = bs_eirp[b] + ris_offset[r] - pl
            via_ris[k, r] = p
            per_bs[b] += 10.0 ** (p / 10.0)
        best = 0
        for b in range(1, n_bs):
            if per_bs[b] > per_bs[best]:
                best = b
        serving[k] = best
        signal[k] = per_bs[best]
        tn = 0.0
        for b in range(n_bs):
            if b != best and bs_chan[b] == bs_chan[best]:
                tn += 10.0 ** (direct[k, b] / 10.0)
        ri = 0.0
        for r in range(n_ris):
            b = ris_bs[r]
            if b != best and bs_chan[b] == bs_chan[best]:
                ri += 10.0 ** (via_ris[k, r] / 10.0)
        i_tn[k] = tn
        i_ris[k] = ri


if HAVE_NUMBA:
    _uma = njit(cache=True)(_uma_scalar)
    _point_in_polygon_jit = njit(cache=True)(_point_in_polygon_loop)
    _evaluate_jit = njit(cache=True)(_evaluate_loop)
else:  # pragma: no cover
    _uma = _uma_scalar


# --- numpy fallback -----------------------------------------------------------

def _uma_matrix(d2d, fc, h_tx, h_ut, nlos, c):
    """Vectorised twin of ``_uma_scalar``; ``d2d`` is (cells x sources)."""
    d2d = np.clip(d2d, c[10], c[11])
    dh = h_tx - h_ut
    d3d = np.sqrt(d2d * d2d + dh * dh)
    lf = np.log10(fc)
    pl = c[0] + c[1] * np.log10(d3d) + c[4] * lf
    if c[9] > 0.5:
        d_bp = 4.0 * (h_tx - c[8]) * (h_ut - c[8]) * fc * 1e9 / 299792458.0
        far = c[0] + c[2] * np.log10(d3d) + c[4] * lf - c[3] * np.log10(d_bp * d_bp + dh * dh)
        pl = np.where(d2d > d_bp, far, pl)
    pl_n = c[5] + c[6] * np.log10(d3d) + c[4] * lf - c[7] * (h_ut - 1.5)
    return np.where(nlos & (pl_n > pl), pl_n, pl)


def _evaluate_numpy(cx, cy, h_ut,
                    bs_x, bs_y, bs_eirp, bs_fc, bs_h, bs_nlos, bs_chan,
                    ris_x, ris_y, ris_h, ris_bs, ris_offset, ris_pl_br, ris_nlos,
                    coeffs, direct, via_ris, serving, signal, i_tn, i_ris):
    n_cells = cx.shape[0]
    n_bs = bs_x.shape[0]
    d = np.sqrt((cx[:, None] - bs_x[None, :]) ** 2 + (cy[:, None] - bs_y[None, :]) ** 2)
    direct[:] = bs_eirp - _uma_matrix(d, bs_fc, bs_h, h_ut, bs_nlos, coeffs)
    per_bs = 10.0 ** (direct / 10.0)
    if ris_x.shape[0]:
        d = np.sqrt((cx[:, None] - ris_x[None, :]) ** 2 + (cy[:, None] - ris_y[None, :]) ** 2)
        pl = ris_pl_br + _uma_matrix(d, bs_fc[ris_bs], ris_h, h_ut, ris_nlos, coeffs)
        via_ris[:] = bs_eirp[ris_bs] + ris_offset - pl
        # accumulate in RIS index order, same as the loop backend
        ris_lin = 10.0 ** (via_ris / 10.0)
        for r in range(ris_x.shape[0]):
            per_bs[:, ris_bs[r]] += ris_lin[:, r]
    else:
        ris_lin = np.zeros((n_cells, 0))
    best = np.argmax(per_bs, axis=1)
    serving[:] = best
    signal[:] = per_bs[np.arange(n_cells), best]
    chan_best = bs_chan[best]
    co = (bs_chan[None, :] == chan_best[:, None]) & (np.arange(n_bs)[None, :] != best[:, None])
    i_tn[:] = np.where(co, 10.0 ** (direct / 10.0), 0.0).sum(axis=1)
    if ris_x.shape[0]:
        co_r = co[:, ris_bs]
        i_ris[:] = np.where(co_r, ris_lin, 0.0).sum(axis=1)
    else:
        i_ris[:] = 0.0


def _point_in_polygon_numpy(px, py, vx, vy, out):
    inside = np.zeros(px.shape[0], dtype=bool)
    vxj = np.roll(vx, 1)
    vyj = np.roll(vy, 1)
    for xi, yi, xj, yj in zip(vx, vy, vxj, vyj):
        crosses = (yi > py) != (yj > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = xi + (py - yi) * (xj - xi) / (yj - yi)
        inside ^= crosses & (px < xc)
    out[:] = inside


def evaluate_cells(*args, backend: str | None = None):
    backend = backend or default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        _evaluate_jit(*args)
    elif backend == "numpy":
        _evaluate_numpy(*args)
    elif backend == "python":
        _evaluate_loop(*args)
    else:
        raise ValueError(f"unknown backend {backend!r}")


def points_in_polygon(px, py, vx, vy, backend: str | None = None) -> np.ndarray:
    backend = backend or default_backend()
    out = np.zeros(px.shape[0], dtype=np.bool_)
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        _point_in_polygon_jit(px, py, vx, vy, out)
    elif backend == "numpy":
        _point_in_polygon_numpy(px, py, vx, vy, out)
    else:
        _point_in_polygon_loop(px, py, vx, vy, out)
    return out
