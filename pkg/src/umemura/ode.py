"""Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import StepUnderflow

# Butcher tableau (FSAL)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Solution:
    t: np.ndarray        # accepted mesh, monotone in the direction of integration
    y: np.ndarray        # shape (len(t), dim)
    dy: np.ndarray       # f(t, y) at the mesh
    nfev: int

    def __call__(self, tq) -> np.ndarray:
        """Cubic Hermite interpolation between mesh points."""
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        ts = self.t if self.t[-1] >= self.t[0] else self.t[::-1]
        ys = self.y if self.t[-1] >= self.t[0] else self.y[::-1]
        ds = self.dy if self.t[-1] >= self.t[0] else self.dy[::-1]
        idx = np.clip(np.searchsorted(ts, tq) - 1, 0, len(ts) - 2)
        t0, t1 = ts[idx], ts[idx + 1]
        h = (t1 - t0)[:, None]
        s = ((tq - t0) / (t1 - t0))[:, None]
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * ys[idx] + h10 * h * ds[idx] + h01 * ys[idx + 1] + h11 * h * ds[idx + 1]


def dopri5(f: Callable[[float, np.ndarray], np.ndarray], t0: float, t1: float,
           y0: Sequence[float], rtol: float = 1e-10, atol: float = 1e-12,
           h0: float | None = None, max_steps: int = 200_000,
           t_eval: Sequence[float] | None = None) -> Solution:
    """Integrate y' = f(t, y) from t0 to t1 (either direction).

    Points in ``t_eval`` become mesh points, so the solution there carries no
    interpolation error.
    """
    y = np.asarray(y0, dtype=float).copy()
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    ts, ys, ds = [t0], [y.copy()], []
    k1 = np.asarray(f(t0, y), dtype=float)
    ds.append(k1)
    nfev = 1
    if span == 0:
        return Solution(np.array(ts), np.array(ys), np.array(ds), nfev)
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.linalg.norm(y / scale) / np.sqrt(y.size)
        d1 = np.linalg.norm(k1 / scale) / np.sqrt(y.size)
        h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h0 = min(h0, span)
    h = h0
    t = t0
    stops = sorted({float(x) for x in (() if t_eval is None else t_eval) if (x - t0) * direction > 0
                    and (t1 - x) * direction > 0}, reverse=direction < 0)
    stops.append(t1)
    target = 0
    k = [None] * 7
    for _ in range(max_steps):
        if abs(t1 - t) <= 1e-14 * max(1.0, abs(t1)):
            break
        while abs(stops[target] - t) <= 1e-14 * max(1.0, abs(t)):
            target += 1
        stop = stops[target]
        hs = direction * min(h, abs(stop - t))
        k[0] = k1
        for i in range(1, 7):
            yi = y + hs * sum(a * k[j] for j, a in enumerate(_A[i]) if a)
            k[i] = np.asarray(f(t + _C[i] * hs, yi), dtype=float)
        nfev += 6
        y_new = y + hs * sum(b * k[j] for j, b in enumerate(_B5) if b)
        err_vec = hs * sum(e * k[j] for j, e in enumerate(_E) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if err <= 1.0:
            t = t + hs if abs(stop - (t + hs)) > 1e-14 * max(1.0, abs(stop)) else stop
            y = y_new
            k1 = k[6]
            ts.append(t)
            ys.append(y.copy())
            ds.append(k1)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        if abs(hs) < h:
            # truncated to hit a stop: keep the natural step unless rejected
            h = h if err <= 1.0 else abs(hs) * fac
        else:
            h *= fac
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepUnderflow(f"step size underflow at t={t}")
    else:
        raise StepUnderflow(f"step budget exhausted at t={t}")
    return Solution(np.array(ts), np.array(ys), np.array(ds), nfev)
