"""Grid-sampled functions of one variable with an optional tail model."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, MissingTailError, PreconditionError

__all__ = ["TailModel", "SampledCurve", "fit_tail"]

_COORDS = ("log", "log1p", "linear")


@dataclass(frozen=True)
class TailModel:
    """(1+x)^{-power} e^{-rate x} sum_k coefs[k] l^{-orders[k]}, l = ln(1+x).

    With ``orders == (0,)`` this is the plain envelope c (1+x)^{-p} e^{-r x}.
    The log series carries the slowly varying factors of the G curve.
    """

    coefs: tuple = (0.0,)
    power: float = 0.0
    rate: float = 0.0
    orders: tuple = (0,)

    def __post_init__(self):
        if len(self.coefs) != len(self.orders):
            raise PreconditionError("tail model needs one coefficient per log order")
        if not self.rate >= 0 or not np.isfinite(self.power):
            raise PreconditionError("tail model needs rate >= 0 and a finite power")

    def _series(self, x, deriv=False):
        ell = np.log1p(x)
        s = np.zeros_like(ell)
        ds = np.zeros_like(ell)
        for c, k in zip(self.coefs, self.orders):
            s = s + c * ell ** (-float(k))
            if k:
                ds = ds - k * c * ell ** (-float(k) - 1) / (1 + x)
        return (s, ds) if deriv else s

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (1 + x) ** (-self.power) * np.exp(-self.rate * x) * self._series(x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        s, ds = self._series(x, deriv=True)
        env = (1 + x) ** (-self.power) * np.exp(-self.rate * x)
        return env * (ds - (self.power / (1 + x) + self.rate) * s)

    @property
    def is_zero(self):
        return not any(self.coefs)


def _to_coord(x, coord):
    if coord == "log":
        return np.log(x)
    if coord == "log1p":
        return np.log1p(x)
    return np.asarray(x, dtype=float)


def _dcoord(x, coord):
    # d(coordinate)/dx
    if coord == "log":
        return 1.0 / x
    if coord == "log1p":
        return 1.0 / (1.0 + x)
    return np.ones_like(x)


@dataclass(frozen=True)
class SampledCurve:
    """Immutable cubic-spline interpolant of samples (x_i, v_i).

    The spline runs in the coordinate u = ln x, ln(1+x) or x. With
    ``scale != 0`` it interpolates v e^{scale u} and divides the factor out
    again, which keeps functions with a known power-law trend accurate on
    coarse grids. Samples are reproduced exactly either way.
    """

    x: np.ndarray
    values: np.ndarray
    coord: str = "log"
    tail: TailModel | None = None
    scale: float = 0.0
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        v = np.array(self.values, dtype=float)
        if self.coord not in _COORDS:
            raise PreconditionError(f"unknown coordinate {self.coord!r}")
        if x.ndim != 1 or x.shape != v.shape or x.size < 4:
            raise PreconditionError("need at least 4 samples of matching shape")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            raise PreconditionError("samples must be finite")
        if np.any(np.diff(x) <= 0):
            raise PreconditionError("abscissae must be strictly increasing")
        if self.coord == "log" and x[0] <= 0:
            raise PreconditionError("log coordinate needs positive abscissae")
        if self.coord == "log1p" and x[0] < 0:
            raise PreconditionError("log1p coordinate needs non-negative abscissae")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        u = _to_coord(x, self.coord)
        object.__setattr__(self, "_spline", CubicSpline(u, v * np.exp(self.scale * u)))

    # ------------------------------------------------------------ evaluation

    @property
    def domain(self):
        return (float(self.x[0]), np.inf if self.tail is not None else float(self.x[-1]))

    @property
    def support(self):
        return float(self.x[0]), float(self.x[-1])

    def _check(self, x):
        if np.any(x < self.x[0] * (1 - 1e-14)):
            raise DomainError(f"evaluation below the first abscissa {self.x[0]:.6g}")
        if self.tail is None and np.any(x > self.x[-1] * (1 + 1e-14)):
            raise MissingTailError("curve has no tail model beyond its last abscissa")

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        self._check(xa)
        inside = xa <= self.x[-1]
        out = np.empty(xa.shape)
        if np.any(inside):
            u = _to_coord(xa[inside], self.coord)
            out[inside] = self._spline(u) * np.exp(-self.scale * u)
        if np.any(~inside):
            out[~inside] = self.tail(xa[~inside])
        return out.item() if out.ndim == 0 else out

    def derivative(self, x):
        """Derivative of the interpolant (exact for the spline, analytic for the tail)."""
        xa = np.asarray(x, dtype=float)
        self._check(xa)
        inside = xa <= self.x[-1]
        out = np.empty(xa.shape)
        if np.any(inside):
            xi = xa[inside]
            u = _to_coord(xi, self.coord)
            e = np.exp(-self.scale * u)
            du = self._spline(u, 1) * e - self.scale * self._spline(u) * e
            out[inside] = du * _dcoord(xi, self.coord)
        if np.any(~inside):
            out[~inside] = self.tail.derivative(xa[~inside])
        return out.item() if out.ndim == 0 else out

    def coord_derivatives(self, u0: float):
        """(P, dP/du, d2P/du2) at coordinate value u0, for P the represented function."""
        if self.scale:
            raise PreconditionError("coordinate derivatives need scale == 0")
        return float(self._spline(u0)), float(self._spline(u0, 1)), float(self._spline(u0, 2))

    # ------------------------------------------------------------ construction

    def with_tail(self, tail: TailModel | None) -> "SampledCurve":
        return SampledCurve(self.x, self.values, self.coord, tail, self.scale)

    def scaled(self, alpha: float) -> "SampledCurve":
        tail = None
        if self.tail is not None:
            t = self.tail
            tail = TailModel(tuple(alpha * c for c in t.coefs), t.power, t.rate, t.orders)
        return SampledCurve(self.x, alpha * self.values, self.coord, tail, self.scale)

    @classmethod
    def from_function(cls, func, x, coord="log", tail=None, scale=0.0):
        x = np.asarray(x, dtype=float)
        return cls(x, np.asarray(func(x), dtype=float), coord, tail, scale)

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("x,value\n")
            for a, b in zip(self.x, self.values):
                fh.write(f"{a:.17g},{b:.17g}\n")

    @classmethod
    def from_csv(cls, path, coord="log", tail_rate=None):
        """Read an ``x,value`` table and fit its tail (see ``fit_tail``)."""
        path = Path(path)
        if not path.is_file():
            raise PreconditionError(f"samples file {path} not found")
        xs, vs = [], []
        with path.open(newline="") as fh:
            rows = csv.reader(fh)
            header = next(rows, None)
            if header is None or [h.strip() for h in header] != ["x", "value"]:
                raise PreconditionError(f"{path}: expected header 'x,value'")
            for i, row in enumerate(rows, start=2):
                if not row:
                    continue
                try:
                    a, b = (float(r) for r in row)
                except ValueError:
                    raise PreconditionError(f"{path}:{i}: malformed row {row!r}") from None
                xs.append(a)
                vs.append(b)
        curve = cls(np.array(xs), np.array(vs), coord)
        return curve.with_tail(fit_tail(curve, rate=tail_rate))


def fit_tail(curve: SampledCurve, rate: float | None = None, *, power: float | None = None,
             orders=None, window: float = 10.0, min_rows: int = 10) -> TailModel:
    """Fit a tail model to the last decade of samples (at least ``min_rows`` rows).

    Default: least squares for ln|v| = ln c - p ln(1+x) - r x (``rate`` fixed
    when given). With ``power`` and ``orders`` given the log-series
    coefficients are fitted linearly instead. The model is then pinned so it
    matches the last sample exactly.
    """
    x, v = curve.x, curve.values
    sel = x >= x[-1] / window
    if sel.sum() < min_rows:
        sel = np.zeros(x.size, dtype=bool)
        sel[-min(min_rows, x.size):] = True
    xs, vs = x[sel], v[sel]
    if np.all(vs == 0):
        return TailModel((0.0,), 1.0, 0.0)
    if orders is not None:
        p = 0.0 if power is None else float(power)
        r = 0.0 if rate is None else float(rate)
        keep = xs > 0
        xs, vs = xs[keep], vs[keep]
        ell = np.log1p(xs)
        A = np.stack([ell ** (-float(k)) for k in orders], axis=1)
        y = vs * (1 + xs) ** p * np.exp(r * xs)
        coefs = np.linalg.lstsq(A, y, rcond=None)[0]
        model = TailModel(tuple(float(c) for c in coefs), p, r, tuple(orders))
    else:
        sign = np.sign(vs[-1]) or 1.0
        ok = vs * sign > 0
        if ok.sum() < 3:
            raise PreconditionError("tail fit needs samples of constant sign")
        xs, ys = xs[ok], np.log(vs[ok] * sign)
        cols = [np.ones_like(xs), -np.log1p(xs)]
        if rate is None:
            cols.append(-xs)
        else:
            ys = ys + rate * xs
        sol = np.linalg.lstsq(np.stack(cols, axis=1), ys, rcond=None)[0]
        p = float(sol[1])
        r = float(sol[2]) if rate is None else float(rate)
        if r < 0:
            r = 0.0
            sol = np.linalg.lstsq(np.stack(cols[:2], axis=1), np.log(vs[ok] * sign), rcond=None)[0]
            p = float(sol[1])
        if r == 0 and p <= 0:
            raise PreconditionError("samples do not decay; cannot fit a tail")
        model = TailModel((sign * float(np.exp(sol[0])),), p, r)
    # pin to the last sample
    last = float(model(np.array([x[-1]]))[0])
    if last != 0 and np.isfinite(last):
        f = float(v[-1]) / last
        model = TailModel(tuple(f * c for c in model.coefs), model.power, model.rate, model.orders)
    return model
