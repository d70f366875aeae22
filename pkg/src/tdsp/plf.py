"""Piecewise linear travel-cost functions.

A :class:`PLF` is a list of ``(t, c)`` breakpoints: cost ``c`` (seconds) of
departing at time ``t``.  Between breakpoints the cost is interpolated
linearly; outside the first/last breakpoint it is clamped.  Functions may carry
per-segment provenance: the id of the intermediate vertex that realises the
segment (``DIRECT`` for an original edge).

All functions here are pure; PLF objects are immutable.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BreakpointBudgetExceeded, FIFOViolation

DIRECT = 0
DAY = (0.0, 86400.0)
FIFO_TOL = 1e-9


@dataclass
class KernelConfig:
    eps: float = 1e-9
    max_breakpoints: int = 4096


config = KernelConfig()


class PLF:
    """Immutable piecewise linear function with optional segment provenance."""

    __slots__ = ("t", "c", "via", "_tl", "_cl")

    def __init__(self, t: Iterable[float], c: Iterable[float],
                 via: Iterable[int] | None = None, *, check_fifo: bool = False):
        t = np.array(t, dtype=float).reshape(-1)
        c = np.array(c, dtype=float).reshape(-1)
        if t.size == 0:
            raise ValueError("a PLF needs at least one breakpoint")
        if t.shape != c.shape:
            raise ValueError("time and cost arrays differ in length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("breakpoint times must be strictly increasing")
        if np.any(c < 0) or np.any(np.isnan(c)):
            raise ValueError("costs must be non-negative")
        if via is not None:
            via = np.array(via, dtype=np.int64).reshape(-1)
            if via.size != max(1, t.size - 1):
                raise ValueError("provenance needs one entry per segment")
        _init(self, t, c, via)
        if check_fifo and not self.is_fifo():
            raise FIFOViolation(f"slope below -1 in {self!r}")

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: float, via: int | None = None) -> "PLF":
        return _make(np.array([DAY[0]]), np.array([float(value)]),
                     None if via is None else np.array([via], dtype=np.int64))

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float]],
                    via: Iterable[int] | None = None) -> "PLF":
        ts, cs = zip(*points)
        return cls(ts, cs, via)

    def with_via(self, via: int) -> "PLF":
        """Same function with every segment attributed to ``via``."""
        return _make(self.t, self.c, np.full(max(1, self.t.size - 1), via, dtype=np.int64))

    # inspection -----------------------------------------------------------

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.c.tolist()))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.c[0])

    def __len__(self) -> int:
        return int(self.t.size)

    def __repr__(self) -> str:
        pts = ", ".join(f"({t:g}, {c:g})" for t, c in self.points[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"PLF([{pts}{more}])"

    def same_as(self, other: "PLF | None") -> bool:
        if other is None:
            return False
        if not (np.array_equal(self.t, other.t) and np.array_equal(self.c, other.c)):
            return False
        if self.via is None or other.via is None:
            return self.via is None and other.via is None
        return np.array_equal(self.via, other.via)

    def min_value(self) -> float:
        return float(self.c.min())

    def max_value(self) -> float:
        return float(self.c.max())

    def slopes(self) -> np.ndarray:
        return np.diff(self.c) / np.diff(self.t)

    def is_fifo(self, tol: float = FIFO_TOL) -> bool:
        return self.t.size < 2 or bool(np.all(self.slopes() >= -1.0 - tol))

    # evaluation -----------------------------------------------------------

    def __call__(self, x: float) -> float:
        tl = self._tl
        if tl is None:
            tl = self._tl = self.t.tolist()
            self._cl = self.c.tolist()
        cl = self._cl
        i = bisect_right(tl, x)
        if i == 0:
            return cl[0]
        if i == len(tl):
            return cl[-1]
        t0 = tl[i - 1]
        c0 = cl[i - 1]
        return c0 + (x - t0) * (cl[i] - c0) / (tl[i] - t0)

    def evaluate(self, xs) -> np.ndarray:
        return np.interp(np.asarray(xs, dtype=float), self.t, self.c)

    def via_at(self, x: float) -> int:
        """Provenance of the segment used at departure time ``x``."""
        if self.via is None:
            return DIRECT
        n = self.t.size
        if n == 1:
            return int(self.via[0])
        if self._tl is None:
            self(x)
        i = bisect_left(self._tl, x) - 1
        return int(self.via[min(max(i, 0), n - 2)])


def _init(obj: PLF, t: np.ndarray, c: np.ndarray, via: np.ndarray | None) -> None:
    t.flags.writeable = False
    c.flags.writeable = False
    if via is not None:
        via.flags.writeable = False
    obj.t = t
    obj.c = c
    obj.via = via
    obj._tl = None
    obj._cl = None


def _make(t: np.ndarray, c: np.ndarray, via: np.ndarray | None = None) -> PLF:
    obj = PLF.__new__(PLF)
    _init(obj, t, c, via)
    return obj


ZERO = PLF.constant(0.0)
INFINITY = PLF.constant(math.inf)


def eval_plf(f: PLF, t: float) -> float:
    return f(t)


def size(f: PLF) -> int:
    return len(f)


def _segment_via(f: PLF, xs: np.ndarray, override: int | None) -> np.ndarray:
    if override is not None:
        return np.full(xs.size, override, dtype=np.int64)
    if f.via is None:
        return np.full(xs.size, DIRECT, dtype=np.int64)
    if f.t.size == 1:
        return np.full(xs.size, f.via[0], dtype=np.int64)
    idx = np.searchsorted(f.t, xs, side="left") - 1
    np.clip(idx, 0, f.t.size - 2, out=idx)
    return f.via[idx]


def _check_cap(f: PLF, cap: int | None) -> PLF:
    cap = config.max_breakpoints if cap is None else cap
    if f.t.size > cap:
        raise BreakpointBudgetExceeded(f"{f.t.size} breakpoints exceed the cap of {cap}")
    return f


def compound(f: PLF, g: PLF, via: int | None = None, lo: float | None = DAY[0],
             eps: float | None = None, cap: int | None = None) -> PLF:
    """Cost of traversing ``f`` then ``g``: ``f(t) + g(t + f(t))``.

    Breakpoints earlier than ``lo`` (the start of the time domain) are folded
    into a single breakpoint at ``lo``; the result is exact for every
    ``t >= lo``.  Pass ``lo=None`` to keep the exact extension over all reals.
    """
    if f.is_infinite or g.is_infinite:
        return INFINITY
    tf, cf, tg, cg = f.t, f.c, g.t, g.c
    arrival = tf + cf
    # Preimages of g's breakpoints under the (non-decreasing) arrival map.
    pre = np.empty(tg.size)
    left = tg <= arrival[0]
    right = tg >= arrival[-1]
    pre[left] = tg[left] - cf[0]
    pre[right] = tg[right] - cf[-1]
    mid = ~(left | right)
    if mid.any():
        tau = tg[mid]
        k = np.searchsorted(arrival, tau, side="right") - 1
        a0 = arrival[k]
        pre[mid] = tf[k] + (tau - a0) * (tf[k + 1] - tf[k]) / (arrival[k + 1] - a0)
    ts = np.union1d(tf, pre)
    if lo is not None and ts[0] < lo:
        ts = np.concatenate(([lo], ts[ts > lo]))
    fv = np.interp(ts, tf, cf)
    cs = fv + np.interp(ts + fv, tg, cg)
    np.maximum(cs, 0.0, out=cs)
    v = None if via is None else np.full(max(1, ts.size - 1), via, dtype=np.int64)
    return _check_cap(simplify(_make(ts, cs, v), eps), cap)


def min_plf(f: PLF | None, g: PLF | None, via_f: int | None = None,
            via_g: int | None = None, eps: float | None = None,
            cap: int | None = None) -> PLF | None:
    """Pointwise minimum, recording which argument wins on each segment.

    ``via_f``/``via_g`` override the provenance of the respective argument;
    when omitted an argument keeps its own provenance (``DIRECT`` if it has
    none).  Equal segments are attributed to the smaller vertex id.
    """
    if f is None or f.is_infinite:
        if g is None:
            return f
        return g.with_via(via_g) if via_g is not None else g
    if g is None or g.is_infinite:
        return f.with_via(via_f) if via_f is not None else f
    ts = np.union1d(f.t, g.t)
    fv = np.interp(ts, f.t, f.c)
    gv = np.interp(ts, g.t, g.c)
    diff = fv - gv
    scale = np.maximum(1.0, np.maximum(np.abs(fv), np.abs(gv)))
    sign = np.where(np.abs(diff) <= 1e-12 * scale, 0.0, np.sign(diff))
    cross = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if cross.size:
        t0 = ts[cross]
        x = t0 + (ts[cross + 1] - t0) * diff[cross] / (diff[cross] - diff[cross + 1])
        ts = np.union1d(ts, x)
        fv = np.interp(ts, f.t, f.c)
        gv = np.interp(ts, g.t, g.c)
    cs = np.minimum(fv, gv)
    if ts.size == 1:
        mids = ts
        fm, gm = fv, gv
    else:
        mids = 0.5 * (ts[:-1] + ts[1:])
        fm = np.interp(mids, f.t, f.c)
        gm = np.interp(mids, g.t, g.c)
    vf = _segment_via(f, mids, via_f)
    vg = _segment_via(g, mids, via_g)
    tie = np.abs(fm - gm) <= 1e-12 * np.maximum(1.0, np.abs(fm))
    use_f = np.where(tie, vf <= vg, fm < gm)
    via = np.where(use_f, vf, vg)
    return _check_cap(simplify(_make(ts, cs, via), eps), cap)


def simplify(f: PLF, eps: float | None = None) -> PLF:
    """Drop breakpoints that are redundant within ``eps``.

    Interior points collinear (within ``eps``) with the surviving chord are
    removed when the merged segments share provenance; a function that is flat
    everywhere collapses to a single breakpoint.  Maximum pointwise deviation
    is ``eps``.
    """
    eps = config.eps if eps is None else eps
    t, c, via = f.t, f.c, f.via
    k = t.size
    if k < 2:
        return f
    same_via = via is None or bool(np.all(via == via[0]))
    if same_via and c.max() - c.min() <= eps:
        return _make(t[:1], c[:1], None if via is None else via[:1])
    if k == 2:
        return f
    chord = c[:-2] + (t[1:-1] - t[:-2]) * (c[2:] - c[:-2]) / (t[2:] - t[:-2])
    interior = np.abs(c[1:-1] - chord) <= eps
    if via is not None:
        interior &= via[:-1] == via[1:]
    if not interior.any():
        return f

    tl, cl = t.tolist(), c.tolist()
    vl = via.tolist() if via is not None else None
    keep = [0]
    anchor = 0
    for i in range(1, k - 1):
        if vl is None or vl[i] == vl[anchor]:
            ta, ca = tl[anchor], cl[anchor]
            slope = (cl[i + 1] - ca) / (tl[i + 1] - ta)
            if all(abs(cl[p] - (ca + (tl[p] - ta) * slope)) <= eps
                   for p in range(anchor + 1, i + 1)):
                continue
        keep.append(i)
        anchor = i
    keep.append(k - 1)
    if len(keep) == k:
        return f
    idx = np.array(keep)
    new_via = None
    if vl is not None:
        new_via = np.array([vl[i] for i in keep[:-1]], dtype=np.int64)
    return _make(t[idx], c[idx], new_via)


def validate_fifo(f: PLF, tol: float = 0.0) -> None:
    if not f.is_fifo(tol):
        raise FIFOViolation(f"slope below -1 in {f!r}")
