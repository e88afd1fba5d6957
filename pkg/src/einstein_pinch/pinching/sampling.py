"""Search regions of the pinching lemmas and samplers over them.

A region fixes an interval of ``m = K12`` and, for each m, an interval of
``k13``; then ``k14 = 1 - m - k13``. The remaining Berger scalars are sampled
in the coordinates ``u = x - y``, ``v = x + 2y`` where the feasibility
polytope is exactly the box ``|u| <= k13 - m``, ``|v| <= k14 - k13``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from einstein_pinch.curvature.berger_frame import BergerData
from einstein_pinch.errors import EmptyRegionError, PreconditionError

from .pinch_lab import EPS0, M1, is_case1, k_s

LOGGER = logging.getLogger("einstein-pinch")

REGION_TOL = 1e-9
_GRID_POINTS = 4097
_MAX_REJECTION_ROUNDS = 200


@dataclass(frozen=True)
class BergerBatch:
    """Column arrays of Berger scalars."""

    m: np.ndarray
    k13: np.ndarray
    k14: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return int(self.m.shape[0])

    def row(self, index: int) -> BergerData:
        return BergerData(
            m=float(self.m[index]),
            k13=float(self.k13[index]),
            k14=float(self.k14[index]),
            x=float(self.x[index]),
            y=float(self.y[index]),
        )

    def take(self, indices: np.ndarray) -> BergerBatch:
        return BergerBatch(self.m[indices], self.k13[indices], self.k14[indices], self.x[indices], self.y[indices])

    @classmethod
    def concatenate(cls, batches: list[BergerBatch]) -> BergerBatch:
        return cls(*(np.concatenate([getattr(b, name) for b in batches]) for name in ("m", "k13", "k14", "x", "y")))


def uv_to_xy(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (2.0 * u + v) / 3.0, (v - u) / 3.0


def xy_to_uv(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return x - y, x + 2.0 * y


def _interval_from_linear(constraints: list[tuple[float, float]], low: float, high: float) -> tuple[float, float]:
    """Intersect [low, high] with every half-line ``alpha * m <= beta``."""
    for alpha, beta in constraints:
        if abs(alpha) < 1e-15:
            if beta < 0:
                return 1.0, 0.0
            continue
        if alpha > 0:
            high = min(high, beta / alpha)
        else:
            low = max(low, beta / alpha)
    return low, high


class SearchRegion:
    """Base for lemma regions; subclasses supply the m interval and k13 bounds."""

    lemma: Literal["L22", "L41"]
    eps: float
    m_low: float
    m_high: float

    def k13_bounds(self, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def hypothesis_slacks(self, d: BergerData) -> dict[str, float]:
        raise NotImplementedError

    def describe(self) -> dict[str, float | str | None]:
        raise NotImplementedError

    # ------------------------------------------------------------------

    def _require_nonempty(self) -> None:
        if self.m_low > self.m_high + REGION_TOL:
            raise EmptyRegionError(
                f"{self.lemma} search region is empty (m range [{self.m_low:.6g}, {self.m_high:.6g}])",
                constraint="region_nonempty",
            )

    def k13_box(self) -> tuple[float, float]:
        grid = np.linspace(self.m_low, self.m_high, _GRID_POINTS)
        low, high = self.k13_bounds(grid)
        valid = low <= high
        if not np.any(valid):
            raise EmptyRegionError(f"{self.lemma} search region has no admissible K13", constraint="region_nonempty")
        # convex lower and concave upper envelopes; pad by one grid step of slope
        pad = (self.m_high - self.m_low) / (_GRID_POINTS - 1) * 2.0 * (1.0 + self.slope_bound())
        return float(np.min(low[valid]) - pad), float(np.max(high[valid]) + pad)

    def slope_bound(self) -> float:
        return 1.0

    def contains(self, d: BergerData, tol: float = REGION_TOL) -> bool:
        if not d.is_feasible(tol):
            return False
        return all(slack >= -tol for slack in self.hypothesis_slacks(d).values())

    def sample_mk(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Uniform (m, k13) on the region by rejection from its bounding box."""
        box_low, box_high = self.k13_box()
        m_parts: list[np.ndarray] = []
        k_parts: list[np.ndarray] = []
        collected = 0
        for _ in range(_MAX_REJECTION_ROUNDS):
            draw = max(2 * (n - collected), 64)
            m = rng.uniform(self.m_low, self.m_high, draw)
            k13 = rng.uniform(box_low, box_high, draw)
            low, high = self.k13_bounds(m)
            keep = (k13 >= low) & (k13 <= high)
            m_parts.append(m[keep])
            k_parts.append(k13[keep])
            collected += int(np.count_nonzero(keep))
            if collected >= n:
                break
        if collected < n:
            raise EmptyRegionError(
                f"{self.lemma} region rejection sampler accepted {collected} of {n} points",
                constraint="region_nonempty",
            )
        return np.concatenate(m_parts)[:n], np.concatenate(k_parts)[:n]

    def sample(self, rng: np.random.Generator, n: int) -> BergerBatch:
        m, k13 = self.sample_mk(rng, n)
        k14 = 1.0 - m - k13
        gap_low = k13 - m
        gap_high = k14 - k13
        u = rng.uniform(-1.0, 1.0, n) * gap_low
        v = rng.uniform(-1.0, 1.0, n) * gap_high
        x, y = uv_to_xy(u, v)
        return BergerBatch(m, k13, k14, x, y)

    # Unit-cube chart used by the simplex refinement.

    def from_unit(self, t: np.ndarray) -> BergerData:
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        m = self.m_low + t[0] * (self.m_high - self.m_low)
        low, high = self.k13_bounds(np.array([m]))
        low_value, high_value = float(low[0]), float(high[0])
        if high_value < low_value:
            high_value = low_value
        k13 = low_value + t[1] * (high_value - low_value)
        k14 = 1.0 - m - k13
        u = (2.0 * t[2] - 1.0) * (k13 - m)
        v = (2.0 * t[3] - 1.0) * (k14 - k13)
        x, y = uv_to_xy(np.array(u), np.array(v))
        return BergerData(m=float(m), k13=float(k13), k14=float(k14), x=float(x), y=float(y))

    def to_unit(self, d: BergerData) -> np.ndarray:
        def ratio(value: float, low: float, high: float) -> float:
            width = high - low
            return 0.5 if width <= 0 else float(np.clip((value - low) / width, 0.0, 1.0))

        low, high = self.k13_bounds(np.array([d.m]))
        u, v = xy_to_uv(np.array(d.x), np.array(d.y))
        return np.array(
            [
                ratio(d.m, self.m_low, self.m_high),
                ratio(d.k13, float(low[0]), float(high[0])),
                ratio(float(u), -(d.k13 - d.m), d.k13 - d.m),
                ratio(float(v), -(d.k14 - d.k13), d.k14 - d.k13),
            ]
        )


class Lemma22Region(SearchRegion):
    """{feasible d : K14 <= upper_bound, K12 <= -eps}."""

    lemma = "L22"

    def __init__(self, eps: float, *, upper_bound: float = M1) -> None:
        if not 0.0 < eps < 1.0 / 3.0:
            raise PreconditionError(f"eps must lie in (0, 1/3), got {eps}", constraint="eps_range")
        self.eps = eps
        self.upper_bound = upper_bound
        # k13 <= (1 - m)/2, k13 >= 1 - m - upper_bound, k13 >= m
        self.m_low, self.m_high = _interval_from_linear(
            [(-1.0, 2.0 * upper_bound - 1.0), (3.0, 1.0)],
            1.0 - 2.0 * upper_bound,
            -eps,
        )
        self._require_nonempty()

    def k13_bounds(self, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        low = np.maximum(m, 1.0 - m - self.upper_bound)
        high = (1.0 - m) / 2.0
        return low, high

    def hypothesis_slacks(self, d: BergerData) -> dict[str, float]:
        return {"k14_upper_bound": self.upper_bound - d.k14, "m_upper_bound": -self.eps - d.m}

    def describe(self) -> dict[str, float | str | None]:
        return {
            "lemma": self.lemma,
            "eps": self.eps,
            "s": None,
            "upper_bound": self.upper_bound,
            "m_low": self.m_low,
            "m_high": self.m_high,
        }


class Lemma41Region(SearchRegion):
    """{feasible d : 0 <= K12 <= eps0 - eps, K13 + s K12 >= K_s, K13 + s K12 <= 1 + eps0 s}."""

    lemma = "L41"

    def __init__(self, s: float, eps: float) -> None:
        if s < 0:
            raise PreconditionError(f"s must be non-negative, got {s}", constraint="s_nonnegative")
        if not 0.0 < eps <= EPS0:
            raise PreconditionError(f"eps must lie in (0, eps0 = {EPS0:.6f}], got {eps}", constraint="eps_range")
        self.s = s
        self.eps = eps
        self.k_s = k_s(s)
        z_cap = 1.0 + EPS0 * s
        # every lower bound of k13 below every upper bound, written as alpha * m <= beta
        self.m_low, self.m_high = _interval_from_linear(
            [
                (3.0, 1.0),
                (1.0 + s, z_cap),
                (0.5 - s, 0.5 - self.k_s),
            ],
            0.0,
            EPS0 - eps,
        )
        self._require_nonempty()

    def slope_bound(self) -> float:
        return max(1.0, self.s)

    def k13_bounds(self, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        low = np.maximum(m, self.k_s - self.s * m)
        high = np.minimum((1.0 - m) / 2.0, 1.0 + EPS0 * self.s - self.s * m)
        return low, high

    def hypothesis_slacks(self, d: BergerData) -> dict[str, float]:
        z = d.k13 + self.s * d.m
        return {
            "m_nonnegative": d.m,
            "m_upper_bound": EPS0 - self.eps - d.m,
            "k13_plus_s_m_lower_bound": z - self.k_s,
            "k13_plus_s_m_upper_bound": 1.0 + EPS0 * self.s - z,
        }

    def describe(self) -> dict[str, float | str | None]:
        return {
            "lemma": self.lemma,
            "eps": self.eps,
            "s": self.s,
            "upper_bound": None,
            "m_low": self.m_low,
            "m_high": self.m_high,
        }


# ------------------------------------------------------------------
# Second-alternative samplers
# ------------------------------------------------------------------

_SUBREGION_GRID = 513


def _case2_mask(m: np.ndarray, k13: np.ndarray, *, case3_only: bool) -> np.ndarray:
    """(m, k13) admitting a2 < 0 or c2 < 0; with ``case3_only`` also the Case-3 split."""
    k14 = 1.0 - m - k13
    width = k14 - 3.0 * k13 - m
    keep = width > 0
    if case3_only:
        keep &= ((k14 - k13) > 3.5 * (k13 - m)) & (width > -m)
    return keep


def _case2_box(region: SearchRegion, *, case3_only: bool) -> tuple[float, float, float, float]:
    """Grid bounding box (m_low, m_high, k13_low, k13_high) of the second-alternative part."""
    box_low, box_high = region.k13_box()
    m_grid = np.linspace(region.m_low, region.m_high, _SUBREGION_GRID)
    k_grid = np.linspace(box_low, box_high, _SUBREGION_GRID)
    m, k13 = np.meshgrid(m_grid, k_grid, indexing="ij")
    low, high = region.k13_bounds(m)
    inside = (k13 >= low) & (k13 <= high) & _case2_mask(m, k13, case3_only=case3_only)
    if not np.any(inside):
        raise EmptyRegionError(
            f"{region.lemma} region has no {'Case-3' if case3_only else 'second-alternative'} points",
            constraint="case2_nonempty",
        )
    dm = 2.0 * (m_grid[-1] - m_grid[0]) / (_SUBREGION_GRID - 1)
    dk = 2.0 * (k_grid[-1] - k_grid[0]) / (_SUBREGION_GRID - 1)
    return (
        max(region.m_low, float(m[inside].min()) - dm),
        min(region.m_high, float(m[inside].max()) + dm),
        float(k13[inside].min()) - dk,
        float(k13[inside].max()) + dk,
    )


def sample_case2(
    region: SearchRegion,
    rng: np.random.Generator,
    n: int,
    *,
    case3_only: bool = False,
) -> BergerBatch:
    """Sample feasible region points with a2 < 0 or c2 < 0.

    With orientation sigma = +1 (a2 < 0): y = k13 + eta, x = m + xi where
    0 < eta <= xi <= eta + 2(k13 - m) and xi + 2 eta <= k14 - 3 k13 - m;
    sigma = -1 mirrors to c2 < 0. ``case3_only`` keeps the Lemma 2.2
    sub-case k14 - k13 > 3.5 (k13 - m) with oriented x > 0.
    """
    m_low, m_high, k_low, k_high = _case2_box(region, case3_only=case3_only)
    parts: list[BergerBatch] = []
    collected = 0
    for _ in range(_MAX_REJECTION_ROUNDS):
        draw = max(4 * (n - collected), 256)
        m = rng.uniform(m_low, m_high, draw)
        k13 = rng.uniform(k_low, k_high, draw)
        low, high = region.k13_bounds(m)
        keep = (k13 >= low) & (k13 <= high) & _case2_mask(m, k13, case3_only=case3_only)
        m, k13 = m[keep], k13[keep]
        if m.size == 0:
            continue
        k14 = 1.0 - m - k13
        width = k14 - 3.0 * k13 - m
        xi = rng.uniform(0.0, 1.0, m.size) * width
        eta = rng.uniform(0.0, 1.0, m.size) * width / 3.0
        accept = (eta > 0) & (xi >= eta) & (xi - eta <= 2.0 * (k13 - m)) & (xi + 2.0 * eta <= width)
        if case3_only:
            accept &= xi > -m
        sigma = np.where(rng.uniform(size=m.size) < 0.5, 1.0, -1.0)
        x = sigma * (m + xi)
        y = sigma * (k13 + eta)
        batch = BergerBatch(m, k13, k14, x, y).take(np.flatnonzero(accept))
        batch = batch.take(np.flatnonzero(~is_case1(batch.k13, batch.y)))
        parts.append(batch)
        collected += len(batch)
        if collected >= n:
            break
    if collected < n:
        raise EmptyRegionError(
            f"second-alternative sampler for {region.lemma} accepted {collected} of {n} points",
            constraint="case2_nonempty",
        )
    merged = BergerBatch.concatenate(parts)
    return merged.take(np.arange(n))
