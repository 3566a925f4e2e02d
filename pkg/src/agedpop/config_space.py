"""Marked configurations and the metrics that compare them.

A marked configuration is a finite multiset of particles (x, alpha): a
location in R^d and a nonnegative age.  Comparisons use sums of bounded
separating functions:

  * ground metric (ages ignored):   d(g, g') built from plateau functions v_s;
  * marked metric:                  kappa built from g_{s,k,n} = v_s * w_{k,n}.

Each component |sum_g f - sum_g' f| is a seminorm, so the weighted series
(and any truncation of it) satisfies the metric axioms exactly; truncation
only reduces separating power, and every truncated distance reports its tail
bound.

The plateau family v_s is enumerated deterministically from the habitat
window: scale j contributes one trapezoid profile per dyadic lattice cell and
per plateau height (1/2 then 3/4), with inner radius q = diameter * 2**-j and
support radius 2q.  Index s = 1 is the midpoint plateau at scale 1 with
height 1/2, whose support covers the whole window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .mark_space import DEFAULT_LADDER, u_basis

__all__ = [
    "MarkedParticle",
    "MarkedConfiguration",
    "BasisFunction",
    "v_enumerate",
    "basis_count_below_scale",
    "ground_distance",
    "ground_tail_bound",
    "kappa_component",
    "kappa_distance",
    "kappa_tail_bound",
    "window_truncation_error",
    "configuration_to_json",
    "configuration_from_json",
    "save_configuration",
    "load_configuration",
]


class MarkedParticle(NamedTuple):
    x: np.ndarray
    alpha: float


class MarkedConfiguration:
    """Immutable finite particle configuration with ages.

    positions has shape (n, dim), ages shape (n,).  Multiplicity counts:
    identical rows are distinct particles.  Positions are not required to lie
    in any particular window (the samplers enforce their own containment).
    """

    __slots__ = ("positions", "ages")

    def __init__(self, positions, ages):
        pos = np.atleast_2d(np.asarray(positions, dtype=float))
        age = np.atleast_1d(np.asarray(ages, dtype=float))
        if pos.shape[0] == 0:
            pos = pos.reshape(0, pos.shape[1] if pos.ndim == 2 and pos.shape[1] else 1)
        if pos.ndim != 2 or age.ndim != 1 or pos.shape[0] != age.shape[0]:
            raise ValueError("positions (n, d) and ages (n,) must align")
        if age.size and (not np.all(np.isfinite(age)) or age.min() < 0):
            raise ValueError("ages must be finite and nonnegative")
        if pos.size and not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        pos = pos.copy()
        age = age.copy()
        pos.flags.writeable = False
        age.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "ages", age)

    def __setattr__(self, *a):
        raise AttributeError("MarkedConfiguration is immutable")

    @classmethod
    def empty(cls, dim):
        return cls(np.empty((0, dim)), np.empty(0))

    @property
    def dim(self):
        return int(self.positions.shape[1])

    def __len__(self):
        return int(self.ages.size)

    def __iter__(self):
        for i in range(len(self)):
            yield MarkedParticle(self.positions[i], float(self.ages[i]))

    def __repr__(self):
        return f"MarkedConfiguration(n={len(self)}, dim={self.dim})"

    def union(self, other):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return MarkedConfiguration(
            np.vstack([self.positions, other.positions]),
            np.concatenate([self.ages, other.ages]),
        )

    def without_index(self, i):
        keep = np.ones(len(self), dtype=bool)
        keep[i] = False
        return MarkedConfiguration(self.positions[keep], self.ages[keep])

    def restrict(self, lower, upper):
        """Particles whose location lies in the box [lower, upper]."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        inside = np.all((self.positions >= lower) & (self.positions <= upper), axis=1)
        return MarkedConfiguration(self.positions[inside], self.ages[inside])

    def marks_at(self, x, tol=0.0):
        """Sorted ages of particles located at x (within tol per coordinate)."""
        x = np.asarray(x, dtype=float)
        hit = np.all(np.abs(self.positions - x) <= tol, axis=1)
        return np.sort(self.ages[hit])


@dataclass(frozen=True)
class BasisFunction:
    """Trapezoid plateau: height on ||x-c|| <= q, linear to 0 at ||x-c|| = 2q."""

    center: tuple
    inner_radius: float
    height: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x - np.asarray(self.center), axis=-1)
        q = self.inner_radius
        return self.height * np.clip(2.0 - r / q, 0.0, 1.0)

    @property
    def support_radius(self):
        return 2.0 * self.inner_radius


_HEIGHTS = (0.5, 0.75)


def basis_count_below_scale(j, dim):
    """Number of basis indices at scales < j: sum_{i<j} 2 * 2**(dim*(i-1))."""
    return sum(2 * (1 << (dim * (i - 1))) for i in range(1, j))


@lru_cache(maxsize=None)
def _v_enumerate_cached(s, lower, upper):
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    dim = lower.size
    diameter = float(np.linalg.norm(upper - lower))
    # locate the scale block: scale j holds 2 * 2**(dim*(j-1)) functions,
    # ordered (cell row-major) x (height 1/2 then 3/4)
    remaining = s - 1
    j = 1
    while True:
        block = 2 * (1 << (dim * (j - 1)))
        if remaining < block:
            break
        remaining -= block
        j += 1
    cell_index = remaining // 2
    height = _HEIGHTS[remaining % 2]
    cells_per_axis = 1 << (j - 1)
    digits = []
    rest = cell_index
    for _ in range(dim):
        digits.append(rest % cells_per_axis)
        rest //= cells_per_axis
    digits = digits[::-1]  # row-major: first axis varies slowest
    side = (upper - lower) / cells_per_axis
    center = lower + (np.asarray(digits, dtype=float) + 0.5) * side
    return BasisFunction(tuple(center), diameter * 2.0 ** (-j), height)


def v_enumerate(s, habitat):
    """Deterministic bijection s -> plateau function over (scale, cell, height).

    Scales are exhausted in order; within scale j the 2**(dim*(j-1)) lattice
    cells run row-major, each contributing height 1/2 then height 3/4.  So
    s = 1 is the window midpoint at scale 1 with height 1/2, s = 2 the same
    plateau with height 3/4, and s = 3 starts scale 2.
    """
    if s < 1:
        raise ValueError("enumeration starts at s = 1")
    return _v_enumerate_cached(int(s), tuple(habitat.lower), tuple(habitat.upper))


def ground_tail_bound(budget):
    """sum_{s > budget} 2**-s."""
    return float(np.exp2(-budget))


def ground_distance(config_a, config_b, habitat, budget=30):
    """Location-only distance: series over plateau sums, truncated at s <= budget.

    Returns (distance, tail_bound).
    """
    total = 0.0
    for s in range(1, budget + 1):
        v = v_enumerate(s, habitat)
        da = float(np.sum(v(config_a.positions))) if len(config_a) else 0.0
        db = float(np.sum(v(config_b.positions))) if len(config_b) else 0.0
        ds = abs(da - db)
        total += 2.0 ** (-s) * ds / (1.0 + ds)
    return total, ground_tail_bound(budget)


def kappa_component(config_a, config_b, s, k, n, habitat, ladder=DEFAULT_LADDER):
    """kappa_{s,k,n} = |sum_a v_s(x) w_{k,n}(alpha) - sum_b ...|."""
    v = v_enumerate(s, habitat)
    sigma = ladder.value(k)

    def total(cfg):
        if not len(cfg):
            return 0.0
        w = np.exp(-sigma * u_basis(n, cfg.ages))
        return float(np.sum(v(cfg.positions) * w))

    return abs(total(config_a) - total(config_b))


def kappa_tail_bound(budget):
    """sum over s + k + n > budget of 2**-(s+k+n); (m-1)(m-2)/2 triples at sum m."""
    if budget < 3:
        raise ValueError("budget must allow s = k = n = 1")
    m = np.arange(budget + 1, budget + 260, dtype=float)
    return float(np.sum((m - 1) * (m - 2) / 2.0 * np.exp2(-m)))


def _g_sums(cfg, habitat, budget, ladder):
    """Matrix G[s-1, idx(k,n)] = sum_particles v_s(x) w_{k,n}(alpha).

    Factorizes into a (s, particles) x (particles, (k,n)) product.
    """
    s_max = budget - 2
    kn_max = budget - 2
    ks = np.arange(1, kn_max + 1)
    pairs = [(k, n) for k in ks for n in ks if k + n <= budget - 1]
    if not len(cfg):
        return np.zeros((s_max, len(pairs))), pairs
    V = np.stack([v_enumerate(s, habitat)(cfg.positions) for s in range(1, s_max + 1)])
    sig = np.asarray(ladder.value(np.array([k for k, _ in pairs])))
    u = u_basis(np.array([n for _, n in pairs])[:, None], cfg.ages[None, :])
    W = np.exp(-sig[:, None] * u)  # (pairs, particles)
    return V @ W.T, pairs


def kappa_distance(config_a, config_b, habitat, budget=30, ladder=DEFAULT_LADDER):
    """Marked-configuration distance: series over v_s * w_{k,n} sums.

    Truncated at s + k + n <= budget; returns (distance, tail_bound).  Always
    below 1: the weights sum to less than 1 and each term is below its weight.
    """
    ga, pairs = _g_sums(config_a, habitat, budget, ladder)
    gb, _ = _g_sums(config_b, habitat, budget, ladder)
    diff = np.abs(ga - gb)
    total = 0.0
    for idx, (k, n) in enumerate(pairs):
        s_allowed = budget - k - n
        if s_allowed < 1:
            continue
        col = diff[:s_allowed, idx]
        weights = np.exp2(-(np.arange(1, s_allowed + 1, dtype=float) + k + n))
        total += float(np.sum(weights * col / (1.0 + col)))
    return total, kappa_tail_bound(budget)


def window_truncation_error(config_a, config_b, habitat, sub_lower, sub_upper, s_star, budget=30):
    """Error bound for restricting configurations to a sub-window.

    Checks that the box [sub_lower, sub_upper] covers the supports of every
    v_s with s <= s_star (raising with the offending s otherwise), restricts
    both configurations to it, and verifies that the kappa distance moves by
    less than the retained-weight bound eps = 2**-s_star, which is returned.
    """
    sub_lower = np.asarray(sub_lower, dtype=float)
    sub_upper = np.asarray(sub_upper, dtype=float)
    for s in range(1, s_star + 1):
        v = v_enumerate(s, habitat)
        c = np.asarray(v.center)
        r = v.support_radius
        if np.any(c - r < sub_lower) or np.any(c + r > sub_upper):
            raise ValueError(f"sub-window does not cover the support of basis s={s}")
    eps = 2.0 ** (-s_star)
    full, _ = kappa_distance(config_a, config_b, habitat, budget=budget)
    ra = config_a.restrict(sub_lower, sub_upper)
    rb = config_b.restrict(sub_lower, sub_upper)
    restricted, _ = kappa_distance(ra, rb, habitat, budget=budget)
    if abs(full - restricted) >= eps:
        raise AssertionError(
            f"truncation moved kappa by {abs(full - restricted):.3e} >= eps = {eps:.3e}"
        )
    return eps


def configuration_to_json(config):
    """JSON text: a list of {"x": [coords], "alpha": age} objects."""
    records = [
        {"x": [float(c) for c in p.x], "alpha": float(p.alpha)} for p in config
    ]
    return json.dumps(records, indent=2)


def configuration_from_json(text, dim=None):
    """Parse the JSON list format; dim checks/infers the coordinate count."""
    records = json.loads(text)
    if not isinstance(records, list):
        raise ValueError("configuration file must hold a JSON list")
    if not records:
        if dim is None:
            raise ValueError("empty configuration needs an explicit dim")
        return MarkedConfiguration.empty(dim)
    positions, ages = [], []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or set(rec) != {"x", "alpha"}:
            raise ValueError(f"record {i}: expected exactly the keys 'x' and 'alpha'")
        positions.append([float(c) for c in rec["x"]])
        ages.append(float(rec["alpha"]))
    widths = {len(p) for p in positions}
    if len(widths) != 1:
        raise ValueError("records disagree on the coordinate dimension")
    width = widths.pop()
    if dim is not None and width != dim:
        raise ValueError(f"expected dimension {dim}, file has {width}")
    return MarkedConfiguration(np.asarray(positions), np.asarray(ages))


def save_configuration(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(configuration_to_json(config))
        fh.write("\n")


def load_configuration(path, dim=None):
    with open(path, encoding="utf-8") as fh:
        return configuration_from_json(fh.read(), dim=dim)
