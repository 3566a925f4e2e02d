"""Distances between ages, mark multisets, and marked configurations.

The age line carries the wrap-around metric r (near 0 and near infinity ages
look alike); multisets of ages compare through exponentially weighted basis
sums (rho); full configurations add a spatial resolution hierarchy (kappa).
Every series is truncated at a budget, and the truncation tail is an explicit
bound returned alongside the value.
"""

from __future__ import annotations

import numpy as np

from agedpop import (
    MarkSet,
    MarkedConfiguration,
    age_distance,
    kappa_distance,
    omega,
    rho_distance,
    uniform_habitat,
)

rng = np.random.default_rng(7)

print("=== age metric ===")
pairs = [(0.5, 0.6), (1e-6, 1e6), (1e-3, 2e-3), (3.0, 4.0)]
for a, b in pairs:
    print(f"  r({a:g}, {b:g}) = {age_distance(a, b):.6g}   "
          f"(omega: {omega(a):.3g}, {omega(b):.3g})")
print("  note: 1e-6 and 1e6 are close (both near the ends of the age line),")
print("  while 3.0 and 4.0 are simply |a - b| apart.")

print("\n=== mark multiset distance (rho) ===")
a = MarkSet(np.array([0.4, 1.2]))
b = MarkSet(np.array([0.4, 1.25]))
c = MarkSet(np.array([0.4, 1.2, 5.0]))
for name, other in (("b (one age nudged)", b), ("c (one extra mark)", c)):
    val, tail = rho_distance(a, other)
    print(f"  rho(a, {name}) = {val:.6f}  (truncation tail {tail:.2e})")
val, tail = rho_distance(a, a)
print(f"  rho(a, a) = {val:.1f} exactly; distinct multisets exceed the tail")

print("\n=== marked configuration distance (kappa) ===")
hab = uniform_habitat([(0.0, 1.0)], 2.0)
base = MarkedConfiguration(np.array([[0.3], [0.7]]), np.array([0.4, 1.2]))
moved = MarkedConfiguration(np.array([[0.35], [0.7]]), np.array([0.4, 1.2]))
aged = MarkedConfiguration(np.array([[0.3], [0.7]]), np.array([0.4, 1.7]))
for name, other in (("moved 0.05 in space", moved), ("aged one particle", aged)):
    val, tail = kappa_distance(base, other, hab)
    print(f"  kappa(base, {name}) = {val:.6f}  (tail {tail:.2e})")

print("\n=== triangle inequality, sampled ===")
worst = -np.inf
for _ in range(200):
    configs = [
        MarkedConfiguration(rng.random((k, 1)), rng.exponential(1.0, k))
        for k in rng.integers(0, 4, 3)
    ]
    dab, _ = kappa_distance(configs[0], configs[1], hab)
    dbc, _ = kappa_distance(configs[1], configs[2], hab)
    dac, _ = kappa_distance(configs[0], configs[2], hab)
    worst = max(worst, dac - dab - dbc)
print(f"  max (d_ac - d_ab - d_bc) over 200 random triples = {worst:.3e} <= 0")
