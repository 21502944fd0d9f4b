"""
Escaping vectors and the distance to compact projections
========================================================

A rank-one projection onto ``cos(theta) e_1 + sin(theta) f_n`` in fiber
``n``, where the axes ``f_n`` escape to infinity, has a weak limit supported
on ``e_1`` with weight ``cos^2 theta``.  Its alpha is ``sec^2 theta`` and the
cut-off construction gets within ``sin theta`` of a compact projection.
"""

import numpy as np

from projkit import catalog, nearest

theta = np.pi / 3
entry = catalog.build_example("3.5", {"theta": theta}, trunc=16)
p, a = entry.projections["p"], entry.witnesses["a"]

# alpha comes out as an interval: state limit below, witness norm above
print("alpha interval:", entry.measured["alpha_p"]["lower"], entry.measured["alpha_p"]["upper"])
print("sec^2 theta   :", 1 / np.cos(theta) ** 2)

# sweep the spectral cut; bounds shrink toward the distance formula
alpha = entry.measured["alpha_p"]["lower"]
print("\n   eps     distance   bound")
for c in nearest.epsilon_sweep(p, a, n_points=8):
    print(f"{c.eps:7.4f}  {c.distance:9.6f}  {c.bound:.6f}")
print("sqrt(1 - 1/alpha) =", nearest.dist_from_alpha(alpha))
print("arc distance      =", nearest.d_a_from_alpha(alpha), "vs theta", theta)
