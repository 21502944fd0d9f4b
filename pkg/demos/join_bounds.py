"""
Lower bounds for the join of two nearly compact projections
===========================================================

Closed forms against a brute-force oracle, then a model that attains them.
"""

import numpy as np

from projkit import bounds

theta1, theta2 = 0.2, 0.1
print(" theta    case I    oracle    case II  branch   oracle")
for theta in np.linspace(0.4, np.pi / 2, 6):
    r1 = bounds.compare("I", theta, theta1, theta2)
    r2 = bounds.compare("II", theta, theta1, theta2)
    print(f"{theta:6.3f}  {r1.closed_form:8.5f}  {r1.oracle_min:8.5f}  {r2.closed_form:8.5f}  {r2.branch:6s}  {r2.oracle_min:8.5f}")

# the case II branches switch where cos(theta) crosses this value
print("\nbranch threshold cos(theta) =", bounds.branch_threshold(theta1, theta2))

w = bounds.sharpness_witness("II", 1.0, theta1, theta2)
m = w.measured
print("\nwitness at theta = 1.0")
print("  angle between the pair :", m["angle"])
print("  1/alpha of the join    :", 1 / m["join_alpha_lower"])
print("  closed form            :", m["closed_form"])
