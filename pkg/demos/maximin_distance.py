"""
Distance from a rank-one projection to the closed compact ones
==============================================================

For ``p(u)`` the answer depends only on ``|(u, e_1)|``: once it reaches
``2^{-1/2}`` the distance saturates.
"""

import numpy as np

from projkit import bounds

print(" (u,e1)   numeric    recipe     dist")
for c in np.linspace(0.0, 1.0, 11):
    u = np.array([c, np.sqrt(1 - c * c), 0.0])
    r = bounds.maximin_cap_distance(u)
    print(f"{c:6.2f}  {r['numeric']:.6f}  {r['recipe']:.6f}  {r['dist']:.6f}")

print("\nsqrt(2/3) =", np.sqrt(2 / 3), " 2^-1/2 =", 2**-0.5)
