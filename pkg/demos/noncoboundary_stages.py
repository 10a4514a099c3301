"""Stage table of the depth-6 non-coboundary construction and the growth of S_n f(0)."""

import numpy as np

from birkhoff_lab import RotationNumber
from birkhoff_lab.zoo import build_noncoboundary, orbit_partial_sums

alpha = RotationNumber.golden()
f, spec = build_noncoboundary(alpha, xi=0.25, K=6)
print(f"{'k':>2} {'n_k+1':>24} {'m_k':>24} {'excluded':>16} {'block sum':>10} {'on grid':>8}")
for st in spec.stages:
    print(f"{st.k:>2} {st.hi:>24} {st.m:>24} {st.excluded:>16} {float(st.block_sum):>10.4f} {str(st.resolved):>8}")

n = spec.stages[spec.resolved_depth - 1].hi
S = orbit_partial_sums(f, alpha, n)
for st in spec.stages[:spec.resolved_depth]:
    print(f"max |S_j f(0)| for j < {st.hi}: {np.max(np.abs(S[:st.hi])):.4f}")
print(f"Holder seminorm (xi = 1/4) of the materialized part: {f.lip_seminorm(0.25):.4f}")
