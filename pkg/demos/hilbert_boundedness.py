"""Direct and Fourier-side Hilbert sums for the closed-form example."""

import numpy as np

from birkhoff_lab import RotationNumber
from birkhoff_lab.birkhoff import hilbert_example, hilbert_fourier_side, hilbert_partial

alpha = RotationNumber.golden()
N = 10**5
for a in (0.3, 0.5, 0.9):
    direct = hilbert_partial(hilbert_example(a), alpha, 0, N)
    fourier = hilbert_fourier_side(a, alpha, N)
    checkpoints = [10**k for k in range(1, 6)]
    print(f"a = {a}: running sup {direct.running_sup[-1]:.4f} (last record at N = {direct.record_index()}), "
          f"max gap to Fourier side {np.max(np.abs(direct.partial - fourier)):.1e}")
    print("   partial sums at N = 10..1e5:", " ".join(f"{direct.partial[n - 1]:+.4f}" for n in checkpoints))
