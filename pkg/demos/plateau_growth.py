"""Build a plateau function and watch its Birkhoff sums hit m*eps on the good set."""

import numpy as np

from birkhoff_lab import GrowthGauge, RotationNumber
from birkhoff_lab.birkhoff import birkhoff_sums
from birkhoff_lab.dimension import construction_cover_audit
from birkhoff_lab.fixed import FixedArray
from birkhoff_lab.zoo import build_plateau


def main():
    alpha = RotationNumber.golden()
    eps = 0.1
    f, spec, m = build_plateau(alpha, eps, GrowthGauge.power(0.5))
    print(f"level n = {spec.n}, m = {m}, {len(f)} segments, good set measure {float(spec.good_set.measure()):.4f}")

    rng = np.random.default_rng(1)
    inside = birkhoff_sums(f, alpha, spec.good_set.sample(5, rng), m)
    anywhere = birkhoff_sums(f, alpha, FixedArray.from_float(rng.random(5)), m)
    print("S_m on the good set:", np.round(inside, 12))
    print("S_m at random points:", np.round(anywhere, 4))
    print(f"m * eps = {m * eps:.1f}, sqrt(m) = {np.sqrt(m):.2f}")

    audit = construction_cover_audit(spec, 0.5, 0.5, 0.5)
    for row in audit.classes:
        print(f"  {row['class']:<20} {row['count']:>6} pieces, pre-measure {row['pre_measure']:.4f}")
    print(f"total {audit.pre_measure:.4f} -> {'pass' if audit.passed else 'fail'}")


if __name__ == "__main__":
    main()
