#!/usr/bin/env python3
"""Denoising a low-rank panel with hard singular value thresholding.

Builds a rank-3 signal, adds gaussian noise, and shows how the singular
value spectrum, the rank rules, and hsvt behave as the noise grows.
"""

import numpy as np

from clustersc.datagen import GROUP_A_SPEC, NoiseSpec, add_noise, gen_group
from clustersc.linalg import RankRule, hsvt, select_rank, spectrum_report, svd


def main():
    rng = np.random.default_rng(42)
    signal = gen_group(GROUP_A_SPEC, 60, 12, rng)
    print(f"signal: {signal.shape[0]} units x {signal.shape[1]} periods, "
          f"true rank {GROUP_A_SPEC.n_components}")
    print("=" * 64)

    for s in (0.0, 0.1, 0.3, 0.6):
        noisy = add_noise(signal, NoiseSpec.gaussian(s), np.random.default_rng(7))
        report = spectrum_report(noisy)
        print(f"\nnoise sd = {s}")
        for index, sigma, cumulative in report[:6]:
            bar = "#" * int(round(40 * sigma / report[0][1]))
            print(f"  sigma_{index}: {sigma:8.3f}  cum {cumulative:.3f}  {bar}")

        factors = svd(noisy)
        for rule in (RankRule.energy(0.95), RankRule.fixed(3)):
            r = select_rank(factors.sigma, rule)
            err = np.sqrt(np.mean((hsvt(noisy, r) - signal) ** 2))
            raw = np.sqrt(np.mean((noisy - signal) ** 2))
            tag = f"energy(0.95)" if rule.kind == "energy" else "fixed(3)"
            print(f"  {tag:>12}: rank {r:2d}, rmse to signal {err:.4f} (raw {raw:.4f})")

    print("\nAt the true rank hsvt removes most of the noise. The 0.95 energy")
    print("rule keeps nearly every component once the noise tail inflates the")
    print("trailing singular values, so it stops denoising; pass the rank")
    print("explicitly when you know it.")


if __name__ == "__main__":
    main()
