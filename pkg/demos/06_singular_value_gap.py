#!/usr/bin/env python3
"""Why subsetting rows helps: the top singular value of a noisy matrix drops.

Keeping only n_A of n rows shrinks the leading singular values, so a
threshold that was swamped by noise on the full matrix can become usable on
the subset. For gaussian noise the expected drop at the (r+1)-th value is at
least s * (sqrt(n) - sqrt(n_A) - 2 * sqrt(T)); heavier-tailed noise keeps the
direction but not the constant.
"""

import numpy as np

from clustersc.datagen import NoiseSpec
from clustersc.evaluate import singular_gap_experiment

N, N_A, T, RANK, TRIALS = 1000, 500, 10, 3, 200


def main():
    rng = np.random.default_rng(17)
    print(f"n={N}, n_A={N_A}, T={T}, signal rank {RANK}, {TRIALS} trials each")
    print("-" * 68)
    for noise in (
        NoiseSpec.gaussian(0.1),
        NoiseSpec.gaussian(0.3),
        NoiseSpec.gaussian(0.6),
        NoiseSpec.uniform(0.5),
        NoiseSpec.student_t(4, 0.3),
    ):
        result = singular_gap_experiment(N, N_A, T, RANK, noise, TRIALS, rng)
        bound = (f"{result.theoretical_bound:8.4f}"
                 if result.theoretical_bound is not None else "     n/a")
        print(f"{noise.kind:>10}{str(noise.params):>12}: "
              f"mean gap {result.empirical_mean_gap:8.4f} "
              f"(se {result.gap_std_error:.4f}), gaussian bound {bound}")
    print()
    print("The bound is a lower bound on the mean, not on each draw; the")
    print("empirical mean sits well above it. It only applies when")
    print("n_A < n + 4T - 4*sqrt(nT), reported as precondition_ok.")


if __name__ == "__main__":
    main()
