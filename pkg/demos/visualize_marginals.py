"""Compare the sampled cell marginal with its closed-form density.

Draws 200k samples of a single-cell marginal (n = 2, mass 0.7), histograms
the radius, and prints the histogram next to the analytic radial density so
the agreement is visible without any plotting dependency.

Run:  python3 demos/visualize_marginals.py
"""

import math

import numpy as np

from currentlab import Dimensions
from currentlab.measures import Partition
from currentlab.process import SeededStream, sample_marginal
from currentlab.specfun import log_marginal_radial_density


def main() -> None:
    dims = Dimensions(2)
    lam = 0.7
    draws = sample_marginal(dims, Partition((lam,)), SeededStream(2024, 0),
                            size=200_000)[:, 0, 0]
    radii = np.abs(draws)

    edges = np.linspace(0.0, 3.0, 16)
    hist, _ = np.histogram(radii, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    # radial density of |xi| in d = 1 (both signs contribute), averaged over
    # each bin because the density diverges at the origin
    from scipy.integrate import quad
    analytic = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(
            lambda r: 2.0 * math.exp(log_marginal_radial_density(dims, lam, r)),
            lo, hi, points=[lo + 1e-4] if lo == 0.0 else None, limit=200)
        analytic.append(val / (hi - lo))

    print(f"single-cell marginal, n = 2, mass = {lam}")
    print(f"{'radius':>8} {'sampled':>10} {'analytic':>10}")
    for r, h, a in zip(centers, hist, analytic):
        bar = "#" * int(round(40 * a / max(analytic)))
        print(f"{r:8.2f} {h:10.4f} {a:10.4f}  {bar}")


if __name__ == "__main__":
    main()
