"""A guided tour of the front-quality metrics on a hand-sized example.

Run with:  python3 demos/metrics_tour.py
"""

import numpy as np

from morlgen.fronts import (
    FrontBounds,
    eum,
    hv_norm,
    hypervolume,
    nhgr,
    pareto_filter,
)
from morlgen.stats import RandomStream, sample_simplex_batch


def main() -> None:
    raw = [
        (4.0, 1.0),
        (3.0, 3.0),
        (1.0, 4.0),
        (2.0, 2.0),  # dominated by (3, 3)
        (3.0, 3.0),  # duplicate
    ]
    front = pareto_filter(raw)
    print("raw points:     ", raw)
    print("pareto front:   ", front.points.tolist())

    ref = np.zeros(2)
    print("hypervolume vs origin:", hypervolume(front, ref))

    bounds = FrontBounds(np.zeros(2), np.array([5.0, 5.0]))
    print("normalized hypervolume in [0,5]^2:", hv_norm(front, bounds))

    # A cheaper approximation with a weaker interior point. NHGR normalizes
    # by the optimal front's own ranges, so points at the extremes contribute
    # nothing; the interior point carries the whole score.
    approx = pareto_filter([(2.5, 2.5), (1.0, 4.0)])
    print("approx front:   ", approx.points.tolist())
    print("NHGR (approx vs optimal):", nhgr(approx, front))
    print("NHGR (optimal vs itself):", nhgr(front, front))

    weights = sample_simplex_batch(RandomStream(0), 2, 100_000)
    print("EUM of optimal front:", round(eum(front, weights), 4))
    print("EUM of approx front: ", round(eum(approx, weights), 4))


if __name__ == "__main__":
    main()
