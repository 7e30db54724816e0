"""Two particles that start completely delocalised become localised relative to each other.

We never put in an interaction. We only scatter photons off the pair and keep
track of what the detector saw. After a hundred or so photons the relative
position density has collapsed onto two mirror-image peaks: the particles are
a definite distance apart, but which one is on the left is still unknown.

    python demos/01_localisation_1d.py [--seed 7] [--plot out.png]
"""
import argparse

import numpy as np

from relloc.wave1d import (
    density_peaks,
    flat_state,
    has_mirror_peaks,
    momentum_density,
    peak_variance,
    position_density,
    run_localisation,
)

parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--plot", help="save a figure to this path (needs matplotlib)")
args = parser.parse_args()

# Start flat over [-d, d] with d equal to the photon wavelength.
state = flat_state(d=1.0)
print(f"flat start: right-half variance {peak_variance(position_density(state), state.x):.4f} (1/12 = {1 / 12:.4f})")

# Scatter photons in batches and watch the right-hand peak narrow.
snapshots = {}
done = 0
rng = np.random.default_rng(args.seed)
for target in (10, 25, 50, 100, 150):
    state, log = run_localisation(state, target - done, rng=rng)
    done = target
    rho = position_density(state)
    scattered = sum(e.kind.value == "scattered" for e in log.events)
    snapshots[target] = rho
    print(f"{target:4d} photons ({scattered} of the last batch deflected): "
          f"variance {peak_variance(rho, state.x):.2e}, peaks at {np.round(density_peaks(rho, state.x), 3)}")

print("two mirror peaks:", has_mirror_peaks(state))

# The coherent pair of peaks shows up as fringes in relative momentum.
q = momentum_density(state)
print(f"momentum density: {len(density_peaks(q.q, q.p))} fringe maxima inside |p| < {q.p[-1]:g} h/lambda")

if args.plot:
    import matplotlib.pyplot as plt

    fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
    for n, rho in snapshots.items():
        a.plot(state.x, rho, label=f"{n} photons")
    a.set_xlabel("x [lambda]")
    a.set_ylabel("P(x)")
    a.legend()
    b.plot(q.p, q.q)
    b.set_xlabel("p [h/lambda]")
    b.set_ylabel("Q(p)")
    fig.tight_layout()
    fig.savefig(args.plot)
    print("saved", args.plot)
