"""Localisation does not need a laser.

Photons drawn from a thermal spectrum carry a spread of wavelengths, so each
scattering event blurs a different fringe pattern onto the state. The peaks
still narrow. Here we compare a monochromatic source with two blackbodies whose
spectral peaks sit at 0.7 and 1.5 times the region half-width.

    python demos/04_blackbody.py [--seeds 20]
"""
import argparse

import numpy as np

from relloc.spectra import Monochromatic, build_blackbody
from relloc.wave1d import flat_state, peak_variance, position_density, run_localisation

parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
parser.add_argument("--seeds", type=int, default=20)
args = parser.parse_args()

flat = flat_state()
flat_var = peak_variance(position_density(flat), flat.x)

sources = {"monochromatic, 1 lambda": Monochromatic(1.0)}
for temperature in (4139.67, 1931.85):
    bb = build_blackbody(temperature)
    sources[f"blackbody {temperature:g} K, peak {bb.peak:.2f}"] = bb

for name, source in sources.items():
    ratios = []
    for seed in range(args.seeds):
        state, _ = run_localisation(flat, 150, source, rng=seed)
        ratios.append(peak_variance(position_density(state), state.x) / flat_var)
    ratios = np.array(ratios)
    print(f"{name:36s} variance / flat: median {np.median(ratios):.2e}, "
          f"below 25% in {np.count_nonzero(ratios < 0.25)}/{args.seeds}")
