"""Can an experiment tell induced localisation from particles that were localised all along?

If the photons created the localisation, the two mirror peaks are in a
coherent superposition and the relative momentum shows fringes (Q1). If the
particles were already sitting at one of the two positions, the momentum
density is the smooth envelope (Q2). One momentum measurement per run feeds a
Bayes update; after about twenty runs the answer is clear, provided the
momentum resolution can resolve the fringes.

    python demos/02_bayes_discrimination.py [--experiments 40] [--seed 1]
"""
import argparse

import numpy as np

from relloc.discriminator import build_hypotheses, fringe_contrast, fringe_period, resolution_sweep, simulate_experiment
from relloc.wave1d import flat_state, run_localisation

parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
parser.add_argument("--experiments", type=int, default=40)
parser.add_argument("--seed", type=int, default=1)
args = parser.parse_args()

# The two hypotheses for a single localisation run
state, _ = run_localisation(flat_state(), 150, rng=args.seed)
hyp = build_hypotheses(state)
period = fringe_period(hyp.q1, hyp.q2)
print(f"fringe period {period:.3f} h/lambda; contrast Q1 {fringe_contrast(hyp.q1, period):.2f}, "
      f"Q2 {fringe_contrast(hyp.q2, period):.2f}")

# One experiment: the posterior wanders before it settles
trace = simulate_experiment("delocalised", 40, rng=args.seed)
print("single experiment, P_nl every 5 runs:", np.round(trace.p_nl[::5], 3))

# Averaged over experiments, for a few detector resolutions
dps = [0.0, 0.25, 0.5, 1.0]
mean = resolution_sweep("delocalised", dps, args.experiments, 20, seed=args.seed)
for dp, curve in zip(dps, mean):
    print(f"dp = {dp:4.2f} h/lambda: mean P_nl after 20 runs = {curve[-1]:.3f}")
