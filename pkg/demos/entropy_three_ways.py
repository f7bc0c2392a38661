"""
Entropy of the doubling map, three ways
=======================================

The circle map x -> 2x has entropy log 2 with respect to Lebesgue measure.
This walk-through estimates it from waiting times. First it uses returns to
Bowen balls, then returns of the symbolic itinerary to its own prefix, and
finally the number of cylinders needed to cover half the samples.

Run with ``python3 demos/entropy_three_ways.py``; it takes a few seconds.
"""
import math

from recurrence_lab import (circle_expanding, entropy_from_return_times,
                            entropy_katok, entropy_ornstein_weiss, orbit,
                            return_time_grid, sample_symbols,
                            sample_typical)
from recurrence_lab.pipelines import orbit_itineraries

# A handful of Lebesgue-typical starting points. Each one is stored as a
# digit expansion, so the orbit is exact rather than a float that collapses
# to zero after about fifty doublings.
sys = circle_expanding(2, seed=7)
L = 2**18
starts = sample_typical(sys.measure, sys, 16, length=L + 64)
orbits = [orbit(sys, x, L) for x in starts]

# R_n(x, eps) is the first time the orbit re-enters the Bowen ball of depth
# n and radius eps around x. Its logarithm grows like n times the entropy.
n_ladder = range(5, 15)
eps_ladder = [0.25, 0.125, 0.0625]
grids = [return_time_grid(o, n_ladder, eps_ladder) for o in orbits]
report = entropy_from_return_times(grids)
for fit in report.per_eps_fits:
    print(f"eps={fit.eps:<7} slope={fit.slope:.4f}  R^2={fit.r_squared:.3f}"
          f"  censored={fit.censored_fraction:.2f}")
print(f"return-time estimate  {report.extrapolated:.4f}   (log 2 = {math.log(2):.4f})")

# The same orbits read as binary itineraries. The waiting time for the
# first n symbols to reappear grows like exp(n h).
words = orbit_itineraries(orbits)
ow = entropy_ornstein_weiss(words, (8, 16), centers=8)
print(f"Ornstein-Weiss        {ow.extrapolated:.4f}")

# Covering: how many length-n cylinders carry half of the sampled mass?
# Under Lebesgue every cylinder is equally heavy, so about 2**(n-1). This
# needs many short itineraries rather than a few long ones.
rows = sample_symbols(sys.measure, sys, 200_000, 14, stream=1)
kat = entropy_katok(range(4, 15), 0.5, itineraries=rows)["cylinder"]
print(f"Katok                 {kat.extrapolated:.4f}")
