"""
How soon can a cylinder come back?
==================================

For a typical word w of length n, the least shift p(w) that overlaps w
with itself is close to n. So the minimal return time S_n, which is the
fastest return of any point of the cylinder, grows with slope 1 rather
than with slope h. This demo computes p(w) exactly with the failure
function and then looks at the empirical version on orbits.
"""
import numpy as np

from recurrence_lab import (SymbolicWord, full_shift, min_return_time_symbolic,
                            minimal_return_ratio, orbit, return_time_grid,
                            sample_symbols)

sys = full_shift(2, seed=3)

# Exact minimal periods of 2000 fair-coin words of length 200.
rows = sample_symbols(sys.measure, sys, 2000, 200)
periods = np.array([min_return_time_symbolic(SymbolicWord(r, 2)) for r in rows])
print(f"median p(w)/n at n=200: {np.median(periods) / 200:.3f}")
print(f"words with p(w) < n:    {np.mean(periods < 200):.3f}")

# On an orbit we only see the returns that actually occur. Dividing S_n by n
# at a fixed depth keeps an offset of about m/n from the radius 2**-m. The
# growth of S_n with n does not carry it.
rows = sample_symbols(sys.measure, sys, 30, 4000)
grids = [return_time_grid(orbit(sys, SymbolicWord(r, 2), 3000), range(8, 25),
                          [0.25, 2.0**-6]) for r in rows]
rep = minimal_return_ratio(grids)
print(f"S_n / n at the deepest n:      {rep.extrapolated:.3f}")
print(f"growth slope of median S_n:    {rep.diagnostics['growth_slope']:.3f}")
