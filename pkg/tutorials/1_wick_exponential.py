r"""Approximate the Wick exponential of fractional Brownian motion.

The Wick-geometric difference scheme driven by the disturbed binary random walk
converges weakly to the Wick exponential $\exp(B^H_t - t^{2H}/2)$.
"""

from wickfbm import kernel, montecarlo, schemes

# Build the kernel grid. It stores the Walsh coefficients of the random walk.

hurst, n = 0.75, 256
grid = kernel.build_grid(hurst, n)
print(grid.quad_profile)

# The variance of the random walk at t=1 approaches $t^{2H} = 1$.

print(kernel.discrete_covariance(grid, 1.0, 1.0))

# Sample the scheme at t=1.
# Paths are counter-based, so the samples do not depend on the chunk size.

spec = schemes.geometric()
(samples,) = montecarlo.scheme_samples(grid, spec, 1.0, 10_000, 1)
print(montecarlo.moment_report(samples))

# Compare with samples of the limit law.

(limit,) = schemes.limit_samples(spec, hurst, 1.0, 10_000, 2)
print(montecarlo.moment_report(limit))
print(montecarlo.ks_distance(samples, limit))
