r"""Measure how fast Wick powers replace the exact scheme polynomials.

The scheme solution is a series in the polynomials $U^k$ of the recursion
$U^k_l = U^k_{l-1} + k U^{k-1}_{l-1} \diamond \Delta B_l$.
Replacing $U^k$ by Wick powers of the random walk costs at most $K n^{1-2H}$
in mean square. On small grids, this error can be computed exactly.
"""

from wickfbm import bounds, hermite, kernel, montecarlo, schemes

hurst = 0.75

# Compute the exact substitution error for a few step counts.

study = montecarlo.run_rate_study(hurst, (6, 8, 10, 12), schemes.geometric())
for row in study.rows:
    print(row["n"], row["difference"], row["bound"])

# The fitted log-log slope is at most the theoretical rate.

print(study.slopes["s"], 1 - 2 * hurst)

# The constant of the bound has a closed form.

coeffs = hermite.exponential_coeffs()
print(bounds.u_difference_constant(coeffs.growth, hurst))

# Individual chaos components are available, too.

grid = kernel.build_grid(hurst, 8)
result = schemes.u_difference_norm(grid, hermite.sine_coeffs(), 1.0)
print(result)
