"""Check the invariants of the discrete Wick calculus.

Every inequality that the approximation relies on can be checked numerically
on small grids. The self-test collects all of them.
"""

from wickfbm import kernel, montecarlo, schemes, walsh

# Run all invariant suites on a single small grid.

for result in montecarlo.selftest(0.75, n_values=(8,), mean_n=64, mean_paths=10_000):
    print(result.name, result.passed, result.worst_ratio)

# The sine/cosine system has two components.
# Along every path, the exact scheme and the Wick-power substitute stay close.

grid = kernel.build_grid(0.75, 8)
spec = schemes.sin_cos()
x, y = schemes.solve_scheme_exact(grid, spec)[-1]
path = walsh.all_paths(8)[3]
print(walsh.evaluate(x, path), walsh.evaluate(y, path))
print(schemes.scheme_series_path(grid, spec, 1.0, path))
