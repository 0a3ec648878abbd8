# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# ## How far is the MLS channel from degradable?
#
# Degrade with the complementary channel at a slightly larger noise level
# s = p + a p^2 and measure eta, the diamond norm of the mismatch. The naive
# choice a = 0 leaves eta of order p^1.5; the tuned a = 2/(j(j+1)) cancels
# that term and leaves p^2.

# %%
import numpy as np

from quaddeg.degrade import GPC, MLS, fit_slope, leading_coefficient, scaling_sweep, standard_grid

grid = standard_grid()
fam = MLS(1)
opt = scaling_sweep(fam, grid, fam.optimal_a())
zero = scaling_sweep(fam, grid, 0.0)

print(f"{'p':>8} {'eta(a=opt)':>12} {'eta(a=0)':>12} {'eta/p^2':>8}")
for ro, rz in zip(opt, zero):
    print(f"{ro.p:8.2e} {ro.eta:12.4e} {rz.eta:12.4e} {ro.eta / ro.p**2:8.3f}")

# %% [markdown]
# The log-log slope separates the two regimes.

# %%
for label, recs in (("optimal", opt), ("zero", zero)):
    fit = fit_slope(recs)
    print(f"a={label:<8} slope {fit.slope:.3f}  prefactor {np.exp(fit.intercept):.3f}  points {fit.points}")

# %% [markdown]
# The cancellation is visible in the off-diagonal coefficient alone: with
# tuned a it shrinks like p^2.5, with a = 0 like p^1.5.

# %%
for p in (1e-3, 1e-2):
    print(f"p={p:g}  tuned {leading_coefficient(1, p, 1.0):.3e}  naive {leading_coefficient(1, p, 0.0):.3e}")

# %% [markdown]
# ## The qudit Pauli channel behaves the same way
#
# Here the tuned parameter is 2 d^2 / (d^2 - 1).

# %%
g = GPC(2)
fit = fit_slope(scaling_sweep(g, grid[::2], g.optimal_a()))
print(f"{g.tag} a={g.optimal_a():.4f} slope {fit.slope:.3f}")
