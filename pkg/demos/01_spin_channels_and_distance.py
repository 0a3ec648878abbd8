# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# ## Spin operators, the MLS channel and its distance from the identity
#
# The spin-j generators are built in the descending-m basis. The
# Landau-Streater map averages conjugation by the three generators, and the
# MLS channel mixes it with the identity at weight p.

# %%
import numpy as np

from quaddeg import checks
from quaddeg.channels import MlsParams, choi, identity_channel, landau_streater, mls_channel
from quaddeg.diamond import diamond_lower_entangled, diamond_norm, diamond_upper_maxnorm
from quaddeg.spin import make_spin, singlet_state

s = make_spin(1)
print(np.round(s.j3.real, 3))
print("casimir defect", checks.casimir_defect(s))

# %% [markdown]
# Every spin in the test range satisfies the algebra to rounding error.

# %%
for j in checks.SPINS:
    worst = max(checks.spin_defects(j).values())
    print(f"j={j:>4}  worst defect {worst:.1e}")

# %% [markdown]
# ## Perfect distinguishability
#
# The singlet is annihilated by the total spin, so LS acting on one half of it
# leaves a state orthogonal to the input. That pins the diamond distance to 2,
# which the SDP confirms. The probe value is a lower bound and the max-norm
# value an upper bound.

# %%
for j in ("1/2", "1", "3/2"):
    sj = make_spin(j)
    phi = choi(landau_streater(sj)) - choi(identity_channel(sj.d))
    lo = diamond_lower_entangled(phi, singlet_state(sj))
    print(f"j={j:>4}  probe {lo:.10f}  sdp {diamond_norm(phi):.8f}  upper {diamond_upper_maxnorm(phi):.3f}")

# %% [markdown]
# By convexity the MLS channel is then at distance exactly 2p.

# %%
for p in (0.05, 0.1, 0.3):
    phi = choi(mls_channel(MlsParams(s.j, p), s)) - choi(identity_channel(3))
    print(f"p={p:<5} diamond {diamond_norm(phi):.8f}  2p {2 * p}")
