# coding: utf-8

# # Standardized SVAR models
#
# Sample a lagged graph, draw a stable unit-variance SVAR over it, and check
# the result both analytically and on simulated data.

# In[1]:

import numpy as np

from uumcgen import gen_er_ts_graph, gen_uumc_svar, simulate_svar
from uumcgen.svargen import standardization_residual

rng = np.random.Generator(np.random.Philox(5))
g = gen_er_ts_graph(4, 0.3, 0.8, 2, rng)
print(sorted(g.lagged_edges()))

# In[2]:

svar = gen_uumc_svar(g, rng)
print("sampling interval", round(svar.delta, 3))
print("spectral radius  ", round(svar.spectral_radius, 3))
print("draws needed     ", svar.params["attempts"])

# The stored lagged correlations close the variance identity for every node.

# In[3]:

print(np.abs(standardization_residual(svar)).max())

# A long simulation started from the stationary law.

# In[4]:

ds = simulate_svar(svar, 50_000, rng)
print(np.round(ds.data.var(axis=0), 3))

# Starting from zeros instead needs a burn-in.

# In[5]:

cold = simulate_svar(svar, 50_000, rng, init="burn_in", burn_in=2000)
print(np.round(cold.data.var(axis=0), 3))
