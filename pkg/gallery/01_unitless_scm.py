# coding: utf-8

# # Unit-variance SCMs without varsortability
#
# Draw one random DAG, put two different linear-Gaussian models on it, and
# compare the marginal variances each one implies.

# In[1]:

import numpy as np

from uumcgen import analytic_moments, gen_er_dag, gen_uumc, gen_uvn, simulate_static
from uumcgen import pairwise_sortability, var_metric

rng = np.random.Generator(np.random.Philox(11))
dag = gen_er_dag(10, 0.4, rng)
print(dag.n_edges, "edges")

# The classic recipe: coefficients with magnitude in [0.5, 2] and unit noise.
# Variance piles up along the causal order.

# In[2]:

uvn = gen_uvn(dag, rng)
var_uvn, _ = analytic_moments(uvn)
print(np.round(var_uvn, 2))

# The UUMC sampler scales each node as it goes, so every variable ends up
# with variance one no matter how many ancestors it has.

# In[3]:

uumc = gen_uumc(dag, rng)
var_uumc, _ = analytic_moments(uumc)
print(np.round(var_uumc, 12))

# Its running correlation matrix is the population correlation of the model.

# In[4]:

print(np.round(uumc.corr[:4, :4], 3))

# Varsortability on a finite sample from each model.

# In[5]:

for name, scm in (("uvn", uvn), ("uumc", uumc)):
    ds = simulate_static(scm, 500, rng)
    print(name, round(pairwise_sortability(var_metric(ds), dag.adj).score, 3))
