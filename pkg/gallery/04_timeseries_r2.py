# coding: utf-8

# # Two ways to score R2 in time series
#
# R2* predicts X_i(t) from other processes only. Time-series R2 also lets the
# target use its own past. They can disagree about the causal order.

# In[1]:

import numpy as np

from uumcgen import Svar, simulate_svar, ts_sortability
from uumcgen import r2_ts_metric, r2star_ts_metric, var_metric

# A strongly persistent source drives a lagged chain 0 -> 1 -> 2.

# In[2]:

W = np.zeros((3, 3, 2))
W[0, 0, 1] = 0.95
W[0, 1, 1] = 0.3
W[1, 2, 1] = 0.9
svar = Svar(W, np.ones(3))
ds = simulate_svar(svar, 20_000, 0)
g = svar.graph()

# In[3]:

for metric in (var_metric(ds), r2star_ts_metric(ds, 1), r2_ts_metric(ds, 1)):
    score = ts_sortability(metric, g).score
    print(f"{metric.metric_kind:10s}", np.round(metric.values, 3), round(score, 3))

# The source has the largest variance and the best own-past fit, so var and
# time-series R2 both fall along the reverse order, while R2* rises along it.

# The generator's two-process example.

# In[4]:

from uumcgen.experiments import ExperimentConfig, run_experiment

rep = run_experiment(ExperimentConfig("ts-pair", seed=4, replicates=100, t_len=1000))
print("source", round(rep.results["source"]["mean"], 3), "target", round(rep.results["target"]["mean"], 3))
