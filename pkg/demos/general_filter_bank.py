"""
Unequal vertex bandwidths through a filter bank
================================================

When channels have different bandwidths the signal is split into
frequency layers.  Each layer is an equal-bandwidth problem on the
vertices wide enough to reach it, and the layer rates add up.
"""

import numpy as np

from tvsampling import (
    Grid,
    bandwidth_profile,
    build_covariance_graph,
    eigendecompose,
    nrmse,
    sample_and_reconstruct_general,
    synthesize_general,
)
from tvsampling.spectral import EDGE_FREE

grid = Grid(1 / 256, 256)
signal = synthesize_general([50, 20, 50, 50], grid, np.random.default_rng(3))

graph = build_covariance_graph(signal)
profile = bandwidth_profile(signal, eigendecompose(graph), edge=EDGE_FREE)
print("vertex bandwidths (Hz):", np.round(profile.vertex_bw, 2))

result = sample_and_reconstruct_general(signal, profile, graph)
for layer, plan in zip(result.decomposition.layers, result.plans):
    print(f"layer ({layer.band_low:g}, {layer.band_high:g}] Hz on vertices {layer.vertices}: "
          f"min rate {plan.min_rate:.2f} Hz, on-grid {plan.schedule.total_rate:.2f} Hz")

print(f"total minimum rate {result.min_rate:.2f} Hz "
      f"(separate sampling {2 * profile.vertex_bw.sum():.2f} Hz)")
# Each layer takes its basis from the whole-record covariance restricted to
# its vertices.  That basis need not align with the layer's own null
# directions: here the (0, 20] layer has rank 3, yet no graph-frequency row
# vanishes, so the total matches separate sampling instead of undercutting it.
print(f"reconstruction NRMSE {nrmse(signal, result.reconstruction):.2e}")
