"""Random-cluster duality: the self-dual line and the torus loop measure.

The dual of a configuration opens the white diagonal at exactly the vertices
whose black diagonal is closed.  At p/(1-p) = sqrt(q) the planar model is
self-dual; on the torus, the loop-weighted measure makes the duality an
exact distributional identity (dual law = law shifted by one square).
"""

import numpy as np

from latticeflow import (FKChain, FKConfig, FKParams, ChainConfig, dual_config,
                         even_diamond, fk_weight, run_chain, self_dual_p,
                         two_point_connected)
from latticeflow.bkw import torus_fk_distribution
from latticeflow.torus import TorusLattice

for q in (1.0, 2.0, 4.0):
    p = self_dual_p(q)
    print(f"q = {q}: self-dual p = {p:.6f}, p/(1-p)^2... "
          f"check (p/(1-p))^2 = {(p / (1 - p)) ** 2:.6f} = q")

domain = even_diamond(2)  # black graph: 4-edge star around the origin
params = FKParams(self_dual_p(2.0), self_dual_p(2.0), 2.0)
eta = FKConfig(domain, np.array([True, False, True, False]))
print(f"\nstar domain: weight({list(map(int, eta.mask))}) = "
      f"{fk_weight(eta, params):.6f}")
print(f"dual opens the complementary white edges: "
      f"{sorted(dual_config(eta).open_edges())}")

chain = FKChain(domain, params, "free")
records = run_chain(chain, ChainConfig(seed=3, sweeps=4000, burn_in=200),
                    {"joined": lambda s: float(
                        two_point_connected(s, (1, 1), (-1, -1)))})
freq = np.mean([r.values["joined"] for r in records])
print(f"P((1,1) <-> (-1,-1)) under the free measure: {freq:.3f}")

# torus duality: law of the dual equals the law of the shifted configuration
torus = TorusLattice(1)
dist = torus_fk_distribution(1, q=2.0)
side = torus.side
law_dual, law_shift = {}, {}
for config, prob in dist.items():
    dual = tuple(1 - bit for bit in config)
    shifted = [0] * len(config)
    for idx, bit in enumerate(config):
        i, j = torus.vertices[idx]
        shifted[torus.vertex_index[((i + 1) % side, j)]] = bit
    law_dual[dual] = law_dual.get(dual, 0) + prob
    law_shift[tuple(shifted)] = law_shift.get(tuple(shifted), 0) + prob
tv = 0.5 * sum(abs(law_dual.get(k, 0) - law_shift.get(k, 0))
               for k in set(law_dual) | set(law_shift))
print(f"torus: TV(law of dual, law of shift) = {tv:.2e}")
