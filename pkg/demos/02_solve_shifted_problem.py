"""
Solving the shifted model problem
=================================

Assemble and solve the model problem with a shift term coupling (1, 2)
to (0, 1), then sample the solution near the two layers.
"""

import numpy as np

from duranfem import FeSpace, MeshParams, assemble, build_mesh, registry_get, solve, validate
from duranfem.fem import FeFunction

eps = 1e-6
spec = registry_get("paper-example", eps)

# beta, gamma and phi(0) = 0 are checked on a fine sample.
print(validate(spec))

k = 2
space = FeSpace(build_mesh(MeshParams(0.3, eps, k)), k)
system = assemble(spec, space)

# The shift term adds entries far from the diagonal.
print("dofs:", space.dof_count, " nonzeros:", system.matrix.nnz,
      " off-band:", system.offband().nnz)

u = FeFunction(space, solve(system))

# The layer at 0 has width about eps; the one at 1 is much weaker.
for x in [0.0, 1e-6, 5e-6, 1e-3, 0.5, 1.0, 1.0 + 5e-6, 1.5, 2.0]:
    val, der = u(np.array([x]))
    print(f"x={x:<10g} u={val[0]: .6f}  u'={der[0]: .3e}")
