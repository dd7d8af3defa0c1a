"""
Graded meshes for a layer at zero
=================================

Build the standard and the coarse graded mesh for one H and look at how
the cell widths grow away from x = 0 and x = 1.
"""

import numpy as np

from duranfem import MeshParams, build_mesh

eps, H = 1e-6, 0.5

# The standard mesh repeats the grading on (1, 2).
standard = build_mesh(MeshParams(H, eps))
print("standard:", standard.n_cells, "cells, M =", standard.M)

# For k = 3 the coarse variant uses wider fine cells right of 1.
coarse = build_mesh(MeshParams(H, eps, degree=3, variant="coarse"))
print("coarse k=3:", coarse.n_cells, "cells, M2 =", coarse.M2)

# Smallest and largest widths on each half.
for mesh in (standard, coarse):
    h = mesh.h
    print(f"  (0,1): h in [{h[:mesh.M].min():.1e}, {h[:mesh.M].max():.2f}]"
          f"  (1,2): h in [{h[mesh.M:].min():.1e}, {h[mesh.M:].max():.2f}]")

# Graded cells never exceed H times their left endpoint.
x, h = standard.nodes[:-1], standard.h
graded = slice(int(np.ceil(1 / H)), standard.M)
print("max h/(H x) on the graded part:", float(np.max(h[graded] / (H * x[graded]))))

# Nodes can be written out as CSV (index, x, h).
print(standard.to_csv().splitlines()[:4])
