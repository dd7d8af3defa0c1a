"""
Interpolation error of a layer model
====================================

Interpolate u = S + E + W, with a smooth part, a layer at 0 and a weak
layer at 1, and watch the observed orders as H shrinks.
"""

from duranfem import interpolation_study, layer_model

eps = 1e-6
H_list = [0.4, 0.2, 0.1, 0.05]

for variant in ("standard", "coarse"):
    for k in (1, 2, 3):
        l2, energy = interpolation_study(layer_model(2.0, eps, k), variant, k, H_list)
        print(f"{variant} k={k}")
        print("  L2 rates    ", [f"{r:.2f}" for r in l2.rates()[:-1]])
        print("  energy rates", [f"{r:.2f}" for r in energy.rates()[:-1]])

# Rates are per cell count.  On graded meshes the cell count grows a bit
# faster than 1/H, so the L2 rates approach k + 1 only slowly.
