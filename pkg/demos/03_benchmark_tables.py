"""
Reproducing the benchmark error tables
======================================

Run the H sweep on both mesh variants with a k=4, H=0.05 reference and
compare against the stored benchmark values.
"""

from duranfem import StudyConfig, run_study
from duranfem.benchmark import benchmark

for variant in ("standard", "coarse"):
    stored = benchmark(variant)
    for k in (1, 2, 3):
        table = run_study(StudyConfig(variant=variant, degree=k))
        print(table.to_text())
        worst = max(abs(r.energy_error / stored[k][r.H][1] - 1) for r in table.rows)
        print(f"largest relative deviation from the stored errors: {worst:.1%}\n")
