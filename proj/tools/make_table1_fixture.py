#!/usr/bin/env python3
"""Regenerates data/table1_synthetic.csv and its domain sidecar.

Rows are Gaussian draws with within-domain correlation, affinely rescaled so
each column has exactly the mean and sample SD (divisor n-1) listed below.
The values are synthetic; only the shape (19 x 41) and the per-item target
moments are fixed.
"""
import csv
import pathlib

import numpy as np

MOMENTS = [
    ("Som1", "Somatic", 1.68, 0.75), ("Som2", "Somatic", 1.58, 0.84),
    ("Som3", "Somatic", 1.11, 0.74), ("Som4", "Somatic", 1.74, 0.73),
    ("Som5", "Somatic", 1.0, 0.67), ("Som6", "Somatic", 1.05, 0.62),
    ("Som7", "Somatic", 1.95, 0.91),
    ("Anx1", "Anxiety", 1.37, 0.83), ("Anx2", "Anxiety", 2.68, 1.1),
    ("Anx3", "Anxiety", 2.53, 1.07), ("Anx4", "Anxiety", 3.0, 0.94),
    ("Anx5", "Anxiety", 1.32, 0.58), ("Anx6", "Anxiety", 3.16, 0.96),
    ("Anx7", "Anxiety", 2.74, 0.99),
    ("Dep1", "Depression", 1.37, 0.68), ("Dep2", "Depression", 1.95, 0.96),
    ("Dep3", "Depression", 2.05, 0.97), ("Dep4", "Depression", 2.03, 1.01),
    ("Dep5", "Depression", 1.26, 0.73), ("Dep6", "Depression", 1.42, 0.51),
    ("Dep7", "Depression", 2.11, 0.99), ("Dep8", "Depression", 1.63, 0.68),
    ("PTSD1", "PTSD", 1.26, 0.65), ("PTSD2", "PTSD", 1.89, 0.81),
    ("PTSD3", "PTSD", 3.0, 0.82), ("PTSD4", "PTSD", 2.74, 0.99),
    ("PTSD5", "PTSD", 2.26, 1.15), ("PTSD6", "PTSD", 2.63, 1.02),
    ("PTSD7", "PTSD", 2.53, 1.02), ("PTSD8", "PTSD", 2.26, 1.05),
    ("PTSD9", "PTSD", 2.42, 1.07), ("PTSD10", "PTSD", 2.53, 1.12),
    ("PTSD11", "PTSD", 2.68, 0.95), ("PTSD12", "PTSD", 3.0, 1.15),
    ("PTSD13", "PTSD", 2.58, 1.02), ("PTSD14", "PTSD", 3.16, 1.01),
    ("PTSD15", "PTSD", 3.26, 1.45), ("PTSD16", "PTSD", 2.89, 1.1),
    ("PTSD17", "PTSD", 3.0, 1.05), ("PTSD18", "PTSD", 2.53, 0.96),
    ("PTSD19", "PTSD", 2.68, 0.82),
]
N = 19


def main():
    rng = np.random.default_rng(20240519)
    p = len(MOMENTS)
    domains = [d for _, d, _, _ in MOMENTS]
    cov = np.full((p, p), 0.15)
    for i in range(p):
        for j in range(p):
            if domains[i] == domains[j]:
                cov[i, j] = 0.45
    np.fill_diagonal(cov, 1.0)
    x = rng.multivariate_normal(np.zeros(p), cov, size=N)
    x = (x - x.mean(axis=0)) / x.std(axis=0, ddof=1)
    means = np.array([m for _, _, m, _ in MOMENTS])
    sds = np.array([s for _, _, _, s in MOMENTS])
    x = x * sds + means

    out = pathlib.Path(__file__).resolve().parent.parent / "data"
    with open(out / "table1_synthetic.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([name for name, _, _, _ in MOMENTS])
        for row in x:
            w.writerow([f"{v:.10f}" for v in row])
    with open(out / "table1_synthetic.domains.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["variable", "domain"])
        for name, dom, _, _ in MOMENTS:
            w.writerow([name, dom])


if __name__ == "__main__":
    main()
