"""Regenerates the profiler fixtures and the scipy reference values.

Run from this directory: python3 generate.py
"""
import csv
import json

import numpy as np
from scipy import stats

SEED = 42


def write_column(path, name, values):
    with open(path, "w", newline="") as f:
        f.write(name + "\n")
        for v in values:
            f.write(repr(float(v)) + "\n")


def main():
    rng = np.random.default_rng(SEED)

    normal = rng.standard_normal(1000)
    heavy = rng.standard_cauchy(1000)
    write_column("normal_1000.csv", "x", normal)
    write_column("cauchy_1000.csv", "x", heavy)

    # 100 customers; income has exactly 7 missing cells.
    n = 100
    age = rng.integers(21, 70, n)
    tenure = np.round(age * 0.4 + rng.normal(0, 0.8, n), 2)
    income = np.round(rng.normal(52000, 15000, n), 0)
    missing = rng.choice(n, 7, replace=False)
    segment = rng.choice(["retail", "smb", "corporate"], n)
    approved = np.where(rng.random(n) < 0.6, "yes", "no")
    with open("customers_100.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["age", "tenure", "income", "segment", "approved"])
        for i in range(n):
            inc = "" if i in missing else str(int(income[i]))
            w.writerow([int(age[i]), tenure[i], inc, segment[i], approved[i]])

    def jb(x):
        # Biased moments, same definition the profiler uses.
        return float(stats.jarque_bera(x).statistic)

    oracle = {
        "seed": SEED,
        "alpha": 0.05,
        "critical": float(stats.chi2.ppf(0.95, 2)),
        "normal_1000": {"jarque_bera": jb(normal), "p_value": float(stats.jarque_bera(normal).pvalue)},
        "cauchy_1000": {"jarque_bera": jb(heavy), "p_value": float(stats.jarque_bera(heavy).pvalue)},
        "customers_100": {
            "tenure_age_pearson": float(np.corrcoef(age, tenure)[0, 1]),
        },
    }
    with open("normality_oracle.json", "w") as f:
        json.dump(oracle, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
