"""Statistical tests and the audit suite.

Only the test utilities are imported here; the audits live in
:mod:`favsites.verify.audits` (they depend on modules that themselves use
these utilities).
"""
from .stats import (GofResult, bonferroni, gof_counts, goodness_of_fit, mean_se,
                    proportion_se, two_sample, two_sample_counts, wilson_interval)

__all__ = [
    "GofResult", "bonferroni", "gof_counts", "goodness_of_fit", "mean_se",
    "proportion_se", "two_sample", "two_sample_counts", "wilson_interval",
]
