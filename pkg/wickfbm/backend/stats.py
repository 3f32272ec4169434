"""Statistical tests."""

import numpy
import scipy.stats


def ks_2samp(sample_a, sample_b, /):
    result = scipy.stats.ks_2samp(numpy.asarray(sample_a), numpy.asarray(sample_b))
    return float(result.statistic)
