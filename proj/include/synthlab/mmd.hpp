#pragma once

#include "synthlab/features.hpp"

namespace synthlab {

enum class MmdKernel { dot, rbf };

// Unbiased squared maximum mean discrepancy: off-diagonal means of the
// within-set kernel sums minus 2/(nm) times the full cross sum. The unbiased
// estimator may be negative. The rbf kernel is exp(-gamma * |x - y|^2).
double mmd2(const FeatureSet& x, const FeatureSet& y, MmdKernel kernel = MmdKernel::dot,
            double gamma = 1.0);

}  // namespace synthlab
