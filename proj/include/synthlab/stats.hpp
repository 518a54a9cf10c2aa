#pragma once

#include <string>
#include <vector>

#include "synthlab/errors.hpp"

namespace synthlab {

struct PairedScores {
  std::vector<double> baseline;
  std::vector<double> treatment;

  static PairedScores create(std::vector<double> baseline, std::vector<double> treatment);
};

enum class Alternative { greater, less, two_sided };

Alternative alternative_from_name(const std::string& name);
const char* alternative_name(Alternative a);

struct WilcoxonResult {
  double w_plus = 0.0;  // signed-rank statistic (sum of positive-difference ranks)
  double p = 0.0;
  int n = 0;            // pairs remaining after dropping zero differences
  std::string method;   // "exact" (n <= 25) or "normal"
};

inline constexpr int kWilcoxonExactLimit = 25;

// Signed-rank test on treatment - baseline differences. Zero differences are
// dropped; ties in |d| take average ranks. Exact p sums the null sign-flip
// distribution for n <= 25, otherwise a normal approximation with continuity
// and tie corrections is used.
WilcoxonResult wilcoxon_signed_rank(const PairedScores& scores, Alternative alternative);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample, 1/(n-1)
  int n = 0;
};

Summary summarize(const std::vector<double>& values);

}  // namespace synthlab
