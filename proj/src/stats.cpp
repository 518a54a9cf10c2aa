#include "synthlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace synthlab {

PairedScores PairedScores::create(std::vector<double> baseline, std::vector<double> treatment) {
  if (baseline.size() != treatment.size())
    throw Error(Errc::invalid_argument, "paired scores: unequal lengths");
  if (baseline.empty()) throw Error(Errc::invalid_argument, "paired scores: empty");
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (!std::isfinite(baseline[i]) || !std::isfinite(treatment[i]))
      throw Error(Errc::invalid_argument, "paired scores: non-finite value at pair " + std::to_string(i));
  }
  return PairedScores{std::move(baseline), std::move(treatment)};
}

Alternative alternative_from_name(const std::string& name) {
  if (name == "greater") return Alternative::greater;
  if (name == "less") return Alternative::less;
  if (name == "two-sided" || name == "two_sided") return Alternative::two_sided;
  throw Error(Errc::invalid_argument, "unknown alternative \"" + name + "\"");
}

const char* alternative_name(Alternative a) {
  switch (a) {
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
    case Alternative::two_sided: return "two-sided";
  }
  return "unknown";
}

namespace {

// Average ranks of |d|, scaled by 2 so ties yield integers.
std::vector<std::int64_t> double_ranks(const std::vector<double>& abs_d) {
  const std::size_t n = abs_d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
  std::vector<std::int64_t> ranks2(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    // Average rank of positions i..j (1-based), doubled: (i+1 + j+1).
    const std::int64_t avg2 = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t p = i; p <= j; ++p) ranks2[order[p]] = avg2;
    i = j + 1;
  }
  return ranks2;
}

// Null distribution of the doubled statistic: counts[s] = number of sign
// assignments whose positive-rank sum (doubled) equals s.
std::vector<std::uint64_t> rank_sum_counts(const std::vector<std::int64_t>& ranks2) {
  std::int64_t total = 0;
  for (auto r : ranks2) total += r;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  std::int64_t reach = 0;
  for (auto r : ranks2) {
    reach += r;
    for (std::int64_t s = reach; s >= r; --s)
      counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
  }
  return counts;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const PairedScores& scores, Alternative alternative) {
  std::vector<double> abs_d;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < scores.baseline.size(); ++i) {
    const double d = scores.treatment[i] - scores.baseline[i];
    if (d == 0.0) continue;  // Wilcoxon's zero-handling: drop
    abs_d.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  const int n = static_cast<int>(abs_d.size());
  if (n == 0) throw Error(Errc::all_zero_differences, "all paired differences are zero");

  const auto ranks2 = double_ranks(abs_d);
  std::int64_t w2 = 0;     // doubled W+
  std::int64_t total2 = 0;
  for (std::size_t i = 0; i < ranks2.size(); ++i) {
    total2 += ranks2[i];
    if (positive[i]) w2 += ranks2[i];
  }

  WilcoxonResult result;
  result.n = n;
  result.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= kWilcoxonExactLimit) {
    result.method = "exact";
    const auto counts = rank_sum_counts(ranks2);
    std::uint64_t ge = 0, le = 0;
    for (std::int64_t s = 0; s <= total2; ++s) {
      if (s >= w2) ge += counts[static_cast<std::size_t>(s)];
      if (s <= w2) le += counts[static_cast<std::size_t>(s)];
    }
    const double denom = std::ldexp(1.0, n);  // 2^n, exact
    const double p_greater = static_cast<double>(ge) / denom;
    const double p_less = static_cast<double>(le) / denom;
    switch (alternative) {
      case Alternative::greater: result.p = p_greater; break;
      case Alternative::less: result.p = p_less; break;
      case Alternative::two_sided: result.p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
    }
  } else {
    result.method = "normal";
    const double dn = static_cast<double>(n);
    const double mean = dn * (dn + 1.0) / 4.0;
    // Variance with the standard tie correction sum(t^3 - t)/48.
    double tie_term = 0.0;
    {
      std::vector<double> sorted(abs_d);
      std::sort(sorted.begin(), sorted.end());
      std::size_t i = 0;
      while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
      }
    }
    const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
    const double sd = std::sqrt(var);
    const double w = result.w_plus;
    const double p_greater = 1.0 - normal_cdf((w - 0.5 - mean) / sd);
    const double p_less = normal_cdf((w + 0.5 - mean) / sd);
    switch (alternative) {
      case Alternative::greater: result.p = p_greater; break;
      case Alternative::less: result.p = p_less; break;
      case Alternative::two_sided: result.p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
    }
  }
  return result;
}

Summary summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(Errc::too_few_samples, "summarize: need at least 2 values");
  Summary s;
  s.n = static_cast<int>(values.size());
  double acc = 0.0;
  for (double v : values) acc += v;
  s.mean = acc / static_cast<double>(s.n);
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(s.n - 1));
  return s;
}

}  // namespace synthlab
