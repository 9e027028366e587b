#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "hudtrace/stats.hpp"

namespace hudtrace {

std::vector<double> rank(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("rank of an empty list");
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("rank input contains NaN");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) throw UndefinedCorrelation("zero rank variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman inputs differ in length");
  if (x.size() < 3) throw std::invalid_argument("spearman needs at least 3 pairs");
}

}  // namespace

double spearman_t_pvalue(double r_s, int n) {
  if (n < 3) throw std::invalid_argument("p-value needs n >= 3");
  if (std::abs(r_s) >= 1) return 0.0;
  const double df = n - 2;
  const double t = r_s * std::sqrt(df / (1 - r_s * r_s));
  const boost::math::students_t dist(df);
  return std::clamp(2 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  CorrelationResult r;
  r.n = static_cast<int>(x.size());
  r.r_s = pearson(rank(x), rank(y));
  r.p = spearman_t_pvalue(r.r_s, r.n);
  return r;
}

double spearman_permutation_p(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  if (x.size() > 10) throw std::invalid_argument("exhaustive permutation limited to n <= 10");
  const auto rx = rank(x);
  const auto ry = rank(y);
  const double observed = std::abs(pearson(rx, ry));
  std::vector<std::size_t> perm(ry.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> shuffled(ry.size());
  long long hits = 0, total = 0;
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = ry[perm[i]];
    if (std::abs(pearson(rx, shuffled)) >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::string_view strength_name(Strength s) noexcept {
  switch (s) {
    case Strength::Weak: return "weak";
    case Strength::Medium: return "medium";
    case Strength::Strong: return "strong";
  }
  return "weak";
}

Strength strength_of(double r_s) noexcept {
  const double a = std::abs(r_s);
  if (a < 0.3) return Strength::Weak;
  if (a < 0.5) return Strength::Medium;
  return Strength::Strong;
}

std::string significance_band(double p) {
  if (p < 0.001) return "<0.001";
  if (p < 0.01) return "<0.01";
  if (p < 0.05) return "<0.05";
  return "n.s.";
}

}  // namespace hudtrace
