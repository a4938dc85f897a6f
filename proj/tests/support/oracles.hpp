#pragma once

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "boolsearch/query.hpp"

// Reference evaluations in 50-digit binary floating point, written directly from the
// closed forms and independent of the library code.
namespace testing_support::oracle {

using Real = boost::multiprecision::cpp_bin_float_50;

inline Real precision_term(Real r, Real p, Real M, Real s, Real alpha) {
  if (p == 0) return 0;
  const Real weight = (alpha == 0) ? Real(1) : (r == 0 ? Real(0) : boost::multiprecision::pow(r, alpha));
  return M * weight * boost::multiprecision::log(1 + s * p) / boost::multiprecision::log(1 + s);
}

inline Real full(Real r, Real p, Real M, Real s, Real alpha) { return M * r + precision_term(r, p, M, s, alpha); }

inline Real no_log_scaling(Real r, Real p, Real M, Real alpha) {
  const Real weight = (alpha == 0) ? Real(1) : (r == 0 ? Real(0) : boost::multiprecision::pow(r, alpha));
  return M * r + M * weight * p;
}

inline Real no_recall_dependency(Real r, Real p, Real M) { return M * r + M * p; }

inline Real no_precision(Real r, Real M) { return M * r; }

inline Real f_beta(Real r, Real p, Real beta) {
  const Real b2 = beta * beta;
  const Real den = b2 * r + p;
  if (den == 0) return 0;
  return (1 + b2) * r * p / den;
}

inline Real f3_based(Real r, Real p, Real M, Real beta) { return M * f_beta(r, p, beta); }

// Population statistics of a group, for advantage checks.
inline void mean_std(const std::vector<double>& xs, Real& mean, Real& sd) {
  Real sum = 0;
  for (double x : xs) sum += x;
  mean = sum / Real(xs.size());
  Real ss = 0;
  for (double x : xs) ss += (Real(x) - mean) * (Real(x) - mean);
  sd = boost::multiprecision::sqrt(ss / Real(xs.size()));
}

// Second, explicit-stack traversal for complexity counts.
struct Counts {
  std::size_t nodes = 0;
  std::size_t depth = 0;
  std::size_t terms = 0;
};

inline Counts count_iteratively(const boolsearch::Node& root) {
  Counts c;
  std::vector<std::pair<const boolsearch::Node*, std::size_t>> stack{{&root, 1}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    ++c.nodes;
    c.depth = std::max(c.depth, depth);
    if (node->is_term()) {
      ++c.terms;
    } else {
      for (const auto& child : node->operation().children) stack.push_back({&child, depth + 1});
    }
  }
  return c;
}

}  // namespace testing_support::oracle
