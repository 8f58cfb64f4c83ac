#include "tileopt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "tileopt/errors.hpp"

namespace tileopt {

namespace {

GaussRule build_rule(int order) {
  GaussRule rule;
  const std::vector<double> positive = boost::math::legendre_p_zeros<double>(order);
  for (double z : positive) {
    const double dp = boost::math::legendre_p_prime(order, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes.push_back(z);
    rule.weights.push_back(w);
    if (z != 0.0) {
      rule.nodes.push_back(-z);
      rule.weights.push_back(w);
    }
  }
  std::vector<std::size_t> idx(rule.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
  GaussRule sorted;
  for (std::size_t i : idx) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  return sorted;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 200) {
    throw ValidationError("quadrature order must be in [1, 200]");
  }
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

void append_gauss(double a, double b, int order, std::vector<double>& x,
                  std::vector<double>& w) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    x.push_back(mid + half * rule.nodes[i]);
    w.push_back(half * rule.weights[i]);
  }
}

std::vector<double> graded_breaks(int levels, double ratio) {
  std::vector<double> breaks{0.0};
  for (int k = levels; k >= 1; --k) breaks.push_back(std::pow(ratio, k));
  breaks.push_back(1.0);
  return breaks;
}

std::vector<double> two_sided_graded_breaks(int levels, double ratio) {
  std::vector<double> left;
  for (double b : graded_breaks(levels, ratio)) left.push_back(0.5 * b);
  std::vector<double> breaks = left;
  for (auto it = left.rbegin() + 1; it != left.rend(); ++it) breaks.push_back(1.0 - *it);
  return breaks;
}

}  // namespace tileopt
