#pragma once

#include <vector>

namespace tileopt {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` points. Rules are computed once and cached.
const GaussRule& gauss_legendre(int order);

// Composite rule on [a, b]: nodes and weights appended to the output vectors.
void append_gauss(double a, double b, int order, std::vector<double>& x,
                  std::vector<double>& w);

// Breakpoints of a geometric mesh on [0, 1] graded toward 0:
// 0, ratio^levels, ..., ratio, 1.
std::vector<double> graded_breaks(int levels, double ratio);

// Graded toward both ends of [0, 1].
std::vector<double> two_sided_graded_breaks(int levels, double ratio);

}  // namespace tileopt
