#pragma once

#include <cmath>
#include <vector>

#include "boundselect/catalog.hpp"
#include "boundselect/model.hpp"
#include "boundselect/rng.hpp"

namespace bst {

using boundselect::Mat;
using boundselect::ReducedForm;
using boundselect::Rng;
using boundselect::Vec;

// Gamma(1) draws normalised: uniform on the simplex of size k.
inline std::vector<double> simplex(Rng& rng, int k, double floor = 0.0) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform()) + floor;
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

// Binary-IV coordinates from two random strata; cells ordered (y + 2d).
inline Vec random_iv_p(Rng& rng, double floor = 0.05) {
  Vec p(6);
  for (int z = 0; z < 2; ++z) {
    const auto cells = simplex(rng, 4, floor);
    for (int c = 1; c < 4; ++c) p(3 * z + c - 1) = cells[c];
  }
  return p;
}

// Stratified multinomial covariance of sqrt(n)(p_hat - p) with cells_per
// free cells per stratum.
inline Mat stratified_sigma(const Vec& p, int cells_per, double q1 = 0.5) {
  Mat s = Mat::Zero(p.size(), p.size());
  const int strata = static_cast<int>(p.size()) / cells_per;
  for (int z = 0; z < strata; ++z) {
    const double q = z == 0 ? 1.0 - q1 : q1;
    const auto blk = p.segment(z * cells_per, cells_per);
    s.block(z * cells_per, z * cells_per, cells_per, cells_per) =
        (Mat(blk.asDiagonal()) - blk * blk.transpose()) / q;
  }
  return s;
}

inline ReducedForm iv_reduced_form(const Vec& p, long n = 100) {
  ReducedForm rf;
  rf.n = n;
  rf.p_hat = p;
  rf.sigma_hat = stratified_sigma(p, 3);
  return rf;
}

inline Vec random_normal(Rng& rng, int k, double scale) {
  Vec v(k);
  for (int i = 0; i < k; ++i) v(i) = scale * rng.normal();
  return v;
}

inline const Vec kCalibrated = (Vec(6) << 0.08, 0.001, 0.001, 0.073, 0.139, 0.473).finished();

}  // namespace bst
