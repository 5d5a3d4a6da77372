#pragma once

#include <cstdint>

#include "gxe/model.hpp"
#include "gxe/rng.hpp"

namespace fixtures {

// Random dataset with z spanning [0, 1] exactly so the spline domain is the unit interval.
inline gxe::model::GxEDataset random_dataset(int n, int p, int q, std::uint64_t seed) {
  gxe::rng::RngStream rng(seed, 77);
  gxe::model::GxEDataset d;
  d.y.resize(n);
  d.z.resize(n);
  d.e.resize(n);
  d.x.resize(n, p);
  d.w.resize(n, q);
  for (int i = 0; i < n; ++i) {
    d.y(i) = rng.normal();
    d.z(i) = i == 0 ? 0.0 : (i == 1 ? 1.0 : rng.uniform());
    d.e(i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    for (int k = 0; k < p; ++k) d.x(i, k) = rng.normal();
    for (int k = 0; k < q; ++k) d.w(i, k) = rng.normal();
  }
  return d;
}

// Random non-zero state for every block in the layout.
inline gxe::model::ModelState random_state(const gxe::model::ModelLayout& layout, std::uint64_t seed) {
  gxe::rng::RngStream rng(seed, 78);
  auto s = gxe::model::zero_state(layout);
  for (auto& v : s.eta) v = rng.normal();
  for (auto& v : s.alpha) v = rng.normal();
  s.zeta0 = rng.normal();
  s.sigma2 = 0.5 + rng.uniform();
  for (auto f : gxe::model::kFamilies) {
    if (!layout.family(f).present) continue;
    auto& fs = s.family(f);
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) {
      for (Eigen::Index k = 0; k < fs.coef.cols(); ++k) fs.coef(j, k) = rng.normal();
      fs.phi[static_cast<std::size_t>(j)] = 1;
      fs.tau2(j) = 0.5 + rng.uniform();
    }
  }
  return s;
}

}  // namespace fixtures
