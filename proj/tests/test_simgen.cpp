#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "gxe/errors.hpp"
#include "gxe/simgen.hpp"

using namespace gxe;
using namespace gxe::simgen;

namespace {

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

// Joint genotype law of two loci from independent haplotype pairs; indexed [2 - g1][2 - g2].
Eigen::Matrix3d joint_from_haplotypes(const LdSpec& ld) {
  const auto h = ld.haplotypes();  // AB, Ab, aB, ab
  const int minor1[4] = {1, 1, 0, 0}, minor2[4] = {1, 0, 1, 0};
  Eigen::Matrix3d joint = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) joint(2 - minor1[a] - minor1[b], 2 - minor2[a] - minor2[b]) += h[a] * h[b];
  return joint;
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("truth functions") {
  const TruthSpec t;
  CHECK(t.beta(1, 0.5) == doctest::Approx(-1.5));
  CHECK(t.beta(-1, 0.25) == doctest::Approx(2.0));
  CHECK(t.beta(0, 0.5) == doctest::Approx(2.0));
  CHECK(t.beta(2, 1.0) == doctest::Approx(-4.0));
  CHECK(t.beta(3, 0.3) == doctest::Approx(0.5));
  CHECK(t.beta(7, 0.9) == doctest::Approx(-1.1));
  CHECK(t.beta(8, 0.9) == 0.0);
  CHECK(t.zeta_of(1) == doctest::Approx(1.5));
  CHECK(t.zeta_of(5) == 0.0);
}

TEST_CASE("example 1 correlation structure and response") {
  rng::RngStream rng(1, 1);
  const auto sim = gen_example1(5000, 5, rng);
  const auto& x = sim.data.x;
  for (int j = 0; j < 5; ++j)
    for (int k = j + 1; k < 5; ++k) CHECK(std::abs(corr(x.col(j), x.col(k)) - std::pow(0.5, k - j)) < 0.05);
  CHECK(sim.data.q() == 2);
  CHECK(std::abs(corr(sim.data.w.col(0), sim.data.w.col(1)) - 0.5) < 0.05);
  CHECK(sim.data.z.minCoeff() >= 0.0);
  CHECK(sim.data.z.maxCoeff() <= 1.0);
  CHECK(((sim.data.e.array() == 0.0) || (sim.data.e.array() == 1.0)).all());
  const double resid_var = (sim.data.y - sim.mean).squaredNorm() / 5000.0;
  CHECK(resid_var == doctest::Approx(1.0).epsilon(0.06));

  // Mean written out from the model for one subject.
  const auto& d = sim.data;
  const auto& t = sim.truth;
  for (Eigen::Index i : {0, 17, 4999}) {
    const double z = d.z(i);
    double m = 2 * std::sin(2 * std::numbers::pi * z) - 0.5 * d.w(i, 0) + 1.0 * d.w(i, 1) + 1.5 * d.e(i);
    m += (2 * std::exp(2 * z - 1) + 0.6 * d.e(i)) * d.x(i, 0);
    m += (-6 * z * (1 - z) + 1.5 * d.e(i)) * d.x(i, 1);
    m += (-4 * z * z * z - 1.3 * d.e(i)) * d.x(i, 2);
    m += (0.5 + 1.0 * d.e(i)) * d.x(i, 3);
    m += (0.8 - 0.8 * d.e(i)) * d.x(i, 4);
    CHECK(sim.mean(i) == doctest::Approx(m).epsilon(1e-12));
    CHECK(truth_mean(d, t)(i) == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("zero noise gives the mean exactly") {
  rng::RngStream rng(2, 1);
  SimOptions opt;
  opt.noise_sd = 0.0;
  const auto sim = gen_example1(200, 20, rng, opt);
  CHECK(sim.data.y == sim.mean);
}

TEST_CASE("example 2 quartile coding") {
  rng::RngStream rng(3, 1);
  const auto sim = gen_example2(4000, 6, rng);
  for (int j = 0; j < 6; ++j) {
    const auto col = sim.data.x.col(j).array();
    CHECK(((col == 0.0) || (col == 1.0) || (col == 2.0)).all());
    CHECK((col == 0.0).cast<double>().mean() == doctest::Approx(0.25).epsilon(0.08));
    CHECK((col == 1.0).cast<double>().mean() == doctest::Approx(0.5).epsilon(0.04));
    CHECK((col == 2.0).cast<double>().mean() == doctest::Approx(0.25).epsilon(0.08));
  }
  Eigen::MatrixXd raw(5, 2);
  raw << 1, 3, 2, 3, 3, 3, 4, 3, 5, 3;
  const Eigen::MatrixXd coded = dichotomize_quartiles(raw);
  // Monotone in the raw value; ties fall in the middle band.
  for (int i = 1; i < 5; ++i) CHECK(coded(i, 0) >= coded(i - 1, 0));
  CHECK(coded(0, 0) == 0.0);
  CHECK(coded(4, 0) == 2.0);
  CHECK(coded.col(1).isOnes());
}

TEST_CASE("linkage construction") {
  const LdSpec ld{0.3, 0.3, 0.6};
  CHECK(ld.delta() == doctest::Approx(0.126));
  CHECK(ld.haplotypes()[0] == doctest::Approx(0.216));
  const auto h = ld.haplotypes();
  CHECK(h[0] + h[1] + h[2] + h[3] == doctest::Approx(1.0));

  CHECK_THROWS_AS((LdSpec{0.3, 0.05, 0.99}.validate()), ConfigError);
  rng::RngStream rng(4, 1);
  CHECK_THROWS_AS(gen_example3(100, 5, LdSpec{0.3, 0.05, 0.99}, rng), ConfigError);

  for (const LdSpec spec : {LdSpec{0.3, 0.3, 0.6}, LdSpec{0.2, 0.4, -0.3}, LdSpec{0.1, 0.25, 0.0}}) {
    const Eigen::Matrix3d m = conditional_genotype_matrix(spec);
    const Eigen::Matrix3d joint = joint_from_haplotypes(spec);
    for (int a = 0; a < 3; ++a) {
      CHECK(m.row(a).sum() == doctest::Approx(1.0));
      for (int b = 0; b < 3; ++b) CHECK(m(a, b) == doctest::Approx(joint(a, b) / joint.row(a).sum()).epsilon(1e-12));
    }
    // Locus-1 HWE through the matrix gives locus-2 HWE.
    const Eigen::RowVector3d hwe1(spec.q1 * spec.q1, 2 * spec.q1 * (1 - spec.q1), (1 - spec.q1) * (1 - spec.q1));
    const Eigen::RowVector3d hwe2(spec.q2 * spec.q2, 2 * spec.q2 * (1 - spec.q2), (1 - spec.q2) * (1 - spec.q2));
    CHECK(((hwe1 * m) - hwe2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("example 3 genotypes") {
  rng::RngStream rng(5, 1);
  const Eigen::MatrixXd g = ld_genotypes(10000, 4, LdSpec{0.3, 0.3, 0.6}, rng);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(g.col(j).mean() / 2.0 - 0.3) < 0.02);
    if (j > 0) CHECK(std::abs(corr(g.col(j - 1), g.col(j)) - 0.6) < 0.15);
  }

  // r = 0: adjacent loci independent.
  const Eigen::MatrixXd g0 = ld_genotypes(10000, 2, LdSpec{0.3, 0.3, 0.0}, rng);
  Eigen::Matrix3d counts = Eigen::Matrix3d::Zero();
  for (Eigen::Index i = 0; i < g0.rows(); ++i) counts(static_cast<int>(g0(i, 0)), static_cast<int>(g0(i, 1))) += 1;
  double chi2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double e = counts.row(a).sum() * counts.col(b).sum() / 10000.0;
      chi2 += (counts(a, b) - e) * (counts(a, b) - e) / e;
    }
  }
  CHECK(boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(4.0), chi2)) > 0.001);
}

TEST_CASE("genotype file subsampling") {
  const int rows = 60, loci = 5;
  Eigen::MatrixXd g(rows, loci);
  for (int i = 0; i < rows; ++i) {
    int v = i;
    for (int k = 0; k < loci; ++k) {
      g(i, k) = v % 3;
      v /= 3;
    }
  }
  const auto path = (std::filesystem::temp_directory_path() / "gxe_test_genotypes.csv").string();
  {
    std::ofstream out(path);
    out << "snp1,snp2,snp3,snp4,snp5\n";
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < loci; ++k) out << (k ? "," : "") << g(i, k);
      out << '\n';
    }
  }
  const Eigen::MatrixXd read = read_genotype_csv(path);
  CHECK(read == g);

  rng::RngStream a(6, 1), b(6, 1);
  const auto s1 = gen_from_genotypes(read, rows, loci, a);
  const auto s2 = gen_from_genotypes(read, rows, loci, b);
  CHECK(s1.data.x == s2.data.x);
  std::vector<int> keys;
  for (int i = 0; i < rows; ++i) {
    int key = 0;
    for (int k = loci - 1; k >= 0; --k) key = key * 3 + static_cast<int>(s1.data.x(i, k));
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  for (int i = 0; i < rows; ++i) CHECK(keys[i] == i);

  const auto sub = gen_from_genotypes(read, 20, 3, a);
  CHECK(sub.data.n() == 20);
  CHECK(sub.data.p() == 3);
  CHECK_THROWS_AS(gen_from_genotypes(read, rows + 1, loci, a), DataError);
  CHECK_THROWS_AS(gen_from_genotypes(read, 10, loci + 1, a), DataError);

  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_AS(read_genotype_csv(path), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("generator dispatch") {
  rng::RngStream rng(7, 1);
  CHECK_THROWS_AS(generate(5, 10, 10, rng), ConfigError);
  CHECK_THROWS_AS(generate(4, 10, 10, rng), ConfigError);
  const auto e3 = generate(3, 50, 10, rng);
  CHECK(e3.data.p() == 10);
  CHECK(((e3.data.x.array() >= 0.0) && (e3.data.x.array() <= 2.0)).all());
}

}
