#include "gxe/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include <boost/algorithm/string.hpp>

#include "gxe/errors.hpp"
#include "gxe/stats.hpp"

namespace gxe::simgen {

double TruthSpec::beta(int gene, double z) const {
  switch (gene) {
    case -1: return 2.0 * std::sin(2.0 * std::numbers::pi * z);
    case 0: return 2.0 * std::exp(2.0 * z - 1.0);
    case 1: return -6.0 * z * (1.0 - z);
    case 2: return -4.0 * z * z * z;
    default: break;
  }
  if (is_constant(gene)) return constants[static_cast<std::size_t>(gene - 3)];
  return 0.0;
}

double TruthSpec::zeta_of(int gene) const { return has_env(gene) ? zeta[static_cast<std::size_t>(gene)] : 0.0; }

double LdSpec::delta() const { return r * std::sqrt(q1 * (1.0 - q1) * q2 * (1.0 - q2)); }

std::array<double, 4> LdSpec::haplotypes() const {
  const double d = delta();
  return {q1 * q2 + d, q1 * (1.0 - q2) - d, (1.0 - q1) * q2 - d, (1.0 - q1) * (1.0 - q2) + d};
}

void LdSpec::validate() const {
  if (!(q1 > 0.0 && q1 <= 0.5) || !(q2 > 0.0 && q2 <= 0.5)) throw ConfigError("minor allele frequencies must lie in (0, 0.5]");
  if (!(r > -1.0 && r < 1.0)) throw ConfigError("LD correlation must lie in (-1, 1)");
  for (double h : haplotypes()) {
    if (h < 0.0 || h > 1.0) {
      throw ConfigError("infeasible LD specification: a haplotype frequency falls outside [0, 1]");
    }
  }
}

Eigen::Matrix3d conditional_genotype_matrix(const LdSpec& ld) {
  ld.validate();
  const auto h = ld.haplotypes();
  const double b_given_a = h[0] / ld.q1;
  const double b_given_na = h[2] / (1.0 - ld.q1);
  auto pair = [](double u, double v) {
    return Eigen::RowVector3d(u * v, u * (1.0 - v) + (1.0 - u) * v, (1.0 - u) * (1.0 - v));
  };
  Eigen::Matrix3d m;
  m.row(0) = pair(b_given_a, b_given_a);
  m.row(1) = pair(b_given_a, b_given_na);
  m.row(2) = pair(b_given_na, b_given_na);
  return m;
}

Eigen::VectorXd truth_mean(const model::GxEDataset& d, const TruthSpec& t) {
  Eigen::VectorXd mu(d.n());
  const int q = static_cast<int>(std::min<Eigen::Index>(d.q(), 2));
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double z = d.z(i);
    double m = t.beta(-1, z) + t.zeta0 * d.e(i);
    for (int k = 0; k < q; ++k) m += t.alpha[static_cast<std::size_t>(k)] * d.w(i, k);
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      const int g = static_cast<int>(j);
      m += (t.beta(g, z) + t.zeta_of(g) * d.e(i)) * d.x(i, j);
    }
    mu(i) = m;
  }
  return mu;
}

Eigen::MatrixXd ar_gaussian(int n, int p, double rho, rng::RngStream& rng) {
  if (n < 1 || p < 1) throw ConfigError("simulation needs n >= 1 and p >= 1");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("AR correlation must satisfy |rho| < 1");
  const double s = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    for (int j = 1; j < p; ++j) x(i, j) = rho * x(i, j - 1) + s * rng.normal();
  }
  return x;
}

Eigen::MatrixXd dichotomize_quartiles(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<double> v(x.col(j).data(), x.col(j).data() + x.rows());
    std::sort(v.begin(), v.end());
    const double q1 = stats::quantile_sorted(v, 0.25), q3 = stats::quantile_sorted(v, 0.75);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double val = x(i, j);
      out(i, j) = val > q3 ? 2.0 : (val < q1 ? 0.0 : 1.0);
    }
  }
  return out;
}

namespace {

int draw_category(const Eigen::RowVector3d& probs, rng::RngStream& rng) {
  const double u = rng.uniform();
  if (u < probs(0)) return 0;
  if (u < probs(0) + probs(1)) return 1;
  return 2;
}

}  // namespace

Eigen::MatrixXd ld_genotypes(int n, int p, const LdSpec& ld, rng::RngStream& rng) {
  if (n < 1 || p < 1) throw ConfigError("simulation needs n >= 1 and p >= 1");
  ld.validate();
  const Eigen::Matrix3d first = conditional_genotype_matrix(ld);
  const LdSpec later{ld.q2, ld.q2, ld.r};
  const Eigen::Matrix3d rest = conditional_genotype_matrix(later);
  const double q = ld.q1;
  const Eigen::RowVector3d hwe(q * q, 2.0 * q * (1.0 - q), (1.0 - q) * (1.0 - q));
  Eigen::MatrixXd g(n, p);
  for (int i = 0; i < n; ++i) {
    int row = draw_category(hwe, rng);
    g(i, 0) = 2 - row;
    for (int j = 1; j < p; ++j) {
      row = draw_category((j == 1 ? first : rest).row(row), rng);
      g(i, j) = 2 - row;
    }
  }
  return g;
}

SimData attach_response(Eigen::MatrixXd x, const TruthSpec& truth_in, const SimOptions& opt, rng::RngStream& rng) {
  if (!(opt.e_prob >= 0.0 && opt.e_prob <= 1.0)) throw ConfigError("E probability must lie in [0, 1]");
  if (!(opt.noise_sd >= 0.0)) throw ConfigError("noise sd must be non-negative");
  if (!(std::abs(opt.w_rho) < 1.0)) throw ConfigError("covariate correlation must satisfy |rho| < 1");
  const auto n = x.rows();
  SimData s;
  s.truth = truth_in;
  s.truth.n_genes = static_cast<int>(x.cols());
  s.truth.noise_sd = opt.noise_sd;
  auto& d = s.data;
  d.x = std::move(x);
  d.y = Eigen::VectorXd::Zero(n);
  d.z.resize(n);
  d.e.resize(n);
  d.w.resize(n, 2);
  const double ws = std::sqrt(1.0 - opt.w_rho * opt.w_rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.z(i) = rng.uniform();
    d.e(i) = rng.uniform() < opt.e_prob ? 1.0 : 0.0;
    const double a = rng.normal(), b = rng.normal();
    d.w(i, 0) = a;
    d.w(i, 1) = opt.w_rho * a + ws * b;
  }
  s.mean = truth_mean(d, s.truth);
  d.y = s.mean;
  for (Eigen::Index i = 0; i < n; ++i) d.y(i) += opt.noise_sd * rng.normal();
  return s;
}

SimData gen_example1(int n, int p, rng::RngStream& rng, const SimOptions& opt) {
  return attach_response(ar_gaussian(n, p, opt.rho, rng), TruthSpec{}, opt, rng);
}

SimData gen_example2(int n, int p, rng::RngStream& rng, const SimOptions& opt) {
  return attach_response(dichotomize_quartiles(ar_gaussian(n, p, opt.rho, rng)), TruthSpec{}, opt, rng);
}

SimData gen_example3(int n, int p, const LdSpec& ld, rng::RngStream& rng, const SimOptions& opt) {
  return attach_response(ld_genotypes(n, p, ld, rng), TruthSpec{}, opt, rng);
}

Eigen::MatrixXd read_genotype_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open genotype file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("genotype file " + path + " is empty");
  std::vector<std::string> cells;
  boost::algorithm::split(cells, line, boost::is_any_of(","));
  const std::size_t cols = cells.size();
  std::vector<double> values;
  std::size_t rows = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    boost::algorithm::trim(line);
    if (line.empty()) continue;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    if (cells.size() != cols) throw DataError("genotype file line " + std::to_string(lineno) + ": wrong field count");
    for (auto& c : cells) {
      boost::algorithm::trim(c);
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size() || !std::isfinite(v)) {
        throw DataError("genotype file line " + std::to_string(lineno) + ": cannot parse '" + c + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError("genotype file " + path + " has no data rows");
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    }
  }
  return g;
}

SimData gen_from_genotypes(const Eigen::MatrixXd& genotypes, int n_sub, int p, rng::RngStream& rng,
                           const SimOptions& opt) {
  if (n_sub < 1 || n_sub > genotypes.rows()) {
    throw DataError("genotype file has " + std::to_string(genotypes.rows()) + " rows, cannot subsample " +
                    std::to_string(n_sub));
  }
  if (p < 1 || p > genotypes.cols()) {
    throw DataError("genotype file has " + std::to_string(genotypes.cols()) + " loci, requested " + std::to_string(p));
  }
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(genotypes.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  // Partial Fisher-Yates shuffle.
  for (int i = 0; i < n_sub; ++i) {
    const auto span = rows.size() - static_cast<std::size_t>(i);
    const auto k = static_cast<std::size_t>(i) + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * span));
    std::swap(rows[static_cast<std::size_t>(i)], rows[k]);
  }
  Eigen::MatrixXd x(n_sub, p);
  for (int i = 0; i < n_sub; ++i) x.row(i) = genotypes.row(rows[static_cast<std::size_t>(i)]).head(p);
  return attach_response(std::move(x), TruthSpec{}, opt, rng);
}

SimData generate(int example, int n, int p, rng::RngStream& rng, const SimOptions& opt, const LdSpec& ld,
                 const std::string& genotype_path) {
  switch (example) {
    case 1: return gen_example1(n, p, rng, opt);
    case 2: return gen_example2(n, p, rng, opt);
    case 3: return gen_example3(n, p, ld, rng, opt);
    case 4:
      if (genotype_path.empty()) throw ConfigError("example 4 needs a genotype file");
      return gen_from_genotypes(read_genotype_csv(genotype_path), n, p, rng, opt);
    default: throw ConfigError("example must be 1, 2, 3 or 4");
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_truth_csv(const std::string& path, const TruthSpec& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "term,index,kind,value\n";
  out << "beta,0,varying,NA\n";
  for (int j = 0; j < t.n_genes; ++j) {
    out << "beta," << j + 1 << ',';
    if (t.is_varying(j)) {
      out << "varying,NA\n";
    } else {
      out << (t.is_constant(j) ? "constant," : "zero,") << num(t.beta(j, 0.0)) << '\n';
    }
  }
  for (int k = 0; k < 2; ++k) out << "alpha," << k + 1 << ",scalar," << num(t.alpha[static_cast<std::size_t>(k)]) << '\n';
  out << "zeta,0,scalar," << num(t.zeta0) << '\n';
  for (int j = 0; j < t.n_genes; ++j) out << "zeta," << j + 1 << ",scalar," << num(t.zeta_of(j)) << '\n';
  out << "noise_sd,0,scalar," << num(t.noise_sd) << '\n';
}

void write_truth_curves_csv(const std::string& path, const TruthSpec& t, const std::vector<double>& grid) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "z,beta0,beta1,beta2,beta3\n";
  for (double z : grid) {
    out << num(z);
    for (int j = -1; j < 3; ++j) out << ',' << num(t.beta(j, z));
    out << '\n';
  }
}

}  // namespace gxe::simgen
