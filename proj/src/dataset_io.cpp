#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>

#include "gxe/errors.hpp"
#include "gxe/model.hpp"

namespace gxe::model {

namespace {

double parse_cell(const std::string& cell, std::size_t line, const std::string& column) {
  const std::string t = boost::algorithm::trim_copy(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw DataError("line " + std::to_string(line) + ", column '" + column + "': cannot parse '" + t + "'");
  }
  return v;
}

// Index of column `prefix1 .. prefixK`, requiring a contiguous run starting at 1.
std::vector<std::size_t> numbered(const std::map<std::string, std::size_t>& pos, const std::string& prefix) {
  std::vector<std::size_t> out;
  for (int k = 1;; ++k) {
    auto it = pos.find(prefix + std::to_string(k));
    if (it == pos.end()) break;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

GxEDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file " + path + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  boost::algorithm::trim_right_if(line, boost::is_any_of("\r"));
  std::vector<std::string> header;
  boost::algorithm::split(header, line, boost::is_any_of(","));
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = boost::algorithm::trim_copy(header[i]);
    if (!pos.emplace(name, i).second) throw DataError("duplicate column '" + name + "' in " + path);
  }
  for (const char* required : {"y", "z", "e"}) {
    if (!pos.count(required)) throw DataError(std::string("dataset is missing required column '") + required + "'");
  }
  const auto wcols = numbered(pos, "w");
  const auto xcols = numbered(pos, "x");
  if (wcols.size() + xcols.size() + 3 != header.size()) {
    throw DataError("dataset header has unrecognized columns (expected y,z,e,w1..wq,x1..xp)");
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  std::vector<std::string> cells;
  while (std::getline(in, line)) {
    ++lineno;
    boost::algorithm::trim_right_if(line, boost::is_any_of("\r"));
    if (boost::algorithm::trim_copy(line).empty()) continue;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], lineno, header[c]);
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  GxEDataset d;
  d.y.resize(n);
  d.z.resize(n);
  d.e.resize(n);
  d.w.resize(n, static_cast<Eigen::Index>(wcols.size()));
  d.x.resize(n, static_cast<Eigen::Index>(xcols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    d.y(i) = row[pos["y"]];
    d.z(i) = row[pos["z"]];
    d.e(i) = row[pos["e"]];
    for (std::size_t k = 0; k < wcols.size(); ++k) d.w(i, static_cast<Eigen::Index>(k)) = row[wcols[k]];
    for (std::size_t k = 0; k < xcols.size(); ++k) d.x(i, static_cast<Eigen::Index>(k)) = row[xcols[k]];
  }
  d.validate();
  return d;
}

void write_dataset_csv(const std::string& path, const GxEDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file " + path);
  out << "y,z,e";
  for (Eigen::Index k = 0; k < data.q(); ++k) out << ",w" << k + 1;
  for (Eigen::Index k = 0; k < data.p(); ++k) out << ",x" << k + 1;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    put(data.y(i));
    out << ',';
    put(data.z(i));
    out << ',';
    put(data.e(i));
    for (Eigen::Index k = 0; k < data.q(); ++k) {
      out << ',';
      put(data.w(i, k));
    }
    for (Eigen::Index k = 0; k < data.p(); ++k) {
      out << ',';
      put(data.x(i, k));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace gxe::model
