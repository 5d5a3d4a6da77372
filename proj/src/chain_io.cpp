#include "gxe/chain_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gxe/errors.hpp"

namespace gxe::chain_io {

static_assert(std::endian::native == std::endian::little, "chain files are written little-endian");

namespace {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("chain file truncated");
  return v;
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  if (len > (1u << 20)) throw DataError("chain file: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw DataError("chain file truncated");
  return s;
}

}  // namespace

void write_chain(const std::string& path, const gibbs::ChainOutput& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write chain file " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  const auto& l = chain.layout;
  put_string(out, std::string(model::method_name(l.method)));
  put<std::int32_t>(out, l.spline.degree);
  put<std::int32_t>(out, l.spline.interior_knots);
  put<double>(out, l.spline.domain_lo);
  put<double>(out, l.spline.domain_hi);
  put<std::int32_t>(out, l.n_genes);
  put<std::int32_t>(out, l.n_covariates);
  put<std::uint64_t>(out, chain.seed);
  put<std::uint64_t>(out, chain.stream);
  put<std::int64_t>(out, chain.iterations);
  put<std::int64_t>(out, chain.burn_in);
  put<std::int64_t>(out, chain.thin);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(chain.draws.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(chain.draws.cols()));
  for (const auto& name : chain.index.names) put_string(out, name);
  out.write(reinterpret_cast<const char*>(chain.draws.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(chain.draws.size())));
  if (!out) throw DataError("write failed for " + path);
}

gibbs::ChainOutput read_chain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open chain file " + path);
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw DataError(path + " is not a chain file");
  if (get<std::uint32_t>(in) != kVersion) throw DataError("unsupported chain file version in " + path);

  const model::Method method = model::parse_method(get_string(in));
  splines::SplineConfig spline;
  spline.degree = get<std::int32_t>(in);
  spline.interior_knots = get<std::int32_t>(in);
  spline.domain_lo = get<double>(in);
  spline.domain_hi = get<double>(in);
  const int p = get<std::int32_t>(in);
  const int q = get<std::int32_t>(in);

  gibbs::ChainOutput chain;
  chain.layout = model::ModelLayout::make(method, spline, p, q);
  chain.index = gibbs::ParamIndex::make(chain.layout);
  chain.seed = get<std::uint64_t>(in);
  chain.stream = get<std::uint64_t>(in);
  chain.iterations = get<std::int64_t>(in);
  chain.burn_in = get<std::int64_t>(in);
  chain.thin = get<std::int64_t>(in);
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (cols != static_cast<std::uint64_t>(chain.index.size())) throw DataError("chain file column count mismatch");
  for (std::uint64_t c = 0; c < cols; ++c) {
    if (get_string(in) != chain.index.names[c]) throw DataError("chain file column names do not match its layout");
  }
  chain.draws.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(chain.draws.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(chain.draws.size())));
  if (!in) throw DataError("chain file truncated");
  return chain;
}

}  // namespace gxe::chain_io
