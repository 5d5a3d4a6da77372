#pragma once

#include <string>

#include "gxe/gibbs.hpp"

namespace gxe::chain_io {

inline constexpr char kMagic[8] = {'G', 'X', 'E', 'C', 'H', 'A', 'I', 'N'};
inline constexpr std::uint32_t kVersion = 1;

/// Binary columnar chain file; layout described in docs/chain_format.md.
void write_chain(const std::string& path, const gibbs::ChainOutput& chain);
gibbs::ChainOutput read_chain(const std::string& path);

}  // namespace gxe::chain_io
