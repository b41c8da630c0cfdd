#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace curriculum {

using Bytes = std::vector<std::uint8_t>;

// A named byte-to-byte compression function. The name ends up in output
// metadata ("gzip@6"), so two runs can be checked for comparable settings.
struct Compressor {
  std::string name;
  std::function<Bytes(std::span<const std::uint8_t>)> compress;
};

// DEFLATE with gzip framing (no file name or timestamp in the header) at
// zlib's default level 6, i.e. what `gzip -n` writes.
Compressor gzip_compressor(int level = 6);

}  // namespace curriculum
