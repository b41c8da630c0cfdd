#include "curriculum/compressor.hpp"

#include <zlib.h>

#include <string>

#include "curriculum/error.hpp"

namespace curriculum {

namespace {

// windowBits 15 + 16 selects the gzip wrapper; zlib leaves the name, mtime
// and extra fields empty, so output depends only on the input bytes.
constexpr int kGzipWindowBits = 15 + 16;
constexpr int kMemLevel = 8;

Bytes gzip(std::span<const std::uint8_t> input, int level) {
  z_stream stream{};
  if (deflateInit2(&stream, level, Z_DEFLATED, kGzipWindowBits, kMemLevel,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  Bytes out(deflateBound(&stream, static_cast<uLong>(input.size())) + 32);
  stream.next_in = const_cast<Bytef*>(input.data());
  stream.avail_in = static_cast<uInt>(input.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&stream, Z_FINISH);
  std::size_t written = stream.total_out;
  deflateEnd(&stream);
  if (rc != Z_STREAM_END) {
    throw Error("deflate failed with code " + std::to_string(rc));
  }
  out.resize(written);
  return out;
}

}  // namespace

Compressor gzip_compressor(int level) {
  if (level < 0 || level > 9) {
    throw std::invalid_argument("gzip level must be in [0, 9]");
  }
  return Compressor{"gzip@" + std::to_string(level),
                    [level](std::span<const std::uint8_t> in) { return gzip(in, level); }};
}

}  // namespace curriculum
