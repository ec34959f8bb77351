#pragma once

#include <filesystem>

#include "icmpd/cipher.hpp"

namespace icmpd {

/// Binary PGM (P5) with maxval 255 only. Header comments ('#') are accepted
/// on read; the writer emits "P5\n<width> <height>\n255\n" followed by the
/// raw pixel payload.
PixelImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PixelImage& img);

}  // namespace icmpd
