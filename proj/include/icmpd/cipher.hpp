#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icmpd/keyschedule.hpp"

namespace icmpd {

/// An 8-bit grayscale image, pixels in raster order.
struct PixelImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t pixel_count() const noexcept { return pixels.size(); }

    /// Throws std::invalid_argument unless pixels.size() == width * height.
    void validate() const;
};

/// Bit values (0/1), eight per pixel, least significant bit first.
using BitSequence = std::vector<std::uint8_t>;

/// Fixed diffusion seed c(0) of the scheme.
inline constexpr std::uint8_t kDiffusionIv = 172;

enum class Direction { forward, inverse };

/// Pixel p(i) expands to bits b(8i)..b(8i+7) with b(8i) the least significant.
BitSequence decompose_bits(std::span<const std::uint8_t> pixels);
BitSequence decompose_bits(const PixelImage& img);

/// Exact inverse of decompose_bits; length must be divisible by 8.
std::vector<std::uint8_t> compose_bits(std::span<const std::uint8_t> bits);

/// Forward: out(j) = bits(e_c(e_r(j))). Inverse undoes the forward pass.
BitSequence permute_bits(std::span<const std::uint8_t> bits, const Permutation& e_r,
                         const Permutation& e_c, Direction dir);

/// Forward: c(i) = (p(i)*s(i) + t(i)) mod 256; inverse uses s(i)^-1 mod 256.
std::vector<std::uint8_t> affine_substitute(std::span<const std::uint8_t> pixels,
                                            std::span<const std::uint8_t> s,
                                            std::span<const std::uint8_t> t, Direction dir);

/// Forward: c(i) = p(i) XOR r(i) XOR c(i-1) with c(-1) = iv; inverse undoes it.
std::vector<std::uint8_t> diffuse(std::span<const std::uint8_t> pixels,
                                  std::span<const std::uint8_t> r, std::uint8_t iv,
                                  Direction dir);

/// The classical modulo-add-then-XOR diffusion:
///   c(i) = ((p(i) + k(i)) mod 256) XOR k(i) XOR c(i-1), c(-1) = iv.
std::vector<std::uint8_t> classic_diffuse(std::span<const std::uint8_t> pixels,
                                          std::span<const std::uint8_t> k, std::uint8_t iv);

/// Full ICMPD pipeline: bit decomposition, bit permutation, affine
/// substitution, XOR-chained diffusion.
PixelImage encrypt(const PixelImage& img, const KeyStreams& streams,
                   std::uint8_t iv = kDiffusionIv);

/// Exact inverse of encrypt.
PixelImage decrypt(const PixelImage& cipher, const KeyStreams& streams,
                   std::uint8_t iv = kDiffusionIv);

}  // namespace icmpd
