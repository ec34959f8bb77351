#include "icmpd/cipher.hpp"

#include <stdexcept>

#include "icmpd/solver.hpp"

namespace icmpd {

void PixelImage::validate() const {
    if (pixels.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("PixelImage: pixel count does not match dimensions");
    }
}

BitSequence decompose_bits(std::span<const std::uint8_t> pixels) {
    BitSequence bits(pixels.size() * 8);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const std::uint8_t p = pixels[i];
        for (unsigned k = 0; k < 8; ++k) {
            bits[8 * i + k] = static_cast<std::uint8_t>((p >> k) & 1u);
        }
    }
    return bits;
}

BitSequence decompose_bits(const PixelImage& img) {
    img.validate();
    return decompose_bits(std::span<const std::uint8_t>(img.pixels));
}

std::vector<std::uint8_t> compose_bits(std::span<const std::uint8_t> bits) {
    if (bits.size() % 8 != 0) {
        throw std::invalid_argument("compose_bits: length not divisible by 8");
    }
    std::vector<std::uint8_t> pixels(bits.size() / 8);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        std::uint8_t v = 0;
        for (unsigned k = 0; k < 8; ++k) {
            v |= static_cast<std::uint8_t>((bits[8 * i + k] & 1u) << k);
        }
        pixels[i] = v;
    }
    return pixels;
}

BitSequence permute_bits(std::span<const std::uint8_t> bits, const Permutation& e_r,
                         const Permutation& e_c, Direction dir) {
    if (e_r.size() != bits.size() || e_c.size() != bits.size()) {
        throw std::invalid_argument("permute_bits: permutation length mismatch");
    }
    BitSequence out(bits.size());
    if (dir == Direction::forward) {
        for (std::size_t j = 0; j < bits.size(); ++j) {
            out[j] = bits[e_c[e_r[j]]];
        }
    } else {
        for (std::size_t j = 0; j < bits.size(); ++j) {
            out[e_c[e_r[j]]] = bits[j];
        }
    }
    return out;
}

std::vector<std::uint8_t> affine_substitute(std::span<const std::uint8_t> pixels,
                                            std::span<const std::uint8_t> s,
                                            std::span<const std::uint8_t> t, Direction dir) {
    if (s.size() != pixels.size() || t.size() != pixels.size()) {
        throw std::invalid_argument("affine_substitute: stream length mismatch");
    }
    std::vector<std::uint8_t> out(pixels.size());
    if (dir == Direction::forward) {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            if ((s[i] & 1u) == 0) {
                throw std::invalid_argument("affine_substitute: even multiplier has no inverse");
            }
            out[i] = static_cast<std::uint8_t>(pixels[i] * s[i] + t[i]);
        }
    } else {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const std::uint8_t inv = mod_inverse(s[i]);
            out[i] = static_cast<std::uint8_t>(
                static_cast<std::uint8_t>(pixels[i] - t[i]) * inv);
        }
    }
    return out;
}

std::vector<std::uint8_t> diffuse(std::span<const std::uint8_t> pixels,
                                  std::span<const std::uint8_t> r, std::uint8_t iv,
                                  Direction dir) {
    if (r.size() != pixels.size()) {
        throw std::invalid_argument("diffuse: stream length mismatch");
    }
    std::vector<std::uint8_t> out(pixels.size());
    std::uint8_t prev = iv;
    if (dir == Direction::forward) {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            prev = static_cast<std::uint8_t>(pixels[i] ^ r[i] ^ prev);
            out[i] = prev;
        }
    } else {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(pixels[i] ^ r[i] ^ prev);
            prev = pixels[i];
        }
    }
    return out;
}

std::vector<std::uint8_t> classic_diffuse(std::span<const std::uint8_t> pixels,
                                          std::span<const std::uint8_t> k, std::uint8_t iv) {
    if (k.size() != pixels.size()) {
        throw std::invalid_argument("classic_diffuse: stream length mismatch");
    }
    std::vector<std::uint8_t> out(pixels.size());
    std::uint8_t prev = iv;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        prev = static_cast<std::uint8_t>(
            static_cast<std::uint8_t>(pixels[i] + k[i]) ^ k[i] ^ prev);
        out[i] = prev;
    }
    return out;
}

namespace {

void check_stream_dimensions(const PixelImage& img, const KeyStreams& streams) {
    img.validate();
    const std::size_t length = img.pixel_count();
    if (streams.e_r.size() != 8 * length || streams.e_c.size() != 8 * length ||
        streams.s.size() != length || streams.t.size() != length ||
        streams.r.size() != length) {
        throw std::invalid_argument("cipher: keystream dimensions do not match image");
    }
}

}  // namespace

PixelImage encrypt(const PixelImage& img, const KeyStreams& streams, std::uint8_t iv) {
    check_stream_dimensions(img, streams);
    const BitSequence bits = decompose_bits(img);
    const BitSequence permuted = permute_bits(bits, streams.e_r, streams.e_c, Direction::forward);
    const std::vector<std::uint8_t> masked =
        affine_substitute(compose_bits(permuted), streams.s, streams.t, Direction::forward);
    PixelImage out{img.width, img.height, diffuse(masked, streams.r, iv, Direction::forward)};
    return out;
}

PixelImage decrypt(const PixelImage& cipher, const KeyStreams& streams, std::uint8_t iv) {
    check_stream_dimensions(cipher, streams);
    const std::vector<std::uint8_t> masked =
        diffuse(cipher.pixels, streams.r, iv, Direction::inverse);
    const std::vector<std::uint8_t> permuted_pixels =
        affine_substitute(masked, streams.s, streams.t, Direction::inverse);
    const BitSequence permuted = decompose_bits(std::span<const std::uint8_t>(permuted_pixels));
    const BitSequence bits = permute_bits(permuted, streams.e_r, streams.e_c, Direction::inverse);
    PixelImage out{cipher.width, cipher.height, compose_bits(bits)};
    return out;
}

}  // namespace icmpd
