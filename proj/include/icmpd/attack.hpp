#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "icmpd/cipher.hpp"
#include "icmpd/solver.hpp"

namespace icmpd {

/// Abstract chosen-plaintext encryption oracle. Every query goes through
/// query(), which counts it; access is meant to be serialized.
class EncryptionOracle {
public:
    virtual ~EncryptionOracle() = default;

    PixelImage query(const PixelImage& plain);
    std::uint64_t query_count() const noexcept { return count_; }

    virtual std::uint32_t width() const noexcept = 0;
    virtual std::uint32_t height() const noexcept = 0;
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width()) * height();
    }

protected:
    virtual PixelImage encrypt_image(const PixelImage& plain) = 0;

private:
    std::uint64_t count_ = 0;
};

/// In-process oracle wrapping the cipher under a fixed key and image size.
class LocalOracle final : public EncryptionOracle {
public:
    LocalOracle(const SecretKey& key, std::uint32_t width, std::uint32_t height);
    LocalOracle(KeyStreams streams, std::uint32_t width, std::uint32_t height);

    std::uint32_t width() const noexcept override { return width_; }
    std::uint32_t height() const noexcept override { return height_; }

    /// White-box access for tests; the attack itself never touches this.
    const KeyStreams& streams() const noexcept { return streams_; }

protected:
    PixelImage encrypt_image(const PixelImage& plain) override;

private:
    KeyStreams streams_;
    std::uint32_t width_ = 0;
    std::uint32_t height_ = 0;
};

/// v(i) = c(i) XOR c(i-1) with c(-1) = iv; cancels the diffusion chain.
using DifferenceProfile = std::vector<std::uint8_t>;
DifferenceProfile adjacent_xor(const PixelImage& cipher, std::uint8_t iv = kDiffusionIv);

/// The all-zero chosen plain-image.
PixelImage chosen_zero(std::uint32_t width, std::uint32_t height);

/// Zero image with exactly one bit set; bit indices are 0-based, bit 8i+k is
/// bit plane k of pixel i.
PixelImage chosen_bitflip(std::uint32_t width, std::uint32_t height, std::size_t bit);

struct FlipLocation {
    std::size_t pixel = 0;
    std::uint8_t y = 0;  // nonzero difference of the two profiles at `pixel`
};

/// The unique index where the two profiles differ. Throws
/// InconsistentObservation when they differ nowhere or in more than one
/// place (the oracle is then not a faithful single-round instance).
FlipLocation locate_flip(const DifferenceProfile& v_zero, const DifferenceProfile& v_flip);

/// Phase 1 output: ciphertext of the zero image plus, for every bit j, the
/// pixel its flip landed on and the observed difference value.
struct Observations {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    PixelImage cipher_zero;
    std::vector<std::uint32_t> pixel_of_bit;          // size 8L
    std::vector<std::uint8_t> y_of_bit;               // size 8L
    std::vector<std::vector<std::uint32_t>> bits_of_pixel;  // size L, 8 bits each
};

/// Issues 1 + 8L queries (zero image, then every single-bit flip) and checks
/// that every pixel receives exactly eight bits.
Observations collect_observations(EncryptionOracle& oracle, std::ostream* transcript = nullptr);

/// Equivalent keystreams recovered by the attack. Decryption with them is
/// exact on every ciphertext produced under the oracle's key.
struct RecoveredKeys {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    Permutation u;       // forward bit permutation e_c(e_r(j))
    ByteStream s_hat;    // canonical affine multipliers, odd, < 128
    ByteStream t_hat;    // canonical affine offsets, < 128
    ByteStream r_hat;    // diffusion stream compensated for t_hat
};

struct AffineRecovery {
    ByteStream s_hat;
    ByteStream t_hat;
    Permutation u;
    std::uint64_t disambiguation_queries = 0;
};

/// Phase 2: per pixel, match the sorted observation multiset against the
/// index, yielding the canonical (s,t) and each bit's plane, which completes
/// u. Ambiguous multiset keys (none exist for the genuine table, but the
/// index may have been extended) are resolved with two-bit chosen images.
AffineRecovery recover_affine_streams(const Observations& obs, const MultisetIndex& index,
                                      EncryptionOracle& oracle,
                                      std::ostream* transcript = nullptr);

/// Phase 3: r_hat(i) = t_hat(i) XOR c0(i) XOR c0(i-1) from the zero image's
/// ciphertext, folding the t-equivalence shift into r.
ByteStream recover_diffusion_stream(const PixelImage& cipher_zero,
                                    std::span<const std::uint8_t> t_hat,
                                    std::uint8_t iv = kDiffusionIv);

/// The full divide-and-conquer attack: 8L+1 queries plus any disambiguation.
RecoveredKeys full_attack(EncryptionOracle& oracle, const MultisetIndex& index,
                          std::ostream* transcript = nullptr);
RecoveredKeys full_attack(EncryptionOracle& oracle, std::ostream* transcript = nullptr);

/// Decrypt an arbitrary ciphertext from the attacked machine with the
/// recovered equivalent streams.
PixelImage decrypt_with_recovered(const PixelImage& cipher, const RecoveredKeys& keys);

/// Recovered-streams file: text header (width/height) followed by the u, s,
/// t, r lines; u is written as 0-based indices.
void write_recovered_streams(const std::filesystem::path& path, const RecoveredKeys& keys);
RecoveredKeys read_recovered_streams(const std::filesystem::path& path);

}  // namespace icmpd
