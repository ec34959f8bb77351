#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace icmpd {

/// The ICMPD secret key: initial values and control parameters of the three
/// chaotic maps, plus the Arnold burn-in length h0 (h0 is not part of the
/// published key tuple; it must simply match between encryptor and decryptor).
struct SecretKey {
    double x0 = 0.0;          // Arnold initial point, in [0,1)
    double y0 = 0.0;
    double a = 0.0;           // Arnold control parameters, > 1
    double b = 0.0;
    double k_prime = 0.0;     // Chebyshev pair driving S, k >= 2
    double x_prime0 = 0.0;
    double k_diamond = 0.0;   // Chebyshev pair driving T
    double x_diamond0 = 0.0;
    double mu = 0.0;          // Logistic pair driving R, mu in (0,4)
    double x_star0 = 0.0;
    std::uint32_t h0 = 200;

    /// Throws std::invalid_argument if any field is outside its map's domain.
    void validate() const;

    /// The example key published with the ICMPD scheme (h0 fixed to 200 here).
    static SecretKey published_example();
};

/// A bijection on [0,n), stored as the forward mapping i -> map[i].
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::uint32_t> mapping);

    static Permutation identity(std::size_t n);

    std::size_t size() const noexcept { return map_.size(); }
    std::uint32_t operator[](std::size_t i) const { return map_[i]; }
    const std::vector<std::uint32_t>& mapping() const noexcept { return map_; }

    Permutation inverse() const;

    bool operator==(const Permutation&) const = default;

private:
    std::vector<std::uint32_t> map_;
};

using ByteStream = std::vector<std::uint8_t>;

/// The five keystreams: bit permutations of length 8L and byte streams of
/// length L. Every entry of s is odd, so it is invertible mod 256.
struct KeyStreams {
    Permutation e_r;
    Permutation e_c;
    ByteStream s;
    ByteStream t;
    ByteStream r;
};

/// Rank permutation of a real sequence under ascending order: element i is
/// mapped to its 0-based rank (0 = smallest), ties broken by position.
Permutation rank_permutation(std::span<const double> seq);

/// E_r / E_c: iterate the Arnold map h0 + 8L times and rank the last 8L
/// x-values and y-values respectively.
std::pair<Permutation, Permutation> derive_permutation_streams(const SecretKey& key,
                                                               std::size_t length);

/// S: quantized Chebyshev orbit under (k', x'0), keeping only odd bytes until
/// L are collected (a cap of 64*L iterations aborts degenerate orbits).
/// T: quantized Chebyshev orbit under (k_diamond, x_diamond0), first L bytes.
std::pair<ByteStream, ByteStream> derive_substitution_streams(const SecretKey& key,
                                                              std::size_t length);

/// R: quantized Logistic orbit under (mu, x*0), first L bytes.
ByteStream derive_diffusion_stream(const SecretKey& key, std::size_t length);

/// All five streams for an L-pixel image.
KeyStreams derive_keystreams(const SecretKey& key, std::size_t length);

/// Key file format: one "name = value" pair per line for the eleven fields
/// x0 y0 a b k_prime x_prime0 k_diamond x_diamond0 mu x_star0 h0, with '#'
/// comments allowed. Reals are written as shortest round-trip decimals.
SecretKey read_key_file(const std::filesystem::path& path);
void write_key_file(const std::filesystem::path& path, const SecretKey& key);

}  // namespace icmpd
