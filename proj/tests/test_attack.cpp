#include "icmpd/attack.hpp"

#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace icmpd;

namespace {

// Oracle that is not an ICMPD instance: it ignores the plaintext.
class ConstantOracle final : public EncryptionOracle {
public:
    ConstantOracle(std::uint32_t w, std::uint32_t h) : w_(w), h_(h) {}
    std::uint32_t width() const noexcept override { return w_; }
    std::uint32_t height() const noexcept override { return h_; }

protected:
    PixelImage encrypt_image(const PixelImage&) override {
        return PixelImage{w_, h_, std::vector<std::uint8_t>(pixel_count(), 0x42)};
    }

private:
    std::uint32_t w_, h_;
};

}  // namespace

TEST_CASE("adjacent_xor basics") {
    const PixelImage constant{2, 2, {172, 172, 172, 172}};
    CHECK(adjacent_xor(constant) == DifferenceProfile{0, 0, 0, 0});

    const PixelImage two{2, 1, {172, 0}};
    CHECK(adjacent_xor(two) == DifferenceProfile{0, 172});
}

TEST_CASE("chosen plaintexts put single bits where expected") {
    const PixelImage zero = chosen_zero(4, 4);
    CHECK(zero.pixels == std::vector<std::uint8_t>(16, 0));

    CHECK(chosen_bitflip(4, 4, 0).pixels[0] == 1);
    CHECK(chosen_bitflip(4, 4, 7).pixels[0] == 128);
    const PixelImage next_pixel = chosen_bitflip(4, 4, 8);
    CHECK(next_pixel.pixels[0] == 0);
    CHECK(next_pixel.pixels[1] == 1);
    CHECK_THROWS_AS(chosen_bitflip(4, 4, 128), std::invalid_argument);
}

TEST_CASE("locate_flip finds the unique difference or refuses") {
    const DifferenceProfile base{1, 2, 3, 4};
    DifferenceProfile moved = base;
    moved[2] = 0xF3;
    const FlipLocation loc = locate_flip(base, moved);
    CHECK(loc.pixel == 2);
    CHECK(loc.y == (3 ^ 0xF3));

    CHECK_THROWS_AS(locate_flip(base, base), InconsistentObservation);
    DifferenceProfile twice = moved;
    twice[0] = 9;
    CHECK_THROWS_AS(locate_flip(base, twice), InconsistentObservation);
    CHECK_THROWS_AS(locate_flip(base, DifferenceProfile{1, 2}), std::invalid_argument);
}

TEST_CASE("single-bit observations are never zero") {
    // y = (0*s + t) xor (2^k * s + t) with odd s never vanishes, as the
    // eight-query tuples confirm entry by entry.
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const auto y = EightQueryTable::forward(
                {static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)});
            for (const std::uint8_t v : y) {
                if (v == 0) {
                    REQUIRE(v != 0);
                }
            }
        }
    }
}

TEST_CASE("collect_observations groups eight bits per pixel in 8L+1 queries") {
    std::mt19937_64 rng(51);
    const SecretKey key = test::random_key(rng);
    LocalOracle oracle(key, 4, 3);
    const Observations obs = collect_observations(oracle);

    const std::size_t length = 12;
    CHECK(oracle.query_count() == 8 * length + 1);
    CHECK(obs.pixel_of_bit.size() == 8 * length);
    for (const auto& bits : obs.bits_of_pixel) {
        CHECK(bits.size() == 8);
    }
    // the map j -> i is exactly 8-to-1 onto the pixel range
    std::vector<int> hits(length, 0);
    for (const std::uint32_t i : obs.pixel_of_bit) {
        REQUIRE(i < length);
        ++hits[i];
    }
    for (const int h : hits) CHECK(h == 8);
}

TEST_CASE("recovered permutation and affine streams match the key schedule") {
    std::mt19937_64 rng(52);
    const SecretKey key = test::random_key(rng);
    const std::uint32_t w = 5, h = 4;
    const std::size_t length = std::size_t{w} * h;
    LocalOracle oracle(key, w, h);
    const MultisetIndex index = MultisetIndex::build(EightQueryTable::build());

    const Observations obs = collect_observations(oracle);
    const AffineRecovery rec = recover_affine_streams(obs, index, oracle);
    CHECK(rec.disambiguation_queries == 0);

    // white box: u must equal e_c(e_r(j)) exactly
    const KeyStreams& truth = oracle.streams();
    for (std::size_t j = 0; j < 8 * length; ++j) {
        CHECK(rec.u[j] == truth.e_c[truth.e_r[j]]);
    }
    // canonical bounds and f-equivalence with the true pairs
    std::mt19937_64 qrng(53);
    for (std::size_t i = 0; i < length; ++i) {
        CHECK((rec.s_hat[i] & 1u) == 1u);
        CHECK(rec.s_hat[i] < 128);
        CHECK(rec.t_hat[i] < 128);
        const AffinePair recovered{rec.s_hat[i], rec.t_hat[i]};
        const AffinePair true_pair{truth.s[i], truth.t[i]};
        CHECK(recovered == canonicalize(true_pair));
        for (int q = 0; q < 32; ++q) {
            const auto alpha = static_cast<std::uint8_t>(qrng());
            const auto beta = static_cast<std::uint8_t>(qrng());
            CHECK(affine_modadd_xor(alpha, beta, recovered) ==
                  affine_modadd_xor(alpha, beta, true_pair));
        }
    }
}

TEST_CASE("recover_diffusion_stream identities") {
    std::mt19937_64 rng(54);
    const SecretKey key = test::random_key(rng);
    const std::uint32_t w = 4, h = 4;
    const std::size_t length = 16;
    LocalOracle oracle(key, w, h);
    const PixelImage c_zero = oracle.query(chosen_zero(w, h));
    const KeyStreams& truth = oracle.streams();

    // with the true t, the true r comes back exactly
    const ByteStream r_true = recover_diffusion_stream(c_zero, truth.t);
    CHECK(r_true == truth.r);

    // with the canonical t_hat, the shift is folded in: r_hat = t_hat^t^r
    ByteStream t_hat(length);
    for (std::size_t i = 0; i < length; ++i) {
        t_hat[i] = canonicalize({truth.s[i], truth.t[i]}).t;
    }
    const ByteStream r_hat = recover_diffusion_stream(c_zero, t_hat);
    for (std::size_t i = 0; i < length; ++i) {
        CHECK(r_hat[i] == (t_hat[i] ^ truth.t[i] ^ truth.r[i]));
    }

    // zero t_hat degenerates to the adjacent-XOR profile of c_zero
    const ByteStream zeros(length, 0);
    CHECK(recover_diffusion_stream(c_zero, zeros) == adjacent_xor(c_zero));
}

TEST_CASE("full attack recovers every plaintext, black box") {
    std::mt19937_64 rng(55);
    const MultisetIndex index = MultisetIndex::build(EightQueryTable::build());
    for (int trial = 0; trial < 6; ++trial) {
        const SecretKey key = test::random_key(rng);
        const std::uint32_t w = 1 + rng() % 8, h = 1 + rng() % 8;
        LocalOracle oracle(key, w, h);
        const RecoveredKeys keys = full_attack(oracle, index);
        CHECK(oracle.query_count() == 8 * oracle.pixel_count() + 1);

        for (int img_trial = 0; img_trial < 20; ++img_trial) {
            const PixelImage plain = test::random_image(rng, w, h);
            const PixelImage cipher = oracle.query(plain);
            CHECK(decrypt_with_recovered(cipher, keys).pixels == plain.pixels);
        }
    }
}

TEST_CASE("decrypt_with_recovered agrees with decrypt under the true streams") {
    std::mt19937_64 rng(56);
    const SecretKey key = test::random_key(rng);
    LocalOracle oracle(key, 6, 6);
    const RecoveredKeys keys = full_attack(oracle);
    for (int trial = 0; trial < 10; ++trial) {
        const PixelImage cipher = test::random_image(rng, 6, 6);
        CHECK(decrypt_with_recovered(cipher, keys).pixels ==
              decrypt(cipher, oracle.streams()).pixels);
    }
    // total function: the zero ciphertext decrypts without error
    const PixelImage zero = chosen_zero(6, 6);
    CHECK_NOTHROW(decrypt_with_recovered(zero, keys));
}

TEST_CASE("every class member with its compensated r decrypts identically") {
    std::mt19937_64 rng(57);
    const SecretKey key = test::random_key(rng);
    const std::uint32_t w = 4, h = 4;
    const std::size_t length = 16;
    LocalOracle oracle(key, w, h);
    const RecoveredKeys canonical = full_attack(oracle);

    const PixelImage plain = test::random_image(rng, w, h);
    const PixelImage cipher = oracle.query(plain);
    const std::vector<std::uint8_t> reference =
        decrypt_with_recovered(cipher, canonical).pixels;
    CHECK(reference == plain.pixels);

    for (unsigned member = 0; member < 4; ++member) {
        RecoveredKeys variant = canonical;
        for (std::size_t i = 0; i < length; ++i) {
            const auto cls = equivalence_class({canonical.s_hat[i], canonical.t_hat[i]});
            variant.s_hat[i] = cls[member].s;
            variant.t_hat[i] = cls[member].t;
            variant.r_hat[i] = static_cast<std::uint8_t>(canonical.r_hat[i] ^
                                                         canonical.t_hat[i] ^ cls[member].t);
        }
        CHECK(decrypt_with_recovered(cipher, variant).pixels == reference);
    }
}

TEST_CASE("ambiguous multiset keys fall back to two-bit probes") {
    std::mt19937_64 rng(58);
    const SecretKey key = test::random_key(rng);
    const std::uint32_t w = 3, h = 2;
    LocalOracle probe_oracle(key, w, h);

    // Find the class the oracle uses at pixel 0 and build an index with a
    // decoy candidate under the same sorted key: same value multiset, but a
    // reshuffled plane assignment and a foreign pair.
    const AffinePair truth =
        canonicalize({probe_oracle.streams().s[0], probe_oracle.streams().t[0]});
    const auto ordered = EightQueryTable::forward(truth);

    MultisetIndex index = MultisetIndex::build(EightQueryTable::build());
    MultisetIndex::Entry decoy;
    decoy.pair = (truth == AffinePair{1, 0}) ? AffinePair{3, 5} : AffinePair{1, 0};
    decoy.ordered = ordered;
    std::swap(decoy.ordered[0], decoy.ordered[1]);
    index.add(decoy);
    CHECK(index.ambiguous_key_count() == 1);

    LocalOracle oracle(key, w, h);
    const RecoveredKeys keys = full_attack(oracle, index);
    CHECK(oracle.query_count() > 8 * oracle.pixel_count() + 1);  // fallback queried

    const PixelImage plain = test::random_image(rng, w, h);
    const PixelImage cipher = oracle.query(plain);
    CHECK(decrypt_with_recovered(cipher, keys).pixels == plain.pixels);
}

TEST_CASE("an unfaithful oracle is reported, not mis-solved") {
    ConstantOracle oracle(2, 2);
    CHECK_THROWS_AS(collect_observations(oracle), InconsistentObservation);
}

TEST_CASE("attack transcript records one line per query") {
    std::mt19937_64 rng(59);
    const SecretKey key = test::random_key(rng);
    LocalOracle oracle(key, 2, 2);
    std::ostringstream transcript;
    (void)full_attack(oracle, &transcript);

    std::size_t lines = 0;
    for (const char c : transcript.str()) lines += (c == '\n');
    // header + zero image + 8L flips
    CHECK(lines == 2 + 8 * oracle.pixel_count());
}

TEST_CASE("recovered streams file round trip") {
    std::mt19937_64 rng(60);
    const SecretKey key = test::random_key(rng);
    LocalOracle oracle(key, 3, 3);
    const RecoveredKeys keys = full_attack(oracle);

    const auto path = std::filesystem::temp_directory_path() / "icmpd_streams_roundtrip.txt";
    write_recovered_streams(path, keys);
    const RecoveredKeys back = read_recovered_streams(path);
    CHECK(back.width == keys.width);
    CHECK(back.height == keys.height);
    CHECK(back.u == keys.u);
    CHECK(back.s_hat == keys.s_hat);
    CHECK(back.t_hat == keys.t_hat);
    CHECK(back.r_hat == keys.r_hat);
    std::filesystem::remove(path);

    const PixelImage plain = test::random_image(rng, 3, 3);
    const PixelImage cipher = oracle.query(plain);
    CHECK(decrypt_with_recovered(cipher, back).pixels == plain.pixels);
}
