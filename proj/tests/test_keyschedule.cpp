#include "icmpd/keyschedule.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace icmpd;

namespace {

const std::string kGoldenDir = ICMPD_GOLDEN_DIR;

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("rank_permutation basic conventions") {
    const double a[] = {0.3, 0.1, 0.2};
    CHECK(rank_permutation(a).mapping() == std::vector<std::uint32_t>{2, 0, 1});

    const double sorted[] = {0.1, 0.2, 0.3, 0.4};
    CHECK(rank_permutation(sorted) == Permutation::identity(4));

    const double ties[] = {0.5, 0.5};
    CHECK(rank_permutation(ties).mapping() == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("rank_permutation rejects bad input") {
    CHECK_THROWS_AS(rank_permutation({}), std::invalid_argument);
    const double bad[] = {0.1, std::nan("")};
    CHECK_THROWS_AS(rank_permutation(bad), std::invalid_argument);
}

TEST_CASE("Permutation validates and inverts") {
    CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({0, 3}), std::invalid_argument);
    const Permutation p({2, 0, 1, 3});
    const Permutation inv = p.inverse();
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(inv[p[i]] == i);
    }
}

TEST_CASE("permutation streams are bijections and composition round-trips") {
    std::mt19937_64 rng(21);
    const SecretKey key = test::random_key(rng);
    const auto [e_r, e_c] = derive_permutation_streams(key, 32);
    CHECK(e_r.size() == 256);
    CHECK(e_c.size() == 256);
    // Permutation construction already enforces bijectivity; composing with
    // the inverse must give the identity.
    const Permutation inv = e_r.inverse();
    for (std::size_t i = 0; i < e_r.size(); ++i) {
        CHECK(e_r[inv[i]] == i);
    }
}

TEST_CASE("changing h0 changes the permutation streams") {
    SecretKey key = SecretKey::published_example();
    const auto [e_r_a, e_c_a] = derive_permutation_streams(key, 16);
    key.h0 = 201;
    const auto [e_r_b, e_c_b] = derive_permutation_streams(key, 16);
    CHECK(e_r_a.mapping() != e_r_b.mapping());
    CHECK(e_c_a.mapping() != e_c_b.mapping());
}

TEST_CASE("substitution streams: S odd everywhere, exact lengths") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const SecretKey key = test::random_key(rng);
        const std::size_t length = 1 + rng() % 300;
        const auto [s, t] = derive_substitution_streams(key, length);
        CHECK(s.size() == length);
        CHECK(t.size() == length);
        for (const std::uint8_t v : s) {
            CHECK((v & 1u) == 1u);
        }
    }
}

TEST_CASE("diffusion stream has exact length") {
    std::mt19937_64 rng(23);
    const SecretKey key = test::random_key(rng);
    CHECK(derive_diffusion_stream(key, 77).size() == 77);
}

TEST_CASE("keystream derivation is a pure function of (key, L)") {
    const SecretKey key = SecretKey::published_example();
    const KeyStreams a = derive_keystreams(key, 48);
    const KeyStreams b = derive_keystreams(key, 48);
    CHECK(a.e_r == b.e_r);
    CHECK(a.e_c == b.e_c);
    CHECK(a.s == b.s);
    CHECK(a.t == b.t);
    CHECK(a.r == b.r);
}

TEST_CASE("degenerate Chebyshev orbit hits the iteration cap") {
    SecretKey key = SecretKey::published_example();
    key.x_prime0 = 1.0;  // fixed point: quantize(1) = 0, never odd
    CHECK_THROWS_AS(derive_substitution_streams(key, 4), std::runtime_error);
}

TEST_CASE("golden keystreams at L=64 match the shipped vectors") {
    const auto golden = test::read_golden(kGoldenDir + "/keystreams_L64.txt");
    REQUIRE(golden.at("L").at(0) == 64);
    const KeyStreams streams = derive_keystreams(SecretKey::published_example(), 64);

    auto check_u32 = [&](const char* name, const std::vector<std::uint32_t>& got) {
        const auto& want = golden.at(name);
        REQUIRE(want.size() == got.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == want[i]);
        }
    };
    auto check_u8 = [&](const char* name, const ByteStream& got) {
        const auto& want = golden.at(name);
        REQUIRE(want.size() == got.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == want[i]);
        }
    };
    check_u32("e_r", streams.e_r.mapping());
    check_u32("e_c", streams.e_c.mapping());
    check_u8("s", streams.s);
    check_u8("t", streams.t);
    check_u8("r", streams.r);
}

TEST_CASE("golden keystream digests at L=16384 match the shipped vectors") {
    const auto golden = test::read_golden(kGoldenDir + "/keystreams_L16384.txt");
    REQUIRE(golden.at("L").at(0) == 16384);
    const KeyStreams streams = derive_keystreams(SecretKey::published_example(), 16384);

    CHECK(test::fnv1a64_u32(streams.e_r.mapping()) == golden.at("fnv_e_r").at(0));
    CHECK(test::fnv1a64_u32(streams.e_c.mapping()) == golden.at("fnv_e_c").at(0));
    CHECK(test::fnv1a64_bytes(streams.s) == golden.at("fnv_s").at(0));
    CHECK(test::fnv1a64_bytes(streams.t) == golden.at("fnv_t").at(0));
    CHECK(test::fnv1a64_bytes(streams.r) == golden.at("fnv_r").at(0));

    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(streams.e_r[i] == golden.at("e_r_head").at(i));
        CHECK(streams.e_c[i] == golden.at("e_c_head").at(i));
        CHECK(streams.s[i] == golden.at("s_head").at(i));
        CHECK(streams.t[i] == golden.at("t_head").at(i));
        CHECK(streams.r[i] == golden.at("r_head").at(i));
    }
}

TEST_CASE("key validation rejects out-of-domain fields") {
    SecretKey key = SecretKey::published_example();
    CHECK_NOTHROW(key.validate());

    SecretKey bad = key;
    bad.x0 = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = key;
    bad.a = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = key;
    bad.k_prime = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = key;
    bad.x_diamond0 = -1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = key;
    bad.mu = 4.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = key;
    bad.x_star0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("key file round trip is bit exact") {
    std::mt19937_64 rng(24);
    const auto path = temp_file("icmpd_key_roundtrip.key");
    for (int trial = 0; trial < 20; ++trial) {
        const SecretKey key = test::random_key(rng);
        write_key_file(path, key);
        const SecretKey back = read_key_file(path);
        CHECK(back.x0 == key.x0);
        CHECK(back.y0 == key.y0);
        CHECK(back.a == key.a);
        CHECK(back.b == key.b);
        CHECK(back.k_prime == key.k_prime);
        CHECK(back.x_prime0 == key.x_prime0);
        CHECK(back.k_diamond == key.k_diamond);
        CHECK(back.x_diamond0 == key.x_diamond0);
        CHECK(back.mu == key.mu);
        CHECK(back.x_star0 == key.x_star0);
        CHECK(back.h0 == key.h0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("key file parser rejects malformed input") {
    const auto path = temp_file("icmpd_key_malformed.key");
    auto write_text = [&path](const char* text) {
        std::ofstream out(path);
        out << text;
    };

    write_text("x0 = 0.1\n");  // missing fields
    CHECK_THROWS_AS(read_key_file(path), std::runtime_error);

    write_text(
        "x0 = 0.346\ny0 = 0.478\na = 1.644\nb = 2.986\nk_prime = 4.434\n"
        "x_prime0 = 0.6435\nk_diamond = 5.673\nx_diamond0 = 0.523\nmu = 3.14\n"
        "x_star0 = 0.34\nh0 = 200\nx0 = 0.5\n");  // duplicate
    CHECK_THROWS_AS(read_key_file(path), std::runtime_error);

    write_text(
        "x0 = abc\ny0 = 0.478\na = 1.644\nb = 2.986\nk_prime = 4.434\n"
        "x_prime0 = 0.6435\nk_diamond = 5.673\nx_diamond0 = 0.523\nmu = 3.14\n"
        "x_star0 = 0.34\nh0 = 200\n");  // junk decimal
    CHECK_THROWS_AS(read_key_file(path), std::runtime_error);

    write_text(
        "x0 = 0.346\ny0 = 0.478\na = 1.644\nb = 2.986\nk_prime = 4.434\n"
        "x_prime0 = 0.6435\nk_diamond = 5.673\nx_diamond0 = 0.523\nmu = 3.14\n"
        "x_star0 = 0.34\nh0 = 200\nbogus = 1\n");  // unknown field
    CHECK_THROWS_AS(read_key_file(path), std::runtime_error);

    std::filesystem::remove(path);
}

TEST_CASE("comments and blank lines are accepted in key files") {
    const auto path = temp_file("icmpd_key_comments.key");
    {
        std::ofstream out(path);
        out << "# demo key\n\nx0 = 0.346\ny0 = 0.478\na = 1.644\nb = 2.986\n"
               "k_prime = 4.434\nx_prime0 = 0.6435\nk_diamond = 5.673\n"
               "x_diamond0 = 0.523\nmu = 3.14  # chaotic enough for the demo\n"
               "x_star0 = 0.34\nh0 = 200\n";
    }
    const SecretKey key = read_key_file(path);
    CHECK(key.mu == 3.14);
    CHECK(key.h0 == 200);
    std::filesystem::remove(path);
}
