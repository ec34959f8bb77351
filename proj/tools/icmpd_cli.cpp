// Command-line front end: key management, PGM encryption/decryption, solver
// table generation, the chosen-plaintext attack, and the verification suite.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "icmpd/attack.hpp"
#include "icmpd/cipher.hpp"
#include "icmpd/keyschedule.hpp"
#include "icmpd/pgm.hpp"
#include "icmpd/solver.hpp"
#include "icmpd/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailure = 2;
constexpr int kExitAttackInconsistency = 3;

icmpd::SecretKey random_key(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    icmpd::SecretKey key;
    key.x0 = uniform(0.0, 1.0);
    key.y0 = uniform(0.0, 1.0);
    key.a = uniform(1.1, 5.0);
    key.b = uniform(1.1, 5.0);
    key.k_prime = uniform(2.0, 8.0);
    key.x_prime0 = uniform(-0.999, 0.999);
    key.k_diamond = uniform(2.0, 8.0);
    key.x_diamond0 = uniform(-0.999, 0.999);
    key.mu = uniform(3.58, 3.99);
    key.x_star0 = uniform(0.001, 0.999);
    key.h0 = static_cast<std::uint32_t>(50 + rng() % 351);
    key.validate();
    return key;
}

struct SizeSpec {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
};

SizeSpec parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw CLI::ValidationError("--size", "expected <height>x<width>, e.g. 128x128");
    }
    try {
        const unsigned long h = std::stoul(text.substr(0, x));
        const unsigned long w = std::stoul(text.substr(x + 1));
        if (h == 0 || w == 0 || h > 65536 || w > 65536) {
            throw CLI::ValidationError("--size", "dimensions out of range");
        }
        return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w)};
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError("--size", "expected <height>x<width>, e.g. 128x128");
    }
}

int run_keygen(const std::string& out, bool use_published, std::uint64_t seed) {
    const icmpd::SecretKey key =
        use_published ? icmpd::SecretKey::published_example() : random_key(seed);
    icmpd::write_key_file(out, key);
    std::cout << "wrote key file " << out << "\n";
    return kExitOk;
}

int run_transform(const std::string& key_path, const std::string& in_path,
                  const std::string& out_path, bool encrypting) {
    const icmpd::SecretKey key = icmpd::read_key_file(key_path);
    const icmpd::PixelImage input = icmpd::read_pgm(in_path);
    const icmpd::KeyStreams streams = icmpd::derive_keystreams(key, input.pixel_count());
    const icmpd::PixelImage output =
        encrypting ? icmpd::encrypt(input, streams) : icmpd::decrypt(input, streams);
    icmpd::write_pgm(out_path, output);
    std::cout << (encrypting ? "encrypted " : "decrypted ") << in_path << " -> " << out_path
              << " (" << input.width << "x" << input.height << ")\n";
    return kExitOk;
}

int run_tables(const std::optional<std::string>& dump_path) {
    const icmpd::TwoQueryTable two_query = icmpd::TwoQueryTable::build();
    const icmpd::SevenQueryTable seven_query = icmpd::SevenQueryTable::build();
    const icmpd::EightQueryTable eight_query = icmpd::EightQueryTable::build();
    const icmpd::MultisetIndex index = icmpd::MultisetIndex::build(eight_query);
    std::cout << "two-query table:   " << two_query.size() << " entries\n"
              << "seven-query table: " << seven_query.size() << " entries\n"
              << "eight-query table: " << eight_query.size() << " entries\n"
              << "multiset index:    " << index.class_count() << " classes under "
              << index.key_count() << " sorted keys, " << index.ambiguous_key_count()
              << " ambiguous\n";
    if (dump_path) {
        std::ofstream out(*dump_path);
        if (!out) {
            std::cerr << "cannot write " << *dump_path << "\n";
            return kExitUsage;
        }
        out << "table,k,s,t,y1,y2,y3,y4,y5,y6,y7,y8\n";
        two_query.dump_csv(out);
        seven_query.dump_csv(out);
        eight_query.dump_csv(out);
        std::cout << "dumped tables to " << *dump_path << "\n";
    }
    return index.ambiguous_key_count() == 0 ? kExitOk : kExitVerifyFailure;
}

int run_attack(const std::string& key_path, const std::optional<std::string>& size_text,
               const std::optional<std::string>& in_path,
               const std::optional<std::string>& out_path,
               const std::optional<std::string>& streams_path,
               const std::optional<std::string>& transcript_path) {
    const icmpd::SecretKey key = icmpd::read_key_file(key_path);

    std::optional<icmpd::PixelImage> cipher;
    SizeSpec size;
    if (in_path) {
        cipher = icmpd::read_pgm(*in_path);
        size = {cipher->height, cipher->width};
    }
    if (size_text) {
        const SizeSpec requested = parse_size(*size_text);
        if (cipher && (requested.height != size.height || requested.width != size.width)) {
            std::cerr << "--size disagrees with the dimensions of " << *in_path << "\n";
            return kExitUsage;
        }
        size = requested;
    }
    if (size.width == 0) {
        std::cerr << "attack needs --size or --in to fix the oracle dimensions\n";
        return kExitUsage;
    }

    std::ofstream transcript;
    if (transcript_path) {
        transcript.open(*transcript_path);
        if (!transcript) {
            std::cerr << "cannot write " << *transcript_path << "\n";
            return kExitUsage;
        }
    }

    icmpd::LocalOracle oracle(key, size.width, size.height);
    const icmpd::RecoveredKeys recovered =
        icmpd::full_attack(oracle, transcript_path ? &transcript : nullptr);
    std::cout << "attack finished: " << oracle.query_count() << " oracle queries for "
              << size.width << "x" << size.height << " (8L+1 = "
              << 8 * oracle.pixel_count() + 1 << ")\n";

    if (streams_path) {
        icmpd::write_recovered_streams(*streams_path, recovered);
        std::cout << "wrote recovered streams to " << *streams_path << "\n";
    }
    if (cipher) {
        if (!out_path) {
            std::cerr << "--in requires --out for the decrypted image\n";
            return kExitUsage;
        }
        icmpd::write_pgm(*out_path, icmpd::decrypt_with_recovered(*cipher, recovered));
        std::cout << "decrypted " << *in_path << " -> " << *out_path
                  << " with the recovered streams\n";
    }
    return kExitOk;
}

int run_verify(std::uint64_t seed) {
    bool all_passed = true;
    for (const icmpd::CheckResult& result : icmpd::run_all_checks(seed)) {
        std::cout << (result.passed ? "PASS" : "FAIL") << "  " << result.name << ": "
                  << result.detail << "  [" << result.seconds << " s]\n";
        all_passed = all_passed && result.passed;
    }
    return all_passed ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ICMPD chaotic image cipher and its chosen-plaintext key recovery"};
    app.require_subcommand(1);

    std::string key_path, in_path, out_path;
    std::optional<std::string> opt_in, opt_out, size_text, dump_path, streams_path,
        transcript_path;
    std::uint64_t seed = 0;
    bool use_published = false;

    CLI::App* keygen = app.add_subcommand("keygen", "write a key file");
    keygen->add_option("--out", out_path, "key file to write")->required();
    keygen->add_flag("--paper-key", use_published, "use the published ICMPD example key");
    keygen->add_option("--seed", seed, "seed for random key generation (default 0)");

    CLI::App* encrypt_cmd = app.add_subcommand("encrypt", "encrypt a PGM image");
    encrypt_cmd->add_option("--key", key_path, "key file")->required();
    encrypt_cmd->add_option("--in", in_path, "plain PGM image")->required();
    encrypt_cmd->add_option("--out", out_path, "cipher PGM image")->required();

    CLI::App* decrypt_cmd = app.add_subcommand("decrypt", "decrypt a PGM image");
    decrypt_cmd->add_option("--key", key_path, "key file")->required();
    decrypt_cmd->add_option("--in", in_path, "cipher PGM image")->required();
    decrypt_cmd->add_option("--out", out_path, "plain PGM image")->required();

    CLI::App* tables = app.add_subcommand("tables", "build and audit the solver tables");
    tables->add_option("--dump-tables", dump_path,
                       "write all table entries as CSV (columns: table,k,s,t,y1..y8)");

    CLI::App* attack = app.add_subcommand(
        "attack", "run the chosen-plaintext attack against an in-process oracle");
    attack->add_option("--key", key_path, "key file the oracle encrypts under")->required();
    attack->add_option("--size", size_text, "oracle image size as <height>x<width>");
    attack->add_option("--in", opt_in, "cipher PGM to break with the recovered streams");
    attack->add_option("--out", opt_out, "decrypted PGM output");
    attack->add_option("--streams-out", streams_path, "write the recovered streams here");
    attack->add_option("--transcript", transcript_path, "write a per-query attack log");

    CLI::App* verify = app.add_subcommand("verify", "run the exhaustive solver checks");
    verify->add_option("--seed", seed, "seed for the sampled checks (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (keygen->parsed()) return run_keygen(out_path, use_published, seed);
        if (encrypt_cmd->parsed()) return run_transform(key_path, in_path, out_path, true);
        if (decrypt_cmd->parsed()) return run_transform(key_path, in_path, out_path, false);
        if (tables->parsed()) return run_tables(dump_path);
        if (attack->parsed())
            return run_attack(key_path, size_text, opt_in, opt_out, streams_path,
                              transcript_path);
        if (verify->parsed()) return run_verify(seed);
    } catch (const icmpd::InconsistentObservation& e) {
        std::cerr << "attack inconsistency: " << e.what() << "\n";
        return kExitAttackInconsistency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
