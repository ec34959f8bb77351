#include "icmpd/attack.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

namespace icmpd {

PixelImage EncryptionOracle::query(const PixelImage& plain) {
    plain.validate();
    if (plain.width != width() || plain.height != height()) {
        throw std::invalid_argument("EncryptionOracle: image dimensions mismatch");
    }
    ++count_;
    return encrypt_image(plain);
}

LocalOracle::LocalOracle(const SecretKey& key, std::uint32_t width, std::uint32_t height)
    : LocalOracle(derive_keystreams(key, static_cast<std::size_t>(width) * height), width,
                  height) {}

LocalOracle::LocalOracle(KeyStreams streams, std::uint32_t width, std::uint32_t height)
    : streams_(std::move(streams)), width_(width), height_(height) {
    if (width_ == 0 || height_ == 0) {
        throw std::invalid_argument("LocalOracle: empty image dimensions");
    }
}

PixelImage LocalOracle::encrypt_image(const PixelImage& plain) {
    return encrypt(plain, streams_);
}

DifferenceProfile adjacent_xor(const PixelImage& cipher, std::uint8_t iv) {
    DifferenceProfile v(cipher.pixels.size());
    std::uint8_t prev = iv;
    for (std::size_t i = 0; i < cipher.pixels.size(); ++i) {
        v[i] = static_cast<std::uint8_t>(cipher.pixels[i] ^ prev);
        prev = cipher.pixels[i];
    }
    return v;
}

PixelImage chosen_zero(std::uint32_t width, std::uint32_t height) {
    return PixelImage{width, height,
                      std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
}

PixelImage chosen_bitflip(std::uint32_t width, std::uint32_t height, std::size_t bit) {
    PixelImage img = chosen_zero(width, height);
    if (bit >= 8 * img.pixel_count()) {
        throw std::invalid_argument("chosen_bitflip: bit index out of range");
    }
    img.pixels[bit / 8] = static_cast<std::uint8_t>(1u << (bit % 8));
    return img;
}

FlipLocation locate_flip(const DifferenceProfile& v_zero, const DifferenceProfile& v_flip) {
    if (v_zero.size() != v_flip.size()) {
        throw std::invalid_argument("locate_flip: profile length mismatch");
    }
    FlipLocation loc;
    std::size_t differences = 0;
    for (std::size_t i = 0; i < v_zero.size(); ++i) {
        if (v_zero[i] != v_flip[i]) {
            if (++differences > 1) {
                throw InconsistentObservation(
                    "locate_flip: profiles differ at more than one index");
            }
            loc.pixel = i;
            loc.y = static_cast<std::uint8_t>(v_zero[i] ^ v_flip[i]);
        }
    }
    if (differences == 0) {
        throw InconsistentObservation("locate_flip: profiles are identical");
    }
    return loc;
}

Observations collect_observations(EncryptionOracle& oracle, std::ostream* transcript) {
    const std::uint32_t w = oracle.width();
    const std::uint32_t h = oracle.height();
    const std::size_t length = oracle.pixel_count();

    Observations obs;
    obs.width = w;
    obs.height = h;
    obs.cipher_zero = oracle.query(chosen_zero(w, h));
    const DifferenceProfile v_zero = adjacent_xor(obs.cipher_zero);

    if (transcript) {
        *transcript << "# attack transcript: q = oracle query count, j = flipped bit "
                       "(0-based), i = located pixel (0-based), y = observed difference\n";
        *transcript << "q=" << oracle.query_count() << " zero-image\n";
    }

    obs.pixel_of_bit.resize(8 * length);
    obs.y_of_bit.resize(8 * length);
    obs.bits_of_pixel.assign(length, {});

    PixelImage probe = chosen_zero(w, h);
    for (std::size_t j = 0; j < 8 * length; ++j) {
        probe.pixels[j / 8] = static_cast<std::uint8_t>(1u << (j % 8));
        const PixelImage cipher = oracle.query(probe);
        probe.pixels[j / 8] = 0;

        const FlipLocation loc = locate_flip(v_zero, adjacent_xor(cipher));
        obs.pixel_of_bit[j] = static_cast<std::uint32_t>(loc.pixel);
        obs.y_of_bit[j] = loc.y;
        obs.bits_of_pixel[loc.pixel].push_back(static_cast<std::uint32_t>(j));
        if (obs.bits_of_pixel[loc.pixel].size() > 8) {
            throw InconsistentObservation("collect_observations: pixel " +
                                          std::to_string(loc.pixel) +
                                          " received more than eight bits");
        }
        if (transcript) {
            *transcript << "q=" << oracle.query_count() << " j=" << j << " i=" << loc.pixel
                        << " y=" << unsigned{loc.y} << "\n";
        }
    }
    for (std::size_t i = 0; i < length; ++i) {
        if (obs.bits_of_pixel[i].size() != 8) {
            throw InconsistentObservation("collect_observations: pixel " + std::to_string(i) +
                                          " received " +
                                          std::to_string(obs.bits_of_pixel[i].size()) +
                                          " bits instead of eight");
        }
    }
    return obs;
}

namespace {

// Bit plane of value y within an ordered class tuple (the eight values are
// pairwise distinct, so the plane is unique).
unsigned plane_of(const MultisetIndex::Entry& entry, std::uint8_t y) {
    for (unsigned k = 0; k < 8; ++k) {
        if (entry.ordered[k] == y) {
            return k;
        }
    }
    throw InconsistentObservation("recover_affine_streams: observation not in class tuple");
}

// Resolve an ambiguous multiset by querying two-bit chosen images: both bits
// land on the same pixel, so each candidate predicts a distinct difference
// value unless it is truly equivalent.
MultisetIndex::Entry disambiguate(const Observations& obs, const DifferenceProfile& v_zero,
                                  std::size_t pixel, std::vector<MultisetIndex::Entry> viable,
                                  EncryptionOracle& oracle, std::uint64_t& extra_queries,
                                  std::ostream* transcript) {
    const auto& bits = obs.bits_of_pixel[pixel];
    for (std::size_t a = 0; a < bits.size() && viable.size() > 1; ++a) {
        for (std::size_t b = a + 1; b < bits.size() && viable.size() > 1; ++b) {
            PixelImage probe = chosen_zero(obs.width, obs.height);
            probe.pixels[bits[a] / 8] ^= static_cast<std::uint8_t>(1u << (bits[a] % 8));
            probe.pixels[bits[b] / 8] ^= static_cast<std::uint8_t>(1u << (bits[b] % 8));
            const PixelImage cipher = oracle.query(probe);
            ++extra_queries;
            const FlipLocation loc = locate_flip(v_zero, adjacent_xor(cipher));
            if (loc.pixel != pixel) {
                throw InconsistentObservation(
                    "disambiguate: two-bit probe landed on an unexpected pixel");
            }
            if (transcript) {
                *transcript << "q=" << oracle.query_count() << " disambiguate i=" << pixel
                            << " j1=" << bits[a] << " j2=" << bits[b]
                            << " y=" << unsigned{loc.y} << "\n";
            }
            std::erase_if(viable, [&](const MultisetIndex::Entry& entry) {
                const unsigned ka = plane_of(entry, obs.y_of_bit[bits[a]]);
                const unsigned kb = plane_of(entry, obs.y_of_bit[bits[b]]);
                const auto alpha = static_cast<std::uint8_t>((1u << ka) + (1u << kb));
                return affine_modadd_xor(0, alpha, entry.pair) != loc.y;
            });
        }
    }
    if (viable.size() != 1) {
        throw InconsistentObservation("disambiguate: pixel " + std::to_string(pixel) +
                                      " remains unresolved after two-bit probes");
    }
    return viable.front();
}

}  // namespace

AffineRecovery recover_affine_streams(const Observations& obs, const MultisetIndex& index,
                                      EncryptionOracle& oracle, std::ostream* transcript) {
    const std::size_t length = static_cast<std::size_t>(obs.width) * obs.height;
    const DifferenceProfile v_zero = adjacent_xor(obs.cipher_zero);

    AffineRecovery rec;
    rec.s_hat.resize(length);
    rec.t_hat.resize(length);
    std::vector<std::uint32_t> u(8 * length);

    for (std::size_t i = 0; i < length; ++i) {
        const auto& bits = obs.bits_of_pixel[i];
        std::array<std::uint8_t, 8> observed{};
        for (std::size_t n = 0; n < 8; ++n) {
            observed[n] = obs.y_of_bit[bits[n]];
        }
        const std::vector<MultisetIndex::Entry>* cands = index.candidates(observed);
        if (cands == nullptr || cands->empty()) {
            throw InconsistentObservation("recover_affine_streams: pixel " + std::to_string(i) +
                                          " observations match no key class");
        }
        MultisetIndex::Entry entry = cands->front();
        if (cands->size() > 1) {
            entry = disambiguate(obs, v_zero, i, *cands, oracle, rec.disambiguation_queries,
                                 transcript);
        }
        rec.s_hat[i] = entry.pair.s;
        rec.t_hat[i] = entry.pair.t;
        for (const std::uint32_t j : bits) {
            const unsigned plane = plane_of(entry, obs.y_of_bit[j]);
            u[8 * i + plane] = j;
        }
    }
    rec.u = Permutation(std::move(u));  // validates that u is a bijection
    return rec;
}

ByteStream recover_diffusion_stream(const PixelImage& cipher_zero,
                                    std::span<const std::uint8_t> t_hat, std::uint8_t iv) {
    if (t_hat.size() != cipher_zero.pixels.size()) {
        throw std::invalid_argument("recover_diffusion_stream: stream length mismatch");
    }
    ByteStream r_hat(t_hat.size());
    std::uint8_t prev = iv;
    for (std::size_t i = 0; i < t_hat.size(); ++i) {
        r_hat[i] = static_cast<std::uint8_t>(t_hat[i] ^ cipher_zero.pixels[i] ^ prev);
        prev = cipher_zero.pixels[i];
    }
    return r_hat;
}

RecoveredKeys full_attack(EncryptionOracle& oracle, const MultisetIndex& index,
                          std::ostream* transcript) {
    const Observations obs = collect_observations(oracle, transcript);
    AffineRecovery affine = recover_affine_streams(obs, index, oracle, transcript);

    RecoveredKeys keys;
    keys.width = obs.width;
    keys.height = obs.height;
    keys.u = std::move(affine.u);
    keys.s_hat = std::move(affine.s_hat);
    keys.t_hat = std::move(affine.t_hat);
    keys.r_hat = recover_diffusion_stream(obs.cipher_zero, keys.t_hat);
    return keys;
}

RecoveredKeys full_attack(EncryptionOracle& oracle, std::ostream* transcript) {
    const MultisetIndex index = MultisetIndex::build(EightQueryTable::build());
    return full_attack(oracle, index, transcript);
}

PixelImage decrypt_with_recovered(const PixelImage& cipher, const RecoveredKeys& keys) {
    cipher.validate();
    if (cipher.width != keys.width || cipher.height != keys.height) {
        throw std::invalid_argument("decrypt_with_recovered: dimensions mismatch");
    }
    const std::vector<std::uint8_t> masked =
        diffuse(cipher.pixels, keys.r_hat, kDiffusionIv, Direction::inverse);
    const std::vector<std::uint8_t> permuted_pixels =
        affine_substitute(masked, keys.s_hat, keys.t_hat, Direction::inverse);
    const BitSequence permuted = decompose_bits(std::span<const std::uint8_t>(permuted_pixels));
    BitSequence bits(permuted.size());
    for (std::size_t q = 0; q < permuted.size(); ++q) {
        bits[keys.u[q]] = permuted[q];
    }
    return PixelImage{cipher.width, cipher.height, compose_bits(bits)};
}

void write_recovered_streams(const std::filesystem::path& path, const RecoveredKeys& keys) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("recovered streams: cannot write " + path.string());
    }
    out << "width = " << keys.width << "\n"
        << "height = " << keys.height << "\n";
    out << "u =";
    for (const std::uint32_t v : keys.u.mapping()) out << ' ' << v;
    out << "\ns =";
    for (const std::uint8_t v : keys.s_hat) out << ' ' << unsigned{v};
    out << "\nt =";
    for (const std::uint8_t v : keys.t_hat) out << ' ' << unsigned{v};
    out << "\nr =";
    for (const std::uint8_t v : keys.r_hat) out << ' ' << unsigned{v};
    out << "\n";
    if (!out.flush()) {
        throw std::runtime_error("recovered streams: write failed for " + path.string());
    }
}

namespace {

std::vector<std::uint64_t> parse_number_list(const std::string& line, const std::string& name) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq).find(name) == std::string::npos) {
        throw std::runtime_error("recovered streams: expected '" + name + " = ...' line");
    }
    std::vector<std::uint64_t> values;
    std::istringstream in(line.substr(eq + 1));
    std::uint64_t v = 0;
    while (in >> v) values.push_back(v);
    return values;
}

}  // namespace

RecoveredKeys read_recovered_streams(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("recovered streams: cannot open " + path.string());
    }
    auto read_line = [&in, &path]() {
        std::string line;
        if (!std::getline(in, line)) {
            throw std::runtime_error("recovered streams: truncated file " + path.string());
        }
        return line;
    };
    RecoveredKeys keys;
    keys.width = static_cast<std::uint32_t>(parse_number_list(read_line(), "width").at(0));
    keys.height = static_cast<std::uint32_t>(parse_number_list(read_line(), "height").at(0));
    const std::size_t length = static_cast<std::size_t>(keys.width) * keys.height;

    const auto u_vals = parse_number_list(read_line(), "u");
    auto to_bytes = [length, &path](const std::vector<std::uint64_t>& vals) {
        if (vals.size() != length) {
            throw std::runtime_error("recovered streams: wrong stream length in " +
                                     path.string());
        }
        ByteStream bytes(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] > 255) {
                throw std::runtime_error("recovered streams: byte out of range in " +
                                         path.string());
            }
            bytes[i] = static_cast<std::uint8_t>(vals[i]);
        }
        return bytes;
    };
    if (u_vals.size() != 8 * length) {
        throw std::runtime_error("recovered streams: wrong permutation length in " +
                                 path.string());
    }
    std::vector<std::uint32_t> u(u_vals.size());
    for (std::size_t i = 0; i < u_vals.size(); ++i) {
        u[i] = static_cast<std::uint32_t>(u_vals[i]);
    }
    keys.u = Permutation(std::move(u));
    keys.s_hat = to_bytes(parse_number_list(read_line(), "s"));
    keys.t_hat = to_bytes(parse_number_list(read_line(), "t"));
    keys.r_hat = to_bytes(parse_number_list(read_line(), "r"));
    return keys;
}

}  // namespace icmpd
