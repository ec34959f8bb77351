#include "icmpd/keyschedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "icmpd/chaos.hpp"

namespace icmpd {

void SecretKey::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("SecretKey: ") + what); };
    for (double v : {x0, y0, a, b, k_prime, x_prime0, k_diamond, x_diamond0, mu, x_star0}) {
        if (!std::isfinite(v)) fail("non-finite field");
    }
    if (x0 < 0.0 || x0 >= 1.0 || y0 < 0.0 || y0 >= 1.0) fail("(x0, y0) outside [0,1)");
    if (a <= 1.0 || b <= 1.0) fail("(a, b) must be > 1");
    if (k_prime < 2.0 || k_diamond < 2.0) fail("Chebyshev parameters must be >= 2");
    if (x_prime0 < -1.0 || x_prime0 > 1.0) fail("x_prime0 outside [-1,1]");
    if (x_diamond0 < -1.0 || x_diamond0 > 1.0) fail("x_diamond0 outside [-1,1]");
    if (mu <= 0.0 || mu >= 4.0) fail("mu outside (0,4)");
    if (x_star0 <= 0.0 || x_star0 >= 1.0) fail("x_star0 outside (0,1)");
}

SecretKey SecretKey::published_example() {
    SecretKey key;
    key.x0 = 0.346;
    key.y0 = 0.478;
    key.a = 1.644;
    key.b = 2.986;
    key.k_prime = 4.434;
    key.x_prime0 = 0.6435;
    key.k_diamond = 5.673;
    key.x_diamond0 = 0.523;
    key.mu = 3.14;
    key.x_star0 = 0.34;
    key.h0 = 200;
    return key;
}

Permutation::Permutation(std::vector<std::uint32_t> mapping) : map_(std::move(mapping)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::uint32_t v : map_) {
        if (v >= map_.size() || seen[v]) {
            throw std::invalid_argument("Permutation: mapping is not a bijection");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::uint32_t> map(n);
    std::iota(map.begin(), map.end(), 0u);
    return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
    std::vector<std::uint32_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) {
        inv[map_[i]] = static_cast<std::uint32_t>(i);
    }
    return Permutation(std::move(inv));
}

Permutation rank_permutation(std::span<const double> seq) {
    if (seq.empty()) {
        throw std::invalid_argument("rank_permutation: empty sequence");
    }
    for (double v : seq) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("rank_permutation: non-finite value");
        }
    }
    std::vector<std::uint32_t> order(seq.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t lhs, std::uint32_t rhs) {
        if (seq[lhs] != seq[rhs]) return seq[lhs] < seq[rhs];
        return lhs < rhs;  // stable tie-break by original position
    });
    std::vector<std::uint32_t> rank(seq.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r;
    }
    return Permutation(std::move(rank));
}

std::pair<Permutation, Permutation> derive_permutation_streams(const SecretKey& key,
                                                               std::size_t length) {
    key.validate();
    if (length == 0) {
        throw std::invalid_argument("derive_permutation_streams: length must be >= 1");
    }
    ArnoldState state{key.x0, key.y0};
    for (std::uint32_t i = 0; i < key.h0; ++i) {
        state = arnold_step(state, key.a, key.b);
    }
    const std::size_t n = 8 * length;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        state = arnold_step(state, key.a, key.b);
        xs[i] = state.x;
        ys[i] = state.y;
    }
    return {rank_permutation(xs), rank_permutation(ys)};
}

std::pair<ByteStream, ByteStream> derive_substitution_streams(const SecretKey& key,
                                                              std::size_t length) {
    key.validate();
    if (length == 0) {
        throw std::invalid_argument("derive_substitution_streams: length must be >= 1");
    }
    ByteStream s;
    s.reserve(length);
    double x = key.x_prime0;
    std::size_t iterations = 0;
    const std::size_t cap = 64 * length;
    while (s.size() < length) {
        if (++iterations > cap) {
            throw std::runtime_error(
                "derive_substitution_streams: Chebyshev orbit produced too few odd bytes "
                "(degenerate orbit?)");
        }
        x = chebyshev_step(x, key.k_prime);
        const std::uint8_t q = quantize(x);
        if (q & 1u) {
            s.push_back(q);
        }
    }
    ByteStream t;
    t.reserve(length);
    x = key.x_diamond0;
    for (std::size_t i = 0; i < length; ++i) {
        x = chebyshev_step(x, key.k_diamond);
        t.push_back(quantize(x));
    }
    return {std::move(s), std::move(t)};
}

ByteStream derive_diffusion_stream(const SecretKey& key, std::size_t length) {
    key.validate();
    if (length == 0) {
        throw std::invalid_argument("derive_diffusion_stream: length must be >= 1");
    }
    ByteStream r;
    r.reserve(length);
    double x = key.x_star0;
    for (std::size_t i = 0; i < length; ++i) {
        x = logistic_step(x, key.mu);
        r.push_back(quantize(x));
    }
    return r;
}

KeyStreams derive_keystreams(const SecretKey& key, std::size_t length) {
    KeyStreams streams;
    auto [e_r, e_c] = derive_permutation_streams(key, length);
    streams.e_r = std::move(e_r);
    streams.e_c = std::move(e_c);
    auto [s, t] = derive_substitution_streams(key, length);
    streams.s = std::move(s);
    streams.t = std::move(t);
    streams.r = derive_diffusion_stream(key, length);
    return streams;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& name) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::runtime_error("key file: bad decimal for field '" + name + "': " + text);
    }
    return value;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

SecretKey read_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("key file: cannot open " + path.string());
    }
    std::map<std::string, std::string> fields;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("key file: expected 'name = value', got: " + line);
        }
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (name.empty() || value.empty()) {
            throw std::runtime_error("key file: malformed line: " + line);
        }
        if (!fields.emplace(name, value).second) {
            throw std::runtime_error("key file: duplicate field '" + name + "'");
        }
    }
    auto take = [&](const std::string& name) {
        auto it = fields.find(name);
        if (it == fields.end()) {
            throw std::runtime_error("key file: missing field '" + name + "'");
        }
        std::string value = it->second;
        fields.erase(it);
        return value;
    };
    SecretKey key;
    key.x0 = parse_double(take("x0"), "x0");
    key.y0 = parse_double(take("y0"), "y0");
    key.a = parse_double(take("a"), "a");
    key.b = parse_double(take("b"), "b");
    key.k_prime = parse_double(take("k_prime"), "k_prime");
    key.x_prime0 = parse_double(take("x_prime0"), "x_prime0");
    key.k_diamond = parse_double(take("k_diamond"), "k_diamond");
    key.x_diamond0 = parse_double(take("x_diamond0"), "x_diamond0");
    key.mu = parse_double(take("mu"), "mu");
    key.x_star0 = parse_double(take("x_star0"), "x_star0");
    const std::string h0_text = take("h0");
    std::uint32_t h0 = 0;
    auto res = std::from_chars(h0_text.data(), h0_text.data() + h0_text.size(), h0);
    if (res.ec != std::errc{} || res.ptr != h0_text.data() + h0_text.size()) {
        throw std::runtime_error("key file: bad integer for field 'h0': " + h0_text);
    }
    key.h0 = h0;
    if (!fields.empty()) {
        throw std::runtime_error("key file: unknown field '" + fields.begin()->first + "'");
    }
    key.validate();
    return key;
}

void write_key_file(const std::filesystem::path& path, const SecretKey& key) {
    key.validate();
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("key file: cannot write " + path.string());
    }
    out << "x0 = " << format_double(key.x0) << "\n"
        << "y0 = " << format_double(key.y0) << "\n"
        << "a = " << format_double(key.a) << "\n"
        << "b = " << format_double(key.b) << "\n"
        << "k_prime = " << format_double(key.k_prime) << "\n"
        << "x_prime0 = " << format_double(key.x_prime0) << "\n"
        << "k_diamond = " << format_double(key.k_diamond) << "\n"
        << "x_diamond0 = " << format_double(key.x_diamond0) << "\n"
        << "mu = " << format_double(key.mu) << "\n"
        << "x_star0 = " << format_double(key.x_star0) << "\n"
        << "h0 = " << key.h0 << "\n";
    if (!out.flush()) {
        throw std::runtime_error("key file: write failed for " + path.string());
    }
}

}  // namespace icmpd
