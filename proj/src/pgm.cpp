#include "icmpd/pgm.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace icmpd {

namespace {

// Next header token, skipping whitespace and '#' comments that run to the
// end of the line.
std::string next_token(std::istream& in, const std::string& file) {
    std::string token;
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (token.empty()) {
        throw std::runtime_error("pgm: truncated header in " + file);
    }
    return token;
}

std::uint32_t parse_dim(const std::string& token, const std::string& file) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw std::runtime_error("pgm: malformed header token '" + token + "' in " + file);
    }
    const unsigned long v = std::stoul(token);
    if (v == 0 || v > std::numeric_limits<std::uint32_t>::max()) {
        throw std::runtime_error("pgm: dimension out of range in " + file);
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

PixelImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("pgm: cannot open " + path.string());
    }
    char magic[2] = {};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P') {
        throw std::runtime_error("pgm: not a PGM file: " + path.string());
    }
    if (magic[1] != '5') {
        throw std::runtime_error("pgm: unsupported format P" + std::string(1, magic[1]) +
                                 " (only binary P5 is supported): " + path.string());
    }
    const std::uint32_t width = parse_dim(next_token(in, path.string()), path.string());
    const std::uint32_t height = parse_dim(next_token(in, path.string()), path.string());
    const std::string maxval = next_token(in, path.string());
    if (maxval != "255") {
        throw std::runtime_error("pgm: maxval must be 255, got " + maxval + ": " +
                                 path.string());
    }
    // The header ends with the single whitespace byte consumed by next_token.
    PixelImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
        throw std::runtime_error("pgm: truncated pixel payload in " + path.string());
    }
    if (in.get() != EOF) {
        throw std::runtime_error("pgm: trailing data after pixel payload in " + path.string());
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const PixelImage& img) {
    img.validate();
    if (img.width == 0 || img.height == 0) {
        throw std::invalid_argument("pgm: refusing to write empty image");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("pgm: cannot write " + path.string());
    }
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out.flush()) {
        throw std::runtime_error("pgm: write failed for " + path.string());
    }
}

}  // namespace icmpd
