#pragma once

// File formats: PFM (float rasters), PGM P5 (images, 16-bit depth maps),
// CSV radial profiles and JSON run manifests.

#include "fastpsf/errors.hpp"
#include "fastpsf/field.hpp"
#include "fastpsf/radial_psf.hpp"
#include "fastpsf/raster.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fastpsf::io {

namespace detail {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

// Netpbm-style header tokens; '#' starts a comment running to end of line.
class HeaderReader {
public:
    HeaderReader(const std::string& bytes, const std::string& path) : b_(bytes), path_(path) {}

    std::string token()
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < b_.size() && !std::isspace(static_cast<unsigned char>(b_[pos_]))) ++pos_;
        if (start == pos_) throw ConfigError("'" + path_ + "': truncated header");
        return b_.substr(start, pos_ - start);
    }

    long integer()
    {
        const std::string t = token();
        char* end = nullptr;
        const long v = std::strtol(t.c_str(), &end, 10);
        if (*end != '\0') throw ConfigError("'" + path_ + "': bad header field '" + t + "'");
        return v;
    }

    double real()
    {
        const std::string t = token();
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (*end != '\0') throw ConfigError("'" + path_ + "': bad header field '" + t + "'");
        return v;
    }

    // Exactly one whitespace byte separates the header from the payload.
    std::size_t payload_offset()
    {
        if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_])))
            throw ConfigError("'" + path_ + "': missing separator before pixel data");
        return pos_ + 1;
    }

private:
    void skip_space()
    {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& b_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline std::uint32_t to_little(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    return v;
}

} // namespace detail

/// Grayscale PFM, little-endian (scale -1). Rows are stored bottom to top.
/// Values are narrowed to float32.
inline void write_pfm(const std::string& path, const Raster& r)
{
    std::string bytes = "Pf\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n-1.0\n";
    const std::size_t header = bytes.size();
    bytes.resize(header + r.data.size() * 4);
    char* dst = bytes.data() + header;
    for (int y = r.height - 1; y >= 0; --y) {
        for (int x = 0; x < r.width; ++x) {
            const float f = static_cast<float>(r.at(x, y));
            const std::uint32_t u = detail::to_little(std::bit_cast<std::uint32_t>(f));
            std::memcpy(dst, &u, 4);
            dst += 4;
        }
    }
    detail::write_file(path, bytes);
}

inline void write_pfm(const std::string& path, const Psf2D& p)
{
    Raster r(p.size, p.size);
    r.data = p.data;
    write_pfm(path, r);
}

inline Raster read_pfm(const std::string& path, RasterKind kind = RasterKind::image)
{
    const std::string bytes = detail::read_file(path);
    detail::HeaderReader hr(bytes, path);
    const std::string magic = hr.token();
    if (magic == "PF") throw ConfigError("'" + path + "': colour PFM is not supported");
    if (magic != "Pf") throw ConfigError("'" + path + "': not a PFM file");
    const long w = hr.integer();
    const long h = hr.integer();
    const double scale = hr.real();
    if (w <= 0 || h <= 0 || w > 65536 || h > 65536) throw ConfigError("'" + path + "': bad dimensions");
    if (scale == 0.0 || !std::isfinite(scale)) throw ConfigError("'" + path + "': bad scale field");
    const bool little = scale < 0.0;
    const std::size_t off = hr.payload_offset();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() < off + 4 * n) throw ConfigError("'" + path + "': truncated pixel data");

    Raster r(static_cast<int>(w), static_cast<int>(h), kind);
    const char* src = bytes.data() + off;
    for (long y = h - 1; y >= 0; --y) {
        for (long x = 0; x < w; ++x) {
            std::uint32_t u;
            std::memcpy(&u, src, 4);
            src += 4;
            const bool swap = little != (std::endian::native == std::endian::little);
            if (swap) u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
            r.at(static_cast<int>(x), static_cast<int>(y)) = std::bit_cast<float>(u);
        }
    }
    return r;
}

/// PGM P5 reader for maxval <= 65535; samples are returned unscaled.
struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> samples;
};

inline PgmImage read_pgm(const std::string& path)
{
    const std::string bytes = detail::read_file(path);
    detail::HeaderReader hr(bytes, path);
    if (hr.token() != "P5") throw ConfigError("'" + path + "': only binary PGM (P5) is supported");
    PgmImage img;
    const long w = hr.integer();
    const long h = hr.integer();
    const long maxval = hr.integer();
    if (w <= 0 || h <= 0 || w > 65536 || h > 65536) throw ConfigError("'" + path + "': bad dimensions");
    if (maxval < 1 || maxval > 65535) throw ConfigError("'" + path + "': maxval must lie in [1, 65535]");
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.maxval = static_cast<int>(maxval);
    const std::size_t off = hr.payload_offset();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const std::size_t bps = maxval > 255 ? 2 : 1;
    if (bytes.size() < off + bps * n) throw ConfigError("'" + path + "': truncated pixel data");
    img.samples.resize(n);
    const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + off);
    for (std::size_t i = 0; i < n; ++i)
        img.samples[i] = bps == 2 ? static_cast<std::uint16_t>((src[2 * i] << 8) | src[2 * i + 1]) : src[i];
    return img;
}

/// 8-bit (maxval <= 255) or 16-bit big-endian PGM.
inline void write_pgm(const std::string& path, const PgmImage& img)
{
    fastpsf::detail::require_config(img.maxval >= 1 && img.maxval <= 65535, "write_pgm: maxval out of range");
    std::string bytes = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                        std::to_string(img.maxval) + "\n";
    for (auto s : img.samples) {
        if (img.maxval > 255) {
            bytes.push_back(static_cast<char>(s >> 8));
            bytes.push_back(static_cast<char>(s & 0xff));
        } else {
            bytes.push_back(static_cast<char>(s));
        }
    }
    detail::write_file(path, bytes);
}

/// Samples mapped to [0, 1] by maxval, or to meters by `scale * v + offset`
/// when building a depth raster.
inline Raster pgm_to_raster(const PgmImage& img, RasterKind kind = RasterKind::image, double scale = 0.0,
                            double offset = 0.0)
{
    Raster r(img.width, img.height, kind);
    const double s = scale != 0.0 ? scale : 1.0 / img.maxval;
    for (std::size_t i = 0; i < img.samples.size(); ++i) r.data[i] = s * img.samples[i] + offset;
    return r;
}

/// 8-bit preview: peak-normalized, gamma 1/2.2.
inline PgmImage preview(const Raster& r)
{
    PgmImage img;
    img.width = r.width;
    img.height = r.height;
    img.maxval = 255;
    img.samples.resize(r.data.size());
    const double peak = r.max();
    for (std::size_t i = 0; i < r.data.size(); ++i) {
        const double v = peak > 0.0 ? std::clamp(r.data[i] / peak, 0.0, 1.0) : 0.0;
        img.samples[i] = static_cast<std::uint16_t>(std::lround(255.0 * std::pow(v, 1.0 / 2.2)));
    }
    return img;
}

inline PgmImage preview(const Psf2D& p)
{
    Raster r(p.size, p.size);
    r.data = p.data;
    return preview(r);
}

/// Radial profile as `k,h` CSV with 17 significant digits.
inline std::string radial_csv(const RadialPsf& p)
{
    std::string out = "k,h\n";
    char line[80];
    for (std::size_t i = 0; i < p.k.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.k[i], p.h[i]);
        out += line;
    }
    return out;
}

inline void write_radial_csv(const std::string& path, const RadialPsf& p) { detail::write_file(path, radial_csv(p)); }

inline RadialPsf read_radial_csv(const std::string& path)
{
    std::istringstream in(detail::read_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,h", 0) != 0) throw ConfigError("'" + path + "': missing 'k,h' header");
    RadialPsf p;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("'" + path + "': malformed row '" + line + "'");
        char* end = nullptr;
        const double k = std::strtod(line.c_str(), &end);
        if (end != line.c_str() + comma) throw ConfigError("'" + path + "': malformed row '" + line + "'");
        const char* hs = line.c_str() + comma + 1;
        const double h = std::strtod(hs, &end);
        if (end == hs) throw ConfigError("'" + path + "': malformed row '" + line + "'");
        p.k.push_back(k);
        p.h.push_back(h);
    }
    if (p.k.empty()) throw ConfigError("'" + path + "': no data rows");
    p.validate();
    return p;
}

inline void write_json(const std::string& path, const nlohmann::json& j) { detail::write_file(path, j.dump(2) + "\n"); }

inline nlohmann::json read_json(const std::string& path)
{
    try {
        return nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

} // namespace fastpsf::io
