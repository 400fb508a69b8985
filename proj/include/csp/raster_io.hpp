// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#ifndef CSP_RASTER_IO_HPP
#define CSP_RASTER_IO_HPP

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csp/raster.hpp"

namespace csp {

/// Malformed or truncated image file. Carries the byte offset at which the
/// problem was detected.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& message, std::size_t byte_offset)
        : std::runtime_error(message + " (at byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

enum class RasterFormat { pgm, pfm };

inline std::optional<RasterFormat> format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".pgm") return RasterFormat::pgm;
    if (ext == ".pfm") return RasterFormat::pfm;
    return std::nullopt;
}

/// Decoded PGM: 8-bit gray samples, row-major top-down, maxval fixed at 255.
struct PgmImage {
    GridShape shape;
    std::vector<std::uint8_t> samples;
    std::vector<std::size_t> sample_offsets;  // byte offset per sample (P2); for P5, payload_offset + i
    std::size_t payload_offset = 0;
    bool ascii = false;

    std::size_t offset_of(std::size_t i) const { return ascii ? sample_offsets[i] : payload_offset + i; }
};

/// Decoded grayscale PFM: float32 samples, row-major top-down (converted from
/// the bottom-up file order).
struct PfmImage {
    GridShape shape;
    std::vector<float> samples;
    std::size_t payload_offset = 0;

    std::size_t offset_of(std::size_t i) const {
        // Undo the bottom-up row flip to the file position of sample i.
        const std::size_t w = static_cast<std::size_t>(shape.width());
        const std::size_t row = i / w;
        const std::size_t file_row = static_cast<std::size_t>(shape.height()) - 1 - row;
        return payload_offset + (file_row * w + i % w) * 4;
    }
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'", 0);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline bool is_pnm_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

struct Scanner {
    const std::string& data;
    std::size_t pos = 0;
    std::size_t last_token_start = 0;

    bool eof() const { return pos >= data.size(); }

    void skip_space_and_comments(bool allow_comments) {
        while (!eof()) {
            if (is_pnm_space(data[pos])) {
                ++pos;
            } else if (allow_comments && data[pos] == '#') {
                while (!eof() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    // Whitespace-delimited token; returns its starting offset via token_start.
    std::string token(bool allow_comments, std::size_t& token_start) {
        skip_space_and_comments(allow_comments);
        if (eof()) throw FormatError("unexpected end of file", data.size());
        token_start = last_token_start = pos;
        std::string t;
        while (!eof() && !is_pnm_space(data[pos]) && !(allow_comments && data[pos] == '#')) {
            t += data[pos++];
        }
        return t;
    }

    long parse_int(bool allow_comments, const char* what) {
        std::size_t start = 0;
        const std::string t = token(allow_comments, start);
        long value = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw FormatError(std::string("expected integer for ") + what + ", got '" + t + "'", start);
        }
        return value;
    }

    double parse_float(const char* what) {
        std::size_t start = 0;
        const std::string t = token(false, start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw FormatError(std::string("expected number for ") + what + ", got '" + t + "'", start);
        }
        return value;
    }
};

inline GridShape parse_pnm_dimensions(Scanner& sc, bool allow_comments) {
    const std::size_t dim_pos = sc.pos;
    const long width = sc.parse_int(allow_comments, "width");
    const long height = sc.parse_int(allow_comments, "height");
    if (width < 1 || height < 1 || width > 1 << 20 || height > 1 << 20) {
        throw FormatError("invalid image dimensions", dim_pos);
    }
    return GridShape(static_cast<int>(height), static_cast<int>(width));
}

}  // namespace detail

inline PgmImage load_pgm(const std::filesystem::path& path) {
    const std::string data = detail::read_file(path);
    detail::Scanner sc{data};

    std::size_t magic_pos = 0;
    const std::string magic = sc.token(true, magic_pos);
    if (magic != "P2" && magic != "P5") {
        throw FormatError("not a PGM file: magic '" + magic + "'", magic_pos);
    }
    const bool ascii = magic == "P2";

    GridShape shape = detail::parse_pnm_dimensions(sc, true);
    const long maxval = sc.parse_int(true, "maxval");
    if (maxval != 255) {
        throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (expected 255)", sc.last_token_start);
    }

    PgmImage img{shape, {}, {}, 0, ascii};
    const std::size_t count = shape.size();
    img.samples.reserve(count);

    if (ascii) {
        img.sample_offsets.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (sc.eof()) throw FormatError("truncated P2 payload: expected " + std::to_string(count) + " samples", data.size());
            const long v = sc.parse_int(true, "pixel value");
            if (v < 0 || v > 255) throw FormatError("pixel value " + std::to_string(v) + " out of range", sc.last_token_start);
            img.samples.push_back(static_cast<std::uint8_t>(v));
            img.sample_offsets.push_back(sc.last_token_start);
        }
        img.payload_offset = img.sample_offsets.empty() ? sc.pos : img.sample_offsets.front();
    } else {
        // Exactly one whitespace byte separates the maxval from the payload.
        if (sc.eof() || !detail::is_pnm_space(data[sc.pos])) {
            throw FormatError("missing whitespace before P5 payload", sc.pos);
        }
        ++sc.pos;
        img.payload_offset = sc.pos;
        if (data.size() - sc.pos < count) {
            throw FormatError("truncated P5 payload: expected " + std::to_string(count) + " bytes, found " +
                                  std::to_string(data.size() - sc.pos),
                              data.size());
        }
        img.samples.assign(data.begin() + static_cast<std::ptrdiff_t>(sc.pos),
                           data.begin() + static_cast<std::ptrdiff_t>(sc.pos + count));
    }
    return img;
}

inline PfmImage load_pfm(const std::filesystem::path& path) {
    const std::string data = detail::read_file(path);
    detail::Scanner sc{data};

    std::size_t magic_pos = 0;
    const std::string magic = sc.token(false, magic_pos);
    if (magic == "PF") throw FormatError("color PFM not supported (grayscale 'Pf' only)", magic_pos);
    if (magic != "Pf") throw FormatError("not a PFM file: magic '" + magic + "'", magic_pos);

    GridShape shape = detail::parse_pnm_dimensions(sc, false);
    const double scale = sc.parse_float("scale");
    if (scale == 0.0) throw FormatError("PFM scale must be nonzero", sc.last_token_start);
    const bool little_endian = scale < 0.0;

    if (sc.eof() || !detail::is_pnm_space(data[sc.pos])) {
        throw FormatError("missing whitespace before PFM payload", sc.pos);
    }
    ++sc.pos;

    PfmImage img{shape, {}, sc.pos};
    const std::size_t count = shape.size();
    if (data.size() - sc.pos < count * 4) {
        throw FormatError("truncated PFM payload: expected " + std::to_string(count * 4) + " bytes, found " +
                              std::to_string(data.size() - sc.pos),
                          data.size());
    }

    img.samples.resize(count);
    const int h = shape.height();
    const int w = shape.width();
    std::size_t pos = sc.pos;
    for (int file_row = 0; file_row < h; ++file_row) {
        const int row = h - 1 - file_row;  // file rows run bottom-up
        for (int c = 0; c < w; ++c) {
            const auto b0 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos]));
            const auto b1 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 1]));
            const auto b2 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 2]));
            const auto b3 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 3]));
            const std::uint32_t bits = little_endian ? (b0 | (b1 << 8) | (b2 << 16) | (b3 << 24))
                                                     : (b3 | (b2 << 8) | (b1 << 16) | (b0 << 24));
            img.samples[shape.index(row, c)] = std::bit_cast<float>(bits);
            pos += 4;
        }
    }
    return img;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline void store_pgm(const std::filesystem::path& path, const GridShape& shape,
                      const std::vector<std::uint8_t>& samples) {
    std::string out = "P5\n" + std::to_string(shape.width()) + " " + std::to_string(shape.height()) + "\n255\n";
    out.append(samples.begin(), samples.end());
    detail::write_file(path, out);
}

inline void store_pfm(const std::filesystem::path& path, const GridShape& shape, const std::vector<float>& samples) {
    std::string out = "Pf\n" + std::to_string(shape.width()) + " " + std::to_string(shape.height()) + "\n-1.0\n";
    out.reserve(out.size() + shape.size() * 4);
    for (int file_row = 0; file_row < shape.height(); ++file_row) {
        const int row = shape.height() - 1 - file_row;
        for (int c = 0; c < shape.width(); ++c) {
            const std::uint32_t bits = std::bit_cast<std::uint32_t>(samples[shape.index(row, c)]);
            out += static_cast<char>(bits & 0xFF);
            out += static_cast<char>((bits >> 8) & 0xFF);
            out += static_cast<char>((bits >> 16) & 0xFF);
            out += static_cast<char>((bits >> 24) & 0xFF);
        }
    }
    detail::write_file(path, out);
}

// Typed loaders and writers. Binary rasters travel as PGM with samples
// restricted to {0, 255}; scalar rasters as 8-bit PGM (g/255) or as PFM.

inline BinaryRaster binary_from_pgm(const PgmImage& img) {
    std::vector<std::uint8_t> bits(img.samples.size());
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        if (img.samples[i] != 0 && img.samples[i] != 255) {
            throw FormatError("binary raster requires samples 0 or 255, got " + std::to_string(img.samples[i]),
                              img.offset_of(i));
        }
        bits[i] = img.samples[i] == 255 ? 1 : 0;
    }
    return BinaryRaster(img.shape, std::move(bits));
}

inline ScalarRaster scalar_from_pgm(const PgmImage& img) {
    std::vector<double> values(img.samples.size());
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        values[i] = static_cast<double>(img.samples[i]) / 255.0;
    }
    return ScalarRaster(img.shape, std::move(values));
}

inline ScalarRaster scalar_from_pfm(const PfmImage& img) {
    std::vector<double> values(img.samples.size());
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        const float v = img.samples[i];
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw FormatError("scalar raster requires values in [0, 1]", img.offset_of(i));
        }
        values[i] = static_cast<double>(v);
    }
    return ScalarRaster(img.shape, std::move(values));
}

inline RealRaster field_from_pfm(const PfmImage& img) {
    std::vector<double> values(img.samples.size());
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        const float v = img.samples[i];
        if (!std::isfinite(v)) throw FormatError("score field requires finite values", img.offset_of(i));
        values[i] = static_cast<double>(v);
    }
    return RealRaster(img.shape, std::move(values));
}

inline BinaryRaster load_binary_raster(const std::filesystem::path& path) { return binary_from_pgm(load_pgm(path)); }

inline ScalarRaster load_scalar_raster(const std::filesystem::path& path, RasterFormat format) {
    return format == RasterFormat::pgm ? scalar_from_pgm(load_pgm(path)) : scalar_from_pfm(load_pfm(path));
}

inline RealRaster load_score_field(const std::filesystem::path& path) { return field_from_pfm(load_pfm(path)); }

inline void store_binary_raster(const BinaryRaster& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> samples(image.shape().size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = image.values()[i] ? 255 : 0;
    }
    store_pgm(path, image.shape(), samples);
}

inline void store_scalar_raster(const ScalarRaster& image, const std::filesystem::path& path, RasterFormat format) {
    if (format == RasterFormat::pgm) {
        std::vector<std::uint8_t> samples(image.shape().size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = static_cast<std::uint8_t>(std::lround(image.values()[i] * 255.0));
        }
        store_pgm(path, image.shape(), samples);
    } else {
        std::vector<float> samples(image.shape().size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = static_cast<float>(image.values()[i]);
        }
        store_pfm(path, image.shape(), samples);
    }
}

inline void store_real_raster(const RealRaster& image, const std::filesystem::path& path) {
    std::vector<float> samples(image.shape().size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<float>(image.values()[i]);
    }
    store_pfm(path, image.shape(), samples);
}

}  // namespace csp

#endif  // CSP_RASTER_IO_HPP
