#pragma once

// Netpbm readers/writers (PGM, PPM, PBM at maxval 255) and block tiling.

#include <Eigen/Core>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ogseg/error.hpp"

namespace ogseg {

/// Row-major 2D grid of samples. Index (x, y) maps to data[y * width + x].
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::size_t size() const noexcept { return data.size(); }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    decltype(auto) at(int x, int y) { return data[index(x, y)]; }
    decltype(auto) at(int x, int y) const { return data[index(x, y)]; }

    friend bool operator==(const Raster&, const Raster&) = default;
};

/// Intensities in [0, 255], real valued.
using GrayImage = Raster<double>;
/// true = foreground.
using BinaryMask = Raster<bool>;

inline std::size_t count_set(const BinaryMask& mask) {
    return static_cast<std::size_t>(std::count(mask.data.begin(), mask.data.end(), true));
}

/// BT.601 luma.
inline double luma(double r, double g, double b) noexcept {
    return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 255.0);
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Writes to a sibling temporary file and renames it over the destination.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::io, "cannot rename onto " + path.string());
    }
}

/// Cursor over a netpbm byte stream; understands header whitespace and '#' comments.
class PnmReader {
public:
    explicit PnmReader(std::string bytes) : buf_(std::move(bytes)) {}

    std::string magic() {
        if (buf_.size() < 2 || buf_[0] != 'P') throw Error(ErrorCode::unsupported_format, "missing netpbm magic");
        pos_ = 2;
        return buf_.substr(0, 2);
    }

    int header_int() {
        skip_space_and_comments();
        if (pos_ >= buf_.size()) throw Error(ErrorCode::malformed_header, "header ends early");
        if (!std::isdigit(static_cast<unsigned char>(buf_[pos_])))
            throw Error(ErrorCode::malformed_header, "expected a decimal header field");
        long value = 0;
        while (pos_ < buf_.size() && std::isdigit(static_cast<unsigned char>(buf_[pos_]))) {
            value = value * 10 + (buf_[pos_] - '0');
            if (value > 1'000'000'000) throw Error(ErrorCode::malformed_header, "header field too large");
            ++pos_;
        }
        return static_cast<int>(value);
    }

    /// The single whitespace byte separating the header from a binary raster.
    void end_of_header() {
        if (pos_ >= buf_.size() || !std::isspace(static_cast<unsigned char>(buf_[pos_])))
            throw Error(ErrorCode::malformed_header, "header not terminated by whitespace");
        ++pos_;
    }

    /// Next ASCII sample; truncated_payload at end of input.
    int ascii_int() {
        skip_space_and_comments();
        if (pos_ >= buf_.size()) throw Error(ErrorCode::truncated_payload, "ASCII raster ends early");
        return header_int();
    }

    /// P1 digits may be packed without separators.
    bool ascii_bit() {
        skip_space_and_comments();
        if (pos_ >= buf_.size()) throw Error(ErrorCode::truncated_payload, "ASCII bitmap ends early");
        const char c = buf_[pos_++];
        if (c != '0' && c != '1') throw Error(ErrorCode::malformed_header, "P1 raster holds a non-bit character");
        return c == '1';
    }

    std::size_t remaining() const noexcept { return buf_.size() - pos_; }

    const unsigned char* take(std::size_t count) {
        if (remaining() < count) throw Error(ErrorCode::truncated_payload, "binary raster ends early");
        const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
        pos_ += count;
        return p;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < buf_.size()) {
            const char c = buf_[pos_];
            if (c == '#') {
                while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string buf_;
    std::size_t pos_ = 0;
};

inline void check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw Error(ErrorCode::malformed_header, "non-positive image dimensions");
}

inline void check_maxval(int maxval) {
    if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::malformed_header, "maxval out of range");
    if (maxval != 255) throw Error(ErrorCode::unsupported_format, "only maxval 255 is supported");
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace detail

/// Parses PGM (P2/P5) directly and PPM (P3/P6) through BT.601 luma.
inline GrayImage decode_gray(std::string bytes) {
    detail::PnmReader rd(std::move(bytes));
    const std::string magic = rd.magic();
    if (magic != "P2" && magic != "P5" && magic != "P3" && magic != "P6")
        throw Error(ErrorCode::unsupported_format, "magic " + magic + " is not a graymap or pixmap");
    const int w = rd.header_int();
    const int h = rd.header_int();
    detail::check_dims(w, h);
    detail::check_maxval(rd.header_int());

    GrayImage img(w, h);
    const std::size_t n = img.size();
    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) img.data[i] = std::min(rd.ascii_int(), 255);
    } else if (magic == "P3") {
        for (std::size_t i = 0; i < n; ++i) {
            const int r = std::min(rd.ascii_int(), 255);
            const int g = std::min(rd.ascii_int(), 255);
            const int b = std::min(rd.ascii_int(), 255);
            img.data[i] = luma(r, g, b);
        }
    } else if (magic == "P5") {
        rd.end_of_header();
        const unsigned char* p = rd.take(n);
        for (std::size_t i = 0; i < n; ++i) img.data[i] = p[i];
    } else {
        rd.end_of_header();
        const unsigned char* p = rd.take(3 * n);
        for (std::size_t i = 0; i < n; ++i) img.data[i] = luma(p[3 * i], p[3 * i + 1], p[3 * i + 2]);
    }
    return img;
}

inline GrayImage load_gray(const std::filesystem::path& path) { return decode_gray(detail::read_file(path)); }

/// Binary PGM; samples are rounded and clamped to [0, 255].
inline std::string encode_gray(const GrayImage& img) {
    std::ostringstream head;
    head << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    std::string out = head.str();
    out.reserve(out.size() + img.size());
    for (double v : img.data) out.push_back(static_cast<char>(detail::to_byte(v)));
    return out;
}

inline void save_gray(const GrayImage& img, const std::filesystem::path& path) {
    detail::write_file_atomic(path, encode_gray(img));
}

/// Accepts P1 and P4; a set PBM bit (black) is foreground.
inline BinaryMask decode_mask(std::string bytes) {
    detail::PnmReader rd(std::move(bytes));
    const std::string magic = rd.magic();
    if (magic != "P1" && magic != "P4") throw Error(ErrorCode::unsupported_format, "magic " + magic + " is not a bitmap");
    const int w = rd.header_int();
    const int h = rd.header_int();
    detail::check_dims(w, h);

    BinaryMask mask(w, h);
    if (magic == "P1") {
        for (std::size_t i = 0; i < mask.size(); ++i) mask.data[i] = rd.ascii_bit();
        return mask;
    }
    rd.end_of_header();
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    const unsigned char* p = rd.take(row_bytes * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        const unsigned char* row = p + row_bytes * static_cast<std::size_t>(y);
        for (int x = 0; x < w; ++x) mask.at(x, y) = (row[x / 8] >> (7 - x % 8)) & 1U;
    }
    return mask;
}

inline BinaryMask load_mask(const std::filesystem::path& path) { return decode_mask(detail::read_file(path)); }

/// Binary PBM (P4), MSB-first, each row padded to a whole byte.
inline std::string encode_mask(const BinaryMask& mask) {
    std::ostringstream head;
    head << "P4\n" << mask.width << ' ' << mask.height << '\n';
    std::string out = head.str();
    const std::size_t row_bytes = (static_cast<std::size_t>(mask.width) + 7) / 8;
    for (int y = 0; y < mask.height; ++y) {
        std::string row(row_bytes, '\0');
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y)) row[x / 8] = static_cast<char>(static_cast<unsigned char>(row[x / 8]) | (0x80U >> (x % 8)));
        }
        out += row;
    }
    return out;
}

inline void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    detail::write_file_atomic(path, encode_mask(mask));
}

// ---------------------------------------------------------------------------
// Tiling

struct Block {
    int origin_x = 0;
    int origin_y = 0;
    int pad_right = 0;   // replicated columns beyond the image edge
    int pad_bottom = 0;  // replicated rows beyond the image edge
    Eigen::VectorXd pixels;  // n*n samples, row-major
};

struct BlockGrid {
    int block_size = 0;
    int image_width = 0;
    int image_height = 0;
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<Block> blocks;  // row-major over tiles
};

inline BlockGrid tile(const GrayImage& img, int n) {
    if (n < 2) throw Error(ErrorCode::invalid_argument, "block size must be at least 2");
    if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::invalid_argument, "empty image");
    BlockGrid grid;
    grid.block_size = n;
    grid.image_width = img.width;
    grid.image_height = img.height;
    grid.tiles_x = (img.width + n - 1) / n;
    grid.tiles_y = (img.height + n - 1) / n;
    grid.blocks.reserve(static_cast<std::size_t>(grid.tiles_x) * static_cast<std::size_t>(grid.tiles_y));
    for (int ty = 0; ty < grid.tiles_y; ++ty) {
        for (int tx = 0; tx < grid.tiles_x; ++tx) {
            Block b;
            b.origin_x = tx * n;
            b.origin_y = ty * n;
            b.pad_right = std::max(0, b.origin_x + n - img.width);
            b.pad_bottom = std::max(0, b.origin_y + n - img.height);
            b.pixels.resize(static_cast<Eigen::Index>(n) * n);
            for (int y = 0; y < n; ++y) {
                const int sy = std::min(b.origin_y + y, img.height - 1);
                for (int x = 0; x < n; ++x) {
                    const int sx = std::min(b.origin_x + x, img.width - 1);
                    b.pixels[static_cast<Eigen::Index>(y) * n + x] = img.at(sx, sy);
                }
            }
            grid.blocks.push_back(std::move(b));
        }
    }
    return grid;
}

/// Reassembles per-block rasters (n x n each) into an image-sized raster, dropping padding.
template <typename T>
Raster<T> stitch(const BlockGrid& grid, const std::vector<Raster<T>>& per_block) {
    if (per_block.size() != grid.blocks.size())
        throw Error(ErrorCode::dimension_mismatch, "per-block list length differs from tile count");
    const int n = grid.block_size;
    Raster<T> out(grid.image_width, grid.image_height);
    for (std::size_t i = 0; i < per_block.size(); ++i) {
        const Raster<T>& part = per_block[i];
        if (part.width != n || part.height != n)
            throw Error(ErrorCode::dimension_mismatch, "per-block raster is not block_size x block_size");
        const Block& b = grid.blocks[i];
        for (int y = 0; y < n - b.pad_bottom; ++y)
            for (int x = 0; x < n - b.pad_right; ++x) out.at(b.origin_x + x, b.origin_y + y) = part.at(x, y);
    }
    return out;
}

/// n x n raster view of a flat block vector.
inline GrayImage block_to_image(const Eigen::VectorXd& v, int n) {
    if (v.size() != static_cast<Eigen::Index>(n) * n) throw Error(ErrorCode::dimension_mismatch, "vector is not n*n");
    GrayImage img(n, n);
    for (Eigen::Index i = 0; i < v.size(); ++i) img.data[static_cast<std::size_t>(i)] = v[i];
    return img;
}

inline Eigen::VectorXd image_to_vector(const GrayImage& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.data.data(), static_cast<Eigen::Index>(img.size()));
}

}  // namespace ogseg
