#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "grid.hpp"

namespace zspace {

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline void put_f64(std::string& out, double x) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

class ByteReader {
public:
    explicit ByteReader(const std::string& bytes) : b_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b_[pos_ + b])) << (8 * b);
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::size_t remaining() const { return b_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) throw FormatError("HSF1: truncated payload");
    }
    const std::string& b_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_field(const HalfSpaceField& F) {
    validate(F);
    std::string out = "HSF1";
    detail::put_u32(out, static_cast<std::uint32_t>(F.grid.d));
    detail::put_u32(out, static_cast<std::uint32_t>(F.grid.n_x));
    detail::put_u32(out, static_cast<std::uint32_t>(F.grid.J + 1));
    detail::put_f64(out, F.grid.L);
    detail::put_f64(out, F.grid.t_min);
    detail::put_f64(out, F.grid.t_max);
    detail::put_u32(out, static_cast<std::uint32_t>(F.grid.s_oct));
    out.reserve(out.size() + 8 * F.values.size());
    for (double v : F.values) detail::put_f64(out, v);
    return out;
}

inline HalfSpaceField decode_field(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, "HSF1") != 0) throw FormatError("HSF1: bad magic");
    std::string body = bytes.substr(4);
    detail::ByteReader rd(body);
    std::uint32_t d = rd.u32(), n_x = rd.u32(), tcount = rd.u32();
    double L = rd.f64(), t_min = rd.f64(), t_max = rd.f64();
    std::uint32_t s_oct = rd.u32();
    TorusGrid g;
    try {
        g = make_grid(static_cast<int>(d), L, n_x, t_min, t_max, static_cast<int>(s_oct));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("HSF1: invalid grid header: ") + e.what());
    }
    if (tcount != g.t_count()) throw FormatError("HSF1: t count does not match header grid");
    if (rd.remaining() < 8 * g.size()) throw FormatError("HSF1: truncated payload");
    if (rd.remaining() > 8 * g.size()) throw FormatError("HSF1: trailing bytes after payload");
    HalfSpaceField F{g, std::vector<double>(g.size())};
    for (double& v : F.values) {
        v = rd.f64();
        if (!std::isfinite(v)) throw FormatError("HSF1: non-finite value in payload");
    }
    return F;
}

inline void save_field(const HalfSpaceField& F, const std::string& path) {
    std::string bytes = encode_field(F);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + path);
}

inline HalfSpaceField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_field(bytes);
}

}  // namespace zspace
