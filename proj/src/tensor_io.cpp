#include "resdiff/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace resdiff {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    }
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw IoError("rsf1: truncated header");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) {
        throw IoError("rsf1: truncated data");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

} // namespace

void write_rsf1(std::ostream& out, const Tensor& t) {
    out.write(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) {
        put_u32(out, static_cast<std::uint32_t>(d));
    }
    for (double v : t.data()) {
        put_f64(out, v);
    }
    if (!out) {
        throw IoError("rsf1: write failed");
    }
}

Tensor read_rsf1(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("rsf1: bad magic");
    }
    const std::uint32_t rank = get_u32(in);
    if (rank == 0 || rank > 32) {
        throw IoError("rsf1: bad rank");
    }
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
        d = get_u32(in);
        if (d == 0 || n > std::numeric_limits<std::size_t>::max() / d) {
            throw IoError("rsf1: bad dims");
        }
        n *= d;
    }
    std::vector<double> data(n);
    for (auto& v : data) {
        v = get_f64(in);
    }
    return Tensor(std::move(shape), std::move(data));
}

void save_rsf1(const std::filesystem::path& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("rsf1: cannot open " + path.string() + " for writing");
    }
    write_rsf1(out, t);
}

Tensor load_rsf1(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("rsf1: cannot open " + path.string());
    }
    return read_rsf1(in);
}

} // namespace resdiff
