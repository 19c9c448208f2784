#include "resdiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "resdiff/tensor_io.hpp"

namespace resdiff {

namespace {

constexpr char kMagic[4] = {'R', 'D', 'K', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw IoError("checkpoint: truncated header");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) {
        throw IoError("checkpoint: truncated header");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

Tensor layer_w_tensor(const LinearLayer& layer) {
    return Tensor({static_cast<std::size_t>(layer.out), static_cast<std::size_t>(layer.in)},
                  layer.w);
}

Tensor layer_b_tensor(const LinearLayer& layer) {
    return Tensor({static_cast<std::size_t>(layer.out)}, layer.b);
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("checkpoint: cannot open " + path.string() + " for writing");
    }
    const DenoiserConfig& cfg = ck.params.config;
    out.write(kMagic, 4);
    put_u32(out, 1); // version
    put_u32(out, static_cast<std::uint32_t>(ck.schedule_steps));
    put_u32(out, static_cast<std::uint32_t>(cfg.x_dim));
    put_u32(out, static_cast<std::uint32_t>(cfg.cond_dim));
    put_u32(out, static_cast<std::uint32_t>(cfg.time_emb.dim));
    put_u64(out, std::bit_cast<std::uint64_t>(cfg.time_emb.base_period));
    put_u32(out, static_cast<std::uint32_t>(cfg.hidden.size()));
    for (int h : cfg.hidden) {
        put_u32(out, static_cast<std::uint32_t>(h));
    }
    put_u64(out, ck.seed);
    put_u64(out, ck.iterations);
    for (const auto& layer : ck.params.layers) {
        write_rsf1(out, layer_w_tensor(layer));
        write_rsf1(out, layer_b_tensor(layer));
    }
    if (!out) {
        throw IoError("checkpoint: write failed");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("checkpoint: cannot open " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("checkpoint: bad magic");
    }
    const std::uint32_t version = get_u32(in);
    if (version != 1) {
        throw IoError("checkpoint: unsupported version");
    }
    Checkpoint ck;
    ck.schedule_steps = static_cast<int>(get_u32(in));
    DenoiserConfig cfg;
    cfg.x_dim = static_cast<int>(get_u32(in));
    cfg.cond_dim = static_cast<int>(get_u32(in));
    cfg.time_emb.dim = static_cast<int>(get_u32(in));
    cfg.time_emb.base_period = std::bit_cast<double>(get_u64(in));
    const std::uint32_t n_hidden = get_u32(in);
    cfg.hidden.clear();
    for (std::uint32_t i = 0; i < n_hidden; ++i) {
        cfg.hidden.push_back(static_cast<int>(get_u32(in)));
    }
    ck.seed = get_u64(in);
    ck.iterations = get_u64(in);

    ck.params = DenoiserParams::zeros(cfg);
    for (auto& layer : ck.params.layers) {
        const Tensor w = read_rsf1(in);
        const Tensor b = read_rsf1(in);
        if (w.rank() != 2 || static_cast<int>(w.shape()[0]) != layer.out ||
            static_cast<int>(w.shape()[1]) != layer.in || b.rank() != 1 ||
            static_cast<int>(b.shape()[0]) != layer.out) {
            throw IoError("checkpoint: layer shape mismatch");
        }
        layer.w.assign(w.data().begin(), w.data().end());
        layer.b.assign(b.data().begin(), b.data().end());
    }
    return ck;
}

} // namespace resdiff
