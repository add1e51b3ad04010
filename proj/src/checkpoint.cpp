// SPDX-License-Identifier: Apache-2.0
#include "fairdiff/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fairdiff/errors.hpp"

namespace fairdiff {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    char buf[4];
    if (!in.read(buf, 4)) throw IoError("truncated checkpoint: " + path);
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_doubles(std::istream& in, std::vector<double>& v, const std::string& path) {
    if (!in.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(double)))) {
        throw IoError("truncated checkpoint: " + path);
    }
}

}  // namespace

void save_checkpoint(const DenoiserParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);

    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(params.dim));
    put_u32(out, static_cast<std::uint32_t>(params.hidden));
    put_u32(out, static_cast<std::uint32_t>(params.embed));
    put_u32(out, 6);

    const int in_width = params.dim + params.embed;
    const std::uint32_t shapes[6][2] = {
        {static_cast<std::uint32_t>(params.hidden), static_cast<std::uint32_t>(in_width)},
        {static_cast<std::uint32_t>(params.hidden), 1},
        {static_cast<std::uint32_t>(params.hidden), static_cast<std::uint32_t>(params.hidden)},
        {static_cast<std::uint32_t>(params.hidden), 1},
        {static_cast<std::uint32_t>(params.dim), static_cast<std::uint32_t>(params.hidden)},
        {static_cast<std::uint32_t>(params.dim), 1},
    };
    for (const auto& s : shapes) {
        put_u32(out, s[0]);
        put_u32(out, s[1]);
    }
    for (const auto* tensor : {&params.w1, &params.b1, &params.w2, &params.b2, &params.w3, &params.b3}) {
        put_doubles(out, *tensor);
    }
    if (!out) throw IoError("checkpoint write failed: " + path);
}

DenoiserParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not a checkpoint file: " + path);
    }
    if (get_u32(in, path) != kVersion) throw IoError("unsupported checkpoint version: " + path);

    DenoiserParams p;
    p.dim = static_cast<int>(get_u32(in, path));
    p.hidden = static_cast<int>(get_u32(in, path));
    p.embed = static_cast<int>(get_u32(in, path));
    if (p.dim < 1 || p.hidden < 1 || p.embed < 2) {
        throw IoError("corrupt checkpoint header: " + path);
    }
    if (get_u32(in, path) != 6) throw IoError("unexpected tensor count: " + path);

    const std::uint32_t expect[6][2] = {
        {static_cast<std::uint32_t>(p.hidden), static_cast<std::uint32_t>(p.dim + p.embed)},
        {static_cast<std::uint32_t>(p.hidden), 1},
        {static_cast<std::uint32_t>(p.hidden), static_cast<std::uint32_t>(p.hidden)},
        {static_cast<std::uint32_t>(p.hidden), 1},
        {static_cast<std::uint32_t>(p.dim), static_cast<std::uint32_t>(p.hidden)},
        {static_cast<std::uint32_t>(p.dim), 1},
    };
    for (const auto& s : expect) {
        if (get_u32(in, path) != s[0] || get_u32(in, path) != s[1]) {
            throw IoError("unexpected tensor shape in checkpoint: " + path);
        }
    }

    p.w1.resize(static_cast<std::size_t>(p.hidden) * (p.dim + p.embed));
    p.b1.resize(static_cast<std::size_t>(p.hidden));
    p.w2.resize(static_cast<std::size_t>(p.hidden) * p.hidden);
    p.b2.resize(static_cast<std::size_t>(p.hidden));
    p.w3.resize(static_cast<std::size_t>(p.dim) * p.hidden);
    p.b3.resize(static_cast<std::size_t>(p.dim));
    for (auto* tensor : {&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3}) {
        get_doubles(in, *tensor, path);
    }
    return p;
}

}  // namespace fairdiff
