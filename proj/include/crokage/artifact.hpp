#pragma once

// Versioned binary envelope shared by corpus.bin and indices.bin:
//   magic[4] | u32 version | u64 fnv1a(payload) | u64 payload size | payload
// The payload is a cereal portable binary archive.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <cereal/archives/portable_binary.hpp>

#include "crokage/errors.hpp"

namespace crokage::artifact {

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class Fn>
std::string encode_payload(Fn&& write) {
    std::ostringstream buf(std::ios::binary);
    {
        cereal::PortableBinaryOutputArchive ar(buf);
        write(ar);
    }
    return std::move(buf).str();
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t read_uint(std::istream& in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int c = in.get();
        if (c == EOF) throw ArtifactError("truncated artifact header");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

inline void write_file(const std::filesystem::path& path, std::string_view magic, std::uint32_t version,
                       const std::string& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write " + path.string());
    out.write(magic.data(), 4);
    write_u32(out, version);
    write_u64(out, fnv1a(payload));
    write_u64(out, payload.size());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw ArtifactError("failed writing " + path.string());
}

struct Envelope {
    std::uint64_t hash = 0;
    std::string payload;
};

inline Envelope read_file(const std::filesystem::path& path, std::string_view magic, std::uint32_t version) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("missing artifact: " + path.string());
    char got[4] = {};
    in.read(got, 4);
    if (!in || std::string_view(got, 4) != magic) {
        throw ArtifactError("not a " + std::string(magic) + " artifact: " + path.string());
    }
    auto v = static_cast<std::uint32_t>(read_uint(in, 4));
    if (v != version) {
        throw ArtifactError("artifact version mismatch in " + path.string() + ": expected " +
                            std::to_string(version) + ", found " + std::to_string(v));
    }
    Envelope env;
    env.hash = read_uint(in, 8);
    auto size = read_uint(in, 8);
    std::error_code ec;
    const auto on_disk = std::filesystem::file_size(path, ec);
    if (!ec && size > on_disk) throw ArtifactError("truncated artifact: " + path.string());
    env.payload.resize(size);
    in.read(env.payload.data(), static_cast<std::streamsize>(size));
    if (static_cast<std::uint64_t>(in.gcount()) != size) {
        throw ArtifactError("truncated artifact: " + path.string());
    }
    if (fnv1a(env.payload) != env.hash) throw ArtifactError("checksum mismatch in " + path.string());
    return env;
}

template <class Fn>
void decode_payload(const std::string& payload, Fn&& read) {
    std::istringstream buf(payload, std::ios::binary);
    cereal::PortableBinaryInputArchive ar(buf);
    read(ar);
}

}  // namespace crokage::artifact
