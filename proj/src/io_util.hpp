// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "p2p/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are defined little-endian and written natively");

namespace p2p::io {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

inline File open_write(const std::string& path) {
    File f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

inline File open_read(const std::string& path) {
    File f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open for reading: " + path);
    return f;
}

inline void write_raw(std::FILE* f, const void* p, size_t bytes, const std::string& path) {
    if (std::fwrite(p, 1, bytes, f) != bytes) throw IoError("write failed: " + path);
}

inline void read_raw(std::FILE* f, void* p, size_t bytes, const std::string& path) {
    if (std::fread(p, 1, bytes, f) != bytes) {
        throw FormatError("unexpected end of file: " + path);
    }
}

template <typename T>
void write_pod(std::FILE* f, const T& v, const std::string& path) {
    write_raw(f, &v, sizeof(T), path);
}

template <typename T>
T read_pod(std::FILE* f, const std::string& path) {
    T v;
    read_raw(f, &v, sizeof(T), path);
    return v;
}

inline void check_magic(std::FILE* f, const char expect[5], const std::string& path) {
    char magic[4];
    read_raw(f, magic, 4, path);
    if (std::memcmp(magic, expect, 4) != 0) {
        throw FormatError(std::string("bad magic, not a ") + expect + " file: " + path);
    }
}

inline void write_string(std::FILE* f, const std::string& s, const std::string& path) {
    write_pod<uint32_t>(f, static_cast<uint32_t>(s.size()), path);
    write_raw(f, s.data(), s.size(), path);
}

inline std::string read_string(std::FILE* f, const std::string& path) {
    const uint32_t len = read_pod<uint32_t>(f, path);
    if (len > (1u << 20)) throw FormatError("implausible string length: " + path);
    std::string s(len, '\0');
    read_raw(f, s.data(), len, path);
    return s;
}

}  // namespace p2p::io
