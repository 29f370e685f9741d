#pragma once

// Private helpers for the LSFD container prelude and section tags.
// Host is assumed little-endian, matching the on-disk format.

#include "collapselab/dataset.hpp"
#include "collapselab/errors.hpp"

#include <cstring>
#include <fstream>
#include <string>

namespace collapselab::binio {

template <typename T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const char* field) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("LSFD: truncated file while reading ") + field);
    return value;
}

inline std::ofstream open_section_writer(const std::string& path, const char tag[4]) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("LSFD: cannot open for writing: " + path);
    out.write("LSFD", 4);
    put(out, kLsfdVersion);
    out.write(tag, 4);
    return out;
}

inline std::ifstream open_section_reader(const std::string& path, const char tag[4]) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("LSFD: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LSFD", 4) != 0) throw IoError("LSFD: bad magic in " + path);
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kLsfdVersion)
        throw IoError("LSFD: unsupported version " + std::to_string(version));
    char got[4];
    in.read(got, 4);
    if (!in || std::memcmp(got, tag, 4) != 0)
        throw IoError("LSFD: expected section " + std::string(tag, 4) + " in " + path);
    return in;
}

inline void put_matrix(std::ofstream& out, const Matrix& m) {
    put(out, static_cast<std::uint64_t>(m.rows()));
    put(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) put(out, m(i, j));
}

inline Matrix get_matrix(std::ifstream& in, const char* field) {
    const auto rows = get<std::uint64_t>(in, field);
    const auto cols = get<std::uint64_t>(in, field);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = get<double>(in, field);
    return m;
}

} // namespace collapselab::binio
