#include "collapselab/dataset.hpp"

#include "collapselab/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

namespace collapselab {

void ProvenancedDataset::validate() const {
    const auto n = static_cast<std::size_t>(features.cols());
    if (labels.size() != n || generations.size() != n || real.size() != n)
        throw InvalidInputError("ProvenancedDataset: parallel arrays out of sync");
    for (int g : generations)
        if (g < 0) throw InvalidInputError("ProvenancedDataset: negative generation tag");
}

ProvenancedDataset ProvenancedDataset::select(const std::vector<Eigen::Index>& idx) const {
    ProvenancedDataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(idx.size()));
    out.labels.reserve(idx.size());
    out.generations.reserve(idx.size());
    out.real.reserve(idx.size());
    Eigen::Index j = 0;
    for (Eigen::Index i : idx) {
        out.features.col(j++) = features.col(i);
        out.labels.push_back(labels[static_cast<std::size_t>(i)]);
        out.generations.push_back(generations[static_cast<std::size_t>(i)]);
        out.real.push_back(real[static_cast<std::size_t>(i)]);
    }
    return out;
}

ProvenancedDataset concat(const std::vector<ProvenancedDataset>& parts) {
    if (parts.empty()) throw InvalidInputError("concat: no datasets given");
    Eigen::Index total = 0;
    for (const auto& p : parts) {
        if (p.dim() != parts.front().dim())
            throw InvalidInputError("concat: feature dimensions differ");
        total += p.size();
    }
    ProvenancedDataset out;
    out.features.resize(parts.front().dim(), total);
    out.labels.reserve(static_cast<std::size_t>(total));
    out.generations.reserve(static_cast<std::size_t>(total));
    out.real.reserve(static_cast<std::size_t>(total));
    Eigen::Index col = 0;
    for (const auto& p : parts) {
        out.features.middleCols(col, p.size()) = p.features;
        col += p.size();
        out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
        out.generations.insert(out.generations.end(), p.generations.begin(), p.generations.end());
        out.real.insert(out.real.end(), p.real.begin(), p.real.end());
    }
    return out;
}

ProvenancedDataset uniform_subset(const ProvenancedDataset& ds, Eigen::Index n, std::uint64_t seed) {
    if (n < 0 || n > ds.size())
        throw InvalidInputError("uniform_subset: subset size out of range");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(seed);
    // partial Fisher-Yates, then restore input order among the chosen
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(rng.index(idx.size() - static_cast<std::size_t>(i))) + i;
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(n));
    std::sort(idx.begin(), idx.end());
    return ds.select(idx);
}

namespace {

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const char* field) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("LSFD: truncated file while reading ") + field);
    return value;
}

} // namespace

void write_dataset(const std::string& path, const ProvenancedDataset& ds) {
    ds.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("LSFD: cannot open for writing: " + path);
    out.write("LSFD", 4);
    write_raw(out, kLsfdVersion);
    write_raw(out, static_cast<std::uint64_t>(ds.size()));
    write_raw(out, static_cast<std::uint64_t>(ds.dim()));
    for (Eigen::Index i = 0; i < ds.size(); ++i)
        for (Eigen::Index j = 0; j < ds.dim(); ++j) write_raw(out, ds.features(j, i));
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        write_raw(out, static_cast<std::int32_t>(ds.labels[static_cast<std::size_t>(i)]));
        write_raw(out, static_cast<std::int32_t>(ds.generations[static_cast<std::size_t>(i)]));
        write_raw(out, ds.real[static_cast<std::size_t>(i)]);
    }
    if (!out) throw IoError("LSFD: write failed: " + path);
}

ProvenancedDataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("LSFD: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LSFD", 4) != 0)
        throw IoError("LSFD: bad magic in " + path);
    const auto version = read_raw<std::uint32_t>(in, "version");
    if (version != kLsfdVersion)
        throw IoError("LSFD: unsupported version " + std::to_string(version));
    const auto n = read_raw<std::uint64_t>(in, "sample count");
    const auto d = read_raw<std::uint64_t>(in, "dimension");
    ProvenancedDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < d; ++j)
            ds.features(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                read_raw<double>(in, "features");
    ds.labels.resize(n);
    ds.generations.resize(n);
    ds.real.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        ds.labels[i] = read_raw<std::int32_t>(in, "label");
        ds.generations[i] = read_raw<std::int32_t>(in, "generation");
        ds.real[i] = read_raw<std::uint8_t>(in, "real flag");
    }
    ds.validate();
    return ds;
}

} // namespace collapselab
