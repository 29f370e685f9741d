#pragma once

#include "collapselab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace collapselab {

/// Sample matrix plus per-sample provenance: class label, generation of
/// origin, and whether the sample is real. The unit that flows through
/// every self-consuming loop. Columns of `features` are samples.
struct ProvenancedDataset {
    Matrix features;                 // d x n
    std::vector<int> labels;         // class id per column
    std::vector<int> generations;    // generation of origin, >= 0
    std::vector<std::uint8_t> real;  // 1 = real sample

    Eigen::Index size() const { return features.cols(); }
    Eigen::Index dim() const { return features.rows(); }

    /// Parallel-array lengths must match the column count.
    void validate() const;

    /// New dataset from the given column indices, in order.
    ProvenancedDataset select(const std::vector<Eigen::Index>& idx) const;
};

ProvenancedDataset concat(const std::vector<ProvenancedDataset>& parts);

/// Uniform random n-subset (without replacement), original relative order kept.
ProvenancedDataset uniform_subset(const ProvenancedDataset& ds, Eigen::Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// LSFD container
//
// Dataset file layout (little-endian):
//   magic "LSFD" | u32 version | u64 n | u64 d |
//   n*d f64 features, sample-major | n x (i32 label, i32 generation, u8 real)
//
// Probes, score models and encoders reuse the same magic/version prelude
// followed by a 4-byte section tag ("PROB", "GSCM", "ENCD") and a typed
// payload; see dataset.cpp for the field order.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kLsfdVersion = 1;

void write_dataset(const std::string& path, const ProvenancedDataset& ds);
ProvenancedDataset read_dataset(const std::string& path);

} // namespace collapselab
