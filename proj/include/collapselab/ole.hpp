#pragma once

#include "collapselab/dataset.hpp"
#include "collapselab/diffusion.hpp"
#include "collapselab/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace collapselab {

/// A batch of latent representations: one column per sample, with class
/// labels and optional provenance used by the correlation analyses.
struct RepresentationBatch {
    Matrix features;  // p x N
    std::vector<int> labels;
    std::vector<int> generations;      // optional, empty if untagged
    std::vector<double> confidences;   // optional, empty if unscored
};

/// OLE = sum_c ||M_c||_* - ||M||_*. Non-negative up to roundoff; zero when
/// the class column spaces are mutually orthogonal. Classes absent from the
/// batch simply contribute nothing.
double ole_score(const RepresentationBatch& batch);

struct OleCell {
    int generation = 0;
    int timestep = 0;
    double ole_mean = 0.0;
    double ole_std = 0.0;
    int n_batches = 0;
};

struct OleScanTable {
    std::vector<OleCell> cells;  // ordered by (generation, timestep)
    std::string to_csv() const;  // generation,timestep,ole_mean,ole_std,n_batches
};

enum class LabelSource { GroundTruth, KMeans };

struct OleScanConfig {
    std::vector<int> timesteps;
    int batch_size = 64;
    int batches_per_cell = 10;
    LabelSource label_source = LabelSource::GroundTruth;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// OLE statistics per (generation, timestep) cell: batches are drawn from
/// the generation's dataset, encoded at the cell's timestep, and scored.
/// Cell computations are independent; the table is assembled by index.
OleScanTable ole_scan(const std::vector<ProvenancedDataset>& per_generation,
                      const FrozenEncoder& encoder, const OleScanConfig& config);

struct CorrelationRow {
    double ole = 0.0;
    double mean_generation = 0.0;
    double mean_confidence = 0.0;
};

struct CorrelationReport {
    double pearson_ole_generation = 0.0;
    double pearson_ole_confidence = 0.0;
    std::vector<CorrelationRow> scatter;
    std::string scatter_csv() const;  // batch,ole,mean_generation,mean_confidence
};

/// Batch-level OLE against mean generation tag and mean confidence.
/// Needs >= 10 batches, each carrying tags and confidences; throws an
/// undefined-correlation error if any series has zero variance.
CorrelationReport correlation_report(const std::vector<RepresentationBatch>& batches);

} // namespace collapselab
