#include "collapselab/ole.hpp"

#include "collapselab/errors.hpp"
#include "collapselab/numerics.hpp"
#include "collapselab/parallel.hpp"
#include "collapselab/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

namespace collapselab {

double ole_score(const RepresentationBatch& batch) {
    const Eigen::Index n = batch.features.cols();
    if (n == 0) throw InvalidInputError("ole_score: empty batch");
    if (n < 2) throw InvalidInputError("ole_score: need at least 2 samples");
    if (batch.labels.size() != static_cast<std::size_t>(n))
        throw InvalidInputError("ole_score: labels length mismatch");

    std::map<int, std::vector<Eigen::Index>> by_class;
    for (Eigen::Index i = 0; i < n; ++i) by_class[batch.labels[static_cast<std::size_t>(i)]].push_back(i);

    double class_sum = 0.0;
    for (const auto& [label, idx] : by_class) {
        Matrix mc(batch.features.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) mc.col(static_cast<Eigen::Index>(j)) = batch.features.col(idx[j]);
        class_sum += norms(mc).nuclear;
    }
    return class_sum - norms(batch.features).nuclear;
}

std::string OleScanTable::to_csv() const {
    std::string out = "generation,timestep,ole_mean,ole_std,n_batches\n";
    char line[160];
    for (const auto& c : cells) {
        std::snprintf(line, sizeof(line), "%d,%d,%.9g,%.9g,%d\n", c.generation, c.timestep,
                      c.ole_mean, c.ole_std, c.n_batches);
        out += line;
    }
    return out;
}

OleScanTable ole_scan(const std::vector<ProvenancedDataset>& per_generation,
                      const FrozenEncoder& encoder, const OleScanConfig& config) {
    if (per_generation.empty()) throw InvalidInputError("ole_scan: no datasets");
    for (int t : config.timesteps)
        if (t < 0 || t > encoder.schedule.steps())
            throw InvalidInputError("ole_scan: timestep out of range");
    if (config.batch_size < 2 || config.batches_per_cell < 1)
        throw InvalidInputError("ole_scan: batch_size >= 2 and batches_per_cell >= 1 required");

    const std::size_t n_gen = per_generation.size();
    const std::size_t n_t = config.timesteps.size();
    OleScanTable table;
    table.cells.resize(n_gen * n_t);

    parallel_for(table.cells.size(), config.workers, [&](std::size_t cell_idx) {
        const std::size_t gi = cell_idx / n_t;
        const std::size_t ti = cell_idx % n_t;
        const ProvenancedDataset& ds = per_generation[gi];
        const int t = config.timesteps[ti];
        const Eigen::Index bsize = std::min<Eigen::Index>(config.batch_size, ds.size());

        std::vector<double> oles;
        oles.reserve(static_cast<std::size_t>(config.batches_per_cell));
        for (int b = 0; b < config.batches_per_cell; ++b) {
            const std::uint64_t cell_seed = derive_seed(config.seed, stream::kScan, cell_idx,
                                                        static_cast<std::uint64_t>(b));
            const ProvenancedDataset batch_ds = uniform_subset(ds, bsize, cell_seed);
            RepresentationBatch batch;
            batch.features = encode_columns(encoder, batch_ds.features, t, cell_seed);
            if (config.label_source == LabelSource::GroundTruth) {
                batch.labels = batch_ds.labels;
            } else {
                const int k = static_cast<int>(
                    std::set<int>(batch_ds.labels.begin(), batch_ds.labels.end()).size());
                batch.labels = kmeans(batch.features, k, derive_seed(cell_seed, stream::kKmeans)).labels;
            }
            oles.push_back(ole_score(batch));
        }
        OleCell cell;
        cell.generation = static_cast<int>(gi);
        cell.timestep = t;
        cell.ole_mean = mean_of(oles);
        cell.ole_std = sample_std(oles);
        cell.n_batches = config.batches_per_cell;
        table.cells[cell_idx] = cell;
    });
    return table;
}

std::string CorrelationReport::scatter_csv() const {
    std::string out = "batch,ole,mean_generation,mean_confidence\n";
    char line[160];
    for (std::size_t i = 0; i < scatter.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g\n", i, scatter[i].ole,
                      scatter[i].mean_generation, scatter[i].mean_confidence);
        out += line;
    }
    return out;
}

CorrelationReport correlation_report(const std::vector<RepresentationBatch>& batches) {
    if (batches.size() < 10)
        throw InvalidInputError("correlation_report: need at least 10 batches");
    CorrelationReport report;
    std::vector<double> oles, gens, confs;
    for (const auto& b : batches) {
        if (b.generations.size() != static_cast<std::size_t>(b.features.cols()) ||
            b.confidences.size() != static_cast<std::size_t>(b.features.cols()))
            throw InvalidInputError("correlation_report: batches must carry tags and confidences");
        CorrelationRow row;
        row.ole = ole_score(b);
        row.mean_generation =
            std::accumulate(b.generations.begin(), b.generations.end(), 0.0) /
            static_cast<double>(b.generations.size());
        row.mean_confidence = mean_of(b.confidences);
        report.scatter.push_back(row);
        oles.push_back(row.ole);
        gens.push_back(row.mean_generation);
        confs.push_back(row.mean_confidence);
    }
    report.pearson_ole_generation = pearson(oles, gens);
    report.pearson_ole_confidence = pearson(oles, confs);
    return report;
}

} // namespace collapselab
