#include "collapselab/probe.hpp"

#include "collapselab/errors.hpp"
#include "collapselab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "binio.hpp"

namespace collapselab {

namespace {

// column-wise max-subtracted softmax of logits (C x n)
Matrix softmax_columns(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double mx = logits.col(j).maxCoeff();
        p.col(j) = (logits.col(j).array() - mx).exp();
        p.col(j) /= p.col(j).sum();
    }
    return p;
}

} // namespace

ProbeClassifier train_probe(const Matrix& latents, const std::vector<int>& labels,
                            const ProbeHyperparams& hyper, int tstar,
                            std::vector<double>* loss_history) {
    const Eigen::Index n = latents.cols();
    const Eigen::Index p = latents.rows();
    if (labels.size() != static_cast<std::size_t>(n))
        throw InvalidInputError("train_probe: labels length mismatch");
    if (n < 2) throw InvalidInputError("train_probe: need at least 2 samples");
    const std::set<int> present(labels.begin(), labels.end());
    if (present.size() < 2) throw InvalidInputError("train_probe: need at least 2 classes");
    const int classes = *present.rbegin() + 1;
    if (*present.begin() < 0) throw InvalidInputError("train_probe: negative class label");

    Matrix onehot = Matrix::Zero(classes, n);
    for (Eigen::Index i = 0; i < n; ++i) onehot(labels[static_cast<std::size_t>(i)], i) = 1.0;

    ProbeClassifier probe;
    probe.weights = Matrix::Zero(classes, p);
    probe.biases = Vector::Zero(classes);
    probe.tstar = tstar;

    auto loss_of = [&](const Matrix& probs) {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            loss -= std::log(std::max(1e-300, probs(labels[static_cast<std::size_t>(i)], i)));
        return loss / static_cast<double>(n) + 0.5 * hyper.l2 * probe.weights.squaredNorm();
    };

    double initial_loss = 0.0;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const Matrix logits = (probe.weights * latents).colwise() + probe.biases;
        const Matrix probs = softmax_columns(logits);
        const double loss = loss_of(probs);
        if (epoch == 0) initial_loss = loss;
        if (loss_history) loss_history->push_back(loss);
        if (loss > 10.0 * initial_loss + 1e-12)
            throw TrainingFailureError("train_probe: diverged at epoch " + std::to_string(epoch));
        const Matrix delta = (probs - onehot) / static_cast<double>(n);
        probe.weights -= hyper.learning_rate * (delta * latents.transpose() + hyper.l2 * probe.weights);
        probe.biases -= hyper.learning_rate * delta.rowwise().sum();
    }
    return probe;
}

Vector class_probabilities(const ProbeClassifier& probe, const Vector& x) {
    Vector logits = probe.weights * x + probe.biases;
    const double mx = logits.maxCoeff();
    Vector p = (logits.array() - mx).exp();
    return p / p.sum();
}

double confidence(const ProbeClassifier& probe, const Vector& x, int y) {
    if (y < 0 || y >= probe.classes())
        throw InvalidInputError("confidence: class " + std::to_string(y) + " out of range");
    return class_probabilities(probe, x)[y];
}

double probe_accuracy(const ProbeClassifier& probe, const Matrix& latents,
                      const std::vector<int>& labels) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < latents.cols(); ++i) {
        Eigen::Index argmax;
        (probe.weights * latents.col(i) + probe.biases).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(latents.cols());
}

std::vector<double> score_dataset(const ProvenancedDataset& ds, const ProbeClassifier& probe,
                                  const FrozenEncoder& encoder, int tstar, std::uint64_t seed,
                                  unsigned workers) {
    if (ds.size() == 0) throw InvalidInputError("score_dataset: empty dataset");
    ds.validate();
    std::vector<double> scores(static_cast<std::size_t>(ds.size()));
    parallel_for(scores.size(), workers, [&](std::size_t i) {
        const Vector h = encode(encoder, ds.features.col(static_cast<Eigen::Index>(i)), tstar,
                                derive_seed(seed, stream::kFilter, i));
        scores[i] = confidence(probe, h, ds.labels[i]);
    });
    return scores;
}

ProvenancedDataset lsf_filter(const ProvenancedDataset& ds, const ProbeClassifier& probe,
                              const FrozenEncoder& encoder, int tstar, Eigen::Index budget,
                              std::uint64_t seed, unsigned workers) {
    if (ds.size() == 0) throw InvalidInputError("lsf_filter: empty dataset");
    if (budget < 0) throw InvalidInputError("lsf_filter: negative budget");
    const std::vector<double> scores = score_dataset(ds, probe, encoder, tstar, seed, workers);

    const Eigen::Index keep = std::min<Eigen::Index>(budget, ds.size());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // descending score, ties toward lower original index
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());
    return ds.select(order);
}

void write_probe(const std::string& path, const ProbeClassifier& probe) {
    auto out = binio::open_section_writer(path, "PROB");
    binio::put_matrix(out, probe.weights);
    binio::put_matrix(out, Matrix(probe.biases));
    binio::put(out, static_cast<std::int32_t>(probe.tstar));
    if (!out) throw IoError("LSFD: write failed: " + path);
}

ProbeClassifier read_probe(const std::string& path) {
    auto in = binio::open_section_reader(path, "PROB");
    ProbeClassifier probe;
    probe.weights = binio::get_matrix(in, "weights");
    probe.biases = binio::get_matrix(in, "biases");
    probe.tstar = binio::get<std::int32_t>(in, "tstar");
    return probe;
}

} // namespace collapselab
