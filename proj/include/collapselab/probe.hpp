#pragma once

#include "collapselab/dataset.hpp"
#include "collapselab/diffusion.hpp"
#include "collapselab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace collapselab {

/// Softmax regression on frozen-encoder latents. Logit for class c is
/// w_c^T x + b_c; the confidence score of (x, y) is the softmax probability
/// of the correct class y.
struct ProbeClassifier {
    Matrix weights;   // C x p
    Vector biases;    // C
    int tstar = 0;    // filtering timestep the probe was trained at

    int classes() const { return static_cast<int>(weights.rows()); }
    int latent_dim() const { return static_cast<int>(weights.cols()); }
};

struct ProbeHyperparams {
    double learning_rate = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
};

/// Full-batch gradient descent on mean cross-entropy + (l2/2)||W||_F^2 from
/// zero initialization. The objective is convex; with the default step size
/// the loss is non-increasing across epochs, and an increase past 10x the
/// initial loss aborts with TrainingFailureError. Requires >= 2 classes.
/// When given, loss_history receives the loss at the start of every epoch.
ProbeClassifier train_probe(const Matrix& latents, const std::vector<int>& labels,
                            const ProbeHyperparams& hyper, int tstar = 0,
                            std::vector<double>* loss_history = nullptr);

/// Class probabilities, max-subtracted softmax; sums to 1 within 1e-12.
Vector class_probabilities(const ProbeClassifier& probe, const Vector& x);

/// Softmax probability of class y.
double confidence(const ProbeClassifier& probe, const Vector& x, int y);

/// Mean 0/1 accuracy of argmax predictions.
double probe_accuracy(const ProbeClassifier& probe, const Matrix& latents,
                      const std::vector<int>& labels);

/// Confidence score of every dataset sample: encode(x_i, t*) with a
/// per-sample sub-seed from (seed, i), then the probe's probability of the
/// sample's own label. Parallel over samples.
std::vector<double> score_dataset(const ProvenancedDataset& ds, const ProbeClassifier& probe,
                                  const FrozenEncoder& encoder, int tstar, std::uint64_t seed,
                                  unsigned workers = 1);

/// Latent Space Filtering: keep the min(N, n) highest-confidence samples.
/// Ties break toward the lower original index; the kept samples appear in
/// their original order.
ProvenancedDataset lsf_filter(const ProvenancedDataset& ds, const ProbeClassifier& probe,
                              const FrozenEncoder& encoder, int tstar, Eigen::Index budget,
                              std::uint64_t seed, unsigned workers = 1);

// LSFD persistence ("PROB" section).
void write_probe(const std::string& path, const ProbeClassifier& probe);
ProbeClassifier read_probe(const std::string& path);

} // namespace collapselab
