#pragma once

#include "collapselab/rng.hpp"

#include <cstdint>
#include <vector>

namespace collapselab {

/// Frobenius / operator / nuclear norms of one matrix, from a single SVD.
/// Always satisfies operator <= frobenius <= nuclear.
struct NormTriple {
    double frobenius = 0.0;
    double operator_norm = 0.0;
    double nuclear = 0.0;
};

/// Singular values of M, descending. Throws InvalidInputError on non-finite input.
std::vector<double> singular_values(const Matrix& m);

/// All three norms from one SVD pass.
NormTriple norms(const Matrix& m);

/// Rank with the relative threshold sigma_i > 1e-10 * sigma_1.
int numerical_rank(const Matrix& m);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-10 * scale, 0) are clamped to zero; anything more negative throws.
Matrix psd_sqrt(const Matrix& s);

/// gamma_ratio(n) = sqrt(2) * Gamma((n+1)/2) / Gamma(n/2), the mean of a
/// Chi(n) variable. Evaluated through log-Gamma differences so it stays
/// accurate for n in the millions.
double gamma_ratio(std::int64_t n);

/// Flips each column so its largest-magnitude entry is positive
/// (first such entry on ties). Fixes the sign ambiguity of eigenvectors
/// and singular vectors so factorization-backed outputs are reproducible.
void fix_column_signs(Matrix& u);

/// d x r matrix with orthonormal columns: QR of a seeded Gaussian draw,
/// sign-normalized by the R diagonal. Deterministic given the seed.
Matrix random_orthonormal(int d, int r, std::uint64_t seed);

/// Principal angles between the column spans of two orthonormal matrices,
/// ascending, each clamped to [0, pi/2]. Inputs are checked for
/// orthonormality (column Gram within 1e-8 of identity).
std::vector<double> principal_angles(const Matrix& u0, const Matrix& u1);

struct KMeansResult {
    std::vector<int> labels;  // one per column of the input
    Matrix centers;           // d x k
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding over the columns of x.
/// Deterministic given the seed; stops when assignments are stable or
/// after 100 iterations. Empty clusters are re-seeded with the point
/// farthest from its center.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed);

} // namespace collapselab
