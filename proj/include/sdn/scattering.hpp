// Construction, verification and optimization of lossless scattering
// matrices. A real matrix A is lossless w.r.t. a Hermitian positive-definite
// weighting Y when A^T Y A = Y; equivalently, A is diagonalizable with all
// eigenvalues on the unit circle.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sdn {

struct LosslessMatrix {
    Eigen::MatrixXd m;
    // Admittance weighting y with Y = diag(y); all-ones when the matrix is
    // lossless in the plain orthogonal sense.
    Eigen::VectorXd y;

    int size() const { return static_cast<int>(m.rows()); }
};

// Block-diagonal eigenvalue structure: real eigenvalues as 1x1 blocks and
// complex pairs r e^{+-j theta} as 2x2 blocks [[0, -r], [r, 2 r cos theta]].
struct BlockDiagonalSpectrum {
    std::vector<double> real_eigenvalues;                // must be +-1 for lossless
    std::vector<std::pair<double, double>> complex_pairs; // (r, theta); r must be 1

    int size() const {
        return static_cast<int>(real_eigenvalues.size() + 2 * complex_pairs.size());
    }
    bool unit_modulus(double tol = 1e-12) const;
};

struct LosslessVerdict {
    bool lossless = false;
    double residual = 0.0;          // ||A^T Y A - Y||_2 / ||Y||_2
    Eigen::MatrixXd certificate_y;  // the Y that was checked or constructed
    std::string note;
};

// A = (2/K) 1 1^T - I. Distributes energy from each direction uniformly
// among all others; orthogonal, symmetric, involutory.
LosslessMatrix isotropic_matrix(int size);

// A = (2 / <1,y>) 1 y^T - I for tube admittances y > 0; lossless w.r.t.
// Y = diag(y).
LosslessMatrix admittance_scattering(const Eigen::VectorXd& y);

// Householder reflection around ytilde = sqrt(y): the normalized-wave
// equivalent of admittance_scattering, orthogonal.
LosslessMatrix normalized_householder(const Eigen::VectorXd& y);

// A = T^{-1} Lambda T. The certificate weighting is Y = T^T Y_L T where
// Y_L makes the block-diagonal Lambda lossless ([[1, cos theta],[cos theta, 1]]
// per complex pair, 1 per real eigenvalue).
LosslessMatrix construct_lossless(const Eigen::MatrixXd& t,
                                  const BlockDiagonalSpectrum& spectrum,
                                  double condition_limit = 1e8);

// Check A^T Y A = Y for an explicit weighting.
LosslessVerdict is_lossless(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                            double tol = 1e-9);

// Check via diagonalizability + unit-modulus eigenvalues and construct a
// certificate Y from the eigenvector matrix.
LosslessVerdict is_lossless_auto(const Eigen::MatrixXd& a, double tol = 1e-9,
                                 double condition_limit = 1e8);

enum class RandomLosslessKind { OrthogonalGivens, Permutation, CirculantAllpass };

// Deterministic for a fixed seed. OrthogonalGivens multiplies K(K-1)/2
// Givens rotations with uniform random angles; Permutation draws a uniform
// permutation; CirculantAllpass draws random unit-modulus conjugate-symmetric
// eigenvalues and inverts the DFT.
LosslessMatrix random_lossless(RandomLosslessKind kind, int size, std::uint64_t seed);

// Real circulant matrix with the prescribed unit-modulus DFT spectrum.
// The spectrum must be conjugate-symmetric: s[k] == conj(s[(K-k) mod K]).
LosslessMatrix circulant_from_spectrum(const Eigen::VectorXcd& spectrum);

// Orthogonal Procrustes solution U V^T: the orthogonal matrix nearest to D
// in Frobenius norm.
LosslessMatrix nearest_orthogonal(const Eigen::MatrixXd& d);

struct HouseholderFit {
    Eigen::VectorXd v;        // unit vector; the reflection is 2 v v^T - I
    LosslessMatrix matrix;
    bool degenerate = false;  // top eigenvalue of D + D^T not simple
};

// Householder reflection nearest to D: v is a top eigenvector of D + D^T.
HouseholderFit nearest_householder(const Eigen::MatrixXd& d);

// True iff A is (within tol) +-((2/K) 1 1^T - I): the only orthogonal
// matrices whose off-diagonal entries are all equal.
bool check_isotropic_uniqueness(const Eigen::MatrixXd& a, double tol = 1e-9);

// Plain-text CSV, row-major, one row per line.
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

} // namespace sdn
