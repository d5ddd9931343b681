#include "sdn/scattering.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sdn/rng.hpp"

namespace sdn {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive(const Eigen::VectorXd& y, const char* who) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!(y[i] > 0.0))
            throw std::invalid_argument(std::string(who) + ": admittances must be positive");
}

double spectral_norm(const Eigen::MatrixXd& m) {
    return m.rows() == 0 ? 0.0 : m.jacobiSvd().singularValues()(0);
}

} // namespace

bool BlockDiagonalSpectrum::unit_modulus(double tol) const {
    for (double v : real_eigenvalues)
        if (std::abs(std::abs(v) - 1.0) > tol) return false;
    for (const auto& [r, theta] : complex_pairs) {
        (void)theta;
        if (std::abs(r - 1.0) > tol) return false;
    }
    return true;
}

LosslessMatrix isotropic_matrix(int size) {
    if (size < 2) throw std::invalid_argument("isotropic_matrix: size must be >= 2");
    Eigen::MatrixXd m =
        Eigen::MatrixXd::Constant(size, size, 2.0 / size) - Eigen::MatrixXd::Identity(size, size);
    return {std::move(m), Eigen::VectorXd::Ones(size)};
}

LosslessMatrix admittance_scattering(const Eigen::VectorXd& y) {
    require_positive(y, "admittance_scattering");
    const int k = static_cast<int>(y.size());
    Eigen::MatrixXd m = (2.0 / y.sum()) * Eigen::VectorXd::Ones(k) * y.transpose() -
                        Eigen::MatrixXd::Identity(k, k);
    return {std::move(m), y};
}

LosslessMatrix normalized_householder(const Eigen::VectorXd& y) {
    require_positive(y, "normalized_householder");
    const int k = static_cast<int>(y.size());
    Eigen::VectorXd ytilde = y.array().sqrt();
    Eigen::MatrixXd m = (2.0 / ytilde.squaredNorm()) * ytilde * ytilde.transpose() -
                        Eigen::MatrixXd::Identity(k, k);
    return {std::move(m), Eigen::VectorXd::Ones(k)};
}

LosslessMatrix construct_lossless(const Eigen::MatrixXd& t,
                                  const BlockDiagonalSpectrum& spectrum,
                                  double condition_limit) {
    const int k = spectrum.size();
    if (t.rows() != k || t.cols() != k)
        throw std::invalid_argument("construct_lossless: T size does not match spectrum");
    if (!spectrum.unit_modulus())
        throw std::invalid_argument("construct_lossless: spectrum is not unit-modulus");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(t);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > condition_limit)
        throw std::invalid_argument("construct_lossless: T is singular or too ill-conditioned");

    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd y_lambda = Eigen::MatrixXd::Zero(k, k);
    int idx = 0;
    for (double v : spectrum.real_eigenvalues) {
        lambda(idx, idx) = v;
        y_lambda(idx, idx) = 1.0;
        ++idx;
    }
    for (const auto& [r, theta] : spectrum.complex_pairs) {
        lambda(idx, idx + 1) = -r;
        lambda(idx + 1, idx) = r;
        lambda(idx + 1, idx + 1) = 2.0 * r * std::cos(theta);
        // [[1, c], [c, 1]] satisfies B^T Y B = Y for the companion block;
        // positive definite for theta away from 0 and pi.
        const double c = std::cos(theta);
        y_lambda(idx, idx) = 1.0;
        y_lambda(idx + 1, idx + 1) = 1.0;
        y_lambda(idx, idx + 1) = c;
        y_lambda(idx + 1, idx) = c;
        idx += 2;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);
    Eigen::MatrixXd a = lu.solve(lambda * t);

    LosslessMatrix out{std::move(a), Eigen::VectorXd::Ones(k)};
    // The natural certificate is the full matrix T^T Y_L T, not a diagonal
    // weighting; verify against it so bad spectra fail fast. The residual of
    // the verification scales with cond(T)^2 in finite precision.
    const double cond = sv(0) / sv(sv.size() - 1);
    const double tol = std::max(1e-9, 50.0 * std::numeric_limits<double>::epsilon() * cond * cond);
    Eigen::MatrixXd y_cert = t.transpose() * y_lambda * t;
    auto verdict = is_lossless(out.m, y_cert, tol);
    if (!verdict.lossless)
        throw std::runtime_error(
            "construct_lossless: result failed verification (theta too close to 0 or pi?)");
    return out;
}

LosslessVerdict is_lossless(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("is_lossless: matrix not square");
    LosslessVerdict v;
    v.certificate_y = y;
    const double scale = spectral_norm(y);
    v.residual = scale > 0.0 ? spectral_norm(a.transpose() * y * a - y) / scale : 1.0;
    v.lossless = v.residual <= tol;
    if (!v.lossless) {
        std::ostringstream msg;
        msg << "||A^T Y A - Y|| / ||Y|| = " << v.residual << " exceeds " << tol;
        v.note = msg.str();
    }
    return v;
}

LosslessVerdict is_lossless_auto(const Eigen::MatrixXd& a, double tol, double condition_limit) {
    if (a.rows() != a.cols()) throw std::invalid_argument("is_lossless: matrix not square");
    LosslessVerdict v;
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd vec = es.eigenvectors();

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vec);
    const auto& sv = svd.singularValues();
    const double cond =
        sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (cond > condition_limit) {
        v.lossless = false;
        v.note = "numerically not diagonalizable (eigenvector condition too large)";
        v.residual = cond;
        return v;
    }

    double worst = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(lambda[i]) - 1.0));
    v.residual = worst;
    v.lossless = worst <= tol;
    if (!v.lossless) {
        std::ostringstream msg;
        msg << "max | |lambda| - 1 | = " << worst << " exceeds " << tol;
        v.note = msg.str();
        return v;
    }

    // Certificate Y = V^{-H} V^{-1}; Hermitian positive definite, and real
    // for real A (take the real part, which inherits A^T Y A = Y).
    Eigen::MatrixXcd vinv = vec.inverse();
    Eigen::MatrixXcd y = vinv.adjoint() * vinv;
    v.certificate_y = y.real();
    return v;
}

LosslessMatrix random_lossless(RandomLosslessKind kind, int size, std::uint64_t seed) {
    if (size < 2) throw std::invalid_argument("random_lossless: size must be >= 2");
    Rng rng(seed);
    switch (kind) {
        case RandomLosslessKind::OrthogonalGivens: {
            Eigen::MatrixXd a = Eigen::MatrixXd::Identity(size, size);
            for (int i = 0; i < size; ++i) {
                for (int j = i + 1; j < size; ++j) {
                    const double theta = rng.uniform(0.0, 2.0 * kPi);
                    a.applyOnTheLeft(i, j, Eigen::JacobiRotation<double>(
                                               std::cos(theta), std::sin(theta)));
                }
            }
            return {std::move(a), Eigen::VectorXd::Ones(size)};
        }
        case RandomLosslessKind::Permutation: {
            std::vector<int> perm(size);
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = size - 1; i > 0; --i)
                std::swap(perm[i], perm[static_cast<int>(rng.index(i + 1))]);
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
            for (int i = 0; i < size; ++i) a(perm[i], i) = 1.0;
            return {std::move(a), Eigen::VectorXd::Ones(size)};
        }
        case RandomLosslessKind::CirculantAllpass: {
            Eigen::VectorXcd spec(size);
            spec[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
            for (int m = 1; m <= (size - 1) / 2; ++m) {
                const double theta = rng.uniform(0.0, 2.0 * kPi);
                spec[m] = std::polar(1.0, theta);
                spec[size - m] = std::conj(spec[m]);
            }
            if (size % 2 == 0) spec[size / 2] = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return circulant_from_spectrum(spec);
        }
    }
    throw std::invalid_argument("random_lossless: invalid kind");
}

LosslessMatrix circulant_from_spectrum(const Eigen::VectorXcd& spectrum) {
    const int k = static_cast<int>(spectrum.size());
    if (k < 2) throw std::invalid_argument("circulant_from_spectrum: size must be >= 2");
    for (int m = 0; m < k; ++m) {
        if (std::abs(std::abs(spectrum[m]) - 1.0) > 1e-12)
            throw std::invalid_argument("circulant_from_spectrum: spectrum not unit-modulus");
        if (std::abs(spectrum[m] - std::conj(spectrum[(k - m) % k])) > 1e-12)
            throw std::invalid_argument("circulant_from_spectrum: spectrum not conjugate-symmetric");
    }
    // First column by inverse DFT; real by conjugate symmetry.
    Eigen::VectorXd col(k);
    for (int n = 0; n < k; ++n) {
        std::complex<double> acc = 0.0;
        for (int m = 0; m < k; ++m)
            acc += spectrum[m] * std::polar(1.0, 2.0 * kPi * m * n / k);
        col[n] = acc.real() / k;
    }
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = col[(i - j + k) % k];
    return {std::move(a), Eigen::VectorXd::Ones(k)};
}

LosslessMatrix nearest_orthogonal(const Eigen::MatrixXd& d) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd a = svd.matrixU() * svd.matrixV().transpose();
    return {std::move(a), Eigen::VectorXd::Ones(d.rows())};
}

HouseholderFit nearest_householder(const Eigen::MatrixXd& d) {
    if (d.rows() != d.cols())
        throw std::invalid_argument("nearest_householder: matrix not square");
    const int k = static_cast<int>(d.rows());
    Eigen::MatrixXd sym = d + d.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);

    HouseholderFit fit;
    // Eigenvalues come back ascending; the cost is maximized by the largest.
    Eigen::VectorXd v = es.eigenvectors().col(k - 1);
    if (k >= 2) {
        const double gap = es.eigenvalues()(k - 1) - es.eigenvalues()(k - 2);
        fit.degenerate = gap <= 1e-9 * std::max(1.0, std::abs(es.eigenvalues()(k - 1)));
    }
    // Deterministic sign: first nonzero component positive.
    for (int i = 0; i < k; ++i) {
        if (std::abs(v[i]) > 1e-14) {
            if (v[i] < 0.0) v = -v;
            break;
        }
    }
    fit.v = v;
    fit.matrix = {2.0 * v * v.transpose() - Eigen::MatrixXd::Identity(k, k),
                  Eigen::VectorXd::Ones(k)};
    return fit;
}

bool check_isotropic_uniqueness(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols() || a.rows() < 2) return false;
    const int k = static_cast<int>(a.rows());
    if (spectral_norm(a.transpose() * a - Eigen::MatrixXd::Identity(k, k)) > tol) return false;
    const Eigen::MatrixXd iso = isotropic_matrix(k).m;
    return (a - iso).cwiseAbs().maxCoeff() <= tol || (a + iso).cwiseAbs().maxCoeff() <= tol;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged CSV matrix in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty CSV matrix in " + path);
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

} // namespace sdn
