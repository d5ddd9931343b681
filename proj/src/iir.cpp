#include "sdn/iir.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace sdn {

std::complex<double> IirCoeffs::response(double w) const {
    const std::complex<double> zinv = std::exp(std::complex<double>(0.0, -w));
    std::complex<double> num = 0.0, den = 0.0, zk = 1.0;
    for (std::size_t k = 0; k < b.size() || k < a.size(); ++k) {
        if (k < b.size()) num += b[k] * zk;
        if (k < a.size()) den += a[k] * zk;
        zk *= zinv;
    }
    return num / den;
}

bool iir_is_stable(const IirCoeffs& c, double margin) {
    if (c.a.empty() || c.a[0] == 0.0) return false;
    const std::size_t n = c.a.size() - 1;
    if (n == 0) return true;
    // Companion matrix of the denominator polynomial.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k)
        comp(0, k) = -c.a[k + 1] / c.a[0];
    for (std::size_t k = 1; k < n; ++k)
        comp(k, k - 1) = 1.0;
    Eigen::VectorXcd poles = comp.eigenvalues();
    for (Eigen::Index i = 0; i < poles.size(); ++i)
        if (std::abs(poles[i]) >= 1.0 - margin) return false;
    return true;
}

IirState::IirState(const IirCoeffs& c) {
    if (c.a.empty() || c.a[0] == 0.0)
        throw std::invalid_argument("IirState: a[0] must be nonzero");
    const double a0 = c.a[0];
    b_.resize(c.b.size());
    for (std::size_t i = 0; i < c.b.size(); ++i) b_[i] = c.b[i] / a0;
    a_.resize(c.a.size());
    for (std::size_t i = 0; i < c.a.size(); ++i) a_[i] = c.a[i] / a0;
    const std::size_t order = std::max(b_.size(), a_.size());
    b_.resize(order, 0.0);
    a_.resize(order, 0.0);
    z_.assign(order > 0 ? order - 1 : 0, 0.0);
}

double IirState::process(double x) {
    if (z_.empty()) return b_.empty() ? x : b_[0] * x;
    const double y = b_[0] * x + z_[0];
    for (std::size_t i = 0; i + 1 < z_.size(); ++i)
        z_[i] = b_[i + 1] * x - a_[i + 1] * y + z_[i + 1];
    z_.back() = b_[z_.size()] * x - a_[z_.size()] * y;
    return y;
}

void IirState::reset() {
    std::fill(z_.begin(), z_.end(), 0.0);
}

namespace {

// Bilinear-transform biquad from an analog 2nd-order Butterworth stage
// with quality factor q. RBJ cookbook forms.
BiquadCoeffs lowpass_biquad(double fc, double fs, double q) {
    const double w0 = 2.0 * M_PI * fc / fs;
    const double cw = std::cos(w0), sw = std::sin(w0);
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0,
            -2.0 * cw / a0, (1.0 - alpha) / a0};
}

BiquadCoeffs highpass_biquad(double fc, double fs, double q) {
    const double w0 = 2.0 * M_PI * fc / fs;
    const double cw = std::cos(w0), sw = std::sin(w0);
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    return {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0,
            -2.0 * cw / a0, (1.0 - alpha) / a0};
}

// 4th-order Butterworth pole quality factors: 1/(2 cos(pi/8)), 1/(2 cos(3pi/8)).
constexpr double kButter4Q1 = 0.5411961001461971;
constexpr double kButter4Q2 = 1.3065629648763764;

} // namespace

std::vector<BiquadCoeffs> butterworth_lowpass4(double cutoff_hz, double sample_rate) {
    if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate / 2.0)
        throw std::invalid_argument("butterworth_lowpass4: cutoff out of range");
    return {lowpass_biquad(cutoff_hz, sample_rate, kButter4Q1),
            lowpass_biquad(cutoff_hz, sample_rate, kButter4Q2)};
}

std::vector<BiquadCoeffs> butterworth_highpass4(double cutoff_hz, double sample_rate) {
    if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate / 2.0)
        throw std::invalid_argument("butterworth_highpass4: cutoff out of range");
    return {highpass_biquad(cutoff_hz, sample_rate, kButter4Q1),
            highpass_biquad(cutoff_hz, sample_rate, kButter4Q2)};
}

std::vector<BiquadCoeffs> octave_bandpass(double center_hz, double sample_rate) {
    const double lo = center_hz / std::sqrt(2.0);
    const double hi = center_hz * std::sqrt(2.0);
    if (hi >= sample_rate / 2.0)
        throw std::invalid_argument("octave_bandpass: band exceeds Nyquist");
    auto sections = butterworth_highpass4(lo, sample_rate);
    auto lp = butterworth_lowpass4(hi, sample_rate);
    sections.insert(sections.end(), lp.begin(), lp.end());
    return sections;
}

} // namespace sdn
