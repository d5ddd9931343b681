// Direct-form IIR filtering, stability checking and the Butterworth
// sections used by the octave filter bank. A scalar reflection gain is
// represented as an order-0 filter (b = {g}, a = {1}).
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sdn {

struct IirCoeffs {
    std::vector<double> b{1.0}; // numerator, z^0 first
    std::vector<double> a{1.0}; // denominator, a[0] must be nonzero

    bool is_gain() const { return b.size() == 1 && a.size() == 1; }
    double gain() const { return b[0] / a[0]; }

    static IirCoeffs from_gain(double g) { return IirCoeffs{{g}, {1.0}}; }

    // Frequency response at normalized angular frequency w (rad/sample).
    std::complex<double> response(double w) const;
};

// All poles strictly inside the unit circle.
bool iir_is_stable(const IirCoeffs& c, double margin = 0.0);

// Per-channel filter state (direct form II transposed).
class IirState {
public:
    IirState() = default;
    explicit IirState(const IirCoeffs& c);

    double process(double x);
    void reset();

private:
    std::vector<double> b_, a_; // normalized, a_[0] == 1 implied
    std::vector<double> z_;
};

// Cascade of second-order sections.
struct BiquadCoeffs {
    double b0, b1, b2, a1, a2;
};

class BiquadChain {
public:
    explicit BiquadChain(std::vector<BiquadCoeffs> sections)
        : sections_(std::move(sections)), state_(sections_.size(), {0.0, 0.0}) {}

    double process(double x) {
        for (std::size_t i = 0; i < sections_.size(); ++i) {
            const auto& s = sections_[i];
            auto& z = state_[i];
            double y = s.b0 * x + z[0];
            z[0] = s.b1 * x - s.a1 * y + z[1];
            z[1] = s.b2 * x - s.a2 * y;
            x = y;
        }
        return x;
    }

    void reset() {
        for (auto& z : state_) z = {0.0, 0.0};
    }

private:
    std::vector<BiquadCoeffs> sections_;
    std::vector<std::array<double, 2>> state_;
};

// 4th-order Butterworth edges realized as two cascaded biquads each.
std::vector<BiquadCoeffs> butterworth_lowpass4(double cutoff_hz, double sample_rate);
std::vector<BiquadCoeffs> butterworth_highpass4(double cutoff_hz, double sample_rate);

// Octave band-pass: 4th-order highpass at fc/sqrt(2) cascaded with
// 4th-order lowpass at fc*sqrt(2).
std::vector<BiquadCoeffs> octave_bandpass(double center_hz, double sample_rate);

} // namespace sdn
