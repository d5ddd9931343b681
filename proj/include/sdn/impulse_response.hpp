#pragma once

#include <vector>

namespace sdn {

struct ImpulseResponse {
    std::vector<double> samples;
    double sample_rate = 44100.0;

    double duration_s() const {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
    double energy() const {
        double e = 0.0;
        for (double s : samples) e += s * s;
        return e;
    }
};

} // namespace sdn
