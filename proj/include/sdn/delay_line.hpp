// Circular sample storage with integer and linearly interpolated reads,
// plus the slewed delay parameter used for artifact-free scene updates.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sdn {

// push() appends one sample per tick; at(k) returns the sample pushed k
// pushes ago (k = 0 is the most recent). Capacity is fixed at construction;
// reads beyond the capacity return the oldest retained slot's era, so size
// lines generously (max room traversal + slew headroom).
class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity) {
        std::size_t size = 8;
        while (size < capacity + 2) size <<= 1;
        buf_.assign(size, 0.0);
        mask_ = size - 1;
    }

    void push(double x) {
        w_ = (w_ + 1) & mask_;
        buf_[w_] = x;
    }

    double at(std::size_t k) const { return buf_[(w_ - k) & mask_]; }

    // Linear interpolation between at(floor(d)) and at(floor(d)+1). Exact
    // integer delays take the branch so static rendering stays bit-identical
    // to pure integer reads.
    double at_frac(double d) const {
        const double fl = std::floor(d);
        const double frac = d - fl;
        const auto k = static_cast<std::size_t>(fl);
        if (frac == 0.0) return at(k);
        return (1.0 - frac) * at(k) + frac * at(k + 1);
    }

    void clear() {
        std::fill(buf_.begin(), buf_.end(), 0.0);
        w_ = 0;
    }

    std::size_t capacity() const { return buf_.size(); }

private:
    std::vector<double> buf_;
    std::size_t mask_ = 0;
    std::size_t w_ = 0;
};

// A delay value that slews linearly toward its target, one step per tick.
// Static networks keep current == target (integer), so reads stay exact.
struct SlewedDelay {
    double current = 0.0;
    double target = 0.0;
    double step = 0.0;

    void set(double value) { current = target = value; step = 0.0; }

    void retarget(double value, double transition_ticks) {
        target = value;
        const double dist = std::abs(target - current);
        step = dist > 0.0 ? dist / std::max(1.0, transition_ticks) : 0.0;
    }

    void advance() {
        if (current == target) return;
        const double d = target - current;
        if (std::abs(d) <= step)
            current = target;
        else
            current += (d > 0.0 ? step : -step);
    }

    bool settled() const { return current == target; }
};

} // namespace sdn
