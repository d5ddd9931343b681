// RIFF/WAVE reading and writing (PCM 16/24-bit and IEEE float32) plus
// locale-independent CSV export for analysis curves.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdn/impulse_response.hpp"

namespace sdn {

enum class SampleEncoding { Pcm16, Pcm24, Float32 };

struct AudioBuffer {
    std::vector<std::vector<double>> channels; // channels x samples
    double sample_rate = 44100.0;
    SampleEncoding encoding = SampleEncoding::Float32;

    std::size_t num_frames() const { return channels.empty() ? 0 : channels.front().size(); }

    static AudioBuffer mono(std::vector<double> samples, double sample_rate,
                            SampleEncoding enc = SampleEncoding::Float32) {
        AudioBuffer b;
        b.channels.push_back(std::move(samples));
        b.sample_rate = sample_rate;
        b.encoding = enc;
        return b;
    }
};

AudioBuffer load_audio(const std::string& path);

struct WriteReport {
    std::size_t clipped_samples = 0; // PCM writes clip with a report
};

WriteReport write_audio(const std::string& path, const AudioBuffer& buffer);

inline AudioBuffer to_audio(const ImpulseResponse& rir,
                            SampleEncoding enc = SampleEncoding::Float32) {
    return AudioBuffer::mono(rir.samples, rir.sample_rate, enc);
}

// CSV with a header row; optional comment lines are prefixed with '#'.
// All columns must have equal length. Decimal points are always '.'.
void export_curve(const std::string& path, const std::vector<std::string>& column_names,
                  const std::vector<std::vector<double>>& columns,
                  const std::vector<std::string>& comments = {});

} // namespace sdn
