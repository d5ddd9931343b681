#include "sdn/audio_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sdn {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) {
    std::uint32_t bits = get_u32(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

int bytes_per_sample(SampleEncoding enc) {
    switch (enc) {
        case SampleEncoding::Pcm16: return 2;
        case SampleEncoding::Pcm24: return 3;
        case SampleEncoding::Float32: return 4;
    }
    return 0;
}

} // namespace

AudioBuffer load_audio(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open audio file: " + path);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("not a RIFF/WAVE file: " + path);

    // Chunk scan; fmt must precede data.
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const std::uint8_t* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + pos);
        const std::uint32_t size = get_u32(raw.data() + pos + 4);
        if (pos + 8 + size > raw.size())
            throw std::runtime_error("truncated WAV chunk in " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw std::runtime_error("malformed fmt chunk in " + path);
            const std::uint8_t* f = raw.data() + pos + 8;
            format = get_u16(f);
            channels = get_u16(f + 2);
            sample_rate = get_u32(f + 4);
            bits = get_u16(f + 14);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = raw.data() + pos + 8;
            data_size = size;
        }
        pos += 8 + size + (size & 1); // chunks are word-aligned
    }
    if (channels == 0 || sample_rate == 0 || data == nullptr)
        throw std::runtime_error("missing fmt or data chunk in " + path);

    SampleEncoding enc;
    if (format == 1 && bits == 16)
        enc = SampleEncoding::Pcm16;
    else if (format == 1 && bits == 24)
        enc = SampleEncoding::Pcm24;
    else if (format == 3 && bits == 32)
        enc = SampleEncoding::Float32;
    else
        throw std::runtime_error("unsupported WAV encoding (format " + std::to_string(format) +
                                 ", " + std::to_string(bits) + " bits) in " + path);

    const int bps = bytes_per_sample(enc);
    const std::size_t frame_bytes = static_cast<std::size_t>(bps) * channels;
    const std::size_t frames = data_size / frame_bytes;

    AudioBuffer buf;
    buf.sample_rate = sample_rate;
    buf.encoding = enc;
    buf.channels.assign(channels, std::vector<double>(frames));
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const std::uint8_t* p = data + f * frame_bytes + static_cast<std::size_t>(ch) * bps;
            double v = 0.0;
            switch (enc) {
                case SampleEncoding::Pcm16: {
                    const auto s = static_cast<std::int16_t>(get_u16(p));
                    v = static_cast<double>(s) / 32768.0;
                    break;
                }
                case SampleEncoding::Pcm24: {
                    std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
                    if (s & 0x800000) s |= ~0xffffff; // sign extend
                    v = static_cast<double>(s) / 8388608.0;
                    break;
                }
                case SampleEncoding::Float32:
                    v = get_f32(p);
                    break;
            }
            buf.channels[ch][f] = v;
        }
    }
    return buf;
}

WriteReport write_audio(const std::string& path, const AudioBuffer& buffer) {
    if (buffer.channels.empty() || buffer.num_frames() == 0)
        throw std::invalid_argument("write_audio: empty buffer");
    for (const auto& ch : buffer.channels) {
        if (ch.size() != buffer.num_frames())
            throw std::invalid_argument("write_audio: channel length mismatch");
        for (double v : ch)
            if (!std::isfinite(v))
                throw std::invalid_argument("write_audio: non-finite sample");
    }

    const auto channels = static_cast<std::uint16_t>(buffer.channels.size());
    const int bps = bytes_per_sample(buffer.encoding);
    const std::size_t frames = buffer.num_frames();
    const auto data_size =
        static_cast<std::uint32_t>(frames * channels * static_cast<std::size_t>(bps));
    const std::uint16_t format = buffer.encoding == SampleEncoding::Float32 ? 3 : 1;
    const auto bits = static_cast<std::uint16_t>(bps * 8);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, channels);
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * channels * bps);
    put_u16(out, static_cast<std::uint16_t>(channels * bps));
    put_u16(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_size);

    WriteReport report;
    auto clip = [&](double v, double lo, double hi) {
        if (v < lo) {
            ++report.clipped_samples;
            return lo;
        }
        if (v > hi) {
            ++report.clipped_samples;
            return hi;
        }
        return v;
    };

    for (std::size_t f = 0; f < frames; ++f) {
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const double v = buffer.channels[ch][f];
            switch (buffer.encoding) {
                case SampleEncoding::Pcm16: {
                    const double c = clip(v, -1.0, 32767.0 / 32768.0);
                    const auto s = static_cast<std::int16_t>(std::lround(c * 32768.0));
                    put_u16(out, static_cast<std::uint16_t>(s));
                    break;
                }
                case SampleEncoding::Pcm24: {
                    const double c = clip(v, -1.0, 8388607.0 / 8388608.0);
                    const auto s = static_cast<std::int32_t>(std::lround(c * 8388608.0));
                    out.push_back(s & 0xff);
                    out.push_back((s >> 8) & 0xff);
                    out.push_back((s >> 16) & 0xff);
                    break;
                }
                case SampleEncoding::Float32: {
                    const auto fv = static_cast<float>(v);
                    std::uint32_t bitsv;
                    std::memcpy(&bitsv, &fv, 4);
                    put_u32(out, bitsv);
                    break;
                }
            }
        }
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os) throw std::runtime_error("short write to " + path);
    return report;
}

void export_curve(const std::string& path, const std::vector<std::string>& column_names,
                  const std::vector<std::vector<double>>& columns,
                  const std::vector<std::string>& comments) {
    if (column_names.size() != columns.size() || columns.empty())
        throw std::invalid_argument("export_curve: need one name per column");
    const std::size_t rows = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::invalid_argument("export_curve: column length mismatch");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < column_names.size(); ++j) {
        if (j) out << ',';
        out << column_names[j];
    }
    out << '\n';

    char buf[64];
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) out << ',';
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, columns[j][i],
                                           std::chars_format::general, 17);
            out.write(buf, end - buf);
            (void)ec;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

} // namespace sdn
