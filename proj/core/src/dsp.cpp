#include "geopitch/dsp.hpp"

#include "geopitch/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
    if (format == kFormatFloat) {
        if (bits == 32) {
            std::uint32_t u = read_u32(p);
            float f;
            std::memcpy(&f, &u, sizeof f);
            return f;
        }
        std::uint64_t u = static_cast<std::uint64_t>(read_u32(p)) | (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
        double d;
        std::memcpy(&d, &u, sizeof d);
        return d;
    }
    switch (bits) {
    case 8: return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) v -= 0x1000000;
        return v / 8388608.0;
    }
    case 32: return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default: throw DataError("unsupported PCM bit depth " + std::to_string(bits));
    }
}

}  // namespace

Signal decode_wav(std::span<const unsigned char> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw DataError("not a RIFF/WAVE file");
    }
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = bytes.size() - body;
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16 || size > avail) throw DataError("truncated fmt chunk");
            format = read_u16(chunk + 8);
            channels = read_u16(chunk + 10);
            rate = read_u32(chunk + 12);
            bits = read_u16(chunk + 22);
            if (format == kFormatExtensible) {
                if (size < 40) throw DataError("truncated extensible fmt chunk");
                format = read_u16(chunk + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = chunk + 8;
            // Tolerate writers that leave the size field unset or too large.
            data_size = std::min<std::size_t>(size, avail);
        }
        pos = body + size + (size & 1u);
    }
    if (!have_fmt) throw DataError("missing fmt chunk");
    if (!data) throw DataError("missing data chunk");
    if (channels == 0) throw DataError("zero channels");
    if (rate == 0) throw DataError("zero sample rate");
    if (format != kFormatPcm && format != kFormatFloat) {
        throw DataError("unsupported WAV format tag " + std::to_string(format));
    }
    if (format == kFormatFloat && bits != 32 && bits != 64) throw DataError("unsupported float bit depth");
    if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24 && bits != 32) {
        throw DataError("unsupported PCM bit depth " + std::to_string(bits));
    }

    const std::size_t width = bits / 8u;
    const std::size_t frame_bytes = width * channels;
    const std::size_t frames = data_size / frame_bytes;
    Signal out;
    out.sample_rate = rate;
    out.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) acc += decode_sample(data + i * frame_bytes + c * width, format, bits);
        out.samples[i] = acc / channels;
    }
    return out;
}

Signal load_audio(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    try {
        return decode_wav(bytes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<unsigned char> encode_wav(const Signal& signal, int bits) {
    if (bits != 16 && bits != 24 && bits != 32) throw std::invalid_argument("bits must be 16, 24 or 32");
    const std::uint16_t format = bits == 32 ? kFormatFloat : kFormatPcm;
    const std::uint32_t width = static_cast<std::uint32_t>(bits / 8);
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate));
    const std::uint32_t data_size = static_cast<std::uint32_t>(signal.samples.size() * width);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, 1);
    put_u32(out, rate);
    put_u32(out, rate * width);
    put_u16(out, static_cast<std::uint16_t>(width));
    put_u16(out, static_cast<std::uint16_t>(bits));
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_size);
    for (double s : signal.samples) {
        s = std::clamp(s, -1.0, 1.0);
        if (bits == 32) {
            const float f = static_cast<float>(s);
            std::uint32_t u;
            std::memcpy(&u, &f, sizeof u);
            put_u32(out, u);
        } else if (bits == 16) {
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(std::min(s * 32768.0, 32767.0)))));
        } else {
            const std::int32_t v = static_cast<std::int32_t>(std::lround(std::min(s * 8388608.0, 8388607.0)));
            for (int i = 0; i < 3; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
        }
    }
    return out;
}

void write_wav(const std::filesystem::path& path, const Signal& signal, int bits) {
    const auto bytes = encode_wav(signal, bits);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

double bin_frequency(int bin, double a4) { return a4 * std::pow(2.0, (bin - kA4Bin) / 12.0); }

std::size_t window_count(std::size_t signal_length, std::size_t hop) {
    return hop ? (signal_length + hop - 1) / hop : 0;
}

std::vector<std::vector<double>> windows(const Signal& signal, std::size_t length, std::size_t hop) {
    if (hop == 0 || hop > length) throw std::invalid_argument("need 1 <= hop <= length");
    if (signal.samples.size() < hop) throw std::invalid_argument("signal is shorter than one hop");
    std::vector<std::vector<double>> out;
    for (std::size_t start = 0; start < signal.samples.size(); start += hop) {
        std::vector<double> w(length, 0.0);
        const std::size_t n = std::min(length, signal.samples.size() - start);
        std::copy_n(signal.samples.begin() + static_cast<std::ptrdiff_t>(start), n, w.begin());
        out.push_back(std::move(w));
    }
    return out;
}

double Frame::mean() const {
    return bins.empty() ? 0.0 : std::accumulate(bins.begin(), bins.end(), 0.0) / static_cast<double>(bins.size());
}

double ConstantQ::quality_factor() { return 1.0 / (std::pow(2.0, 1.0 / 12.0) - 1.0); }

ConstantQ::ConstantQ(double sample_rate, std::size_t window_length, double a4)
    : sample_rate_(sample_rate), window_length_(window_length) {
    if (sample_rate <= 0.0) throw std::invalid_argument("sample rate must be positive");
    if (window_length == 0) throw std::invalid_argument("window length must be positive");
    const double q = quality_factor();
    offsets_.resize(kBinCount, 0);
    kernels_.resize(kBinCount);
    for (int k = 0; k < kBinCount; ++k) {
        const double f = bin_frequency(k, a4);
        if (f >= sample_rate / 2.0) continue;
        const auto ideal = static_cast<std::size_t>(std::lround(q * sample_rate / f));
        const std::size_t n = std::clamp<std::size_t>(ideal, 1, window_length);
        const std::size_t offset = (window_length - n) / 2;
        std::vector<std::complex<double>> kernel(n);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = n > 1 ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n)) : 1.0;
            wsum += w;
            const double phase = -2.0 * std::numbers::pi * f *
                                 (static_cast<double>(offset + i) - static_cast<double>(window_length) / 2.0) / sample_rate;
            kernel[i] = w * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        for (auto& c : kernel) c /= wsum;
        offsets_[static_cast<std::size_t>(k)] = offset;
        kernels_[static_cast<std::size_t>(k)] = std::move(kernel);
    }
}

Frame ConstantQ::transform(std::span<const double> window, std::size_t start_index) const {
    if (window.size() != window_length_) {
        throw std::invalid_argument("window has " + std::to_string(window.size()) + " samples, expected " +
                                    std::to_string(window_length_));
    }
    Frame f;
    f.start_index = start_index;
    f.bins.assign(kBinCount, 0.0);
    for (int k = 0; k < kBinCount; ++k) {
        const auto& kernel = kernels_[static_cast<std::size_t>(k)];
        if (kernel.empty()) continue;
        const double* x = window.data() + offsets_[static_cast<std::size_t>(k)];
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < kernel.size(); ++i) {
            re += x[i] * kernel[i].real();
            im += x[i] * kernel[i].imag();
        }
        f.bins[static_cast<std::size_t>(k)] = std::hypot(re, im);
    }
    return f;
}

Frame cqt_frame(std::span<const double> window, double sample_rate, std::size_t start_index) {
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const ConstantQ>> cache;
    std::shared_ptr<const ConstantQ> bank;
    {
        std::lock_guard lock(mutex);
        auto& slot = cache[{sample_rate, window.size()}];
        if (!slot) slot = std::make_shared<const ConstantQ>(sample_rate, window.size());
        bank = slot;
    }
    return bank->transform(window, start_index);
}

WeightedGrid frame_grid(const Frame& f) {
    WeightedGrid g(kDefaultOctaves);
    for (int b = 0; b < static_cast<int>(f.bins.size()) && b < kBinCount; ++b) {
        g.set(bin_note(b), f.bins[static_cast<std::size_t>(b)]);
    }
    return g;
}

double audible_threshold(const Frame& f, double alpha) { return alpha * f.mean(); }

Interpretation threshold_interpretation(const Frame& f, double alpha) {
    const double t = audible_threshold(f, alpha);
    Interpretation out(kDefaultOctaves);
    for (int b = 0; b < static_cast<int>(f.bins.size()) && b < kBinCount; ++b) {
        const double v = f.bins[static_cast<std::size_t>(b)];
        if (v > 0.0 && v >= t) out.set(bin_note(b));
    }
    return out;
}

double window_score(const Frame& f, double alpha) {
    const double t = audible_threshold(f, alpha);
    double sum = 0.0;
    int count = 0;
    for (double v : f.bins) {
        if (v > 0.0 && v >= t) {
            sum += v;
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

std::size_t select_window(std::span<const Frame> frames, double alpha) {
    if (frames.empty()) throw std::invalid_argument("no frames to select from");
    std::size_t best = 0;
    double best_score = window_score(frames[0], alpha);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const double s = window_score(frames[i], alpha);
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

void normalize(HeatSequence& seq) {
    double m = 0.0;
    for (const auto& f : seq.frames) {
        for (double v : f.bins) m = std::max(m, v);
    }
    seq.reference_max = m;
    if (m <= 0.0) return;
    for (auto& f : seq.frames) {
        for (double& v : f.bins) v /= m;
    }
}

HeatSequence analyze_signal(const Signal& signal, const AnalysisConfig& config) {
    const auto wins = windows(signal, config.window_length, config.hop);
    const ConstantQ bank(signal.sample_rate, config.window_length, config.a4);
    HeatSequence seq;
    seq.sample_rate = signal.sample_rate;
    seq.hop = config.hop;
    seq.frames.resize(wins.size());
    detail::parallel_for(wins.size(), config.threads,
                         [&](std::size_t i) { seq.frames[i] = bank.transform(wins[i], i * config.hop); });
    normalize(seq);
    return seq;
}

std::string heat_to_csv(const HeatSequence& seq) {
    std::ostringstream os;
    os.precision(9);
    os << "note";
    for (std::size_t t = 0; t < seq.frames.size(); ++t) os << ",frame" << t;
    os << '\n';
    for (int b = 0; b < kBinCount; ++b) {
        os << bin_note(b).name();
        for (const auto& f : seq.frames) os << ',' << f.bins[static_cast<std::size_t>(b)];
        os << '\n';
    }
    return os.str();
}

std::string heat_to_json(const HeatSequence& seq) {
    nlohmann::ordered_json j;
    j["max"] = 1.0;
    j["reference_max"] = seq.reference_max;
    j["sample_rate"] = seq.sample_rate;
    j["hop"] = seq.hop;
    j["frames"] = nlohmann::ordered_json::array();
    for (const auto& f : seq.frames) {
        nlohmann::ordered_json cells = nlohmann::ordered_json::array();
        for (int b = 0; b < kBinCount; ++b) {
            const double v = f.bins[static_cast<std::size_t>(b)];
            if (v > 0.0) cells.push_back({b, v});
        }
        j["frames"].push_back(cells);
    }
    return j.dump();
}

double heat_opacity(double magnitude, double max) {
    if (max <= 0.0) return 0.0;
    return std::clamp(magnitude / max + 0.05, 0.0, 1.0);
}

std::vector<WeightedGrid> heat_slices(const HeatSequence& seq) {
    std::vector<WeightedGrid> out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) out.push_back(frame_grid(f));
    return out;
}

std::vector<Partial> harmonic_partials(const Note& fundamental, std::span<const double> amplitudes, double a4) {
    const double f0 = note_frequency(fundamental, a4);
    std::vector<Partial> out;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        out.push_back({f0 * static_cast<double>(i + 1), amplitudes[i]});
    }
    return out;
}

Signal synthesize(std::span<const Partial> partials, double seconds, double sample_rate, double peak) {
    Signal s;
    s.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::lround(seconds * sample_rate));
    s.samples.assign(n, 0.0);
    for (const auto& p : partials) {
        if (p.frequency >= sample_rate / 2.0) continue;
        const double step = 2.0 * std::numbers::pi * p.frequency / sample_rate;
        for (std::size_t i = 0; i < n; ++i) s.samples[i] += p.amplitude * std::sin(step * static_cast<double>(i));
    }
    double m = 0.0;
    for (double v : s.samples) m = std::max(m, std::abs(v));
    if (m > peak && m > 0.0) {
        for (double& v : s.samples) v *= peak / m;
    }
    return s;
}

void apply_envelope(Signal& signal, double attack_seconds, double decay_seconds, double sustain) {
    const double attack = attack_seconds * signal.sample_rate;
    const double decay = std::max(decay_seconds * signal.sample_rate, 1.0);
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        const double t = static_cast<double>(i);
        double g;
        if (t < attack) {
            g = t / attack;
        } else {
            g = sustain + (1.0 - sustain) * std::exp(-(t - attack) / decay);
        }
        signal.samples[i] *= g;
    }
}

}  // namespace geopitch
