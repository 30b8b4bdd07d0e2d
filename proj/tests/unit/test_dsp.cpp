#include "doctest.h"
#include "support.hpp"

#include "geopitch/dsp.hpp"
#include "geopitch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

using namespace geopitch;
using testsupport::note;

namespace {

Signal sine(double freq, double seconds, double rate = 44100.0, double amp = 0.5) {
    const Partial p{freq, amp};
    return synthesize(std::span<const Partial>(&p, 1), seconds, rate);
}

int peak_bin(const Frame& f) {
    return static_cast<int>(std::max_element(f.bins.begin(), f.bins.end()) - f.bins.begin());
}

void put_u16(std::vector<unsigned char>& b, unsigned v) {
    b.push_back(static_cast<unsigned char>(v & 0xff));
    b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

void put_u32(std::vector<unsigned char>& b, unsigned v) {
    put_u16(b, v & 0xffff);
    put_u16(b, v >> 16);
}

// Hand-rolled 16-bit stereo file.
std::vector<unsigned char> stereo_wav(const std::vector<std::pair<short, short>>& frames) {
    std::vector<unsigned char> b;
    const unsigned data = static_cast<unsigned>(frames.size() * 4);
    for (char c : std::string("RIFF")) b.push_back(static_cast<unsigned char>(c));
    put_u32(b, 36 + data);
    for (char c : std::string("WAVEfmt ")) b.push_back(static_cast<unsigned char>(c));
    put_u32(b, 16);
    put_u16(b, 1);
    put_u16(b, 2);
    put_u32(b, 22050);
    put_u32(b, 22050 * 4);
    put_u16(b, 4);
    put_u16(b, 16);
    for (char c : std::string("data")) b.push_back(static_cast<unsigned char>(c));
    put_u32(b, data);
    for (const auto& [l, r] : frames) {
        put_u16(b, static_cast<unsigned short>(l));
        put_u16(b, static_cast<unsigned short>(r));
    }
    return b;
}

}  // namespace

TEST_CASE("wav round trip") {
    Signal s;
    s.sample_rate = 22050.0;
    for (int i = 0; i < 1000; ++i) s.samples.push_back(std::sin(i * 0.05) * (i % 7 == 0 ? 1.0 : 0.7));
    s.samples.push_back(1.0);
    s.samples.push_back(-1.0);

    for (int bits : {16, 24, 32}) {
        const auto bytes = encode_wav(s, bits);
        const Signal back = decode_wav(bytes);
        CHECK(back.sample_rate == 22050.0);
        REQUIRE(back.samples.size() == s.samples.size());
        const double tol = bits == 16 ? 1.0 / 32768.0 : bits == 24 ? 1.0 / 8388608.0 : 1e-7;
        for (std::size_t i = 0; i < s.samples.size(); ++i) CHECK(std::abs(back.samples[i] - s.samples[i]) <= tol);
    }

    Signal loud;
    loud.samples = {2.0, -3.0};
    const Signal clipped = decode_wav(encode_wav(loud));
    CHECK(clipped.samples[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(clipped.samples[1] == doctest::Approx(-1.0).epsilon(1e-4));

    const Signal st = decode_wav(stereo_wav({{16384, -16384}, {16384, 16384}, {0, 0}}));
    REQUIRE(st.samples.size() == 3);
    CHECK(st.sample_rate == 22050.0);
    CHECK(st.samples[0] == doctest::Approx(0.0));
    CHECK(st.samples[1] == doctest::Approx(0.5));
    CHECK(st.samples[2] == 0.0);

    CHECK_THROWS_AS(decode_wav(std::vector<unsigned char>{'R', 'I', 'F', 'F'}), DataError);
    CHECK_THROWS_AS(load_audio("/nonexistent/file.wav"), IoError);

    const auto path = std::filesystem::temp_directory_path() / "geopitch_unit_silence.wav";
    Signal silence;
    silence.samples.assign(2048, 0.0);
    write_wav(path, silence);
    const Signal read = load_audio(path);
    CHECK(read.samples.size() == 2048);
    CHECK(std::all_of(read.samples.begin(), read.samples.end(), [](double v) { return v == 0.0; }));
    std::filesystem::remove(path);
}

TEST_CASE("windowing") {
    Signal s;
    s.samples.assign(4096, 1.0);
    const auto w = windows(s, 4096, 1024);
    CHECK(w.size() == 4);
    CHECK(window_count(4096, 1024) == 4);
    CHECK(window_count(4097, 1024) == 5);
    for (const auto& x : w) CHECK(x.size() == 4096);
    CHECK(w[3][1023] == 1.0);
    CHECK(w[3][1024] == 0.0);
    CHECK(windows(s, 1024, 1024).size() == 4);
    CHECK_THROWS_AS(windows(s, 1024, 2048), std::invalid_argument);
    CHECK_THROWS_AS(windows(s, 1024, 0), std::invalid_argument);
    Signal tiny;
    tiny.samples.assign(10, 0.0);
    CHECK_THROWS_AS(windows(tiny, 4096, 1024), std::invalid_argument);
}

TEST_CASE("bin frequencies") {
    CHECK(bin_frequency(kA4Bin) == doctest::Approx(440.0));
    CHECK(bin_frequency(kA4Bin + 12) == doctest::Approx(880.0));
    CHECK(note_frequency(note("C4")) == doctest::Approx(261.6256).epsilon(1e-6));
    CHECK(bin_note(kA4Bin) == note("A4"));
    CHECK(note_bin(note("C0")) == 0);
    CHECK(ConstantQ::quality_factor() == doctest::Approx(1.0 / (std::pow(2.0, 1.0 / 12.0) - 1.0)));
}

TEST_CASE("constant-Q peaks") {
    const ConstantQ cq(44100.0, 4096);
    for (const auto& [freq, name] : {std::pair{440.0, "A4"}, std::pair{261.6256, "C4"}, std::pair{1046.5, "C6"}}) {
        const Signal s = sine(freq, 0.2);
        const Frame f = cq.transform(std::span<const double>(s.samples).subspan(0, 4096));
        CHECK(f.bins.size() == static_cast<std::size_t>(kBinCount));
        CHECK(peak_bin(f) == note_bin(note(name)));
    }
    const std::vector<double> zeros(4096, 0.0);
    const Frame z = cq.transform(zeros);
    CHECK(std::all_of(z.bins.begin(), z.bins.end(), [](double v) { return v == 0.0; }));
    CHECK(z.mean() == 0.0);

    // Low kernels do not fit the window. Above Nyquist there is no kernel.
    CHECK(cq.kernel_length(0) == 4096);
    CHECK(cq.kernel_length(kA4Bin) < 4096);
    CHECK(cq.kernel_length(kBinCount - 1) > 0);
    const ConstantQ narrow(8000.0, 4096);
    CHECK(narrow.kernel_length(kBinCount - 1) == 0);
    const Frame top = narrow.transform(std::vector<double>(4096, 0.25));
    CHECK(top.bins[static_cast<std::size_t>(kBinCount - 1)] == 0.0);
    CHECK_THROWS_AS(cq.transform(std::vector<double>(100, 0.0)), std::invalid_argument);

    const Signal s = sine(440.0, 0.2);
    const Frame cached = cqt_frame(std::span<const double>(s.samples).subspan(0, 4096), 44100.0, 7);
    CHECK(cached.start_index == 7);
    CHECK(peak_bin(cached) == kA4Bin);
}

TEST_CASE("thresholding") {
    Frame f;
    f.bins.assign(kBinCount, 0.0);
    f.bins[static_cast<std::size_t>(note_bin(note("C4")))] = 10.0;
    f.bins[static_cast<std::size_t>(note_bin(note("C5")))] = 4.0;
    f.bins[static_cast<std::size_t>(note_bin(note("G5")))] = 0.2;
    const double mean = 14.2 / kBinCount;
    CHECK(f.mean() == doctest::Approx(mean));
    CHECK(audible_threshold(f) == doctest::Approx(kDefaultAlpha * mean));
    const Interpretation interp = threshold_interpretation(f);
    CHECK(interp.at(note("C4")));
    CHECK(interp.at(note("C5")));
    CHECK_FALSE(interp.at(note("G5")));
    CHECK(interp.count() == 2);
    CHECK(window_score(f) == doctest::Approx(7.0));
    CHECK(threshold_interpretation(f, 1000.0).count() == 0);
    CHECK(window_score(f, 1000.0) == 0.0);

    // A threshold of zero still ignores empty bins.
    CHECK(threshold_interpretation(f, 0.0).count() == 3);

    Frame quiet = f;
    for (double& b : quiet.bins) b *= 0.5;
    const std::vector<Frame> frames{quiet, f, f};
    CHECK(select_window(frames) == 1);
    CHECK_THROWS_AS(select_window(std::span<const Frame>{}), std::invalid_argument);

    const WeightedGrid g = frame_grid(f);
    CHECK(g.at(note("C4")) == 10.0);
}

TEST_CASE("attack frames outscore the decay") {
    const auto amps = std::array{1.0, 0.6, 0.4, 0.3};
    const auto partials = harmonic_partials(note("E3"), amps);
    REQUIRE(partials.size() == 4);
    CHECK(partials[1].frequency == doctest::Approx(2.0 * partials[0].frequency));
    CHECK(partials[3].amplitude == 0.3);
    Signal s = synthesize(partials, 1.0);
    apply_envelope(s, 0.01, 0.15, 0.02);
    const HeatSequence seq = analyze_signal(s);
    REQUIRE(seq.frames.size() == window_count(s.samples.size(), 1024));
    std::vector<Frame> frames = seq.frames;
    const std::size_t best = select_window(frames);
    CHECK(best < 4);
    CHECK(window_score(frames[best]) > window_score(frames.back()));
    double top = 0.0;
    for (const auto& f : seq.frames) top = std::max(top, *std::max_element(f.bins.begin(), f.bins.end()));
    CHECK(top == doctest::Approx(1.0));
    CHECK(seq.reference_max > 0.0);
}

TEST_CASE("heat output") {
    const Signal s = sine(440.0, 0.1);
    const HeatSequence seq = analyze_signal(s);
    const std::string csv = heat_to_csv(seq);
    CHECK(csv.find("A4") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == kBinCount + 1);
    CHECK(heat_to_json(seq).find("\"frames\"") != std::string::npos);
    CHECK(heat_opacity(0.0, 1.0) == doctest::Approx(0.05));
    CHECK(heat_opacity(1.0, 1.0) == 1.0);
    CHECK(heat_opacity(0.5, 0.0) == 0.0);
    CHECK(heat_slices(seq).size() == seq.frames.size());

    HeatSequence silent;
    silent.frames.push_back(Frame{0, std::vector<double>(kBinCount, 0.0)});
    normalize(silent);
    CHECK(silent.reference_max == 0.0);
}
