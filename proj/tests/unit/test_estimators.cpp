#include "doctest.h"
#include "support.hpp"

#include "geopitch/estimators.hpp"
#include "geopitch/prevalence.hpp"

#include <algorithm>
#include <array>

#include "json.hpp"

using namespace geopitch;
using testsupport::note;

namespace {

constexpr std::array kAmps{1.0, 0.6, 0.4, 0.3};

Frame tone_frame(const std::vector<Note>& fundamentals) {
    std::vector<Partial> partials;
    for (const Note& f : fundamentals) {
        const auto p = harmonic_partials(f, kAmps);
        partials.insert(partials.end(), p.begin(), p.end());
    }
    const Signal s = synthesize(partials, 0.2);
    return cqt_frame(std::span<const double>(s.samples).subspan(0, 4096), s.sample_rate);
}

Frame silent_frame() { return Frame{0, std::vector<double>(kBinCount, 0.0)}; }

Interpretation shapes(std::initializer_list<const char*> names) {
    Interpretation out;
    for (const Note& f : testsupport::notes(names)) testsupport::add_shape(out, f);
    return out;
}

}  // namespace

TEST_CASE("partial offsets") {
    CHECK(partial_offset(1) == 0);
    CHECK(partial_offset(2) == 12);
    CHECK(partial_offset(3) == 19);
    CHECK(partial_offset(4) == 24);
}

TEST_CASE("harmonic product spectrum") {
    const MonoEstimate c4 = hps_estimate(tone_frame({note("C4")}));
    REQUIRE(c4.note.has_value());
    CHECK(*c4.note == note("C4"));
    CHECK(c4.confidence > 0.0);

    const MonoEstimate none = hps_estimate(silent_frame());
    CHECK_FALSE(none.note.has_value());
    CHECK(none.confidence == 0.0);

    // With no harmonics the product is the spectrum itself.
    const Partial a4{440.0, 0.5};
    const Signal s = synthesize(std::span<const Partial>(&a4, 1), 0.2);
    const Frame f = cqt_frame(std::span<const double>(s.samples).subspan(0, 4096), s.sample_rate);
    const MonoEstimate plain = hps_estimate(f, 0);
    REQUIRE(plain.note.has_value());
    CHECK(*plain.note == note("A4"));
    CHECK_THROWS_AS(hps_estimate(f, -1), std::invalid_argument);
}

TEST_CASE("naive monophonic estimate") {
    for (const char* name : {"E2", "C4", "A4", "F#5"}) {
        const MonoEstimate e = naive_mono(tone_frame({note(name)}));
        REQUIRE(e.note.has_value());
        CHECK(*e.note == note(name));
    }
    CHECK_FALSE(naive_mono(silent_frame()).note.has_value());

    // A weak copy of the shape one semitone up is leakage, not a note.
    Frame f = silent_frame();
    const Note c4 = note("C4");
    for (int off : {0, 12, 19, 24}) {
        f.bins[static_cast<std::size_t>(note_bin(c4) + off)] = 1.0;
        f.bins[static_cast<std::size_t>(note_bin(c4) - 1 + off)] = 2.0;
    }
    const MonoEstimate vetoed = naive_mono(f);
    REQUIRE(vetoed.note.has_value());
    CHECK(*vetoed.note == note("B3"));
    NaiveMonoOptions raw;
    raw.leakage_veto = false;
    CHECK(*naive_mono(f, raw).note == note("B3"));

    Frame g = silent_frame();
    for (int off : {0, 12, 19, 24}) {
        g.bins[static_cast<std::size_t>(note_bin(c4) + off)] = 1.0;
        g.bins[static_cast<std::size_t>(note_bin(c4) + 1 + off)] = 3.0;
    }
    CHECK(*naive_mono(g).note == note("C#4"));
    CHECK(*naive_mono(g, raw).note == note("C4"));
}

TEST_CASE("sink iteration") {
    CHECK(sink_iteration(Interpretation{}).empty());
    CHECK(sink_iteration(shapes({"E3"})) == testsupport::notes({"E3"}));
    auto two = testsupport::notes({"C3", "G4"});
    std::sort(two.begin(), two.end(), LatticeOrder{});
    CHECK(sink_iteration(shapes({"C3", "G4"})) == two);

    // A lone note without its harmonics is never taken.
    Interpretation bare;
    bare.set(note("C4"));
    CHECK(sink_iteration(bare).empty());
}

TEST_CASE("simple polyphonic estimate") {
    const PolyEstimate one = simple_poly(shapes({"A3"}));
    CHECK(one.notes == testsupport::notes({"A3"}));
    CHECK(one.discarded.empty());

    const Interpretation mixture = shapes({"D4", "A5", "D6"});
    const PolyEstimate e = simple_poly(mixture);
    REQUIRE_FALSE(e.notes.empty());
    CHECK(e.notes.front() == note("D4"));
    CHECK(std::find(e.discarded.begin(), e.discarded.end(), note("D5")) != e.discarded.end());
    CHECK(std::find(e.notes.begin(), e.notes.end(), note("D5")) == e.notes.end());

    // Raising the threshold past four parts keeps everything.
    CHECK(simple_poly(mixture, 5).notes == naive_classify(mixture));

    Rng rng(substream_seed(21, 0));
    for (int i = 0; i < 300; ++i) {
        const int n = 1 + static_cast<int>(uniform_below(rng, 60));
        const auto s = sample_interpretation(n, rng);
        const PolyEstimate p = simple_poly(s.interpretation);
        std::vector<Note> all = p.notes;
        all.insert(all.end(), p.discarded.begin(), p.discarded.end());
        std::sort(all.begin(), all.end(), LatticeOrder{});
        const auto naive = naive_classify(s.interpretation);
        CHECK(all == naive);
        if (!naive.empty()) CHECK(p.notes.front() == naive.front());
        CHECK(std::is_sorted(p.notes.begin(), p.notes.end(), LatticeOrder{}));
    }

    const PolyEstimate from_audio = simple_poly(tone_frame(testsupport::notes({"D4", "A5", "D6"})));
    CHECK(std::find(from_audio.notes.begin(), from_audio.notes.end(), note("D4")) != from_audio.notes.end());
    CHECK(std::find(from_audio.notes.begin(), from_audio.notes.end(), note("D5")) == from_audio.notes.end());
    CHECK(simple_poly(silent_frame()).notes.empty());
}

TEST_CASE("estimate json") {
    const auto j = nlohmann::json::parse(estimate_to_json(3, testsupport::notes({"C4", "E4"}), 0.5));
    CHECK(j["frame_index"] == 3);
    CHECK(j["notes"] == nlohmann::json::array({"C4", "E4"}));
    CHECK(j["confidence"] == 0.5);
    CHECK(nlohmann::json::parse(estimate_to_json(0, {}, 0.0))["notes"].empty());
}
