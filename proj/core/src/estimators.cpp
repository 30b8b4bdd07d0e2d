#include "geopitch/estimators.hpp"

#include "geopitch/edgecases.hpp"
#include "geopitch/prevalence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

namespace {

double bin_at(const Frame& f, int b) {
    return (b >= 0 && b < static_cast<int>(f.bins.size())) ? f.bins[static_cast<std::size_t>(b)] : 0.0;
}

constexpr std::array<int, 4> kShapeOffsets = {0, 12, 19, 24};

double shape_sum(const Frame& f, int b) {
    double s = 0.0;
    for (int off : kShapeOffsets) s += bin_at(f, b + off);
    return s;
}

// Present notes m != n whose harmonics include n.
int present_generators(const Interpretation& interp, const Note& n, const Note* exclude, Note* sole) {
    int count = 0;
    for (const Note& m : generators_of(n)) {
        if (m == n || !interp.at(m)) continue;
        if (exclude && m == *exclude) continue;
        ++count;
        if (sole) *sole = m;
    }
    return count;
}

}  // namespace

int partial_offset(int h) {
    if (h < 1) throw std::invalid_argument("partial index starts at 1");
    return static_cast<int>(std::lround(12.0 * std::log2(static_cast<double>(h))));
}

MonoEstimate hps_estimate(const Frame& f, int n_harmonics) {
    if (n_harmonics < 0) throw std::invalid_argument("n_harmonics must be non-negative");
    MonoEstimate best;
    for (int b = 0; b < static_cast<int>(f.bins.size()); ++b) {
        double p = 1.0;
        for (int h = 1; h <= n_harmonics + 1 && p > 0.0; ++h) p *= bin_at(f, b + partial_offset(h));
        if (p > best.confidence) {
            best.confidence = p;
            best.note = bin_note(b);
        }
    }
    return best;
}

MonoEstimate naive_mono(const Frame& f, const NaiveMonoOptions& options) {
    const double t = audible_threshold(f, options.alpha);
    auto audible = [&](int b) {
        const double v = bin_at(f, b);
        return v > 0.0 && v >= t && b < kBinCount;
    };

    MonoEstimate fallback;
    for (int b = 0; b < static_cast<int>(f.bins.size()); ++b) {
        if (!std::all_of(kShapeOffsets.begin(), kShapeOffsets.end(), [&](int off) { return audible(b + off); })) {
            continue;
        }
        const double score = shape_sum(f, b);
        const double below = shape_sum(f, b - 1);
        const double above = shape_sum(f, b + 1);
        const double confidence = score + options.companion_weight * (below + above);
        if (options.leakage_veto && (below > score || above > score)) {
            if (confidence > fallback.confidence) fallback = {bin_note(b), confidence};
            continue;
        }
        return {bin_note(b), confidence};
    }
    return fallback;
}

std::vector<Note> sink_iteration(const Interpretation& interp) {
    Interpretation present = interp;
    std::vector<Note> found;
    for (;;) {
        std::vector<Note> sinks;
        for (const Note& n : present.notes()) {
            if (!exhibits_shape(present, n)) continue;
            if (present_generators(present, n, nullptr, nullptr) == 0) sinks.push_back(n);
        }
        if (sinks.empty()) break;

        // Decide every removal against the same snapshot.
        std::vector<Note> remove = sinks;
        for (const Note& f : sinks) {
            for (const Note& h : harmonics(f)) {
                if (!present.at(h)) continue;
                bool needed = false;
                for (const Note& x : harmonics(h)) {
                    if (!present.at(x)) continue;
                    if (present_generators(present, x, &h, nullptr) == 0) {
                        needed = true;
                        break;
                    }
                }
                if (!needed) remove.push_back(h);
            }
        }
        for (const Note& n : remove) present.set(n, false);
        found.insert(found.end(), sinks.begin(), sinks.end());
    }
    std::sort(found.begin(), found.end(), LatticeOrder{});
    return found;
}

PolyEstimate simple_poly(const Interpretation& interp, int threshold) {
    const auto candidates = naive_classify(interp);  // lattice order: bottom-to-top, left-to-right
    Interpretation accepted(interp.octaves());

    PolyEstimate out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Note& x = candidates[i];
        int explained = 0;
        if (i > 0) {
            const Configuration config = configuration_of(x.chroma);
            for (Part p : kAllParts) {
                const auto gens = part_generators(config, p);
                if (std::any_of(gens.begin(), gens.end(), [&](const GroupElement& g) { return accepted.at(g.apply(x)); })) {
                    ++explained;
                }
            }
        }
        if (i > 0 && explained >= threshold) {
            out.discarded.push_back(x);
        } else {
            out.notes.push_back(x);
            accepted.set(x);
        }
    }
    return out;
}

PolyEstimate simple_poly(const Frame& f, double alpha, int threshold) {
    return simple_poly(threshold_interpretation(f, alpha), threshold);
}

std::string estimate_to_json(std::size_t frame_index, const std::vector<Note>& notes, double confidence) {
    nlohmann::ordered_json j;
    j["frame_index"] = frame_index;
    j["notes"] = nlohmann::json::array();
    for (const Note& n : notes) j["notes"].push_back(n.name());
    j["confidence"] = confidence;
    return j.dump();
}

}  // namespace geopitch
