#include "geopitch/prevalence.hpp"

#include "geopitch/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geopitch {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, int n) {
    std::uint64_t state = seed ^ (static_cast<std::uint64_t>(n) * 0xd1b54a32d192ed03ULL);
    splitmix64(state);
    return splitmix64(state);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r <= limit) return r % bound;
    }
}

SampledInterpretation sample_interpretation(int n, Rng& rng, int octaves) {
    const int cells = kChromaCount * octaves;
    if (n < 1 || n > cells) {
        throw std::invalid_argument("n must lie in [1, " + std::to_string(cells) + "], got " + std::to_string(n));
    }
    // Partial Fisher-Yates over lattice cells.
    std::vector<int> idx(static_cast<std::size_t>(cells));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_below(rng, static_cast<std::uint64_t>(cells - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    SampledInterpretation out{Interpretation(octaves + kSamplerHeadroom), {}};
    for (int i = 0; i < n; ++i) {
        const int cell = idx[static_cast<std::size_t>(i)];
        out.fundamentals.emplace_back(Chroma(cell % kChromaCount), cell / kChromaCount);
    }
    std::sort(out.fundamentals.begin(), out.fundamentals.end(), LatticeOrder{});
    for (const Note& f : out.fundamentals) {
        out.interpretation.set(f);
        for (const Note& h : harmonics(f)) out.interpretation.set(h);
    }
    return out;
}

std::vector<Note> naive_classify(const Interpretation& interp) {
    std::vector<Note> out;
    for (const Note& n : interp.notes()) {
        if (exhibits_shape(interp, n)) out.push_back(n);
    }
    return out;
}

double NoteMetrics::grid_accuracy() const {
    return 1.0 - static_cast<double>(false_positives + false_negatives) / grid_notes;
}

double NoteMetrics::precision() const {
    const int reported = true_positives + false_positives;
    return reported ? static_cast<double>(true_positives) / reported : 1.0;
}

double NoteMetrics::accuracy() const {
    const int denom = true_positives + false_positives + false_negatives;
    return denom ? static_cast<double>(true_positives) / denom : 1.0;
}

NoteMetrics compare_notes(const std::vector<Note>& estimate, const std::vector<Note>& truth, int grid_notes) {
    NoteMetrics m;
    m.grid_notes = grid_notes;
    auto has = [](const std::vector<Note>& v, const Note& n) { return std::find(v.begin(), v.end(), n) != v.end(); };
    for (const Note& e : estimate) (has(truth, e) ? m.true_positives : m.false_positives)++;
    for (const Note& t : truth) {
        if (!has(estimate, t)) ++m.false_negatives;
    }
    return m;
}

TrialRecord tally_trial(const SampledInterpretation& sample) {
    const Interpretation& interp = sample.interpretation;
    TrialRecord rec;
    rec.n_fundamentals = static_cast<int>(sample.fundamentals.size());
    rec.fundamentals = sample.fundamentals;

    Interpretation truth(interp.octaves());
    for (const Note& f : sample.fundamentals) truth.set(f);

    const auto naive = naive_classify(interp);
    for (const Note& x : naive) {
        if (!truth.at(x)) rec.false_fundamentals.push_back(x);
    }

    for (const Note& x : rec.false_fundamentals) {
        const TerminalTable& table = TerminalTable::get(configuration_of(x.chroma));
        std::uint16_t mask = 0;
        const auto& pool = table.pool();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (truth.at(pool[i].apply(x))) mask = static_cast<std::uint16_t>(mask | (1u << i));
        }
        const TerminalSummary& s = table.lookup(mask);
        if (!s.satisfied) throw std::logic_error("false fundamental " + x.name() + " has no satisfying generators");
        for (int t = 0; t < kTerminalTypeCount; ++t) {
            rec.type_tallies[static_cast<std::size_t>(t)] += static_cast<double>(s.counts[static_cast<std::size_t>(t)]) / s.total;
        }
        rec.terminal_count_sum += s.distinct_types;
    }

    const int grid_notes = kChromaCount * (interp.octaves() - kSamplerHeadroom);
    rec.naive = compare_notes(naive, sample.fundamentals, grid_notes);
    return rec;
}

TrialRecord run_trial(int n, Rng& rng, int octaves) { return tally_trial(sample_interpretation(n, rng, octaves)); }

double PrevalenceRow::tally_total() const { return std::accumulate(tallies.begin(), tallies.end(), 0.0); }

double PrevalenceRow::proportion(EdgeType t) const {
    const double total = tally_total();
    return total > 0.0 ? tallies[static_cast<std::size_t>(type_index(t))] / total : 0.0;
}

double PrevalenceRow::mean_false_fundamentals() const {
    return samples ? static_cast<double>(false_fundamentals) / samples : 0.0;
}

double PrevalenceRow::mean_terminals() const {
    return false_fundamentals ? terminal_count_sum / static_cast<double>(false_fundamentals) : 0.0;
}

double PrevalenceRow::naive_accuracy() const { return samples ? accuracy_sum / samples : 0.0; }
double PrevalenceRow::naive_precision() const { return samples ? precision_sum / samples : 0.0; }
double PrevalenceRow::naive_grid_accuracy() const { return samples ? grid_accuracy_sum / samples : 0.0; }

std::array<double, kTerminalTypeCount> PrevalenceStats::overall_proportions() const {
    std::array<double, kTerminalTypeCount> acc{};
    for (const auto& r : rows) {
        for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += r.tallies[t];
    }
    const double total = std::accumulate(acc.begin(), acc.end(), 0.0);
    if (total > 0.0) {
        for (auto& v : acc) v /= total;
    }
    return acc;
}

double PrevalenceStats::mean_edge_cases() const {
    std::int64_t ff = 0;
    std::int64_t trials = 0;
    for (const auto& r : rows) {
        ff += r.false_fundamentals;
        trials += r.samples;
    }
    return trials ? static_cast<double>(ff) / static_cast<double>(trials) : 0.0;
}

PrevalenceStats run_experiment(int samples_per_n, int n_min, int n_max, std::uint64_t seed, unsigned threads,
                               int octaves) {
    if (samples_per_n < 1) throw std::invalid_argument("samples_per_n must be at least 1");
    if (n_min < 1 || n_max < n_min || n_max > kChromaCount * octaves) {
        throw std::invalid_argument("n range must satisfy 1 <= n_min <= n_max <= " +
                                    std::to_string(kChromaCount * octaves));
    }
    // Build the memo tables before the workers start.
    for (Configuration c : kAllConfigurations) TerminalTable::get(c);

    PrevalenceStats stats;
    stats.seed = seed;
    stats.samples_per_n = samples_per_n;
    stats.octaves = octaves;
    stats.rows.resize(static_cast<std::size_t>(n_max - n_min + 1));

    detail::parallel_for(stats.rows.size(), threads, [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        Rng rng(substream_seed(seed, n));
        PrevalenceRow row;
        row.n = n;
        row.samples = samples_per_n;
        for (int s = 0; s < samples_per_n; ++s) {
            const TrialRecord rec = run_trial(n, rng, octaves);
            row.false_fundamentals += static_cast<std::int64_t>(rec.false_fundamentals.size());
            for (std::size_t t = 0; t < row.tallies.size(); ++t) row.tallies[t] += rec.type_tallies[t];
            row.terminal_count_sum += rec.terminal_count_sum;
            row.accuracy_sum += rec.naive.accuracy();
            row.precision_sum += rec.naive.precision();
            row.grid_accuracy_sum += rec.naive.grid_accuracy();
        }
        stats.rows[i] = row;
    });
    return stats;
}

std::string stats_to_csv(const PrevalenceStats& stats) {
    std::ostringstream os;
    os.precision(10);
    os << "n,type,proportion,mean_terminals,naive_accuracy,mean_false_fundamentals,naive_precision,naive_grid_accuracy\n";
    for (const auto& r : stats.rows) {
        for (int t = 0; t < kTerminalTypeCount; ++t) {
            const EdgeType type = type_from_index(t);
            os << r.n << ',' << edge_type_code(type) << ',' << r.proportion(type) << ',' << r.mean_terminals() << ','
               << r.naive_accuracy() << ',' << r.mean_false_fundamentals() << ',' << r.naive_precision() << ','
               << r.naive_grid_accuracy() << '\n';
        }
    }
    return os.str();
}

std::string stats_to_json(const PrevalenceStats& stats) {
    nlohmann::ordered_json j;
    j["seed"] = stats.seed;
    j["samples_per_n"] = stats.samples_per_n;
    j["octaves"] = stats.octaves;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : stats.rows) {
        nlohmann::ordered_json row;
        row["n"] = r.n;
        row["samples"] = r.samples;
        row["false_fundamentals"] = r.false_fundamentals;
        nlohmann::ordered_json tallies;
        for (int t = 0; t < kTerminalTypeCount; ++t) {
            tallies[std::string(edge_type_code(type_from_index(t)))] = r.tallies[static_cast<std::size_t>(t)];
        }
        row["tallies"] = tallies;
        row["terminal_count_sum"] = r.terminal_count_sum;
        row["accuracy_sum"] = r.accuracy_sum;
        row["precision_sum"] = r.precision_sum;
        row["grid_accuracy_sum"] = r.grid_accuracy_sum;
        row["proportions"] = nlohmann::ordered_json::object();
        for (int t = 0; t < kTerminalTypeCount; ++t) {
            row["proportions"][std::string(edge_type_code(type_from_index(t)))] = r.proportion(type_from_index(t));
        }
        row["mean_terminals"] = r.mean_terminals();
        row["naive_accuracy"] = r.naive_accuracy();
        j["rows"].push_back(row);
    }
    return j.dump(1);
}

PrevalenceStats stats_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        PrevalenceStats stats;
        stats.seed = j.at("seed").get<std::uint64_t>();
        stats.samples_per_n = j.at("samples_per_n").get<int>();
        stats.octaves = j.value("octaves", kDefaultOctaves);
        for (const auto& row : j.at("rows")) {
            PrevalenceRow r;
            r.n = row.at("n").get<int>();
            r.samples = row.at("samples").get<int>();
            r.false_fundamentals = row.at("false_fundamentals").get<std::int64_t>();
            for (int t = 0; t < kTerminalTypeCount; ++t) {
                r.tallies[static_cast<std::size_t>(t)] =
                    row.at("tallies").at(std::string(edge_type_code(type_from_index(t)))).get<double>();
            }
            r.terminal_count_sum = row.at("terminal_count_sum").get<double>();
            r.accuracy_sum = row.at("accuracy_sum").get<double>();
            r.precision_sum = row.at("precision_sum").get<double>();
            r.grid_accuracy_sum = row.at("grid_accuracy_sum").get<double>();
            stats.rows.push_back(r);
        }
        return stats;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("prevalence JSON: ") + e.what());
    }
}

}  // namespace geopitch
