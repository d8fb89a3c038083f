#pragma once

// Batch execution behind the run and sweep commands.

#include "tessera/cli/config.hpp"
#include "tessera/kernel.hpp"
#include "tessera/observation.hpp"
#include "tessera/timetravel.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace tessera::cli {

using Reporter = std::function<void(const std::string&)>;

inline fs::path seed_csv_path(const fs::path& out, std::uint64_t seed) {
    fs::path p = out;
    p += "_seed" + std::to_string(seed) + ".csv";
    return p;
}

inline void write_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw RunError("cannot write " + path.string());
}

/// Tick 0 with raster layers applied in order. A layer that does not fit
/// (bad file, wrong size, values out of range) is a config error.
inline SimulationState initial_state(const Model& model, const RunConfig& c, std::uint64_t seed) {
    SimulationState state = init_simulation(model, c.params, seed);
    for (const auto& l : c.layers) {
        try {
            const RasterLayer layer = import_ascii_grid(read_text(l.path), l.path.filename().string());
            state = apply_layer(model, std::move(state), layer, l.attr, l.transform, l.clamp);
        } catch (const Error& e) {
            throw ConfigError(l.path.string() + ": " + e.what());
        }
    }
    return state;
}

struct SeedRun {
    std::vector<ProbeSeries> series;  // ticks 0..steps
    SimulationState final_state;
};

/// One seed for `c.steps` ticks; `timeline`, if given, receives every tick.
inline SeedRun run_seed(const Model& model, const RunConfig& c, std::uint64_t seed, Timeline* timeline = nullptr) {
    SimulationState state = initial_state(model, c, seed);
    ProbeRecorder rec(model);
    rec.observe(state);
    if (timeline) timeline->record(state);
    for (std::uint64_t t = 0; t < c.steps; ++t) {
        state = step(model, state);
        rec.observe(state);
        if (timeline) timeline->record(state);
    }
    return {rec.series(), std::move(state)};
}

namespace detail {

/// Runs `fn` with engine and I/O failures reported as RunError.
template <class Fn>
auto as_run_error(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(e.what());
    }
}

}  // namespace detail

/// Writes "<out>_seed<k>.csv" per seed and, if asked, one timeline directory
/// per seed under c.timeline. Returns the CSV paths in seed order.
inline std::vector<fs::path> execute_run(const RunConfig& c, const Reporter& report = {}) {
    validate(c);
    const Model& model = find_model(c.model);
    std::vector<fs::path> written;
    for (const auto seed : c.seeds) {
        detail::as_run_error([&] {
            Timeline timeline;
            SeedRun r = run_seed(model, c, seed, c.timeline ? &timeline : nullptr);
            const fs::path csv = seed_csv_path(c.out, seed);
            write_file(csv, export_csv(r.series));
            written.push_back(csv);
            if (c.timeline) timeline.export_to(*c.timeline / ("seed" + std::to_string(seed)));
            if (report) report("seed " + std::to_string(seed) + ": " + std::to_string(c.steps) + " ticks -> " + csv.string());
            return 0;
        });
    }
    return written;
}

struct SweepRow {
    std::size_t combination = 0;
    std::uint64_t seed = 0;
    ProbeRecord final_probes;
    std::uint64_t final_tick = 0;
};

/// Summary CSV: combination, one column per grid axis, seed, tick, then the
/// model's probes at the final tick. Rows are combinations in grid order with
/// seeds innermost, however many jobs ran.
inline std::string sweep_csv(const Model& model, const SweepSpec& s, const std::vector<ParamSet>& combos,
                             const std::vector<SweepRow>& rows) {
    std::string out = "combination";
    for (const auto& [name, _] : s.grid) out += "," + name;
    out += ",seed,tick";
    for (const auto& p : model.probes) out += "," + p.name;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.combination);
        for (const auto& [name, _] : s.grid) out += "," + to_string(combos[r.combination].at(name));
        out += "," + std::to_string(r.seed) + "," + std::to_string(r.final_tick);
        for (const auto& p : model.probes) {
            auto it = r.final_probes.find(p.name);
            out += ',';
            out += (it != r.final_probes.end() && it->second.ok()) ? format_real(it->second.value) : "nan";
        }
        out += '\n';
    }
    return out;
}

inline std::string execute_sweep(const SweepSpec& s, const Reporter& report = {}) {
    validate(s);
    const Model& model = find_model(s.base.model);
    const std::vector<ParamSet> combos = combinations(s);
    const std::size_t n_seeds = s.base.seeds.size();
    std::vector<SweepRow> rows(combos.size() * n_seeds);

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            try {
                RunConfig c = s.base;
                c.params = combos[i / n_seeds];
                const std::uint64_t seed = s.base.seeds[i % n_seeds];
                SeedRun r = detail::as_run_error([&] { return run_seed(model, c, seed); });
                rows[i] = {i / n_seeds, seed, r.final_state.probes, r.final_state.tick};
                if (report) {
                    std::lock_guard lock(mu);
                    report("combination " + std::to_string(i / n_seeds) + " seed " + std::to_string(seed) + " done");
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = rows.size();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(s.jobs, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::string csv = sweep_csv(model, s, combos, rows);
    detail::as_run_error([&] {
        write_file(s.out, csv);
        return 0;
    });
    return csv;
}

}  // namespace tessera::cli
