#include "qatsp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "qatsp/oracles.hpp"
#include "qatsp/rng.hpp"

namespace qatsp {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

std::string join_ints(const std::vector<int>& v, char sep = ';') {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << sep;
        out << v[i];
    }
    return out.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

nlohmann::json histogram_json(const std::map<int, long long>& hist) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : hist) j[std::to_string(k)] = v;
    return j;
}

} // namespace

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

ExperimentReport exp_subtour_fraction(int n, int count, std::uint64_t seed, int jobs) {
    Timer timer;
    ExperimentReport report;
    report.id = "subtour-fraction";
    report.ensemble = {n, count, seed};
    report.tool_version = QATSP_VERSION;
    report.header = {"instance_seed", "n",     "opt_length", "cover_weight",
                     "num_cycles",    "split", "cycle_sizes"};

    struct Record {
        std::uint64_t inst_seed;
        double opt_len, cover_w;
        int cycles;
        std::vector<int> sizes;
    };
    std::vector<Record> records(count);
    parallel_for(count, jobs, [&](int k) {
        const TspInstance inst = generate_instance(n, seed + k);
        const Tour opt = optimal_tour(inst);
        const CycleCover cover = min_cycle_cover(inst);
        Record r;
        r.inst_seed = inst.seed;
        r.opt_len = opt.length;
        r.cover_w = cover.total_weight;
        r.cycles = static_cast<int>(cover.cycles.size());
        for (const auto& c : cover.cycles) r.sizes.push_back(static_cast<int>(c.size()));
        records[k] = std::move(r);
    });

    int split_count = 0;
    std::map<int, long long> size_hist;
    for (const auto& r : records) {
        const bool split = r.cycles >= 2;
        split_count += split ? 1 : 0;
        if (split)
            for (int s : r.sizes) ++size_hist[s];
        report.rows.push_back({std::to_string(r.inst_seed), fmt(n), fmt(r.opt_len),
                               fmt(r.cover_w), fmt(r.cycles), split ? "1" : "0",
                               join_ints(r.sizes)});
    }
    int modal_size = 0;
    long long modal_count = 0;
    for (const auto& [size, c] : size_hist)
        if (c > modal_count) {
            modal_count = c;
            modal_size = size; // smallest size wins ties (map is ordered)
        }
    report.summary["split_fraction"] = static_cast<double>(split_count) / count;
    report.summary["split_count"] = split_count;
    report.summary["instances"] = count;
    report.summary["subtour_size_histogram"] = histogram_json(size_hist);
    report.summary["modal_subtour_size"] = modal_size;
    report.wall_seconds = timer.seconds();
    return report;
}

ExperimentReport exp_ground_connection_distribution(int n, int count, std::uint64_t seed,
                                                    int jobs) {
    Timer timer;
    ExperimentReport report;
    report.id = "ground-connections";
    report.ensemble = {n, count, seed};
    report.tool_version = QATSP_VERSION;
    report.header = {"instance_seed", "subtour", "size", "required_connections"};

    std::vector<std::vector<ConnectionStat>> stats(count);
    parallel_for(count, jobs, [&](int k) {
        const TspInstance inst = generate_instance(n, seed + k);
        const CycleCover cover = min_cycle_cover(inst);
        if (cover.cycles.size() >= 2) stats[k] = connection_stats(inst, cover);
    });

    std::map<int, long long> hist;
    long long total = 0;
    for (int k = 0; k < count; ++k) {
        for (const auto& s : stats[k]) {
            ++hist[s.required_connections];
            ++total;
            report.rows.push_back({std::to_string(seed + k), join_ints(s.subset),
                                   fmt(static_cast<int>(s.subset.size())),
                                   fmt(s.required_connections)});
        }
    }
    const auto share = [&](int key) {
        const auto it = hist.find(key);
        return total > 0 ? static_cast<double>(it == hist.end() ? 0 : it->second) / total : 0.0;
    };
    bool all_even = true;
    for (const auto& [k, v] : hist)
        if (k % 2 != 0 || k < 2) all_even = false;
    report.summary["histogram"] = histogram_json(hist);
    report.summary["subtours"] = total;
    report.summary["share_2"] = share(2);
    report.summary["share_4"] = share(4);
    report.summary["all_even_and_ge_2"] = all_even;
    report.wall_seconds = timer.seconds();
    return report;
}

namespace {

struct LoopSetting {
    InnerSolver solver;
    long long mcs; // 0 for exact
    std::string name() const {
        if (solver == InnerSolver::exact) return "exact";
        return (solver == InnerSolver::sa ? "sa@" : "sqa@") + std::to_string(mcs);
    }
};

LoopPolicy make_policy(const LoopSetting& setting, int C, int max_iterations) {
    LoopPolicy policy;
    policy.C = C;
    policy.escalation_factor = (C == 3) ? 2.0 : 1.0;
    policy.max_iterations = max_iterations;
    policy.solver = setting.solver;
    policy.schedule.total_sweeps = setting.mcs > 0 ? setting.mcs : 1;
    return policy;
}

} // namespace

ExperimentReport exp_iterative_success(int n, int count, InnerSolver solver, int C,
                                       const std::vector<long long>& mcs_grid,
                                       std::uint64_t seed, int jobs, int max_iterations) {
    Timer timer;
    ExperimentReport report;
    report.id = "iterative-success";
    report.ensemble = {n, count, seed};
    report.tool_version = QATSP_VERSION;
    report.header = {"instance_seed", "solver",  "mcs",          "success",   "iterations",
                     "optimal",       "gap",     "final_length", "opt_length"};

    std::vector<LoopSetting> settings;
    if (solver == InnerSolver::exact) {
        settings.push_back({InnerSolver::exact, 0});
    } else {
        for (long long mcs : mcs_grid) settings.push_back({solver, mcs});
    }

    struct Cell {
        bool success = false, optimal = false;
        int iterations = 0;
        double final_len = 0.0, opt_len = 0.0;
    };
    std::vector<std::vector<Cell>> cells(settings.size(), std::vector<Cell>(count));
    const int total_tasks = static_cast<int>(settings.size()) * count;
    parallel_for(total_tasks, jobs, [&](int task) {
        const int si = task / count;
        const int k = task % count;
        const TspInstance inst = generate_instance(n, seed + k);
        const Tour opt = optimal_tour(inst);
        const LoopPolicy policy = make_policy(settings[si], C, max_iterations);
        const LoopResult res = iterate_solve(inst, policy, derive_seed(seed, k));
        Cell c;
        c.success = res.success;
        c.iterations = static_cast<int>(res.logs.size());
        c.opt_len = opt.length;
        c.final_len = res.tour ? res.tour->length : 0.0;
        c.optimal = res.success && res.tour->length <= opt.length + 1e-9;
        cells[si][k] = c;
    });

    report.summary["settings"] = nlohmann::json::array();
    for (std::size_t si = 0; si < settings.size(); ++si) {
        int optimal = 0, success = 0, optimal_within_2 = 0;
        std::vector<int> optimal_within(max_iterations + 1, 0);
        for (int k = 0; k < count; ++k) {
            const Cell& c = cells[si][k];
            success += c.success ? 1 : 0;
            optimal += c.optimal ? 1 : 0;
            if (c.optimal)
                for (int it = c.iterations; it <= max_iterations; ++it) ++optimal_within[it];
            if (c.optimal && c.iterations <= 2) ++optimal_within_2;
            const double gap = c.success ? c.final_len - c.opt_len : -1.0;
            report.rows.push_back({std::to_string(seed + k), settings[si].name(),
                                   fmt(settings[si].mcs), c.success ? "1" : "0",
                                   fmt(c.iterations), c.optimal ? "1" : "0", fmt(gap),
                                   fmt(c.final_len), fmt(c.opt_len)});
        }
        nlohmann::json s;
        s["setting"] = settings[si].name();
        s["success_rate"] = static_cast<double>(success) / count;
        s["optimal_rate"] = static_cast<double>(optimal) / count;
        s["optimal_within_2"] = static_cast<double>(optimal_within_2) / count;
        nlohmann::json curve = nlohmann::json::array();
        for (int it = 1; it <= max_iterations; ++it)
            curve.push_back(static_cast<double>(optimal_within[it]) / count);
        s["optimal_within_curve"] = curve;
        report.summary["settings"].push_back(s);
    }
    report.wall_seconds = timer.seconds();
    return report;
}

ExperimentReport exp_connection_histograms_by_mcs(int n, int count,
                                                  const std::vector<long long>& mcs_grid,
                                                  const std::vector<int>& iterations,
                                                  std::uint64_t seed, int jobs) {
    Timer timer;
    ExperimentReport report;
    report.id = "connection-histograms";
    report.ensemble = {n, count, seed};
    report.tool_version = QATSP_VERSION;
    report.header = {"setting", "mcs", "iteration", "connections", "count"};

    const int max_iter = *std::max_element(iterations.begin(), iterations.end());
    std::vector<LoopSetting> settings{{InnerSolver::exact, 0}};
    for (long long mcs : mcs_grid) settings.push_back({InnerSolver::sa, mcs});

    std::vector<TspInstance> instances;
    instances.reserve(count);
    for (int k = 0; k < count; ++k) instances.push_back(generate_instance(n, seed + k));

    std::vector<std::vector<LoopResult>> loops(settings.size(), std::vector<LoopResult>(count));
    const int total_tasks = static_cast<int>(settings.size()) * count;
    parallel_for(total_tasks, jobs, [&](int task) {
        const int si = task / count;
        const int k = task % count;
        const LoopPolicy policy = make_policy(settings[si], 2, max_iter);
        loops[si][k] = iterate_solve(instances[k], policy, derive_seed(seed, k));
    });

    report.summary["histograms"] = nlohmann::json::array();
    for (std::size_t si = 0; si < settings.size(); ++si) {
        std::vector<std::pair<const TspInstance*, const LoopResult*>> ensemble;
        for (int k = 0; k < count; ++k) ensemble.emplace_back(&instances[k], &loops[si][k]);
        for (int iter : iterations) {
            const auto hist = required_connections_histogram(ensemble, iter);
            long long total = 0, above4 = 0;
            for (const auto& [conn, c] : hist) {
                total += c;
                if (conn > 4) above4 += c;
                report.rows.push_back({settings[si].name(), fmt(settings[si].mcs), fmt(iter),
                                       fmt(conn), fmt(c)});
            }
            nlohmann::json h;
            h["setting"] = settings[si].name();
            h["iteration"] = iter;
            h["histogram"] = histogram_json(hist);
            h["subtours"] = total;
            h["tail_mass_above_4"] =
                total > 0 ? static_cast<double>(above4) / total : 0.0;
            report.summary["histograms"].push_back(h);
        }
    }
    report.wall_seconds = timer.seconds();
    return report;
}

ExperimentReport exp_edge_rank_decay(const std::vector<int>& ns, int count, std::uint64_t seed,
                                     int jobs) {
    Timer timer;
    ExperimentReport report;
    report.id = "edge-rank-decay";
    report.ensemble = {ns.empty() ? 0 : ns.front(), count, seed};
    report.tool_version = QATSP_VERSION;
    report.header = {"n", "rank", "count", "frequency"};

    report.summary["per_n"] = nlohmann::json::array();
    for (int n : ns) {
        std::vector<std::vector<int>> rank_of(count); // flattened per-instance edge ranks
        std::vector<std::map<int, long long>> covered(count);
        std::vector<long long> edges_total(count, 0);
        parallel_for(count, jobs, [&](int k) {
            const TspInstance inst = generate_instance(n, seed + k);
            const Tour opt = optimal_tour(inst);
            // rank position of each directed tour edge endpoint
            std::vector<std::vector<int>> rank_index(n, std::vector<int>(n, 0));
            for (int i = 0; i < n; ++i) {
                const auto ranks = neighbor_ranks(inst, i);
                for (int r = 0; r < n - 1; ++r) rank_index[i][ranks[r]] = r + 1;
            }
            auto& out = rank_of[k];
            auto& cov = covered[k];
            for (int t = 0; t < n; ++t) {
                const int i = opt.order[t], j = opt.order[(t + 1) % n];
                out.push_back(rank_index[i][j]);
                out.push_back(rank_index[j][i]);
                ++edges_total[k];
                // union truncation retains the edge if either side ranks it <= L
                const int min_rank = std::min(rank_index[i][j], rank_index[j][i]);
                ++cov[min_rank];
            }
        });

        std::map<int, long long> hist;
        long long entries = 0;
        for (const auto& v : rank_of)
            for (int r : v) {
                ++hist[r];
                ++entries;
            }
        for (const auto& [rank, c] : hist)
            report.rows.push_back({fmt(n), fmt(rank), fmt(c),
                                   fmt(static_cast<double>(c) / entries)});

        // least-squares slope of log frequency vs rank over nonzero bins
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int pts = 0;
        for (const auto& [rank, c] : hist) {
            const double x = rank, y = std::log(static_cast<double>(c) / entries);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++pts;
        }
        const double slope =
            pts >= 2 ? (pts * sxy - sx * sy) / (pts * sxx - sx * sx) : 0.0;

        long long total_edges = 0;
        for (long long e : edges_total) total_edges += e;
        std::map<int, long long> min_rank_hist;
        for (const auto& cov : covered)
            for (const auto& [r, c] : cov) min_rank_hist[r] += c;
        nlohmann::json coverage = nlohmann::json::object();
        for (int L = 3; L <= 8 && L <= n - 1; ++L) {
            long long kept = 0;
            for (const auto& [r, c] : min_rank_hist)
                if (r <= L) kept += c;
            coverage[std::to_string(L)] = static_cast<double>(kept) / total_edges;
        }
        nlohmann::json per_n;
        per_n["n"] = n;
        per_n["histogram"] = histogram_json(hist);
        per_n["log_frequency_slope"] = slope;
        per_n["coverage_by_L"] = coverage;
        per_n["full_coverage_L"] = n - 1;
        report.summary["per_n"].push_back(per_n);
    }
    report.wall_seconds = timer.seconds();
    return report;
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "# experiment: " << report.id << '\n';
    out << "# version: " << report.tool_version << '\n';
    out << "# command: " << report.command_line << '\n';
    out << "# ensemble: n=" << report.ensemble.n << " count=" << report.ensemble.count
        << " seed=" << report.ensemble.master_seed << '\n';
    for (std::size_t i = 0; i < report.header.size(); ++i) {
        if (i) out << ',';
        out << report.header[i];
    }
    out << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "qatsp-report/1";
    j["id"] = report.id;
    j["ensemble"] = {{"n", report.ensemble.n},
                     {"count", report.ensemble.count},
                     {"seed", report.ensemble.master_seed}};
    j["header"] = report.header;
    j["rows"] = report.rows;
    j["summary"] = report.summary;
    j["tool_version"] = report.tool_version;
    j["command"] = report.command_line;
    j["wall_seconds"] = report.wall_seconds; // metadata; varies run to run
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

ExperimentReport load_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report file: " + path.string());
    nlohmann::json j;
    in >> j;
    ExperimentReport report;
    report.id = j.at("id").get<std::string>();
    report.ensemble.n = j.at("ensemble").at("n").get<int>();
    report.ensemble.count = j.at("ensemble").at("count").get<int>();
    report.ensemble.master_seed = j.at("ensemble").at("seed").get<std::uint64_t>();
    report.header = j.at("header").get<std::vector<std::string>>();
    report.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    report.summary = j.at("summary");
    report.tool_version = j.at("tool_version").get<std::string>();
    report.command_line = j.value("command", "");
    report.wall_seconds = j.value("wall_seconds", 0.0);
    return report;
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
    out << "experiment " << report.id << "  (n=" << report.ensemble.n
        << ", count=" << report.ensemble.count << ", seed=" << report.ensemble.master_seed
        << ", version " << report.tool_version << ")\n";
    out << "rows: " << report.rows.size() << "  wall: " << std::fixed << std::setprecision(2)
        << report.wall_seconds << "s\n";
    out.unsetf(std::ios::floatfield);
    const std::function<void(const nlohmann::json&, int)> dump = [&](const nlohmann::json& j,
                                                                     int indent) {
        for (const auto& [key, value] : j.items()) {
            out << std::string(indent, ' ') << std::left << std::setw(28) << key;
            if (value.is_object() || value.is_array()) {
                out << '\n';
                dump(value, indent + 2);
            } else {
                out << ' ' << value.dump() << '\n';
            }
        }
    };
    dump(report.summary, 2);
}

} // namespace qatsp
