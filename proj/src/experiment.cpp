#include <mbsched/experiment.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mbs {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr char const * version_string = "mbsched 0.1.0";

std::vector<std::string> split(std::string const & s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        if (!cur.empty()) {
            out.push_back(cur);
        }
    }
    return out;
}

double parse_double(std::string const & s, std::string const & field) {
    double v = 0.0;
    auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(field, "not a number: '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[32];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<Policy> parse_policy_list(std::string const & csv, std::string const & field) {
    std::vector<Policy> out;
    for (auto const & name : split(csv, ',')) {
        auto const p = parse_policy(name);
        if (!p) {
            throw ConfigError(field, "unknown policy '" + name + "'");
        }
        out.push_back(*p);
    }
    if (out.empty()) {
        throw ConfigError(field, "no policies given");
    }
    return out;
}

std::vector<double> parse_load_list(std::string const & csv, std::string const & field) {
    std::vector<double> out;
    for (auto const & s : split(csv, ',')) {
        double const v = parse_double(s, field);
        if (!(v > 0.0)) {
            throw ConfigError(field, "loads must be > 0");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError(field, "no loads given");
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string const & csv, std::string const & field) {
    std::vector<std::uint64_t> out;
    for (auto const & s : split(csv, ',')) {
        std::uint64_t v = 0;
        auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw ConfigError(field, "not a seed: '" + s + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError(field, "no seeds given");
    }
    return out;
}

// ---------------------------------------------------------------- config

ExperimentConfig experiment_config_from_json(json const & j) {
    if (!j.is_object()) {
        throw ConfigError("config", "expected a JSON object");
    }
    ExperimentConfig cfg;
    if (j.contains("generator")) {
        cfg.generator = gen_config_from_json(j.at("generator"));
    }
    if (j.contains("platform")) {
        auto const & p = j.at("platform");
        if (p.contains("ccr")) {
            if (!p.at("ccr").is_number()) {
                throw ConfigError("platform.ccr", "expected a number");
            }
            cfg.platform.ccr = p.at("ccr").get<double>();
            if (!(cfg.platform.ccr >= 0.0)) {
                throw ConfigError("platform.ccr", "must be >= 0");
            }
        }
        if (p.contains("clusters")) {
            auto const & cs = p.at("clusters");
            if (!cs.is_array() || cs.empty()) {
                throw ConfigError("platform.clusters", "expected a non-empty array of {kind, cores}");
            }
            cfg.platform.clusters.clear();
            for (auto const & c : cs) {
                if (!c.contains("kind") || !c.at("kind").is_number_integer() || !c.contains("cores")
                    || !c.at("cores").is_number_integer() || c.at("cores").get<int>() < 1) {
                    throw ConfigError("platform.clusters", "each cluster needs integer kind and cores >= 1");
                }
                cfg.platform.clusters.push_back({Kind{c.at("kind").get<int>()}, c.at("cores").get<int>()});
            }
        }
    }
    if (j.contains("sweep")) {
        auto const & s = j.at("sweep");
        auto strings = [&](char const * key) {
            auto const & v = s.at(key);
            if (v.is_string()) {
                return v.get<std::string>();
            }
            if (!v.is_array()) {
                throw ConfigError(std::string("sweep.") + key, "expected an array");
            }
            std::string csv;
            for (auto const & e : v) {
                csv += (e.is_string() ? e.get<std::string>() : e.dump()) + ",";
            }
            return csv;
        };
        if (s.contains("policies")) {
            cfg.sweep.policies = parse_policy_list(strings("policies"), "sweep.policies");
        }
        if (s.contains("loads")) {
            cfg.sweep.loads = parse_load_list(strings("loads"), "sweep.loads");
        }
        if (s.contains("seeds")) {
            cfg.sweep.seeds = parse_seed_list(strings("seeds"), "sweep.seeds");
        }
        if (s.contains("decile_load")) {
            cfg.sweep.decile_load = s.at("decile_load").get<double>();
        }
        if (s.contains("clearing")) {
            auto const v = s.at("clearing").get<std::string>();
            if (v == "global_halt") {
                cfg.sweep.clearing = ClearingMode::global_halt;
            } else if (v == "per_kind") {
                cfg.sweep.clearing = ClearingMode::per_kind;
            } else {
                throw ConfigError("sweep.clearing", "expected global_halt or per_kind");
            }
        }
        if (s.contains("succ_sum")) {
            auto const v = s.at("succ_sum").get<std::string>();
            if (v == "distinct") {
                cfg.sweep.succ_sum = SuccSumMode::distinct;
            } else if (v == "recursive") {
                cfg.sweep.succ_sum = SuccSumMode::recursive;
            } else {
                throw ConfigError("sweep.succ_sum", "expected distinct or recursive");
            }
        }
        if (s.contains("decile_key")) {
            auto const v = s.at("decile_key").get<std::string>();
            if (v == "total_work") {
                cfg.sweep.decile_key = DecileKey::total_work;
            } else if (v == "critical_path") {
                cfg.sweep.decile_key = DecileKey::critical_path;
            } else {
                throw ConfigError("sweep.decile_key", "expected total_work or critical_path");
            }
        }
    }
    if (j.contains("output")) {
        auto const & o = j.at("output");
        if (o.contains("event_log")) {
            cfg.output.event_log = o.at("event_log").get<bool>();
        }
    }
    return cfg;
}

ordered_json to_json(ExperimentConfig const & cfg) {
    ordered_json clusters = ordered_json::array();
    for (auto const & c : cfg.platform.clusters) {
        clusters.push_back({{"kind", c.kind.id}, {"cores", c.cores}});
    }
    std::vector<std::string> policies;
    for (Policy p : cfg.sweep.policies) {
        policies.emplace_back(to_string(p));
    }
    return {
        {"generator", to_json(cfg.generator)},
        {"platform", {{"clusters", clusters}, {"ccr", cfg.platform.ccr}}},
        {"sweep",
            {{"policies", policies}, {"loads", cfg.sweep.loads}, {"seeds", cfg.sweep.seeds},
                {"decile_load", cfg.sweep.decile_load},
                {"clearing", cfg.sweep.clearing == ClearingMode::global_halt ? "global_halt" : "per_kind"},
                {"succ_sum", cfg.sweep.succ_sum == SuccSumMode::distinct ? "distinct" : "recursive"},
                {"decile_key", cfg.sweep.decile_key == DecileKey::total_work ? "total_work" : "critical_path"}}},
        {"output", {{"event_log", cfg.output.event_log}}},
    };
}

ExperimentConfig load_experiment_config(fs::path const & path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (json::exception const & e) {
        throw ConfigError("config", e.what());
    }
    try {
        return experiment_config_from_json(j);
    } catch (json::exception const & e) {
        throw ConfigError("config", e.what());
    }
}

// ---------------------------------------------------------------- rows

SummaryRow summarize(
    Policy policy, double load, std::uint64_t seed, std::span<OutcomeRecord const> outcomes, DecileKey key) {
    auto const starved = starvation_count(outcomes);
    auto const deciles = slr_by_decile(outcomes, key);
    return SummaryRow{policy, load, seed, normalized_value(outcomes), starved.jobs, starved.job_fraction,
        deciles.mean, starved.tasks, starved.task_fraction};
}

std::string summary_csv_header() {
    std::string h = "policy,load,seed,normalized_value,starved_count,starved_fraction";
    for (int d = 1; d <= 10; ++d) {
        h += ",decile_slr_" + std::to_string(d);
    }
    h += ",starved_tasks,starved_task_fraction\n";
    return h;
}

std::string format_summary_row(SummaryRow const & r) {
    std::string line = std::string(to_string(r.policy)) + "," + format_number(r.load) + "," + std::to_string(r.seed)
        + "," + format_number(r.normalized_value) + "," + std::to_string(r.starved_count) + ","
        + format_number(r.starved_fraction);
    for (double d : r.decile_slr) {
        line += "," + format_number(d);
    }
    line += "," + std::to_string(r.starved_tasks) + "," + format_number(r.starved_task_fraction) + "\n";
    return line;
}

std::vector<SummaryRow> parse_summary_csv(std::istream & in) {
    std::vector<SummaryRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("policy,", 0) == 0) {
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        f.push_back(cur);
        std::string const where = "summary line " + std::to_string(lineno);
        if (f.size() < 16) {
            throw ConfigError(where, "expected at least 16 fields");
        }
        auto num = [&](std::string const & s) {
            return s.empty() ? std::nan("") : parse_double(s, where);
        };
        auto const policy = parse_policy(f[0]);
        if (!policy) {
            throw ConfigError(where, "unknown policy '" + f[0] + "'");
        }
        SummaryRow r{};
        r.policy = *policy;
        r.load = num(f[1]);
        r.seed = parse_seed_list(f[2], where).front();
        r.normalized_value = num(f[3]);
        r.starved_count = static_cast<std::size_t>(num(f[4]));
        r.starved_fraction = num(f[5]);
        for (int d = 0; d < 10; ++d) {
            r.decile_slr[d] = num(f[6 + d]);
        }
        if (f.size() >= 18) {
            r.starved_tasks = static_cast<std::size_t>(num(f[16]));
            r.starved_task_fraction = num(f[17]);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string outcomes_csv(std::span<OutcomeRecord const> outcomes) {
    std::string s = "job,arrive,finish,starved,slr,value,vmax,cp,total_work,tasks,tasks_starved\n";
    for (auto const & o : outcomes) {
        s += std::to_string(o.job) + "," + std::to_string(o.arrive) + ","
            + (o.finish ? std::to_string(*o.finish) : std::string()) + "," + (o.starved ? "1" : "0") + ","
            + format_number(o.slr) + "," + format_number(o.value) + "," + format_number(o.vmax) + ","
            + std::to_string(o.cp) + "," + format_number(o.total_work) + "," + std::to_string(o.tasks) + ","
            + std::to_string(o.tasks_starved) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------- sweep

CellRun run_cell(Workload const & workload, ExperimentConfig const & cfg, Policy policy, double load, bool record_log) {
    Platform platform = cfg.platform.build();
    auto const specs = with_load(workload, cfg.platform.clusters, load);
    auto const jobs = build_jobs(specs, platform.ccr());
    SimOptions opts;
    opts.clearing = cfg.sweep.clearing;
    opts.succ_sum = cfg.sweep.succ_sum;
    opts.record_log = record_log;
    CellRun out{{}, simulate(jobs, std::move(platform), policy, workload.config.seed, opts)};
    out.row = summarize(policy, load, workload.config.seed, out.run.outcomes, cfg.sweep.decile_key);
    return out;
}

namespace {

void write_atomic(fs::path const & path, std::string const & content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string read_file(fs::path const & path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path cell_dir(fs::path const & root, Policy p, double load, std::uint64_t seed) {
    return root / "runs" / std::string(to_string(p)) / ("load_" + format_number(load))
        / ("seed_" + std::to_string(seed));
}

struct Cell {
    std::size_t workload;
    Policy policy;
    double load;
};

}  // namespace

SweepResult run_sweep(std::vector<Workload> const & workloads, ExperimentConfig const & cfg,
    SweepOptions const & options) {
    std::vector<Cell> cells;
    for (Policy p : cfg.sweep.policies) {
        for (double load : cfg.sweep.loads) {
            for (std::size_t w = 0; w < workloads.size(); ++w) {
                cells.push_back({w, p, load});
            }
        }
    }

    std::vector<std::optional<SummaryRow>> rows(cells.size());
    std::vector<std::string> failures(cells.size());
    std::atomic<std::size_t> next{0};
    bool const write = !options.out_dir.empty();

    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            auto const & c = cells[i];
            auto const & wl = workloads[c.workload];
            fs::path const dir = write ? cell_dir(options.out_dir, c.policy, c.load, wl.config.seed) : fs::path{};
            try {
                if (write && options.resume && fs::exists(dir / "summary_row.csv")) {
                    std::istringstream in(read_file(dir / "summary_row.csv"));
                    auto parsed = parse_summary_csv(in);
                    if (parsed.size() == 1) {
                        rows[i] = parsed.front();
                        continue;
                    }
                }
                bool const log = options.event_log || cfg.output.event_log;
                auto run = run_cell(wl, cfg, c.policy, c.load, log && write);
                if (write) {
                    write_atomic(dir / "outcomes.csv", outcomes_csv(run.run.outcomes));
                    if (log) {
                        std::string text;
                        for (auto const & r : run.run.log) {
                            text += format_log_record(r);
                            text += '\n';
                        }
                        write_atomic(dir / "events.log", text);
                    }
                    // written last: its presence marks the cell complete
                    write_atomic(dir / "summary_row.csv", summary_csv_header() + format_summary_row(run.row));
                }
                rows[i] = run.row;
            } catch (std::exception const & e) {
                failures[i] = std::string(to_string(c.policy)) + " load " + format_number(c.load) + " seed "
                    + std::to_string(wl.config.seed) + ": " + e.what();
            }
        }
    };

    unsigned const n = std::max(1u, options.jobs);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto & t : pool) {
        t.join();
    }

    SweepResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (rows[i]) {
            result.rows.push_back(*rows[i]);
        }
        if (!failures[i].empty()) {
            result.failures.push_back(failures[i]);
        }
    }

    if (write) {
        std::string summary = summary_csv_header();
        for (auto const & r : result.rows) {
            summary += format_summary_row(r);
        }
        write_atomic(options.out_dir / "summary.csv", summary);

        auto const cfg_json = to_json(cfg);
        ordered_json wl = ordered_json::array();
        for (auto const & w : workloads) {
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(dump_workload(w))));
            wl.push_back({{"seed", w.config.seed}, {"digest", hex}});
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(cfg_json.dump())));
        ordered_json manifest = {
            {"version", version_string},
            {"config_hash", hex},
            {"config", cfg_json},
            {"workloads", wl},
            {"cells", cells.size()},
            {"failures", result.failures},
        };
        write_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return result;
}

// ---------------------------------------------------------------- report

namespace {

struct Stats {
    double mean = std::nan("");
    double stddev = std::nan("");
    std::size_t n = 0;
};

Stats stats(std::vector<double> const & xs) {
    Stats s;
    s.n = xs.size();
    if (xs.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - s.mean) * (x - s.mean);
    }
    s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

}  // namespace

ReportTables make_report(std::span<SummaryRow const> rows, double decile_load) {
    std::vector<Policy> policies;
    std::set<double> loads;
    std::map<std::pair<Policy, double>, std::vector<SummaryRow const *>> cells;
    for (auto const & r : rows) {
        if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) {
            policies.push_back(r.policy);
        }
        loads.insert(r.load);
        cells[{r.policy, r.load}].push_back(&r);
    }

    ReportTables t;
    t.value_vs_load = "policy,load,mean_normalized_value,stddev_normalized_value,n\n";
    t.starvation_vs_load = "policy,load,mean_starved_fraction,stddev_starved_fraction,mean_starved_count,n\n";
    t.decile_slr = "policy,load,decile,mean_slr,n\n";

    for (Policy p : policies) {
        for (double load : loads) {
            auto const it = cells.find({p, load});
            std::string const key = std::string(to_string(p)) + "," + format_number(load) + ",";
            if (it == cells.end()) {
                t.warnings.push_back("missing cell: " + std::string(to_string(p)) + " at load " + format_number(load));
                t.value_vs_load += key + ",,0\n";
                t.starvation_vs_load += key + ",,,0\n";
                continue;
            }
            std::vector<double> value;
            std::vector<double> frac;
            std::vector<double> count;
            for (auto const * r : it->second) {
                value.push_back(r->normalized_value);
                frac.push_back(r->starved_fraction);
                count.push_back(static_cast<double>(r->starved_count));
            }
            auto const v = stats(value);
            auto const f = stats(frac);
            auto const c = stats(count);
            t.value_vs_load += key + format_number(v.mean) + "," + format_number(v.stddev) + "," + std::to_string(v.n) + "\n";
            t.starvation_vs_load += key + format_number(f.mean) + "," + format_number(f.stddev) + ","
                + format_number(c.mean) + "," + std::to_string(f.n) + "\n";
        }

        auto const it = cells.find({p, decile_load});
        for (int d = 0; d < 10; ++d) {
            std::vector<double> xs;
            if (it != cells.end()) {
                for (auto const * r : it->second) {
                    if (!std::isnan(r->decile_slr[d])) {
                        xs.push_back(r->decile_slr[d]);
                    }
                }
            }
            auto const s = stats(xs);
            t.decile_slr += std::string(to_string(p)) + "," + format_number(decile_load) + "," + std::to_string(d + 1)
                + "," + format_number(s.mean) + "," + std::to_string(s.n) + "\n";
        }
        if (it == cells.end()) {
            t.warnings.push_back("missing decile cell: " + std::string(to_string(p)) + " at load "
                + format_number(decile_load));
        }
    }
    return t;
}

}  // namespace mbs
