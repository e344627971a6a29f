#include <mbsched/workload.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mbs {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- profile

namespace {

struct Segment {
    Tick begin;
    Tick end;
    double weight;
};

// raw (unnormalized) piecewise-constant segments covering one week
std::vector<Segment> week_segments(WeeklyProfile const & p) {
    std::vector<Segment> segs;
    for (int d = 0; d < p.days_per_week; ++d) {
        Tick const base = d * p.day_ticks;
        if (p.flat) {
            segs.push_back({base, base + p.day_ticks, 1.0});
        } else if (d < p.weekdays) {
            segs.push_back({base, base + p.work_start, p.night_weight});
            segs.push_back({base + p.work_start, base + p.work_end, p.work_weight});
            segs.push_back({base + p.work_end, base + p.day_ticks, p.night_weight});
        } else {
            segs.push_back({base, base + p.day_ticks, p.weekend_weight});
        }
    }
    return segs;
}

double raw_week_integral(std::vector<Segment> const & segs) {
    double total = 0.0;
    for (auto const & s : segs) {
        total += s.weight * static_cast<double>(s.end - s.begin);
    }
    return total;
}

}  // namespace

void WeeklyProfile::validate() const {
    if (day_ticks < 1) {
        throw ConfigError("generator.profile.day_ticks", "must be >= 1");
    }
    if (days_per_week < 1) {
        throw ConfigError("generator.profile.days_per_week", "must be >= 1");
    }
    if (weekdays < 0 || weekdays > days_per_week) {
        throw ConfigError("generator.profile.weekdays", "must be in [0, days_per_week]");
    }
    if (work_start < 0 || work_start > work_end || work_end > day_ticks) {
        throw ConfigError("generator.profile.work_start", "need 0 <= work_start <= work_end <= day_ticks");
    }
    if (work_weight < 0 || night_weight < 0 || weekend_weight < 0) {
        throw ConfigError("generator.profile.work_weight", "weights must be >= 0");
    }
    if (!flat && raw_week_integral(week_segments(*this)) <= 0.0) {
        throw ConfigError("generator.profile", "weights integrate to zero over a week");
    }
}

double WeeklyProfile::intensity(double t) const {
    auto const segs = week_segments(*this);
    double const week = static_cast<double>(week_ticks());
    double const mean = raw_week_integral(segs) / week;
    double const in_week = t - std::floor(t / week) * week;
    for (auto const & s : segs) {
        if (in_week < static_cast<double>(s.end)) {
            return s.weight / mean;
        }
    }
    return segs.back().weight / mean;
}

double WeeklyProfile::cumulative(double t) const {
    auto const segs = week_segments(*this);
    double const week = static_cast<double>(week_ticks());
    double const mean = raw_week_integral(segs) / week;
    double const weeks = std::floor(t / week);
    double const in_week = t - weeks * week;
    double acc = weeks * week;  // normalized integral of a whole week equals its length
    for (auto const & s : segs) {
        double const b = static_cast<double>(s.begin);
        double const e = std::min(static_cast<double>(s.end), in_week);
        if (e <= b) {
            break;
        }
        acc += (e - b) * s.weight / mean;
    }
    return acc;
}

double WeeklyProfile::inverse_cumulative(double target) const {
    auto const segs = week_segments(*this);
    double const week = static_cast<double>(week_ticks());
    double const mean = raw_week_integral(segs) / week;
    double const weeks = std::floor(target / week);
    double remaining = target - weeks * week;
    double t = weeks * week;
    for (auto const & s : segs) {
        double const len = static_cast<double>(s.end - s.begin);
        double const mass = len * s.weight / mean;
        if (remaining <= mass && mass > 0.0) {
            return t + remaining / (s.weight / mean);
        }
        remaining -= mass;
        t += len;
    }
    return t;
}

// ---------------------------------------------------------------- config

void GenConfig::validate() const {
    if (n_jobs < 1) {
        throw ConfigError("generator.n_jobs", "must be >= 1");
    }
    if (tasks_min < 1 || tasks_min > tasks_max) {
        throw ConfigError("generator.tasks_per_job", "need 1 <= min <= max");
    }
    if (!(exec_lo >= 1.0) || exec_lo > exec_hi) {
        throw ConfigError("generator.exec", "need 1 <= lo <= hi");
    }
    if (cores_lo < 1 || cores_lo > cores_hi) {
        throw ConfigError("generator.cores", "need 1 <= lo <= hi");
    }
    if (kind_mix.empty()) {
        throw ConfigError("generator.kind_mix", "must not be empty");
    }
    double total = 0.0;
    for (auto const & [kind, p] : kind_mix) {
        if (!(p >= 0.0)) {
            throw ConfigError("generator.kind_mix", "probabilities must be >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("generator.kind_mix", "probabilities must sum to 1");
    }
    if (!(degree_lambda > 0.0)) {
        throw ConfigError("generator.degree_lambda", "must be > 0");
    }
    if (!(d_initial_lo > 1.0) || d_initial_lo > d_initial_hi) {
        throw ConfigError("generator.d_initial", "need 1 < lo <= hi");
    }
    if (!(d_final_lo > d_initial_hi) || d_final_lo > d_final_hi) {
        throw ConfigError("generator.d_final", "need d_initial.hi < lo <= hi");
    }
    if (points_min < 0 || points_min > points_max) {
        throw ConfigError("generator.points", "need 0 <= min <= max");
    }
    if (!(load > 0.0)) {
        throw ConfigError("generator.load", "must be > 0");
    }
    if (!(unit_price > 0.0)) {
        throw ConfigError("generator.unit_price", "must be > 0");
    }
    profile.validate();
}

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

// ---------------------------------------------------------------- generation

namespace {

double uniform(std::mt19937_64 & rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Tick log_uniform_int(std::mt19937_64 & rng, double lo, double hi) {
    return static_cast<Tick>(std::llround(std::exp(uniform(rng, std::log(lo), std::log(hi)))));
}

Kind draw_kind(GenConfig const & cfg, std::mt19937_64 & rng) {
    double u = uniform(rng, 0.0, 1.0);
    for (auto const & [kind, p] : cfg.kind_mix) {
        if (u < p) {
            return kind;
        }
        u -= p;
    }
    return cfg.kind_mix.back().first;
}

int core_cap(GenConfig const & cfg, Kind kind, std::span<ClusterSpec const> platform) {
    int cap = cfg.cores_hi;
    for (auto const & c : platform) {
        if (c.kind == kind) {
            cap = std::min(cap, c.cores);
        }
    }
    return cap;
}

}  // namespace

JobSpec gen_job(GenConfig const & cfg, std::mt19937_64 & rng, std::span<ClusterSpec const> platform) {
    int const n = std::uniform_int_distribution<int>(cfg.tasks_min, cfg.tasks_max)(rng);
    JobSpec job;
    job.tasks.reserve(n);
    std::exponential_distribution<double> extra_degree(cfg.degree_lambda);
    std::vector<TaskId> pool;
    for (int k = 0; k < n; ++k) {
        TaskSpec t;
        t.id = static_cast<TaskId>(k);
        t.exec = std::max<Tick>(1, log_uniform_int(rng, cfg.exec_lo, cfg.exec_hi));
        t.kind = draw_kind(cfg, rng);
        int const cap = std::max(1, core_cap(cfg, t.kind, platform));
        t.cores = static_cast<int>(std::clamp<Tick>(
            log_uniform_int(rng, cfg.cores_lo, cfg.cores_hi), std::min(cfg.cores_lo, cap), cap));
        if (k > 0) {
            // at least one earlier predecessor keeps the DAG weakly connected
            auto const extra = static_cast<long>(std::llround(extra_degree(rng)));
            auto const degree = static_cast<std::size_t>(std::min<long>(1 + extra, k));
            pool.resize(k);
            std::iota(pool.begin(), pool.end(), TaskId{0});
            for (std::size_t i = 0; i < degree; ++i) {
                auto const j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
                std::swap(pool[i], pool[j]);
            }
            t.deps.assign(pool.begin(), pool.begin() + static_cast<long>(degree));
            std::sort(t.deps.begin(), t.deps.end());
        }
        job.tasks.push_back(std::move(t));
    }
    job.curve = gen_curve(cfg, rng);
    job.vmax = assign_vmax(job, cfg.unit_price);
    return job;
}

ValueCurve gen_curve(GenConfig const & cfg, std::mt19937_64 & rng) {
    double const d_initial = uniform(rng, cfg.d_initial_lo, cfg.d_initial_hi);
    double const d_final = uniform(rng, cfg.d_final_lo, cfg.d_final_hi);
    int const k = std::uniform_int_distribution<int>(cfg.points_min, cfg.points_max)(rng);

    std::vector<double> slrs;
    std::vector<double> factors;
    for (int i = 0; i < k; ++i) {
        double s = uniform(rng, d_initial, d_final);
        while (s <= d_initial) {
            s = uniform(rng, d_initial, d_final);
        }
        slrs.push_back(s);
        factors.push_back(uniform(rng, 0.0, 1.0));
    }
    std::sort(slrs.begin(), slrs.end());
    slrs.erase(std::unique(slrs.begin(), slrs.end()), slrs.end());
    std::sort(factors.begin(), factors.end(), std::greater<>());
    factors.resize(slrs.size());

    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < slrs.size(); ++i) {
        pts.push_back({slrs[i], factors[i]});
    }
    return ValueCurve(d_initial, d_final, std::move(pts));
}

double total_work(JobSpec const & job) {
    double w = 0.0;
    for (auto const & t : job.tasks) {
        w += static_cast<double>(t.exec) * t.cores;
    }
    return w;
}

double assign_vmax(JobSpec const & job, double unit_price) {
    return total_work(job) * unit_price;
}

std::vector<Tick> gen_arrivals(
    WeeklyProfile const & profile, std::span<double const> work, int capacity, double load, std::mt19937_64 & rng) {
    if (!(load > 0.0)) {
        throw ConfigError("load", "must be > 0");
    }
    if (capacity < 1) {
        throw ConfigError("platform", "capacity must be >= 1 core");
    }
    profile.validate();
    double const total = std::accumulate(work.begin(), work.end(), 0.0);
    double const span = total / (static_cast<double>(capacity) * load);
    double const mass = profile.cumulative(span);

    std::vector<Tick> ticks;
    ticks.reserve(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        double const u = uniform(rng, 0.0, 1.0);
        double const t = std::min(profile.inverse_cumulative(u * mass), span);
        ticks.push_back(static_cast<Tick>(std::floor(t)));
    }
    std::sort(ticks.begin(), ticks.end());
    return ticks;
}

namespace {

std::vector<double> works_of(std::span<JobSpec const> jobs) {
    std::vector<double> w;
    w.reserve(jobs.size());
    for (auto const & j : jobs) {
        w.push_back(total_work(j));
    }
    return w;
}

int capacity_of(std::span<ClusterSpec const> platform) {
    int c = 0;
    for (auto const & s : platform) {
        c += s.cores;
    }
    return c;
}

}  // namespace

Workload generate_workload(GenConfig const & cfg, std::span<ClusterSpec const> platform) {
    cfg.validate();
    Workload w{cfg, {}};
    auto rng = make_rng(cfg.seed, Stream::jobs);
    w.jobs.reserve(cfg.n_jobs);
    for (std::size_t i = 0; i < cfg.n_jobs; ++i) {
        w.jobs.push_back(gen_job(cfg, rng, platform));
        w.jobs.back().id = i;
    }
    w.jobs = with_load(w, platform, cfg.load);
    return w;
}

std::vector<JobSpec> with_load(Workload const & w, std::span<ClusterSpec const> platform, double load) {
    auto rng = make_rng(w.config.seed, Stream::arrivals);
    auto const work = works_of(w.jobs);
    auto const ticks = gen_arrivals(w.config.profile, work, capacity_of(platform), load, rng);
    std::vector<JobSpec> jobs = w.jobs;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        jobs[i].arrive = ticks[i];
    }
    return jobs;
}

// ---------------------------------------------------------------- json

namespace {

template <typename T>
void read(json const & j, char const * key, T & out, std::string const & prefix) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (json::exception const & e) {
        throw ConfigError(prefix + key, std::string("wrong type (") + e.what() + ")");
    }
}

void read_range(json const & j, char const * key, double & lo, double & hi, std::string const & prefix) {
    if (!j.contains(key)) {
        return;
    }
    auto const & r = j.at(key);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw ConfigError(prefix + key, "expected [lo, hi]");
    }
    lo = r[0].get<double>();
    hi = r[1].get<double>();
}

void read_range(json const & j, char const * key, int & lo, int & hi, std::string const & prefix) {
    double a = lo;
    double b = hi;
    read_range(j, key, a, b, prefix);
    if (a != std::floor(a) || b != std::floor(b)) {
        throw ConfigError(prefix + key, "expected integer bounds");
    }
    lo = static_cast<int>(a);
    hi = static_cast<int>(b);
}

}  // namespace

ordered_json to_json(GenConfig const & cfg) {
    ordered_json kinds = ordered_json::array();
    for (auto const & [kind, p] : cfg.kind_mix) {
        kinds.push_back({{"kind", kind.id}, {"p", p}});
    }
    ordered_json profile = {
        {"flat", cfg.profile.flat},
        {"day_ticks", cfg.profile.day_ticks},
        {"work_start", cfg.profile.work_start},
        {"work_end", cfg.profile.work_end},
        {"work_weight", cfg.profile.work_weight},
        {"night_weight", cfg.profile.night_weight},
        {"weekend_weight", cfg.profile.weekend_weight},
        {"weekdays", cfg.profile.weekdays},
        {"days_per_week", cfg.profile.days_per_week},
    };
    return {
        {"n_jobs", cfg.n_jobs},
        {"tasks_per_job", {cfg.tasks_min, cfg.tasks_max}},
        {"exec", {cfg.exec_lo, cfg.exec_hi}},
        {"cores", {cfg.cores_lo, cfg.cores_hi}},
        {"kind_mix", kinds},
        {"degree_lambda", cfg.degree_lambda},
        {"d_initial", {cfg.d_initial_lo, cfg.d_initial_hi}},
        {"d_final", {cfg.d_final_lo, cfg.d_final_hi}},
        {"points", {cfg.points_min, cfg.points_max}},
        {"load", cfg.load},
        {"profile", profile},
        {"unit_price", cfg.unit_price},
        {"seed", cfg.seed},
    };
}

GenConfig gen_config_from_json(json const & j) {
    std::string const p = "generator.";
    if (!j.is_object()) {
        throw ConfigError("generator", "expected an object");
    }
    GenConfig cfg;
    read(j, "n_jobs", cfg.n_jobs, p);
    read_range(j, "tasks_per_job", cfg.tasks_min, cfg.tasks_max, p);
    read_range(j, "exec", cfg.exec_lo, cfg.exec_hi, p);
    read_range(j, "cores", cfg.cores_lo, cfg.cores_hi, p);
    if (j.contains("kind_mix")) {
        auto const & km = j.at("kind_mix");
        if (!km.is_array()) {
            throw ConfigError(p + "kind_mix", "expected an array of {kind, p}");
        }
        cfg.kind_mix.clear();
        for (auto const & e : km) {
            int kind = 0;
            double prob = 0.0;
            read(e, "kind", kind, p + "kind_mix.");
            read(e, "p", prob, p + "kind_mix.");
            cfg.kind_mix.emplace_back(Kind{kind}, prob);
        }
    }
    read(j, "degree_lambda", cfg.degree_lambda, p);
    read_range(j, "d_initial", cfg.d_initial_lo, cfg.d_initial_hi, p);
    read_range(j, "d_final", cfg.d_final_lo, cfg.d_final_hi, p);
    read_range(j, "points", cfg.points_min, cfg.points_max, p);
    read(j, "load", cfg.load, p);
    read(j, "unit_price", cfg.unit_price, p);
    read(j, "seed", cfg.seed, p);
    if (j.contains("profile")) {
        auto const & pj = j.at("profile");
        std::string const pp = p + "profile.";
        auto & pr = cfg.profile;
        read(pj, "flat", pr.flat, pp);
        read(pj, "day_ticks", pr.day_ticks, pp);
        read(pj, "work_start", pr.work_start, pp);
        read(pj, "work_end", pr.work_end, pp);
        read(pj, "work_weight", pr.work_weight, pp);
        read(pj, "night_weight", pr.night_weight, pp);
        read(pj, "weekend_weight", pr.weekend_weight, pp);
        read(pj, "weekdays", pr.weekdays, pp);
        read(pj, "days_per_week", pr.days_per_week, pp);
    }
    cfg.validate();
    return cfg;
}

ordered_json to_json(ValueCurve const & c) {
    ordered_json pts = ordered_json::array();
    for (auto const & p : c.interior()) {
        pts.push_back({p.slr, p.factor});
    }
    return {{"d_initial", c.d_initial()}, {"d_final", c.d_final()}, {"points", pts}};
}

ValueCurve curve_from_json(json const & j) {
    std::vector<CurvePoint> pts;
    for (auto const & p : j.at("points")) {
        pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return ValueCurve(j.at("d_initial").get<double>(), j.at("d_final").get<double>(), std::move(pts));
}

ordered_json to_json(Workload const & w) {
    ordered_json jobs = ordered_json::array();
    for (auto const & job : w.jobs) {
        ordered_json tasks = ordered_json::array();
        for (auto const & t : job.tasks) {
            tasks.push_back(
                {{"id", t.id}, {"exec", t.exec}, {"cores", t.cores}, {"kind", t.kind.id}, {"deps", t.deps}});
        }
        jobs.push_back({{"id", job.id}, {"arrive", job.arrive}, {"vmax", job.vmax}, {"curve", to_json(job.curve)},
            {"tasks", tasks}});
    }
    return {{"format", "mbsched-workload/1"}, {"seed", w.config.seed}, {"config", to_json(w.config)},
        {"jobs", jobs}};
}

Workload workload_from_json(json const & j) {
    Workload w;
    try {
        w.config = gen_config_from_json(j.at("config"));
        for (auto const & jj : j.at("jobs")) {
            JobSpec job;
            job.id = jj.at("id").get<JobId>();
            job.arrive = jj.at("arrive").get<Tick>();
            job.vmax = jj.at("vmax").get<double>();
            job.curve = curve_from_json(jj.at("curve"));
            for (auto const & tj : jj.at("tasks")) {
                TaskSpec t;
                t.id = tj.at("id").get<TaskId>();
                t.exec = tj.at("exec").get<Tick>();
                t.cores = tj.at("cores").get<int>();
                t.kind = Kind{tj.at("kind").get<int>()};
                t.deps = tj.at("deps").get<std::vector<TaskId>>();
                job.tasks.push_back(std::move(t));
            }
            w.jobs.push_back(std::move(job));
        }
    } catch (json::exception const & e) {
        throw ConfigError("workload", e.what());
    } catch (std::invalid_argument const & e) {
        throw ConfigError("workload.curve", e.what());
    }
    return w;
}

std::string dump_workload(Workload const & w) {
    return to_json(w).dump(1) + "\n";
}

Workload load_workload_file(std::string const & path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("workload", "cannot open " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (json::exception const & e) {
        throw ConfigError("workload", path + ": " + e.what());
    }
    return workload_from_json(j);
}

}  // namespace mbs
