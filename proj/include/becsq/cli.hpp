#pragma once

// Command implementations behind the becsq executable: run configuration,
// key-value config files, CSV serialization and the four subcommands.
//
// Exit codes: 0 success, 1 bad configuration, 2 truncation insufficient,
// 3 invariant violated during a run, 4 unresolved verdicts (verify only).

#include "becsq/discrepancy.hpp"
#include "becsq/fock.hpp"
#include "becsq/observables.hpp"
#include "becsq/oracle.hpp"
#include "becsq/propagator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace becsq::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kTruncationInsufficient = 2,
    kInvariantViolation = 3,
    kUnresolved = 4,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;
    SqueezedInput input{1.0, 0.0, {0.0, 0.0}};
    std::optional<int> n_max;        ///< empty: grown from the occupation heuristic
    double tail_threshold = 1e-10;
    double t_max = 2.0 * std::numbers::pi;
    int steps = 200;
    std::vector<Source> sources{Source::literal, Source::moment_map, Source::oracle};
    std::string output_path = "-";
    Tolerances tolerances;
    std::string axis;
    std::vector<double> values;

    void validate() const {
        if (steps < 2) throw ConfigError("steps must be >= 2");
        if (!(t_max > 0.0)) throw ConfigError("t_max must be > 0");
        if (sources.empty()) throw ConfigError("at least one source is required");
        if (!(params.omega_r > 0.0)) throw ConfigError("omega_r must be > 0");
        if (!(input.r >= 0.0)) throw ConfigError("r must be >= 0");
        if (n_max && *n_max < 1) throw ConfigError("n_max must be >= 1");
        if (!(tail_threshold > 0.0)) throw ConfigError("tail_threshold must be > 0");
    }

    bool has_source(Source s) const { return std::find(sources.begin(), sources.end(), s) != sources.end(); }

    /// t_k = k t_max / steps for k = 0..steps-1.
    std::vector<double> time_grid() const {
        std::vector<double> t(static_cast<std::size_t>(steps));
        for (int k = 0; k < steps; ++k) t[static_cast<std::size_t>(k)] = t_max * k / steps;
        return t;
    }

    TailPolicy tail_policy() const {
        TailPolicy p;
        p.tail_threshold = tail_threshold;
        return p;
    }

    /// Scenario at the configured (or grown) cutoff; throws TruncationError.
    ScenarioConfig scenario() const {
        ScenarioConfig s{params, input, Truncation(1), tail_policy()};
        s.truncation = n_max ? Truncation(*n_max) : auto_truncation(input, s.tail_policy);
        (void)input_state(s);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Parsing

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError("invalid number for '" + std::string(key) + "': " + text);
    return v;
}

inline int parse_int(std::string_view key, const std::string& text) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("invalid integer for '" + std::string(key) + "': " + text);
    return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
    return out;
}

inline std::vector<Source> parse_sources(const std::string& text) {
    std::vector<Source> out;
    for (const auto& item : split_list(text)) {
        if (item == "all") return {Source::literal, Source::moment_map, Source::oracle};
        const auto s = parse_source(item);
        if (!s) throw ConfigError("unknown source: " + item);
        if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"r", "phi", "m_re", "m_im", "theta", "omega0", "omega_a", "omega_r"};
    return axes;
}

/// Sets a parameter of `cfg` by name; dashes and underscores are interchangeable.
inline void set_key(RunConfig& cfg, std::string key, const std::string& value) {
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "r") cfg.input.r = parse_double(key, value);
    else if (key == "phi") cfg.input.phi = parse_double(key, value);
    else if (key == "m_re") cfg.input.m.real(parse_double(key, value));
    else if (key == "m_im") cfg.input.m.imag(parse_double(key, value));
    else if (key == "theta") cfg.params.theta = parse_double(key, value);
    else if (key == "omega0") cfg.params.omega0 = parse_double(key, value);
    else if (key == "omega_a") cfg.params.omega_a = parse_double(key, value);
    else if (key == "omega_r") cfg.params.omega_r = parse_double(key, value);
    else if (key == "t_max") cfg.t_max = parse_double(key, value);
    else if (key == "steps") cfg.steps = parse_int(key, value);
    else if (key == "n_max") {
        if (value == "auto") cfg.n_max.reset();
        else cfg.n_max = parse_int(key, value);
    }
    else if (key == "tail_threshold") cfg.tail_threshold = parse_double(key, value);
    else if (key == "sources") cfg.sources = parse_sources(value);
    else if (key == "out") cfg.output_path = value;
    else if (key == "tol_algebraic") cfg.tolerances.algebraic = parse_double(key, value);
    else if (key == "tol_oracle") cfg.tolerances.oracle = parse_double(key, value);
    else if (key == "axis") cfg.axis = value;
    else if (key == "values") cfg.values = parse_double_list(key, value);
    else throw ConfigError("unknown key: " + key);
}

/// `key = value` lines; '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

inline std::string format_field(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

inline constexpr std::string_view kCsvHeader =
    "t,source,na_mean,na_var,nb_mean,nb_var,q_a,q_b,s1a,s2a,s1b,s2b,ntotal,n_max,tail_mass";

inline std::string csv_row(const ObservableRecord& r) {
    std::string s = format_number(r.t);
    s += ',';
    s += to_string(r.source);
    for (const auto& f : {r.na_mean, r.na_var, r.nb_mean, r.nb_var, r.q_a, r.q_b, r.s1a, r.s2a, r.s1b, r.s2b, r.ntotal}) {
        s += ',';
        s += format_field(f);
    }
    s += ',' + std::to_string(r.n_max) + ',' + format_number(r.tail_mass);
    return s;
}

// ---------------------------------------------------------------------------
// Runs

struct SimulationRun {
    std::vector<ObservableRecord> records;   ///< ordered by (time, source)
    std::vector<std::string> violations;
};

namespace detail {

inline void check_record(const ObservableRecord& r, std::vector<std::string>& out) {
    const auto where = [&](const char* what) {
        return std::string(what) + " at t=" + format_number(r.t) + " (" + std::string(to_string(r.source)) + ")";
    };
    constexpr double eps = 1e-9;
    if (r.na_var && *r.na_var < -eps) out.push_back(where("negative na_var"));
    if (r.nb_var && *r.nb_var < -eps) out.push_back(where("negative nb_var"));
    for (const auto& [s1, s2] : {std::pair{r.s1a, r.s2a}, std::pair{r.s1b, r.s2b}}) {
        if (!s1 || !s2) continue;
        if (*s1 < -1.0 - eps || *s2 < -1.0 - eps) out.push_back(where("squeeze coefficient below -1"));
        if ((*s1 + 1.0) * (*s2 + 1.0) < 1.0 - eps) out.push_back(where("uncertainty bound violated"));
    }
}

inline void check_conservation(const std::vector<ObservableRecord>& recs, std::vector<std::string>& out) {
    if (recs.empty() || !recs.front().ntotal) return;
    const double n0 = *recs.front().ntotal;
    for (const auto& r : recs) {
        if (r.ntotal && std::abs(*r.ntotal - n0) > 1e-9 * std::max(1.0, n0)) {
            out.push_back("total number drift at t=" + format_number(r.t) + " (" + std::string(to_string(r.source)) + ")");
            return;
        }
    }
}

}  // namespace detail

/// Evaluates the selected sources on the configured grid.
inline SimulationRun simulate(const ScenarioConfig& sc, const RunConfig& cfg) {
    const auto times = cfg.time_grid();
    std::vector<std::vector<ObservableRecord>> per_source;
    SimulationRun run;
    if (cfg.has_source(Source::literal)) {
        std::vector<ObservableRecord> lit;
        const double tail = input_state(sc).tail_mass();
        for (double t : times) {
            auto rec = literal_record(sc, t);
            rec.tail_mass = tail;
            lit.push_back(rec);
        }
        per_source.push_back(std::move(lit));
    }
    if (cfg.has_source(Source::moment_map)) {
        auto mm = moment_map_records(sc, times);
        detail::check_conservation(mm, run.violations);
        per_source.push_back(std::move(mm));
    }
    if (cfg.has_source(Source::oracle)) {
        auto res = run_oracle(sc, times);
        if (res.norm_drift > 1e-9) run.violations.push_back("oracle norm drift " + format_number(res.norm_drift));
        if (res.ntotal_drift > 1e-9) run.violations.push_back("oracle total-number drift " + format_number(res.ntotal_drift));
        per_source.push_back(std::move(res.records));
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (const auto& src : per_source) {
            detail::check_record(src[k], run.violations);
            run.records.push_back(src[k]);
        }
    }
    return run;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            out_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("cannot open output file: " + path);
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

// ---------------------------------------------------------------------------
// Commands

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        const ScenarioConfig sc = cfg.scenario();
        const auto run = simulate(sc, cfg);
        Output o(cfg.output_path, out);
        o.stream() << kCsvHeader << '\n';
        for (const auto& r : run.records) o.stream() << csv_row(r) << '\n';
        for (const auto& v : run.violations) err << "invariant violation: " << v << '\n';
        return run.violations.empty() ? kOk : kInvariantViolation;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return kTruncationInsufficient;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

inline void write_report(std::ostream& os, const DiscrepancyReport& rep) {
    os << "# formula adjudication: n_max=" << rep.n_max << " tail_mass=" << format_number(rep.tail_mass)
       << " tol_algebraic=" << format_number(rep.tolerances.algebraic)
       << " tol_oracle=" << format_number(rep.tolerances.oracle) << '\n';
    os << "formula,expression,verdict,points,max_literal_rel_dev,max_corrected_rel_dev,printed_form,corrected_form\n";
    const auto quote = [](const std::string& s) { return '"' + s + '"'; };
    for (const auto& f : rep.formulas) {
        const auto corr = f.max_corrected_rel();
        os << quote(f.id) << ',' << quote(f.expression) << ',' << to_string(f.verdict) << ',' << f.points.size() << ','
           << format_number(f.max_literal_rel()) << ',' << (corr ? format_number(*corr) : "NA") << ','
           << quote(f.printed_form) << ',' << quote(f.corrected_form) << '\n';
    }
    os << "\n# points\n";
    os << "formula,expression,t,literal_re,literal_im,corrected_re,corrected_im,moment_map_re,moment_map_im,oracle_re,"
          "oracle_im,abs_dev,rel_dev,corrected_abs_dev\n";
    for (const auto& f : rep.formulas) {
        for (const auto& p : f.points) {
            os << quote(f.id) << ',' << quote(f.expression) << ',' << format_number(p.t) << ','
               << format_number(p.literal.real()) << ',' << format_number(p.literal.imag()) << ','
               << (p.corrected ? format_number(p.corrected->real()) : "NA") << ','
               << (p.corrected ? format_number(p.corrected->imag()) : "NA") << ','
               << format_number(p.moment_map.real()) << ',' << format_number(p.moment_map.imag()) << ','
               << format_number(p.oracle.real()) << ',' << format_number(p.oracle.imag()) << ','
               << format_number(p.literal_dev) << ',' << format_number(p.literal_dev / p.scale) << ','
               << (p.corrected_dev ? format_number(*p.corrected_dev) : "NA") << '\n';
        }
    }
}

inline void write_verdict_summary(std::ostream& os, const DiscrepancyReport& rep) {
    for (const auto& f : rep.formulas) {
        os << std::left << std::setw(10) << f.id << ' ' << std::setw(40) << f.expression << ' ' << std::setw(13)
           << to_string(f.verdict);
        if (f.verdict == Verdict::typo_suspect) os << " corrected: " << f.corrected_form;
        os << '\n';
    }
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        for (Source s : {Source::literal, Source::moment_map, Source::oracle}) {
            if (!cfg.has_source(s)) throw ConfigError("verify needs all three sources; missing " + std::string(to_string(s)));
        }
        const ScenarioConfig sc = cfg.scenario();
        const auto rep = discrepancy_report(sc, cfg.time_grid(), cfg.t_max, cfg.tolerances);
        if (cfg.output_path.empty() || cfg.output_path == "-") {
            write_verdict_summary(out, rep);
            out << '\n';
            write_report(out, rep);
        } else {
            Output o(cfg.output_path, out);
            write_report(o.stream(), rep);
            write_verdict_summary(out, rep);
        }
        return rep.any_unresolved() ? kUnresolved : kOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return kTruncationInsufficient;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

namespace detail {

struct SweepResult {
    double value = 0.0;
    int code = kOk;
    std::string message;
    std::vector<std::string> rows;
};

inline SweepResult sweep_one(RunConfig cfg, const std::string& axis, double value) {
    SweepResult res;
    res.value = value;
    std::ostringstream v;
    v << format_number(value);
    set_key(cfg, axis, v.str());
    std::ostringstream out, err;
    cfg.output_path = "-";
    res.code = cmd_simulate(cfg, out, err);
    res.message = err.str();
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) res.rows.push_back(axis + ',' + format_number(value) + ',' + line);
    return res;
}

}  // namespace detail

inline int cmd_sweep(const RunConfig& base, std::ostream& out, std::ostream& err) {
    try {
        base.validate();
        const auto& axes = sweep_axes();
        std::string axis = base.axis;
        std::replace(axis.begin(), axis.end(), '-', '_');
        if (std::find(axes.begin(), axes.end(), axis) == axes.end()) throw ConfigError("unknown sweep axis: " + base.axis);
        if (base.values.empty()) throw ConfigError("sweep needs --values");

        std::vector<std::future<detail::SweepResult>> jobs;
        for (double v : base.values) jobs.push_back(std::async(std::launch::async, detail::sweep_one, base, axis, v));
        std::vector<detail::SweepResult> results;
        for (auto& j : jobs) results.push_back(j.get());
        std::stable_sort(results.begin(), results.end(),
                         [](const auto& x, const auto& y) { return x.value < y.value; });

        Output o(base.output_path, out);
        o.stream() << "axis,value," << kCsvHeader << '\n';
        int code = kOk;
        for (const auto& r : results) {
            for (const auto& row : r.rows) o.stream() << row << '\n';
            if (!r.message.empty()) err << axis << '=' << format_number(r.value) << ": " << r.message;
            code = std::max(code, r.code);
        }
        return code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

inline int cmd_converge(const RunConfig& cfg, const std::vector<int>& n_max_list, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        if (n_max_list.empty()) throw ConfigError("converge needs a list of n_max values");
        for (std::size_t i = 1; i < n_max_list.size(); ++i)
            if (n_max_list[i] <= n_max_list[i - 1]) throw ConfigError("n_max list must be increasing");
        for (int n : n_max_list)
            if (n < 1) throw ConfigError("n_max values must be >= 1");

        ScenarioConfig sc{cfg.params, cfg.input, Truncation(n_max_list.front()), cfg.tail_policy()};
        const auto table = convergence_sweep(sc, cfg.time_grid(), n_max_list, 1e-8);

        Output o(cfg.output_path, out);
        auto& os = o.stream();
        os << "n_max,insufficient,tail_mass,max_delta," << kCsvHeader << '\n';
        for (const auto& step : table.steps) {
            for (const auto& r : step.records) {
                os << step.n_max << ',' << (step.insufficient ? 1 : 0) << ',' << format_number(step.tail_mass) << ','
                   << (step.max_delta ? format_number(*step.max_delta) : "NA") << ',' << csv_row(r) << '\n';
            }
        }
        for (const auto& step : table.steps) {
            err << "n_max=" << step.n_max << " tail_mass=" << format_number(step.tail_mass)
                << (step.insufficient ? " (insufficient)" : "")
                << " max_delta=" << (step.max_delta ? format_number(*step.max_delta) : "NA") << '\n';
        }
        err << (table.converged ? "converged" : "not converged") << " at n_max=" << table.steps.back().n_max
            << " (tolerance " << format_number(table.tolerance) << ")\n";
        return table.converged ? kOk : kTruncationInsufficient;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace becsq::cli
