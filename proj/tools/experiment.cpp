#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "gincorr/asymptotics.hpp"
#include "gincorr/ginue_exact.hpp"

namespace gincorr::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key '" + key + "' in '" + where + "'");
        }
    }
}

std::complex<double> parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError("config: '" + where + "' must be a number or [re, im]");
}

ordered_json complex_to_json(std::complex<double> z) {
    return ordered_json::array({z.real(), z.imag()});
}

template <typename T>
T get_number(const json& obj, const std::string& key, const std::string& where, T fallback,
             bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError("config: missing key '" + key + "' in '" + where + "'");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
    return v.get<T>();
}

std::vector<std::complex<double>> parse_complex_list(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError("config: '" + where + "' must be a nonempty array");
    }
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(parse_complex(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc, "(top level)",
               {"command", "seed", "sigma", "strict", "points", "distribution", "mc", "hciz",
                "output"});
    ExperimentConfig cfg;
    if (!doc.contains("command") || !doc.at("command").is_string()) {
        throw ConfigError("config: missing key 'command'");
    }
    cfg.command = doc.at("command").get<std::string>();
    static const std::set<std::string> commands = {"estimate",       "exact",       "predict",
                                                   "verify-theorem", "hciz-verify", "f1-check"};
    if (!commands.count(cfg.command)) {
        throw ConfigError("config: unknown command '" + cfg.command + "'");
    }

    cfg.seed = get_number<std::uint64_t>(doc, "seed", "(top level)", 1);
    cfg.sigma = get_number<double>(doc, "sigma", "(top level)", 4.0);
    if (doc.contains("strict")) {
        if (!doc.at("strict").is_boolean()) throw ConfigError("config: 'strict' must be a boolean");
        cfg.strict = doc.at("strict").get<bool>();
    }

    if (doc.contains("points")) {
        const json& p = doc.at("points");
        check_keys(p, "points", {"z0", "zetas", "n"});
        if (p.contains("z0")) cfg.z0 = parse_complex(p.at("z0"), "points.z0");
        if (p.contains("zetas")) cfg.zetas = parse_complex_list(p.at("zetas"), "points.zetas");
        if (p.contains("n")) {
            const json& nv = p.at("n");
            if (nv.is_number()) {
                cfg.n_values = {nv.get<int>()};
            } else if (nv.is_array() && !nv.empty()) {
                for (const auto& e : nv) {
                    if (!e.is_number()) throw ConfigError("config: 'points.n' entries must be numbers");
                    cfg.n_values.push_back(e.get<int>());
                }
            } else {
                throw ConfigError("config: 'points.n' must be a number or a nonempty array");
            }
        }
    }
    if (cfg.zetas.empty()) cfg.zetas = {{0.0, 0.0}};
    if (cfg.n_values.empty() && cfg.command != "hciz-verify") {
        throw ConfigError("config: missing key 'points.n'");
    }

    if (doc.contains("distribution")) {
        const json& d = doc.at("distribution");
        check_keys(d, "distribution", {"kind", "q"});
        if (!d.contains("kind") || !d.at("kind").is_string()) {
            throw ConfigError("config: 'distribution.kind' must be a string");
        }
        std::string kind = d.at("kind").get<std::string>();
        if (kind == "radial-two-point") {
            double q = get_number<double>(d, "q", "distribution", 1.0, true);
            try {
                cfg.distribution = EntryDistribution::radial_two_point(q);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        } else {
            auto parsed = EntryDistribution::from_label(kind);
            if (!parsed) throw ConfigError("config: unknown distribution kind '" + kind + "'");
            if (d.contains("q") && parsed->kind != EntryKind::RadialTwoPoint) {
                throw ConfigError("config: 'distribution.q' only applies to radial-two-point");
            }
            cfg.distribution = *parsed;
        }
    }

    if (doc.contains("mc")) {
        const json& m = doc.at("mc");
        check_keys(m, "mc", {"samples", "chunk_size", "workers"});
        cfg.samples = get_number<std::int64_t>(m, "samples", "mc", cfg.samples);
        cfg.chunk_size = get_number<std::int64_t>(m, "chunk_size", "mc", cfg.chunk_size);
        cfg.workers = get_number<int>(m, "workers", "mc", cfg.workers);
    }

    if (doc.contains("hciz")) {
        const json& h = doc.at("hciz");
        check_keys(h, "hciz", {"a_eigs", "b_eigs", "z", "samples"});
        if (h.contains("a_eigs")) cfg.hciz.a_eigs = parse_complex_list(h.at("a_eigs"), "hciz.a_eigs");
        if (h.contains("b_eigs")) cfg.hciz.b_eigs = parse_complex_list(h.at("b_eigs"), "hciz.b_eigs");
        if (h.contains("z")) cfg.hciz.zscale = parse_complex(h.at("z"), "hciz.z");
        cfg.hciz_samples = get_number<std::int64_t>(h, "samples", "hciz", cfg.hciz_samples);
        if (cfg.hciz.a_eigs.size() != cfg.hciz.b_eigs.size() || cfg.hciz.a_eigs.empty()) {
            throw ConfigError("config: 'hciz.a_eigs' and 'hciz.b_eigs' must be nonempty and equal-sized");
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o.at("path").is_string()) throw ConfigError("config: 'output.path' must be a string");
            cfg.output.path = o.at("path").get<std::string>();
        }
        if (o.contains("format")) {
            if (!o.at("format").is_string()) throw ConfigError("config: 'output.format' must be a string");
            cfg.output.format = o.at("format").get<std::string>();
            if (cfg.output.format != "json" && cfg.output.format != "csv") {
                throw ConfigError("config: 'output.format' must be \"json\" or \"csv\"");
            }
        }
    }
    return cfg;
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["sigma"] = sigma;
    j["strict"] = strict;
    ordered_json pts;
    pts["z0"] = complex_to_json(z0);
    ordered_json zs = ordered_json::array();
    for (const auto& zt : zetas) zs.push_back(complex_to_json(zt));
    pts["zetas"] = zs;
    if (n_values.size() == 1) {
        pts["n"] = n_values[0];
    } else {
        pts["n"] = n_values;
    }
    j["points"] = pts;
    ordered_json dist;
    if (distribution.kind == EntryKind::RadialTwoPoint) {
        dist["kind"] = "radial-two-point";
        dist["q"] = distribution.q;
    } else {
        dist["kind"] = distribution.label();
    }
    j["distribution"] = dist;
    j["mc"] = ordered_json{{"samples", samples}, {"chunk_size", chunk_size}, {"workers", workers}};
    if (command == "hciz-verify") {
        ordered_json h;
        ordered_json ae = ordered_json::array(), be = ordered_json::array();
        for (const auto& a : hciz.a_eigs) ae.push_back(complex_to_json(a));
        for (const auto& b : hciz.b_eigs) be.push_back(complex_to_json(b));
        h["a_eigs"] = ae;
        h["b_eigs"] = be;
        h["z"] = complex_to_json(hciz.zscale);
        h["samples"] = hciz_samples;
        j["hciz"] = h;
    }
    j["output"] = ordered_json{{"path", output.path}, {"format", output.format}};
    return j;
}

namespace {

MCConfig make_mc_config(const ExperimentConfig& cfg, int n) {
    MCConfig mc;
    mc.n = n;
    mc.samples = cfg.samples;
    mc.chunk_size = cfg.chunk_size;
    mc.seed = cfg.seed;
    mc.dist = cfg.distribution;
    mc.points = cfg.point_config(n);
    mc.workers = cfg.workers;
    return mc;
}

void collect_mc_flags(const MCEstimate& est, ResultRow& row) {
    if (est.degenerate) row.flags.push_back("degenerate-estimate");
    if (est.tail.variance_unreliable) row.flags.push_back("variance-unreliable");
}

bool zetas_distinct(const std::vector<std::complex<double>>& zetas) {
    double mx = 0.0;
    for (const auto& zt : zetas) mx = std::max(mx, std::abs(zt));
    double delta = 1e-6 * (1.0 + mx);
    for (std::size_t j = 0; j < zetas.size(); ++j) {
        for (std::size_t k = j + 1; k < zetas.size(); ++k) {
            if (std::abs(zetas[j] - zetas[k]) < delta) return false;
        }
    }
    return true;
}

struct CommandOutput {
    std::vector<ResultRow> rows;
    bool comparison_failed = false;
};

CommandOutput run_estimate(const ExperimentConfig& cfg) {
    CommandOutput out;
    for (int n : cfg.n_values) {
        MCEstimate est = estimate_Fm(make_mc_config(cfg, n));
        ResultRow row;
        row.name = "estimate_Fm";
        row.n = n;
        row.log_value = est.log_mean.log();
        row.stderr_log = est.stderr_log;
        row.has_stderr = true;
        if (cfg.distribution.kind == EntryKind::ComplexGaussian) {
            row.prediction_log = ginue_Fm_scaled(cfg.point_config(n)).log();
            row.has_prediction = true;
            if (est.stderr_log > 0.0) {
                row.z_score = std::abs(row.log_value - row.prediction_log) / est.stderr_log;
                row.has_z = true;
            }
        }
        collect_mc_flags(est, row);
        out.rows.push_back(row);
    }
    return out;
}

CommandOutput run_exact(const ExperimentConfig& cfg) {
    CommandOutput out;
    const int m = static_cast<int>(cfg.zetas.size());
    for (int n : cfg.n_values) {
        ResultRow fm;
        fm.name = "ginue_Fm_scaled";
        fm.n = n;
        fm.log_value = ginue_Fm_scaled(cfg.point_config(n)).log();
        out.rows.push_back(fm);
        if (m >= 2 && zetas_distinct(cfg.zetas)) {
            ResultRow ratio;
            ratio.name = "ginue_theorem_ratio_exact";
            ratio.n = n;
            ratio.log_value = ginue_theorem_ratio_exact(cfg.point_config(n)).log();
            ratio.prediction_log =
                theorem1_prediction(cfg.zetas, cfg.z0, cumulant_22(cfg.distribution)).log_value;
            ratio.has_prediction = true;
            out.rows.push_back(ratio);
        }
    }
    return out;
}

CommandOutput run_predict(const ExperimentConfig& cfg) {
    CommandOutput out;
    const int m = static_cast<int>(cfg.zetas.size());
    double kappa = cumulant_22(cfg.distribution);
    for (int n : cfg.n_values) {
        if (zetas_distinct(cfg.zetas)) {
            ResultRow t1;
            t1.name = "theorem1_prediction";
            t1.n = n;
            t1.log_value = theorem1_prediction(cfg.zetas, cfg.z0, kappa).log_value;
            out.rows.push_back(t1);
        }
        ResultRow mom;
        mom.name = "moment_prediction";
        mom.n = n;
        mom.log_value = moment_prediction(m, cfg.z0, n, kappa).log();
        out.rows.push_back(mom);
        ResultRow ww;
        ww.name = "webb_wong_gamma_2m";
        ww.n = n;
        ww.log_value = webb_wong_prediction(2.0 * m, cfg.z0, n).log();
        out.rows.push_back(ww);
    }
    return out;
}

CommandOutput run_verify_theorem(const ExperimentConfig& cfg) {
    CommandOutput out;
    double kappa = cumulant_22(cfg.distribution);
    double pred = theorem1_prediction(cfg.zetas, cfg.z0, kappa).log_value;
    for (int n : cfg.n_values) {
        MCEstimate est = estimate_theorem_ratio(make_mc_config(cfg, n));
        ResultRow row;
        row.name = "mc_ratio_vs_prediction";
        row.n = n;
        row.log_value = est.log_mean.log();
        row.stderr_log = est.stderr_log;
        row.has_stderr = true;
        row.prediction_log = pred;
        row.has_prediction = true;
        if (est.stderr_log > 0.0 && std::isfinite(row.log_value)) {
            row.z_score = std::abs(row.log_value - pred) / est.stderr_log;
            row.has_z = true;
            if (row.z_score > cfg.sigma) out.comparison_failed = true;
        } else {
            out.comparison_failed = true;
        }
        collect_mc_flags(est, row);
        out.rows.push_back(row);

        if (cfg.distribution.kind == EntryKind::ComplexGaussian) {
            ResultRow ex;
            ex.name = "mc_ratio_vs_exact";
            ex.n = n;
            ex.log_value = est.log_mean.log();
            ex.stderr_log = est.stderr_log;
            ex.has_stderr = true;
            ex.prediction_log = ginue_theorem_ratio_exact(cfg.point_config(n)).log();
            ex.has_prediction = true;
            if (est.stderr_log > 0.0 && std::isfinite(ex.log_value)) {
                ex.z_score = std::abs(ex.log_value - ex.prediction_log) / est.stderr_log;
                ex.has_z = true;
                if (ex.z_score > cfg.sigma) out.comparison_failed = true;
            }
            out.rows.push_back(ex);
        }
    }
    return out;
}

CommandOutput run_hciz_verify(const ExperimentConfig& cfg) {
    CommandOutput out;
    std::complex<double> closed = hciz_closed_form(cfg.hciz);
    ResultRow cf;
    cf.name = "hciz_closed_form";
    cf.n = cfg.hciz.d();
    cf.log_value = std::log(std::abs(closed));
    out.rows.push_back(cf);

    HcizMcResult mc = hciz_mc(cfg.hciz, cfg.hciz_samples, cfg.seed);
    ResultRow row;
    row.name = "hciz_mc";
    row.n = cfg.hciz.d();
    row.log_value = std::log(std::abs(mc.mean));
    row.stderr_log = std::hypot(mc.stderr_re, mc.stderr_im) / std::max(1e-300, std::abs(mc.mean));
    row.has_stderr = true;
    row.prediction_log = cf.log_value;
    row.has_prediction = true;
    row.z_score = mc.z_score(closed);
    row.has_z = true;
    if (row.z_score > cfg.sigma) out.comparison_failed = true;
    out.rows.push_back(row);
    return out;
}

CommandOutput run_f1_check(const ExperimentConfig& cfg) {
    CommandOutput out;
    for (int n : cfg.n_values) {
        ResultRow row;
        row.name = "f1_quadrature_vs_asymptote";
        row.n = n;
        row.log_value = f1_quadrature(cfg.z0, n).log();
        row.prediction_log = f1_asymptote(cfg.z0, n).log();
        row.has_prediction = true;
        out.rows.push_back(row);
        if (std::abs(cfg.z0) < 1.0 && n <= 256) {
            ResultRow cross;
            cross.name = "f1_quadrature_vs_exact_series";
            cross.n = n;
            cross.log_value = row.log_value;
            cross.prediction_log = ginue_Fm_scaled(PointConfig{cfg.z0, {{0.0, 0.0}}, n}).log();
            cross.has_prediction = true;
            if (std::abs(std::exp(cross.log_value - cross.prediction_log) - 1.0) > 1e-8) {
                cross.flags.push_back("f1-cross-check-failed");
            }
            out.rows.push_back(cross);
        }
    }
    return out;
}

ordered_json row_to_json(const ResultRow& row) {
    ordered_json j;
    j["name"] = row.name;
    j["n"] = row.n;
    j["log_value"] = row.log_value;
    if (std::abs(row.log_value) < 700.0) j["value"] = std::exp(row.log_value);
    if (row.has_stderr) j["stderr"] = row.stderr_log;
    if (row.has_prediction) j["prediction_log"] = row.prediction_log;
    if (row.has_z) j["z_score"] = row.z_score;
    if (!row.flags.empty()) j["flags"] = row.flags;
    return j;
}

std::string render_csv(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "n,m,z0_re,z0_im,kappa22,estimate_log,stderr_log,prediction_log,z_score\n";
    double kappa = cumulant_22(cfg.distribution);
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : rows) {
        os << row.n << "," << cfg.zetas.size() << "," << num(cfg.z0.real()) << ","
           << num(cfg.z0.imag()) << "," << num(kappa) << "," << num(row.log_value) << ",";
        if (row.has_stderr) os << num(row.stderr_log);
        os << ",";
        if (row.has_prediction) os << num(row.prediction_log);
        os << ",";
        if (row.has_z) os << num(row.z_score);
        os << "\n";
    }
    return os.str();
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunOutcome run(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    CommandOutput cmd;
    try {
        if (cfg.command == "estimate") {
            cmd = run_estimate(cfg);
        } else if (cfg.command == "exact") {
            cmd = run_exact(cfg);
        } else if (cfg.command == "predict") {
            cmd = run_predict(cfg);
        } else if (cfg.command == "verify-theorem") {
            cmd = run_verify_theorem(cfg);
        } else if (cfg.command == "hciz-verify") {
            cmd = run_hciz_verify(cfg);
        } else if (cfg.command == "f1-check") {
            cmd = run_f1_check(cfg);
        } else {
            throw ConfigError("config: unknown command '" + cfg.command + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunOutcome out;
    out.rows = cmd.rows;
    for (const auto& row : cmd.rows) {
        for (const auto& f : row.flags) out.flags.push_back(row.name + ": " + f);
    }

    ordered_json report;
    report["command"] = cfg.command;
    report["config"] = cfg.to_json();
    report["seed"] = cfg.seed;
    ordered_json results = ordered_json::array();
    for (const auto& row : cmd.rows) results.push_back(row_to_json(row));
    report["results"] = results;
    report["flags"] = out.flags;
    report["wall_time_s"] = wall;
    report["timestamp"] = utc_timestamp();
    out.report = report;

    if (cfg.output.format == "csv") out.csv = render_csv(cfg, cmd.rows);

    out.exit_code = 0;
    if (cmd.comparison_failed) out.exit_code = 1;
    if (cfg.strict && !out.flags.empty()) out.exit_code = 1;
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"correlation functions of characteristic polynomials of i.i.d. non-Hermitian "
                 "random matrices: Monte Carlo, exact finite-n formulas, and asymptotics"};
    std::string config_path;
    std::string out_path;
    std::uint64_t seed_override = 0;
    int threads_override = -1;
    bool have_seed = false;
    bool strict = false;
    app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
    auto* seed_opt = app.add_option("--seed", seed_override, "override the master seed");
    app.add_option("--threads", threads_override, "worker threads (0 = hardware default)");
    app.add_flag("--strict", strict, "nonzero exit when any numerical flag is raised");
    app.add_option("--out", out_path, "report destination (overrides output.path)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    have_seed = seed_opt->count() > 0;

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config '" << config_path << "'\n";
            return 2;
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return 2;
        }
        ExperimentConfig cfg = parse_config(doc);
        if (have_seed) cfg.seed = seed_override;
        if (threads_override >= 0) cfg.workers = threads_override;
        if (strict) cfg.strict = true;
        if (!out_path.empty()) cfg.output.path = out_path;

        RunOutcome outcome = run(cfg);
        std::string body =
            cfg.output.format == "csv" ? outcome.csv : outcome.report.dump(2) + "\n";
        if (cfg.output.path.empty()) {
            std::cout << body;
        } else {
            std::ofstream of(cfg.output.path);
            if (!of) {
                std::cerr << "error: cannot write report to '" << cfg.output.path << "'\n";
                return 2;
            }
            of << body;
        }
        for (const auto& f : outcome.flags) std::cerr << "flag: " << f << "\n";
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gincorr::cli
