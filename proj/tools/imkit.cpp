// imkit command-line driver. Exit codes: 0 success, 2 configuration error,
// 3 numeric or fitting failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imkit/imkit.hpp"

using json = nlohmann::json;
using namespace imkit;
using namespace imkit::models;

namespace {

constexpr std::uint64_t kDefaultSeed = 20210601;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 1;
    std::optional<std::size_t> mc_reps;
    std::string demo;
};

/// Effective configuration: the file's JSON with command-line overrides applied.
struct Run {
    json cfg;
    std::filesystem::path base_dir;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t hash = 0;
    unsigned threads = 1;
    std::string out;
};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

template <class T>
T need(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
    return j.at(key).get<T>();
}

json read_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j = json::parse(f);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    return j;
}

Run make_run(const Flags& fl, json cfg) {
    Run r;
    if (fl.seed) cfg["seed"] = *fl.seed;
    if (fl.mc_reps) cfg["mc_reps"] = *fl.mc_reps;
    r.seed = get<std::uint64_t>(cfg, "seed", kDefaultSeed);
    r.cfg = std::move(cfg);
    r.hash = fnv1a(r.cfg.dump());
    r.threads = std::max(1u, fl.threads);
    r.out = fl.out;
    r.base_dir = fl.config.empty() ? std::filesystem::path(".") : std::filesystem::path(fl.config).parent_path();
    return r;
}

McConfig mc_of(const Run& r, std::size_t fallback) {
    McConfig mc{get<std::size_t>(r.cfg, "mc_reps", fallback), r.seed};
    mc.validate();
    return mc;
}

/// "data": [..] inline, or "data_file": one observation per line, '#' comments.
Sample load_data(const Run& r) {
    if (r.cfg.contains("data")) return r.cfg.at("data").get<Sample>();
    if (!r.cfg.contains("data_file")) throw ConfigError("one of 'data' or 'data_file' is required");
    std::filesystem::path p = r.cfg.at("data_file").get<std::string>();
    if (p.is_relative()) p = r.base_dir / p;
    std::ifstream f(p);
    if (!f) throw ConfigError("cannot open data file: " + p.string());
    Sample x;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) x.push_back(v);
        else if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw ConfigError("data file: cannot parse line '" + line + "'");
    }
    if (x.empty()) throw ConfigError("data file is empty: " + p.string());
    return x;
}

SplitSpec split_of(const Run& r, std::size_t n) {
    const std::string kind = get<std::string>(r.cfg, "split", "first_half");
    if (kind == "first_half") return SplitSpec::first_half(n);
    if (kind == "random") return SplitSpec::random(n, get<std::uint64_t>(r.cfg, "split_seed", r.seed));
    throw ConfigError("split must be 'first_half' or 'random'");
}

std::vector<double> grid_of(const Run& r, double lo, double hi, std::size_t points) {
    if (r.cfg.contains("grid")) {
        const json& g = r.cfg.at("grid");
        check_keys(g, {"lo", "hi", "points"}, "grid");
        lo = get<double>(g, "lo", lo);
        hi = get<double>(g, "hi", hi);
        points = get<std::size_t>(g, "points", points);
    }
    if (points < 2 || !(hi > lo)) throw ConfigError("grid needs hi > lo and at least two points");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1.0);
    return out;
}

void emit(const Run& r, const CsvTable& t) {
    const std::string head = provenance_comment(r.hash, r.seed);
    if (r.out.empty()) t.write(std::cout, head);
    else t.save(r.out, head);
}

void emit_json(const Run& r, json j, const std::string& path) {
    j["config_hash"] = hex64(r.hash);
    j["seed"] = r.seed;
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// contour

const std::set<std::string> kCommon{"model", "seed", "mc_reps", "grid"};

std::set<std::string> with_common(std::set<std::string> s, const std::set<std::string>& common = kCommon) {
    s.insert(common.begin(), common.end());
    return s;
}

void cmd_contour(const Run& r) {
    const std::string model = need<std::string>(r.cfg, "model");
    if (model == "binomial") {
        check_keys(r.cfg, with_common({"n", "x"}), "contour binomial");
        const BinomialSetup s{need<int>(r.cfg, "n"), need<int>(r.cfg, "x")};
        const Contour im = binomial_im_contour(s), cp = binomial_cp_contour(s);
        CsvTable t({"theta", "im", "clopper_pearson"});
        for (double th : grid_of(r, 0.0, 1.0, 1001)) t.add_row(std::vector<double>{th, im(th), cp(th)});
        emit(r, t);
    } else if (model == "behrens-fisher") {
        check_keys(r.cfg, with_common({"n1", "m1", "v1", "n2", "m2", "v2", "lambda_points"}), "contour behrens-fisher");
        BehrensFisherSetup s{need<int>(r.cfg, "n1"), need<double>(r.cfg, "m1"), need<double>(r.cfg, "v1"),
                             need<int>(r.cfg, "n2"), need<double>(r.cfg, "m2"), need<double>(r.cfg, "v2")};
        s.lambda_grid = BehrensFisherSetup::default_lambda_grid(get<std::size_t>(r.cfg, "lambda_points", 41));
        s.validate();
        const BehrensFisherIm im = bf_im(s, mc_of(r, 10000));
        const Contour hs = bf_hs_contour(s);
        CsvTable t({"phi", "hsu_scheffe", "im_marginal", "im_stderr"});
        for (double phi : grid_of(r, s.d() - 4.0 * s.f(), s.d() + 4.0 * s.f(), 201)) {
            const McEstimate e = im.marginal_value(phi);
            t.add_row(std::vector<double>{phi, hs(phi), e.value, e.std_error});
        }
        emit(r, t);
    } else if (model == "fieller-creasy") {
        check_keys(r.cfg, with_common({"x1", "x2"}), "contour fieller-creasy");
        const NormalMeans2DSetup s{need<double>(r.cfg, "x1"), need<double>(r.cfg, "x2")};
        const NormalMeans2DContours cs = nm2d_contours(s);
        const double c = s.x2 != 0.0 ? s.x1 / s.x2 : 0.0;
        CsvTable t({"phi", "naive", "strategic"});
        for (double phi : grid_of(r, c - 10.0, c + 10.0, 401))
            t.add_row(std::vector<double>{phi, cs.fc_naive(phi), cs.fc_strategic(phi)});
        emit(r, t);
    } else if (model == "slr-normal") {
        check_keys(r.cfg, with_common({"data", "data_file", "split", "split_seed"}), "contour slr-normal");
        const Sample x = load_data(r);
        const SlrNormalIm im = slr_normal_im(x, split_of(r, x.size()), mc_of(r, 10000));
        const Domain d = im.domain();
        CsvTable t({"theta", "im", "split_lr"});
        for (double th : grid_of(r, d.boxes[0].lo[0], d.boxes[0].hi[0], 401))
            t.add_row(std::vector<double>{th, im.plausibility(th).value, im.index(th)});
        emit(r, t);
    } else {
        throw ConfigError("contour: unknown model '" + model + "'");
    }
}

// ---------------------------------------------------------------------------
// test

void cmd_test(const Run& r) {
    const std::string test = need<std::string>(r.cfg, "test");
    const std::set<std::string> common{"test", "data", "data_file", "alpha", "split", "split_seed", "plugin",
                                       "seed", "mc_reps"};
    const double alpha = get<double>(r.cfg, "alpha", 0.05);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    json j;
    j["test"] = test;
    j["alpha"] = alpha;
    if (test == "mixture") {
        check_keys(r.cfg, with_common({"variance", "restarts"}, common), "test mixture");
        MixtureOptions o;
        o.variance = mixture_variance_from_string(get<std::string>(r.cfg, "variance", "common"));
        o.restarts = get<int>(r.cfg, "restarts", o.restarts);
        const Sample x = load_data(r);
        if (x.size() < 4) throw ConfigError("mixture test: need at least four observations");
        const MixtureTestResult t =
            mixture_test(x, split_of(r, x.size()), alpha, mc_of(r, 1000), get<bool>(r.cfg, "plugin", false), o);
        j["n"] = x.size();
        j["slr"] = {{"reject", t.slr.reject}, {"p_value", t.slr.p_value}, {"log_ratio", t.slr.log_ratio}};
        j["im"] = {{"reject", t.reject},
                   {"plausibility", t.plausibility},
                   {"std_error", t.std_error},
                   {"alpha_index", t.alpha_at_argmax},
                   {"null_mean", t.argmax[0]},
                   {"null_sd", t.argmax[1]},
                   {"plugin", t.plugin}};
    } else if (test == "monotonicity") {
        check_keys(r.cfg, common, "test monotonicity");
        const Sample x = load_data(r);
        check_monotone_input(x);
        const MonotoneTestResult t =
            monotonicity_test(x, split_of(r, x.size()), alpha, mc_of(r, 1000), get<bool>(r.cfg, "plugin", true));
        j["n"] = x.size();
        j["slr"] = {{"reject", t.slr.reject}, {"p_value", t.slr.p_value}, {"log_ratio", t.slr.log_ratio}};
        j["im"] = {{"reject", t.reject},
                   {"plausibility", t.plausibility},
                   {"std_error", t.std_error},
                   {"alpha_index", t.alpha_index},
                   {"candidate", t.candidate},
                   {"inner_reps", t.inner_reps},
                   {"plugin", t.plugin}};
    } else {
        throw ConfigError("test: unknown test '" + test + "'");
    }
    emit_json(r, j, r.out);
}

// ---------------------------------------------------------------------------
// validate

ValidityScenario scenario_of(const Run& r, const McConfig& inner) {
    const std::string model = need<std::string>(r.cfg, "model");
    const std::set<std::string> common{"model", "seed", "mc_reps", "inner_reps", "alphas"};
    if (model == "binomial") {
        check_keys(r.cfg, with_common({"n", "theta"}, common), "validate binomial");
        return binomial_validity_scenario(need<int>(r.cfg, "n"), need<double>(r.cfg, "theta"));
    }
    if (model == "normal-mean") {
        check_keys(r.cfg, with_common({"n", "theta"}, common), "validate normal-mean");
        return normal_mean_validity_scenario(need<int>(r.cfg, "n"), need<double>(r.cfg, "theta"), inner);
    }
    if (model == "behrens-fisher") {
        check_keys(r.cfg, with_common({"n1", "n2", "phi", "var1", "var2"}, common), "validate behrens-fisher");
        return behrens_fisher_validity_scenario(need<int>(r.cfg, "n1"), need<int>(r.cfg, "n2"),
                                                need<double>(r.cfg, "phi"), need<double>(r.cfg, "var1"),
                                                need<double>(r.cfg, "var2"), inner);
    }
    if (model == "dkw") {
        check_keys(r.cfg, with_common({"n", "family", "mean", "sd", "rate"}, common), "validate dkw");
        const std::string fam = get<std::string>(r.cfg, "family", "normal");
        DistributionHandle F;
        if (fam == "normal") F = normal_distribution_handle(get<double>(r.cfg, "mean", 0.0), get<double>(r.cfg, "sd", 1.0));
        else if (fam == "exponential") F = exponential_distribution_handle(get<double>(r.cfg, "rate", 1.0));
        else throw ConfigError("validate dkw: family must be 'normal' or 'exponential'");
        return dkw_validity_scenario(need<std::size_t>(r.cfg, "n"), F, inner);
    }
    if (model == "slr-normal") {
        check_keys(r.cfg, with_common({"n", "theta"}, common), "validate slr-normal");
        return slr_normal_validity_scenario(need<std::size_t>(r.cfg, "n"), need<double>(r.cfg, "theta"), inner);
    }
    throw ConfigError("validate: unknown model '" + model + "'");
}

void cmd_validate(const Run& r) {
    McConfig inner{get<std::size_t>(r.cfg, "inner_reps", 1000), r.seed ^ 0x1a11};
    inner.validate();
    const ValidityScenario s = scenario_of(r, inner);
    const std::vector<double> alphas = get<std::vector<double>>(r.cfg, "alphas", default_validity_grid());
    CurveMeta meta = curve_meta(s.model, s.theta, "{theta}");
    meta.note = "inner Monte Carlo size " + std::to_string(inner.n_rep);
    const ValidityCurve c = validity_curve(s.draw, mc_of(r, 2000), meta, alphas, r.threads);
    const DominanceReport d = dominance_check(c);
    CsvTable t({"alpha", "g", "stderr", "ok"});
    for (const auto& row : d.rows)
        t.add_row(std::vector<double>{row.alpha, row.g, row.std_error, row.ok ? 1.0 : 0.0});
    emit(r, t);
    json j{{"model", s.model}, {"theta", s.theta},       {"verdict", to_string(d.verdict)},
           {"pass", d.pass},   {"max_excess", d.max_excess}, {"n_rep", c.meta.n_rep},
           {"inner_reps", inner.n_rep}};
    emit_json(r, j, "");
}

// ---------------------------------------------------------------------------
// power

PowerCurve run_power(const Run& r, const std::string& test, std::size_t n, double alpha,
                     const std::vector<double>& grid, std::size_t n_rep, std::size_t inner_reps, bool plugin) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (grid.empty()) throw ConfigError("power: grid must be nonempty");
    const McConfig outer{n_rep, r.seed};
    const McConfig inner{inner_reps, r.seed ^ 0x9e37};
    inner.validate();
    const std::pair<std::size_t, std::size_t> dom{0, 1};
    if (test == "mixture") {
        auto im = std::make_shared<const MixtureIm>(n, SplitSpec::first_half(n), MixtureOptions{}, inner);
        PowerTrial trial{{"slr", "im"}, [im, alpha, plugin](const Sample& x) {
                             const MixtureTestResult t = im->test(x, alpha, plugin);
                             return std::vector<bool>{t.slr.reject, t.reject};
                         }};
        return power_curve(
            trial, grid, [n](double mu, RngStream& rng) { return sample_symmetric_mixture(n, mu, rng); }, outer,
            r.threads, dom);
    }
    if (test == "monotonicity") {
        if (n < 4) throw ConfigError("monotonicity test: need at least four observations");
        for (double xi : grid)
            if (!(xi > 0.0)) throw ConfigError("monotonicity power: gamma shapes must be positive");
        const SplitSpec split = SplitSpec::first_half(n);
        PowerTrial trial{{"slr", "im"}, [split, alpha, inner, plugin](const Sample& x) {
                             const MonotoneTestResult t = monotonicity_test(x, split, alpha, inner, plugin);
                             return std::vector<bool>{t.slr.reject, t.reject};
                         }};
        return power_curve(
            trial, grid, [n](double xi, RngStream& rng) { return sample_gamma(n, xi, rng); }, outer, r.threads, dom);
    }
    throw ConfigError("power: unknown test '" + test + "'");
}

void emit_power(const Run& r, const PowerCurve& pc) {
    CsvTable t({"param", "slr_power", "slr_stderr", "im_power", "im_stderr", "slr_only_rejections"});
    for (std::size_t k = 0; k < pc.param_grid.size(); ++k)
        t.add_row(std::vector<double>{pc.param_grid[k], pc.power[0][k], pc.std_errors[0][k], pc.power[1][k],
                                      pc.std_errors[1][k], static_cast<double>(pc.violations[k])});
    emit(r, t);
}

void cmd_power(const Run& r) {
    check_keys(r.cfg, {"test", "n", "alpha", "grid", "seed", "mc_reps", "inner_reps", "plugin"}, "power");
    const std::string test = need<std::string>(r.cfg, "test");
    const PowerCurve pc = run_power(r, test, need<std::size_t>(r.cfg, "n"), get<double>(r.cfg, "alpha", 0.05),
                                    need<std::vector<double>>(r.cfg, "grid"), get<std::size_t>(r.cfg, "mc_reps", 200),
                                    get<std::size_t>(r.cfg, "inner_reps", 1000),
                                    get<bool>(r.cfg, "plugin", test == "monotonicity"));
    emit_power(r, pc);
}

// ---------------------------------------------------------------------------
// demo

void cmd_demo(const Flags& fl, json cfg) {
    check_keys(cfg, {"seed", "mc_reps", "inner_reps", "cd_draws"}, "demo");
    cfg["demo"] = fl.demo;
    const Run r = make_run(fl, std::move(cfg));
    if (fl.demo == "false-confidence-abs" || fl.demo == "false-confidence-fc") {
        FalseConfidenceOptions o;
        o.n_rep = get<std::size_t>(r.cfg, "mc_reps", 2000);
        o.seed = r.seed;
        o.cd_draws = get<std::size_t>(r.cfg, "cd_draws", 4000);
        o.threads = r.threads;
        const FalseConfidenceReport rep = false_confidence_demo(fl.demo, o);
        CsvTable t({"alpha", "cd_g", "cd_stderr", "im_g", "im_stderr"});
        for (std::size_t i = 0; i < rep.cd_curve.alphas.size(); ++i)
            t.add_row(std::vector<double>{rep.cd_curve.alphas[i], rep.cd_curve.g_values[i],
                                          rep.cd_curve.std_errors[i], rep.im_curve.g_values[i],
                                          rep.im_curve.std_errors[i]});
        emit(r, t);
        emit_json(r,
                  {{"demo", fl.demo},
                   {"cd_verdict", to_string(rep.cd_dominance.verdict)},
                   {"im_verdict", to_string(rep.im_dominance.verdict)},
                   {"cd_max_excess", rep.cd_dominance.max_excess},
                   {"cd_mean_false_assertion", rep.cd_false_mean}},
                  "");
    } else if (fl.demo == "mixture-power") {
        emit_power(r, run_power(r, "mixture", 100, 0.05, {0.0, 0.5, 1.0, 1.5, 2.0},
                                get<std::size_t>(r.cfg, "mc_reps", 200), get<std::size_t>(r.cfg, "inner_reps", 1000),
                                false));
    } else if (fl.demo == "monotone-power") {
        emit_power(r, run_power(r, "monotonicity", 300, 0.05, {1.0, 2.0, 3.0, 4.0},
                                get<std::size_t>(r.cfg, "mc_reps", 100), get<std::size_t>(r.cfg, "inner_reps", 500),
                                true));
    } else {
        throw ConfigError("unknown demo '" + fl.demo + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imkit: valid inferential models from confidence procedures"};
    app.require_subcommand(1);
    Flags fl;
    auto add_flags = [&fl](CLI::App* c, bool config_required) {
        auto* opt = c->add_option("--config", fl.config, "JSON configuration file");
        if (config_required) opt->required();
        c->add_option("--seed", fl.seed, "override the configured seed");
        c->add_option("--out", fl.out, "output path (stdout when omitted)");
        c->add_option("--threads", fl.threads, "worker threads")->check(CLI::PositiveNumber);
        c->add_option("--mc-reps", fl.mc_reps, "override the Monte Carlo size")->check(CLI::PositiveNumber);
    };
    auto* contour = app.add_subcommand("contour", "plausibility contours as a table");
    auto* test = app.add_subcommand("test", "IM and split-LR tests on a data set");
    auto* validate = app.add_subcommand("validate", "validity curve and dominance verdict");
    auto* power = app.add_subcommand("power", "power curves with matched seeds");
    auto* demo = app.add_subcommand("demo", "shipped demonstrations");
    for (auto* c : {contour, test, validate, power}) add_flags(c, true);
    add_flags(demo, false);
    demo->add_option("name", fl.demo, "false-confidence-abs | false-confidence-fc | mixture-power | monotone-power")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json cfg = read_config(fl.config);
        if (demo->parsed()) {
            cmd_demo(fl, std::move(cfg));
        } else {
            const Run r = make_run(fl, std::move(cfg));
            if (contour->parsed()) cmd_contour(r);
            else if (test->parsed()) cmd_test(r);
            else if (validate->parsed()) cmd_validate(r);
            else cmd_power(r);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const StructuralError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
