// ringpol command-line driver: named experiments in, CSV/JSON series and a
// replayable JSON manifest out. See README.md for the config schema.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringpol/analytic.hpp"
#include "ringpol/engine.hpp"
#include "ringpol/fitting.hpp"
#include "ringpol/io.hpp"
#include "ringpol/presets.hpp"
#include "ringpol/tomography.hpp"

namespace {

using namespace ringpol;

// exit codes promised to scripts
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<int> quad_order;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "KEY=VALUE config file, or a manifest JSON to replay");
    cmd->add_option("--preset", f.preset, "builtin preset name (see `presets list`)");
    cmd->add_option("--seed", f.seed, "RNG seed override");
    cmd->add_option("--samples", f.samples, "Monte Carlo sample count (switches method to mc)");
    cmd->add_option("--quad-order", f.quad_order, "Gauss-Hermite order (switches method to quad)");
    cmd->add_option("--out", f.out_dir, "output directory (created if missing)");
    cmd->add_option("--format", f.format, "series output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

const std::vector<std::string> kBaseKeys = {
    "name",    "figure",  "layout",     "theta",          "phi0",   "sigma_phi",
    "inputs",  "n_max",   "method",     "quad_order",     "samples", "seed",
    "sphere_average", "thetas", "time_column", "ns_per_trip"};

const std::vector<std::string> kTomoKeys = {"shots", "noise", "estimator", "model", "counts_path"};

const std::vector<std::string> kFitKeys = {"series_path", "mode", "input"};

std::vector<std::string> all_known_keys() {
    std::vector<std::string> keys = kBaseKeys;
    keys.insert(keys.end(), kTomoKeys.begin(), kTomoKeys.end());
    keys.insert(keys.end(), kFitKeys.begin(), kFitKeys.end());
    return keys;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) pos = s.size();
        std::string tok = s.substr(start, pos - start);
        while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
        while (!tok.empty() && tok.back() == ' ') tok.pop_back();
        if (!tok.empty()) out.push_back(tok);
        if (pos == s.size()) break;
        start = pos + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

/// Input tokens are state names (H, V, D, A, R, L, E) or explicit unit Bloch
/// vectors written as x;y;z.
Vec3 input_vector(const std::string& token) {
    if (token.find(';') == std::string::npos) return named_input(token);
    std::vector<std::string> comps;
    std::size_t start = 0;
    while (start <= token.size()) {
        std::size_t pos = token.find(';', start);
        if (pos == std::string::npos) pos = token.size();
        comps.push_back(token.substr(start, pos - start));
        if (pos == token.size()) break;
        start = pos + 1;
    }
    if (comps.size() != 3)
        throw std::invalid_argument("explicit input needs three ';'-separated components");
    Vec3 v{parse_double(comps[0]), parse_double(comps[1]), parse_double(comps[2])};
    double n = v.norm();
    if (!(n > 0.0)) throw std::invalid_argument("explicit input must be a non-zero vector");
    return (1.0 / n) * v;
}

std::string input_label(const std::string& token, std::size_t index) {
    if (token.find(';') == std::string::npos) return token;
    return "p" + std::to_string(index);
}

std::uint64_t spec_seed(const ExperimentSpec& spec) {
    if (const auto* mc = std::get_if<MonteCarloMethod>(&spec.method)) return mc->seed;
    return 0;
}

ExperimentSpec spec_from_config(const ConfigMap& cfg) {
    ExperimentSpec spec;
    spec.name = cfg.get("name", "run");
    spec.figure = cfg.get("figure", "");
    spec.cavity.layout = layout_from_name(cfg.get("layout", "zcomp"));
    spec.cavity.theta = NoiseDelay::wrapped(cfg.get_double("theta", 0.0));
    spec.dist.phi0 = cfg.get_double("phi0", kDefaultPhi0);
    spec.dist.sigma_phi = cfg.get_double("sigma_phi", kDefaultSigmaPhi);
    spec.inputs = split_list(cfg.get("inputs", "H,D,R"));
    spec.n_max = int(cfg.get_int("n_max", 25));
    std::string method = cfg.get("method", "quad");
    if (method == "quad") {
        spec.method = QuadratureMethod{int(cfg.get_int("quad_order", 64))};
    } else if (method == "mc") {
        spec.method = MonteCarloMethod{std::uint64_t(cfg.get_int("samples", 100000)),
                                       std::uint64_t(cfg.get_int("seed", 1))};
    } else {
        throw std::invalid_argument("method must be 'quad' or 'mc', got '" + method + "'");
    }
    spec.sphere_average = cfg.get_bool("sphere_average", false);
    for (const std::string& t : split_list(cfg.get("thetas", "")))
        spec.thetas.push_back(parse_double(t));
    spec.time_column = cfg.get_bool("time_column", false);
    spec.ns_per_trip = cfg.get_double("ns_per_trip", kDefaultNsPerTrip);
    return spec;
}

std::map<std::string, std::string> spec_to_config(const ExperimentSpec& spec) {
    std::map<std::string, std::string> m;
    m["name"] = spec.name;
    if (!spec.figure.empty()) m["figure"] = spec.figure;
    m["layout"] = layout_name(spec.cavity.layout);
    m["theta"] = format_double(spec.cavity.theta.theta);
    m["phi0"] = format_double(spec.dist.phi0);
    m["sigma_phi"] = format_double(spec.dist.sigma_phi);
    m["inputs"] = join_list(spec.inputs);
    m["n_max"] = std::to_string(spec.n_max);
    if (const auto* q = std::get_if<QuadratureMethod>(&spec.method)) {
        m["method"] = "quad";
        m["quad_order"] = std::to_string(q->order);
    } else {
        const auto& mc = std::get<MonteCarloMethod>(spec.method);
        m["method"] = "mc";
        m["samples"] = std::to_string(mc.samples);
        m["seed"] = std::to_string(mc.seed);
    }
    m["sphere_average"] = spec.sphere_average ? "true" : "false";
    if (!spec.thetas.empty()) {
        std::vector<std::string> ts;
        for (double t : spec.thetas) ts.push_back(format_double(t));
        m["thetas"] = join_list(ts);
    }
    m["time_column"] = spec.time_column ? "true" : "false";
    m["ns_per_trip"] = format_double(spec.ns_per_trip);
    return m;
}

void apply_flag_overrides(ExperimentSpec& spec, const CommonFlags& f) {
    if (f.quad_order) spec.method = QuadratureMethod{*f.quad_order};
    if (f.samples || f.seed) {
        MonteCarloMethod mc;
        if (const auto* cur = std::get_if<MonteCarloMethod>(&spec.method)) mc = *cur;
        if (f.samples) {
            mc.samples = *f.samples;
            spec.method = mc;  // --samples forces the MC method
        }
        if (f.seed) {
            mc.seed = *f.seed;
            if (std::holds_alternative<MonteCarloMethod>(spec.method)) spec.method = mc;
        }
    }
}

/// Load the run description from --preset / --config (KEY=VALUE or manifest
/// JSON); a manifest also carries the command that produced it.
struct LoadedRun {
    ExperimentSpec spec;
    ConfigMap raw;               // extra keys (tomography) live here
    std::string replay_command;  // non-empty when --config was a manifest
};

LoadedRun load_run(const CommonFlags& f, const std::vector<std::string>& allowed) {
    LoadedRun run;
    if (!f.preset.empty() && !f.config_path.empty())
        throw std::invalid_argument("--preset and --config are mutually exclusive");
    if (!f.preset.empty()) {
        run.spec = find_preset(f.preset);
        ConfigMap echo;
        echo.kv = spec_to_config(run.spec);
        run.raw = echo;
    } else if (!f.config_path.empty()) {
        std::string text = read_file(f.config_path);
        std::size_t first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            // a manifest: its config echo may belong to any command
            RunManifest m = manifest_from_json(text);
            ConfigMap cfg;
            cfg.kv = m.config;
            cfg.ensure_known(all_known_keys());
            run.spec = spec_from_config(cfg);
            run.raw = cfg;
            run.replay_command = m.command;
        } else {
            ConfigMap cfg = ConfigMap::parse(text);
            cfg.ensure_known(allowed);
            run.spec = spec_from_config(cfg);
            run.raw = cfg;
        }
    } else {
        throw std::invalid_argument("give either --preset or --config");
    }
    apply_flag_overrides(run.spec, f);
    run.spec.validate();
    return run;
}

std::vector<std::string> with_tomo_keys() {
    std::vector<std::string> keys = kBaseKeys;
    keys.insert(keys.end(), kTomoKeys.begin(), kTomoKeys.end());
    return keys;
}

struct OutputWriter {
    std::filesystem::path dir;
    std::vector<OutputRecord> written;

    explicit OutputWriter(const std::string& out_dir) : dir(out_dir) {
        std::filesystem::create_directories(dir);
    }
    void emit(const std::string& filename, std::string_view content) {
        write_file((dir / filename).string(), content);
        written.push_back({filename, content.size(), fnv1a64_hex(content)});
    }
};

void finish_manifest(OutputWriter& w, const ExperimentSpec& spec, const std::string& command,
                     const std::map<std::string, std::string>& config,
                     std::chrono::steady_clock::time_point t0) {
    RunManifest m;
    m.command = command;
    m.figure = spec.figure;
    m.config = config;
    m.seed = spec_seed(spec);
    m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    m.outputs = w.written;
    write_file((w.dir / (spec.name + ".manifest.json")).string(), manifest_to_json(m));
    std::cout << "wrote " << w.written.size() << " output file(s) and " << spec.name
              << ".manifest.json to " << w.dir.string() << "\n";
}

std::string series_filename(const ExperimentSpec& spec, const std::string& label,
                            const std::string& format) {
    return spec.name + "-" + label + (format == "json" ? ".json" : ".csv");
}

void emit_series(OutputWriter& w, const ExperimentSpec& spec, const std::string& label,
                 const EvolutionResult& ev, const std::string& format) {
    std::string text = format == "json" ? decay_json(ev, spec.time_column, spec.ns_per_trip)
                                        : decay_csv(ev, spec.time_column, spec.ns_per_trip);
    w.emit(series_filename(spec, label, format), text);
}

int run_simulate(const CommonFlags& f, const ExperimentSpec& spec,
                 const std::map<std::string, std::string>& config) {
    if (!spec.thetas.empty())
        throw std::invalid_argument("this run defines a theta sweep; use the sweep-theta command");
    auto t0 = std::chrono::steady_clock::now();
    OutputWriter w(f.out_dir);
    if (spec.sphere_average) {
        EvolutionResult ev =
            sphere_averaged_evolution(spec.cavity, spec.dist, spec.method, spec.n_max);
        emit_series(w, spec, "avg", ev, f.format);
    } else {
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            EvolutionResult ev = evolve(spec.cavity, spec.dist, spec.method,
                                        input_vector(spec.inputs[i]), spec.n_max);
            emit_series(w, spec, input_label(spec.inputs[i], i), ev, f.format);
        }
    }
    finish_manifest(w, spec, "simulate", config, t0);
    return kExitOk;
}

int run_sweep_theta(const CommonFlags& f, const ExperimentSpec& spec,
                    const std::map<std::string, std::string>& config) {
    if (spec.thetas.empty())
        throw std::invalid_argument("sweep-theta needs a non-empty 'thetas' list");
    if (!is_generic(spec.cavity.layout))
        throw std::invalid_argument("theta sweeps apply to the generic layouts only");
    auto t0 = std::chrono::steady_clock::now();
    OutputWriter w(f.out_dir);

    auto run_one = [&](const Vec3* input) {
        std::vector<EvolutionResult> per_theta;
        for (double th : spec.thetas) {
            CavityConfig cav = spec.cavity;
            cav.theta = NoiseDelay::wrapped(th);
            per_theta.push_back(input ? evolve(cav, spec.dist, spec.method, *input, spec.n_max)
                                      : sphere_averaged_evolution(cav, spec.dist, spec.method,
                                                                  spec.n_max));
        }
        return per_theta;
    };
    auto emit_sweep = [&](const std::string& label, const std::vector<EvolutionResult>& series) {
        if (f.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& ev : series) {
                nlohmann::json one = nlohmann::json::parse(
                    decay_json(ev, spec.time_column, spec.ns_per_trip));
                j.push_back(one);
            }
            w.emit(series_filename(spec, label, f.format), j.dump(2) + "\n");
        } else {
            std::string all;
            for (std::size_t i = 0; i < series.size(); ++i) {
                std::string csv = decay_csv(series[i], spec.time_column, spec.ns_per_trip);
                if (i == 0) {
                    all = csv;
                } else {
                    all += csv.substr(csv.find('\n') + 1);  // drop the repeated header
                }
            }
            w.emit(series_filename(spec, label, f.format), all);
        }
    };

    if (spec.sphere_average) {
        emit_sweep("avg", run_one(nullptr));
    } else {
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            Vec3 v = input_vector(spec.inputs[i]);
            emit_sweep(input_label(spec.inputs[i], i), run_one(&v));
        }
    }
    finish_manifest(w, spec, "sweep-theta", config, t0);
    return kExitOk;
}

int run_tomography(const CommonFlags& f, LoadedRun& run, std::string counts_path,
                   std::string estimator, std::string model) {
    // resolve settings: explicit flags win over config keys
    if (counts_path.empty()) counts_path = run.raw.get("counts_path", "");
    if (estimator.empty()) estimator = run.raw.get("estimator", "mle");
    if (model.empty()) model = run.raw.get("model", "poisson");
    if (estimator != "mle" && estimator != "linear")
        throw std::invalid_argument("estimator must be 'mle' or 'linear'");
    if (model != "poisson" && model != "gaussian")
        throw std::invalid_argument("model must be 'poisson' or 'gaussian'");

    auto t0 = std::chrono::steady_clock::now();
    OutputWriter w(f.out_dir);
    ExperimentSpec& spec = run.spec;
    std::map<std::string, std::string> config = spec_to_config(spec);
    config["estimator"] = estimator;
    config["model"] = model;

    std::vector<CountRecord> rows;
    if (!counts_path.empty()) {
        rows = parse_counts_csv(read_file(counts_path));
        config["counts_path"] = counts_path;
    } else {
        // synthesize counts from the configured evolution
        double shots = run.raw.get_double("shots", 10000.0);
        std::string noise_name = run.raw.get("noise", "poisson");
        CountNoise noise;
        if (noise_name == "none") noise = CountNoise::None;
        else if (noise_name == "poisson") noise = CountNoise::Poisson;
        else throw std::invalid_argument("noise must be 'none' or 'poisson'");
        config["shots"] = format_double(shots);
        config["noise"] = noise_name;

        if (spec.inputs.empty()) throw std::invalid_argument("tomography needs one input state");
        Vec3 input = input_vector(spec.inputs[0]);
        std::uint64_t seed = f.seed ? *f.seed : std::uint64_t(run.raw.get_int("seed", 1));
        config["seed"] = std::to_string(seed);
        std::mt19937_64 rng(seed);

        EvolutionResult ev = evolve(spec.cavity, spec.dist, spec.method, input, spec.n_max);
        rows.push_back({0, simulate_counts(input, shots, noise, rng)});
        for (const auto& rec : ev.records)
            rows.push_back({rec.n, simulate_counts(rec.bloch, shots, noise, rng)});
        w.emit(spec.name + "-counts.csv", counts_csv(rows));
    }

    std::vector<ReconRecord> recon;
    recon.reserve(rows.size());
    for (const auto& row : rows) {
        ReconRecord r;
        r.n_trip = row.n_trip;
        if (estimator == "linear") {
            r.bloch = linear_inversion(row.counts);
        } else {
            MleOptions opt;
            opt.model = model == "poisson" ? LikelihoodModel::Poisson : LikelihoodModel::Gaussian;
            r.bloch = mle_reconstruct(row.counts, opt).bloch;
        }
        r.purity = 0.5 * (1.0 + r.bloch.dot(r.bloch));
        recon.push_back(r);
    }
    std::string text = f.format == "json" ? recon_json(recon, estimator) : recon_csv(recon, estimator);
    w.emit(spec.name + "-reconstructed" + (f.format == "json" ? std::string(".json") : std::string(".csv")),
           text);
    finish_manifest(w, spec, "tomography", config, t0);
    return kExitOk;
}

int run_fit(const CommonFlags& f, const std::string& series_path, const std::string& mode,
            const std::string& input_name) {
    if (series_path.empty()) throw std::invalid_argument("fit needs --series PATH");
    if (mode != "sigma" && mode != "full")
        throw std::invalid_argument("fit mode must be 'sigma' or 'full'");
    ParsedDecaySeries series = parse_decay_csv(read_file(series_path));

    auto t0 = std::chrono::steady_clock::now();
    OutputWriter w(f.out_dir);
    std::string report;
    report += "series: " + std::filesystem::path(series_path).filename().string() + "\n";
    report += "layout: " + series.layout + "\n";
    report += "records: " + std::to_string(series.records.size()) + "\n";
    report += "mode: " + mode + "\n";
    if (mode == "sigma") {
        SigmaFit fit = fit_sigma_phi(series.records);
        report += "points_used: " + std::to_string(fit.points_used) + "\n";
        report += "sigma_phi: " + format_double(fit.sigma_phi) + "\n";
        report += "rss: " + format_double(fit.rss) + "\n";
    } else {
        CavityConfig cav;
        cav.layout = layout_from_name(series.layout);
        if (is_generic(cav.layout)) cav.theta = NoiseDelay::wrapped(series.theta);
        int order = f.quad_order ? *f.quad_order : 64;
        FullFit fit = fit_full(cav, input_vector(input_name), series.records, order);
        report += "input: " + input_name + "\n";
        report += "phi0: " + format_double(fit.phi0) + " +/- " + format_double(fit.phi0_err) + "\n";
        report += "sigma_phi: " + format_double(fit.sigma_phi) + " +/- " +
                  format_double(fit.sigma_phi_err) + "\n";
        report += "rss: " + format_double(fit.rss) + "\n";
        report += "model_evaluations: " + std::to_string(fit.evaluations) + "\n";
    }
    w.emit("fit-report.txt", report);
    std::cout << report;

    ExperimentSpec pseudo;  // manifest plumbing only
    pseudo.name = "fit";
    std::map<std::string, std::string> config{{"name", "fit"},
                                              {"series_path", series_path},
                                              {"mode", mode},
                                              {"input", input_name}};
    finish_manifest(w, pseudo, "fit", config, t0);
    return kExitOk;
}

int run_analytic(const CommonFlags& f, const ExperimentSpec& spec,
                 const std::map<std::string, std::string>& config) {
    if (spec.inputs.empty()) throw std::invalid_argument("analytic needs one input state");
    auto t0 = std::chrono::steady_clock::now();
    OutputWriter w(f.out_dir);
    Vec3 input = input_vector(spec.inputs[0]);
    std::string label = input_label(spec.inputs[0], 0);

    ExpansionCoeffs coeffs = expansion_coeffs(spec.cavity, spec.dist.phi0);
    std::vector<AnalyticRecord> rows;
    rows.reserve(std::size_t(spec.n_max));
    for (int n = 1; n <= spec.n_max; ++n)
        rows.push_back(analytic_step(coeffs, spec.dist.sigma_phi, n));
    w.emit(spec.name + "-analytic" + (f.format == "json" ? std::string(".json") : std::string(".csv")),
           f.format == "json" ? analytic_json(rows, input) : analytic_csv(rows, input));

    // numeric series over the same n range for overlay
    EvolutionResult ev = evolve(spec.cavity, spec.dist, spec.method, input, spec.n_max);
    emit_series(w, spec, label, ev, f.format);
    finish_manifest(w, spec, "analytic", config, t0);
    return kExitOk;
}

int run_presets_list() {
    for (const auto& p : builtin_presets()) {
        std::cout << p.name << "  layout=" << layout_name(p.cavity.layout);
        if (is_generic(p.cavity.layout))
            std::cout << " theta=" << format_double(p.cavity.theta.theta);
        if (p.sphere_average) {
            std::cout << "  sphere-averaged";
        } else {
            std::cout << "  inputs=" << join_list(p.inputs);
        }
        if (!p.thetas.empty()) {
            std::vector<std::string> ts;
            for (double t : p.thetas) ts.push_back(format_double(t));
            std::cout << " thetas=" << join_list(ts);
        }
        std::cout << "  n_max=" << p.n_max << "  dataset=" << p.figure << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ring-cavity polarization-qubit decoherence toolkit"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    auto* sim = app.add_subcommand("simulate", "evolve input states and write decay series");
    add_common_flags(sim, sim_flags);

    CommonFlags sweep_flags;
    std::string sweep_thetas;
    auto* sweep = app.add_subcommand("sweep-theta", "repeat a run over a list of delay phases");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--thetas", sweep_thetas, "comma-separated delay phases (rad), overrides config");

    CommonFlags tomo_flags;
    std::string tomo_counts, tomo_estimator, tomo_model;
    auto* tomo = app.add_subcommand("tomography",
                                    "reconstruct states from six-projector counts "
                                    "(from --counts, or synthesized from a config)");
    add_common_flags(tomo, tomo_flags);
    tomo->add_option("--counts", tomo_counts, "counts CSV to reconstruct (n_trip,H,V,D,A,R,L)");
    tomo->add_option("--estimator", tomo_estimator, "mle or linear")
        ->check(CLI::IsMember({"mle", "linear"}));
    tomo->add_option("--model", tomo_model, "mle cost model: poisson or gaussian")
        ->check(CLI::IsMember({"poisson", "gaussian"}));

    CommonFlags fit_flags;
    std::string fit_series, fit_mode = "full", fit_input = "D";
    auto* fit = app.add_subcommand("fit", "recover (phi0, sigma_phi) from a decay series CSV");
    add_common_flags(fit, fit_flags);
    fit->add_option("--series", fit_series, "decay series CSV to fit")->required();
    fit->add_option("--mode", fit_mode, "sigma (purity only) or full (Stokes trajectory)")
        ->check(CLI::IsMember({"sigma", "full"}));
    fit->add_option("--input", fit_input, "input state the series was recorded with");

    CommonFlags an_flags;
    auto* an = app.add_subcommand("analytic", "closed-form prediction table plus numeric overlay");
    add_common_flags(an, an_flags);

    auto* presets = app.add_subcommand("presets", "builtin experiment presets");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "list available presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    // configuration phase: errors here are usage errors (exit 2)
    std::string command;
    try {
        if (app.got_subcommand(presets)) return run_presets_list();

        if (app.got_subcommand(sim) || app.got_subcommand(sweep) || app.got_subcommand(an)) {
            CommonFlags& f = app.got_subcommand(sim)    ? sim_flags
                             : app.got_subcommand(sweep) ? sweep_flags
                                                         : an_flags;
            LoadedRun run = load_run(f, kBaseKeys);
            command = app.got_subcommand(sim)    ? "simulate"
                      : app.got_subcommand(sweep) ? "sweep-theta"
                                                  : "analytic";
            if (!run.replay_command.empty() && command == "simulate")
                command = run.replay_command;  // replaying a manifest re-runs its own command
            if (command == "sweep-theta" && !sweep_thetas.empty()) {
                run.spec.thetas.clear();
                for (const std::string& t : split_list(sweep_thetas))
                    run.spec.thetas.push_back(parse_double(t));
            }
            std::map<std::string, std::string> config = spec_to_config(run.spec);
            try {
                if (command == "sweep-theta") return run_sweep_theta(f, run.spec, config);
                if (command == "analytic") return run_analytic(f, run.spec, config);
                if (command == "tomography") return run_tomography(f, run, "", "", "");
                if (command == "fit")
                    return run_fit(f, run.raw.get("series_path", ""), run.raw.get("mode", "full"),
                                   run.raw.get("input", "D"));
                return run_simulate(f, run.spec, config);
            } catch (const std::invalid_argument& e) {
                // invalid combinations surfaced while running are still usage errors
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }

        if (app.got_subcommand(tomo)) {
            LoadedRun run;
            if (!tomo_flags.preset.empty() || !tomo_flags.config_path.empty()) {
                run = load_run(tomo_flags, with_tomo_keys());
            } else if (!tomo_counts.empty()) {
                run.spec.name = "tomography";  // counts provided; evolution spec unused
            } else {
                throw std::invalid_argument("tomography needs --counts, --preset or --config");
            }
            try {
                return run_tomography(tomo_flags, run, tomo_counts, tomo_estimator, tomo_model);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }

        if (app.got_subcommand(fit)) {
            try {
                return run_fit(fit_flags, fit_series, fit_mode, fit_input);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }

        throw std::invalid_argument("no subcommand selected");
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
