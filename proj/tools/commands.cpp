#include "commands.hpp"

#include "run_config.hpp"

#include "opal/error.hpp"
#include "opal/estimator.hpp"
#include "opal/eval.hpp"
#include "opal/io.hpp"
#include "opal/objective.hpp"
#include "opal/patterns.hpp"
#include "opal/suite.hpp"
#include "opal/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace opal::cli {

namespace fs = std::filesystem;

namespace {

void write_json(const nlohmann::json& j, const std::string& path)
{
    if (path.empty())
        return;
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write " + path);
    f << j.dump(2) << "\n";
}

nlohmann::json loss_to_json(const LossBreakdown& loss)
{
    nlohmann::json j;
    for (Direction d : kAllDirections)
        j["opal_per_direction"][std::string(to_string(d))]
            = loss.opal_per_direction[static_cast<std::size_t>(direction_index(d))];
    j["opal_total"] = loss.opal_total;
    j["opal_raw"] = loss.opal_raw;
    j["opal_final"] = loss.opal_final;
    j["smooth"] = loss.smooth;
    j["total"] = loss.total;
    j["constants"] = {{"tau", loss.constants.tau},
                      {"gamma", loss.constants.gamma},
                      {"lambda1", loss.constants.lambda1},
                      {"lambda2", loss.constants.lambda2},
                      {"beta", loss.constants.beta}};
    return j;
}

Image selection_image(const std::vector<SelectionMap>& maps, int patterns)
{
    const int w = maps.front().width;
    const int h = maps.front().height;
    Image img(w * static_cast<int>(maps.size()), h, 1);
    const double scale = patterns > 1 ? 1.0 / (patterns - 1) : 0.0;
    for (std::size_t i = 0; i < maps.size(); ++i)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                img.at(static_cast<int>(i) * w + x, y) = static_cast<float>(maps[i].at(x, y) * scale);
    return img;
}

struct SynthArgs {
    std::string scene;
    std::string output;
    bool list = false;
    std::string json;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& log)
{
    const auto suite = standard_suite();
    if (a.list) {
        for (const auto& [name, spec] : suite)
            out << name << "\n";
        return kSuccess;
    }
    auto it = std::find_if(suite.begin(), suite.end(), [&](const auto& s) { return s.first == a.scene; });
    if (it == suite.end())
        throw ConfigError("unknown scene '" + a.scene + "' (use --list)");
    if (a.output.empty())
        throw ConfigError("--output is required");

    ResolvedConfig rc;
    rc.add("scene", a.scene);
    rc.add("output", a.output);
    rc.add("angular_n", it->second.angular_n);
    rc.add("height", it->second.height);
    rc.add("width", it->second.width);
    rc.add("dmax", it->second.d_max);
    rc.print(log);

    const RenderedScene scene = render_scene(it->second);
    const fs::path dir(a.output);
    const double dm = it->second.d_max;
    save_lightfield(dir, scene.lightfield, &scene.truth.disparity, std::make_pair(-dm, dm));

    const fs::path occ_dir = dir / "occlusion";
    fs::create_directories(occ_dir);
    const int n = scene.lightfield.angular_n();
    std::size_t hidden = 0;
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const auto& occ = scene.truth.occlusion[static_cast<std::size_t>(row * n + col)];
            Image mask(scene.lightfield.width(), scene.lightfield.height(), 1);
            for (std::size_t i = 0; i < occ.size(); ++i) {
                mask.data[i] = occ[i] ? 1.0f : 0.0f;
                hidden += occ[i];
            }
            write_png(mask, occ_dir / ("occ_" + std::to_string(row) + "_" + std::to_string(col) + ".png"));
        }
    }
    nlohmann::json j = {{"scene", a.scene},
                        {"output", a.output},
                        {"angular_n", n},
                        {"height", scene.lightfield.height()},
                        {"width", scene.lightfield.width()},
                        {"occluded_pixel_views", hidden}};
    write_json(j, a.json);
    out << "wrote " << a.scene << " (" << n << "x" << n << " views, " << scene.lightfield.width() << "x"
        << scene.lightfield.height() << ") to " << a.output << "\n";
    return kSuccess;
}

struct PatternsArgs {
    int n = 9;
    int beta = 1;
    std::string json;
};

int cmd_patterns(const PatternsArgs& a, std::ostream& out, std::ostream& log)
{
    ResolvedConfig rc;
    rc.add("n", a.n);
    rc.add("beta", a.beta);
    rc.print(log);
    const PatternSet ps = generate_pattern_set(a.n, a.beta);
    out << pattern_table(a.n, a.beta);
    nlohmann::json j = {{"n", a.n}, {"beta", a.beta}, {"m", ps.downsampled_m}};
    for (std::size_t i = 0; i < ps.patterns.size(); ++i)
        j["patterns"].push_back({{"index", ps.patterns[i].index},
                                 {"mask", ps.patterns[i].to_string()},
                                 {"upsampled", mask_to_string(ps.upsampled[i])}});
    write_json(j, a.json);
    return kSuccess;
}

struct EstimateArgs {
    std::string input;
    std::string output;
    std::string preset = "full";
    std::optional<int> beta;
    std::optional<double> tau;
    std::optional<double> dmax;
    std::optional<int> candidates;
    std::optional<int> radius;
    std::optional<double> temperature;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::optional<double> gamma;
    bool no_refine = false;
    bool soft = false;
    bool hard = false;
    bool no_opal = false;
    std::string dump_selection;
    int threads = 0;
    std::string json;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& log)
{
    if (a.soft && a.hard)
        throw ConfigError("--soft and --hard are mutually exclusive");
    SweepConfig cfg;
    if (a.preset == "full")
        cfg = SweepConfig::full();
    else if (a.preset == "fast")
        cfg = SweepConfig::fast();
    else
        throw ConfigError("unknown preset '" + a.preset + "' (expected fast or full)");
    if (a.beta) cfg.beta = *a.beta;
    if (a.tau) cfg.tau = *a.tau;
    if (a.dmax) cfg.d_max = *a.dmax;
    if (a.candidates) cfg.num_candidates = *a.candidates;
    if (a.radius) cfg.aggregation_radius = *a.radius;
    if (a.temperature) cfg.soft_temperature = *a.temperature;
    if (a.lambda1) cfg.lambda1 = *a.lambda1;
    if (a.lambda2) cfg.lambda2 = *a.lambda2;
    if (a.gamma) cfg.gamma = *a.gamma;
    if (a.no_refine) cfg.refine = false;
    if (a.soft) cfg.regression = Regression::Soft;
    if (a.hard) cfg.regression = Regression::HardArgmin;
    if (a.no_opal) cfg.pattern_selection = false;
    cfg.validate();
    const int threads = a.threads > 0 ? a.threads : default_thread_count();
    set_thread_count(threads);

    ResolvedConfig rc;
    rc.add("input", a.input);
    rc.add("output", a.output);
    rc.add("preset", a.preset);
    rc.add("dmax", cfg.d_max);
    rc.add("candidates", cfg.num_candidates);
    rc.add("beta", cfg.beta);
    rc.add("tau", cfg.tau);
    std::string dirs;
    for (Direction d : cfg.directions)
        dirs += (dirs.empty() ? "" : ",") + std::string(to_string(d));
    rc.add("directions", dirs);
    rc.add("radius", cfg.aggregation_radius);
    rc.add("regression", std::string(cfg.regression == Regression::Soft ? "soft" : "hard"));
    rc.add("temperature", cfg.soft_temperature);
    rc.add("refine", cfg.refine);
    rc.add("pattern_selection", cfg.pattern_selection);
    rc.add("lambda1", cfg.lambda1);
    rc.add("lambda2", cfg.lambda2);
    rc.add("gamma", cfg.gamma);
    rc.add("threads", threads);
    rc.print(log);

    const LightFieldContainer c = load_lightfield(a.input);
    const EstimateResult r = estimate(c.lightfield, cfg);
    write_pfm(r.final, a.output);
    if (!a.dump_selection.empty())
        write_png(selection_image(r.selection, generate_pattern_set(c.lightfield.angular_n(), cfg.beta).downsampled_m),
                  a.dump_selection);

    nlohmann::json j;
    j["loss"] = loss_to_json(r.loss);
    j["stats"] = {{"min_cost", r.stats.min_cost},
                  {"max_cost", r.stats.max_cost},
                  {"mean_cost", r.stats.mean_cost},
                  {"degenerate_pixels", r.stats.degenerate_pixels},
                  {"selection_histogram", r.stats.selection_histogram}};
    out << "estimated disparity written to " << a.output << "\n";
    out << "loss: total=" << format_number(r.loss.total) << " opal=" << format_number(r.loss.opal_total)
        << " smooth=" << format_number(r.loss.smooth) << "\n";
    if (c.ground_truth) {
        const MetricsReport m = evaluate(r.final, *c.ground_truth, {kDefaultBadPixEps}, default_border(cfg.d_max));
        j["metrics"] = to_json(m);
        out << "vs gt.pfm: MSEx100=" << format_number(m.mse_x100)
            << " BadPix(0.07)=" << format_number(m.badpix.at(kDefaultBadPixEps)) << "%\n";
    }
    write_json(j, a.json);
    return kSuccess;
}

struct EvalArgs {
    std::string est;
    std::string gt;
    double eps = kDefaultBadPixEps;
    std::optional<int> border;
    double dmax = 4.0;
    std::string mask;
    std::string json;
    std::string render_dir;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& log)
{
    const int border = a.border ? *a.border : default_border(a.dmax);
    ResolvedConfig rc;
    rc.add("est", a.est);
    rc.add("gt", a.gt);
    rc.add("eps", a.eps);
    rc.add("border", border);
    rc.add("dmax", a.dmax);
    if (!a.mask.empty())
        rc.add("mask", a.mask);
    rc.print(log);

    const DisparityMap est = read_pfm(a.est);
    const DisparityMap gt = read_pfm(a.gt);
    std::optional<std::vector<std::uint8_t>> ext;
    if (!a.mask.empty()) {
        const Image m = read_png(a.mask);
        if (m.width != est.width || m.height != est.height)
            throw DataError("mask dimensions do not match the disparity maps");
        ext.emplace(static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height));
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x)
                (*ext)[est.index(x, y)] = m.at(x, y, 0) > 0.5f ? 1 : 0;
    }
    const MetricsReport r = evaluate(est, gt, {a.eps}, border, ext ? &*ext : nullptr,
                                     a.mask.empty() ? std::nullopt : std::optional<std::string>(a.mask));
    out << "MSEx100 = " << format_number(r.mse_x100) << "\n";
    out << "BadPix(" << format_number(a.eps) << ") = " << format_number(r.badpix.at(a.eps)) << " %\n";
    out << "evaluated pixels = " << r.evaluated_pixels << "\n";
    write_json(to_json(r), a.json);
    if (!a.render_dir.empty())
        render_maps(est, &gt, a.dmax, a.eps, border, a.render_dir);
    return kSuccess;
}

struct EvalLossArgs {
    std::string input;
    std::string disp;
    std::string final_disp;
    int beta = 1;
    double tau = kDefaultTau;
    double gamma = 150.0;
    double lambda1 = 0.6;
    double lambda2 = 0.3;
    std::string json;
};

int cmd_eval_loss(const EvalLossArgs& a, std::ostream& out, std::ostream& log)
{
    ResolvedConfig rc;
    rc.add("input", a.input);
    rc.add("disp", a.disp);
    rc.add("final", a.final_disp.empty() ? a.disp : a.final_disp);
    rc.add("beta", a.beta);
    rc.add("tau", a.tau);
    rc.add("gamma", a.gamma);
    rc.add("lambda1", a.lambda1);
    rc.add("lambda2", a.lambda2);
    rc.print(log);

    const LightFieldContainer c = load_lightfield(a.input);
    const DisparityMap raw = read_pfm(a.disp);
    const DisparityMap fin = a.final_disp.empty() ? raw : read_pfm(a.final_disp);
    const LossBreakdown loss = total_objective(c.lightfield, raw, fin, {a.tau, a.gamma, a.lambda1, a.lambda2, a.beta});
    const nlohmann::json j = loss_to_json(loss);
    out << j.dump(2) << "\n";
    write_json(j, a.json);
    return kSuccess;
}

struct SuiteArgs {
    std::string output;
    int threads = 0;
};

int cmd_suite(const SuiteArgs& a, std::ostream& out, std::ostream& log)
{
    const int threads = a.threads > 0 ? a.threads : default_thread_count();
    set_thread_count(threads);
    const SuiteThresholds th;
    ResolvedConfig rc;
    rc.add("output", a.output);
    rc.add("threads", threads);
    for (const SuiteVariant& v : suite_variants()) {
        rc.add(v.name + ".dmax", v.config.d_max);
        rc.add(v.name + ".candidates", v.config.num_candidates);
        rc.add(v.name + ".beta", v.config.beta);
        rc.add(v.name + ".tau", v.config.tau);
        rc.add(v.name + ".refine", v.config.refine);
        rc.add(v.name + ".pattern_selection", v.config.pattern_selection);
        rc.add(v.name + ".lambda1", v.config.lambda1);
        rc.add(v.name + ".lambda2", v.config.lambda2);
        rc.add(v.name + ".gamma", v.config.gamma);
    }
    rc.add("eps", th.eps);
    rc.print(log);

    const SuiteReport report = run_suite(a.output, th);
    out << report.summary;
    return report.passed() ? kSuccess : kAcceptanceFailure;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log)
{
    CLI::App app{"Occlusion-pattern-aware light field disparity estimation", "opal"};
    app.require_subcommand(1);

    std::string config_file;
    auto add_config = [&config_file](CLI::App* sub) {
        sub->add_option("--config", config_file, "key = value file; command-line flags take precedence");
    };

    SynthArgs synth;
    CLI::App* s_synth = app.add_subcommand("synth", "Render a standard synthetic scene to a container directory");
    s_synth->add_option("--scene", synth.scene, "Scene name from the standard suite");
    s_synth->add_option("--output", synth.output, "Output directory");
    s_synth->add_flag("--list", synth.list, "List the available scenes");
    s_synth->add_option("--json", synth.json, "Write a JSON summary");
    add_config(s_synth);

    PatternsArgs patterns;
    CLI::App* s_patterns = app.add_subcommand("patterns", "Print the occlusion pattern table");
    s_patterns->add_option("--n", patterns.n, "Angular resolution N");
    s_patterns->add_option("--beta", patterns.beta, "Angular downsampling factor");
    s_patterns->add_option("--json", patterns.json, "Write the table as JSON");
    add_config(s_patterns);

    EstimateArgs est;
    CLI::App* s_est = app.add_subcommand("estimate", "Estimate the central-view disparity of a container");
    s_est->add_option("--input", est.input, "Light field container directory")->required();
    s_est->add_option("--output", est.output, "Output PFM")->required();
    s_est->add_option("--preset", est.preset, "fast or full");
    s_est->add_option("--beta", est.beta);
    s_est->add_option("--tau", est.tau);
    s_est->add_option("--dmax", est.dmax);
    s_est->add_option("--candidates", est.candidates);
    s_est->add_option("--radius", est.radius, "Box aggregation radius");
    s_est->add_option("--temperature", est.temperature, "Soft regression temperature");
    s_est->add_option("--lambda1", est.lambda1);
    s_est->add_option("--lambda2", est.lambda2);
    s_est->add_option("--gamma", est.gamma);
    s_est->add_flag("--no-refine", est.no_refine);
    s_est->add_flag("--soft", est.soft);
    s_est->add_flag("--hard", est.hard);
    s_est->add_flag("--no-opal", est.no_opal, "Force pattern 0 (ablation)");
    s_est->add_option("--dump-selection", est.dump_selection, "PNG of j* per enabled direction, side by side");
    s_est->add_option("--threads", est.threads);
    s_est->add_option("--json", est.json, "Write loss, cost statistics and metrics as JSON");
    add_config(s_est);

    EvalArgs ev;
    CLI::App* s_eval = app.add_subcommand("eval", "Compare a disparity map against ground truth");
    s_eval->add_option("--est", ev.est)->required();
    s_eval->add_option("--gt", ev.gt)->required();
    s_eval->add_option("--eps", ev.eps);
    s_eval->add_option("--border", ev.border);
    s_eval->add_option("--dmax", ev.dmax);
    s_eval->add_option("--mask", ev.mask, "PNG; pixels > 0.5 are evaluated");
    s_eval->add_option("--json", ev.json);
    s_eval->add_option("--render-dir", ev.render_dir);
    add_config(s_eval);

    EvalLossArgs el;
    CLI::App* s_loss = app.add_subcommand("eval-loss", "Evaluate the objective for a disparity map");
    s_loss->add_option("--input", el.input, "Light field container directory")->required();
    s_loss->add_option("--disp", el.disp, "Raw disparity PFM")->required();
    s_loss->add_option("--final", el.final_disp, "Final disparity PFM (defaults to --disp)");
    s_loss->add_option("--beta", el.beta);
    s_loss->add_option("--tau", el.tau);
    s_loss->add_option("--gamma", el.gamma);
    s_loss->add_option("--lambda1", el.lambda1);
    s_loss->add_option("--lambda2", el.lambda2);
    s_loss->add_option("--json", el.json);
    add_config(s_loss);

    SuiteArgs su;
    CLI::App* s_suite = app.add_subcommand("suite", "Run the synthetic suite end to end");
    s_suite->add_option("--output", su.output, "Report directory")->required();
    s_suite->add_option("--threads", su.threads);
    add_config(s_suite);

    // Required options may come from the config file, so check them after it is applied.
    std::vector<std::pair<CLI::App*, CLI::Option*>> required;
    for (CLI::App* sub : app.get_subcommands({}))
        for (CLI::Option* opt : sub->get_options())
            if (opt->get_required()) {
                opt->required(false);
                required.emplace_back(sub, opt);
            }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        log << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_file.empty())
            apply_config_file(*sub, config_file);
        for (const auto& [owner, opt] : required)
            if (owner == sub && opt->count() == 0)
                throw ConfigError(opt->get_name() + " is required");

        const std::string name = sub->get_name();
        if (name == "synth")
            return cmd_synth(synth, out, log);
        if (name == "patterns")
            return cmd_patterns(patterns, out, log);
        if (name == "estimate")
            return cmd_estimate(est, out, log);
        if (name == "eval")
            return cmd_eval(ev, out, log);
        if (name == "eval-loss")
            return cmd_eval_loss(el, out, log);
        if (name == "suite")
            return cmd_suite(su, out, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DataError& e) {
        log << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kConfigError;
}

} // namespace opal::cli
