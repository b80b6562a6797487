#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfdde/charmatrix.hpp"
#include "pfdde/errors.hpp"
#include "pfdde/integrator.hpp"
#include "pfdde/model_io.hpp"
#include "pfdde/normal_form.hpp"
#include "pfdde/parallel.hpp"
#include "pfdde/report_io.hpp"
#include "pfdde/wright.hpp"

namespace pfdde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string("bad number in --") + what + ": '" + item + "'");
        }
    }
    if (expected && out.size() != expected)
        throw ValidationError(std::string("--") + what + " expects " + std::to_string(expected) +
                              " comma-separated values");
    return out;
}

// lo,hi,count -> count points, endpoints included
std::vector<double> parse_grid(const std::string& text) {
    auto v = parse_list(text, 3, "grid");
    const int count = static_cast<int>(v[2]);
    if (count < 1 || v[2] != count) throw ValidationError("--grid count must be a positive integer");
    if (!(v[1] >= v[0])) throw ValidationError("--grid needs lo <= hi");
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(count == 1 ? v[0] : v[0] + (v[1] - v[0]) * k / (count - 1));
    return out;
}

Rect parse_rect(const std::string& text) {
    auto v = parse_list(text, 4, "rect");
    return {v[0], v[1], v[2], v[3]};
}

/// Shared per-invocation state: output routing and the manifest.
class Run {
public:
    Run(std::string command, const std::vector<std::string>& args, std::ostream& out)
        : out_(out), start_(std::chrono::steady_clock::now()) {
        manifest_["command"] = std::move(command);
        manifest_["args"] = args;
        manifest_["tolerances"] = json::object();
        manifest_["outputs"] = json::array();
    }

    json& manifest() { return manifest_; }
    void set_stamp(bool stamp) { stamp_ = stamp; }
    void set_out(const std::string& out) { out_path_ = out; }
    const std::string& out_path() const { return out_path_; }

    fs::path manifest_path() const {
        fs::path p(out_path_);
        return p.parent_path() / (p.stem().string() + ".manifest.json");
    }

    std::vector<std::string> header_lines() const {
        std::vector<std::string> h = {"pfdde " + manifest_["command"].get<std::string>()};
        if (!out_path_.empty()) h.push_back("manifest: " + manifest_path().filename().string());
        for (const auto& [k, v] : manifest_["tolerances"].items()) h.push_back(k + ": " + v.dump());
        if (manifest_.contains("variant")) h.push_back("variant: " + manifest_["variant"].get<std::string>());
        if (stamp_) h.push_back("generated: " + utc_now());
        return h;
    }

    /// CSV with '#' header lines, to the given path (or --out / stdout when empty).
    void emit_csv(const std::string& body, const std::string& path = {}) {
        std::ostringstream os;
        for (const auto& line : header_lines()) os << "# " << line << '\n';
        os << body;
        emit_text(os.str(), path.empty() ? out_path_ : path);
    }

    void emit_json(json doc, const std::string& path = {}) {
        if (!out_path_.empty()) doc["manifest"] = manifest_path().filename().string();
        if (stamp_) doc["generated"] = utc_now();
        emit_text(doc.dump(2) + "\n", path.empty() ? out_path_ : path);
    }

    /// Raw text (model files), without header lines.
    void emit_text_model(const std::string& text) { emit_text(text, out_path_); }

    void finish() {
        if (out_path_.empty()) return;
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        manifest_["wall_clock_seconds"] = elapsed;
        if (stamp_) manifest_["started_at"] = utc_now();
        write_text_file(manifest_path(), manifest_.dump(2) + "\n");
    }

private:
    void emit_text(const std::string& text, const std::string& path) {
        if (path.empty()) {
            out_ << text;
            return;
        }
        write_text_file(path, text);
        manifest_["outputs"].push_back(path);
    }

    std::ostream& out_;
    json manifest_;
    std::string out_path_;
    bool stamp_ = false;
    std::chrono::steady_clock::time_point start_;
};

std::string sibling(const std::string& out, const std::string& suffix) {
    fs::path p(out);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

Model load(const std::string& path, Run& run) {
    run.manifest()["model"] = path;
    return load_model(path);
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// first root with positive imaginary part nearest the imaginary axis
double locate_hopf_frequency(const Model& model, double omega_max) {
    Rect rect{-0.5, 0.5, 1e-3, omega_max};
    RootList roots = find_roots(model, rect);
    std::optional<Root> best;
    for (const auto& r : roots)
        if (!best || std::abs(r.lambda.real()) < std::abs(best->lambda.real())) best = r;
    if (!best) throw NumericalError("no root with 0 < Im <= " + fmt(omega_max) + " near the imaginary axis");
    const double thresh = 1e-8 * (1.0 + std::abs(best->lambda));
    if (std::abs(best->lambda.real()) > thresh)
        throw NotARoot(cplx(0.0, best->lambda.imag()), std::abs(best->lambda.real()), thresh);
    return best->lambda.imag();
}

H11Source variant_from_flag(const std::string& v) {
    if (v == "default") return H11Source::conjugate;
    if (v == "paper") return H11Source::plain;
    return h11_source_from_string(v);
}

struct Common {
    std::string out;
    bool stamp = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Output file (stdout when omitted); a manifest is written beside it");
    sub->add_flag("--stamp", c.stamp, "Add timestamps to headers and the manifest");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normal form coefficients for periodically forced delay equations"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // spectrum
    Common c_spec;
    std::string spec_model, spec_rect = "-2,1,-10,10";
    RootFinderOptions spec_opts;
    auto* spectrum = app.add_subcommand("spectrum", "Roots of det Delta in a rectangle");
    spectrum->add_option("--model", spec_model, "Model JSON")->required();
    spectrum->add_option("--rect", spec_rect, "re_min,re_max,im_min,im_max")->capture_default_str();
    spectrum->add_option("--tol", spec_opts.tol, "Newton tolerance")->capture_default_str();
    spectrum->add_option("--refinements", spec_opts.max_refinements, "Grid refinements")->capture_default_str();
    add_common(spectrum, c_spec);

    // fold
    Common c_fold;
    std::string fold_model_path;
    EigenTripleOptions fold_opts;
    auto* fold = app.add_subcommand("fold", "Fold coefficient b at the zero root");
    fold->add_option("--model", fold_model_path, "Model JSON")->required();
    fold->add_option("--root-tol", fold_opts.root_tol, "Relative singular value threshold")->capture_default_str();
    add_common(fold, c_fold);

    // hopf
    Common c_hopf;
    std::string hopf_model_path, hopf_variant = "default";
    std::optional<double> hopf_omega;
    double hopf_omega_max = 50.0;
    HopfOptions hopf_opts;
    auto* hopf = app.add_subcommand("hopf", "Hopf coefficient c and l1");
    hopf->add_option("--model", hopf_model_path, "Model JSON")->required();
    hopf->add_option("--omega", hopf_omega, "Hopf frequency (located on the imaginary axis when omitted)");
    hopf->add_option("--omega-max", hopf_omega_max, "Search bound when --omega is omitted")->capture_default_str();
    hopf->add_option("--variant", hopf_variant, "H11 right-hand side: default or paper")
        ->check(CLI::IsMember({"default", "paper"}))
        ->capture_default_str();
    hopf->add_option("--mode-cap", hopf_opts.mode_cap, "Modes scanned for resonance")->capture_default_str();
    hopf->add_option("--res-scale", hopf_opts.solve.res_scale, "Resonance threshold scale")->capture_default_str();
    add_common(hopf, c_hopf);

    // l1-sweep
    Common c_sweep;
    int sweep_N = 0;
    std::string sweep_grid = "0.05,1.5,30", sweep_variant = "default";
    double sweep_Omega1 = 1.0;
    int sweep_threads = 0;
    auto* sweep = app.add_subcommand("l1-sweep", "l1 of the forced Wright model over an Omega2 grid");
    sweep->add_option("--N", sweep_N, "Branch index (0..8)")->check(CLI::Range(0, 8))->capture_default_str();
    sweep->add_option("--grid", sweep_grid, "lo,hi,count (endpoints included)")->capture_default_str();
    sweep->add_option("--variant", sweep_variant, "default or paper")
        ->check(CLI::IsMember({"default", "paper"}))
        ->capture_default_str();
    sweep->add_option("--Omega1", sweep_Omega1, "Forcing amplitude")->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "Worker threads (0: all cores)");
    add_common(sweep, c_sweep);

    // simulate
    Common c_sim;
    std::string sim_model_path, sim_constant;
    double sim_dt = 0.01, sim_tmax = 400.0, sim_transient = 200.0, sim_history = 0.1, sim_guard = 1e6;
    std::optional<double> sim_period;
    std::size_t sim_stride = 10;
    StrobeOptions sim_strobe;
    auto* simulate = app.add_subcommand("simulate", "Integrate the model and strobe the result");
    simulate->add_option("--model", sim_model_path, "Model JSON")->required();
    simulate->add_option("--dt", sim_dt, "Step (must divide every delay)")->capture_default_str();
    simulate->add_option("--tmax", sim_tmax, "End time")->capture_default_str();
    simulate->add_option("--transient", sim_transient, "Strobe start")->capture_default_str();
    simulate->add_option("--history", sim_history, "Constant initial history")->capture_default_str();
    simulate->add_option("--constant", sim_constant, "Constant forcing term, comma-separated per component");
    simulate->add_option("--strobe-period", sim_period, "Strobe period (defaults to the forcing period, else 4)");
    simulate->add_option("--stride", sim_stride, "Trajectory CSV row stride")->capture_default_str();
    simulate->add_option("--guard", sim_guard, "Divergence guard")->capture_default_str();
    simulate->add_option("--eps-dec", sim_strobe.eps_dec)->capture_default_str();
    simulate->add_option("--eps-cyc", sim_strobe.eps_cyc)->capture_default_str();
    simulate->add_option("--eps-env", sim_strobe.eps_env)->capture_default_str();
    add_common(simulate, c_sim);

    // bifdiag
    Common c_bif;
    int bif_N = 2, bif_s = 4, bif_samples = 40;
    double bif_Omega2_max = 0.0, bif_Omega1 = 1.0;
    auto* bif = app.add_subcommand("bifdiag", "Branch data of the forced Wright model");
    bif->add_option("--N-max", bif_N, "Highest branch (0..8)")->check(CLI::Range(0, 8))->capture_default_str();
    bif->add_option("--s-max", bif_s, "Largest resonance denominator")->capture_default_str();
    bif->add_option("--Omega2-max", bif_Omega2_max, "Upper Omega2 (default: 1.2 omega of the last branch)");
    bif->add_option("--samples", bif_samples, "Samples per branch")->capture_default_str();
    bif->add_option("--Omega1", bif_Omega1, "Forcing amplitude")->capture_default_str();
    add_common(bif, c_bif);

    // model builders
    Common c_mw;
    int mw_N = 0;
    double mw_Omega1 = 1.0, mw_Omega2 = 1.0;
    std::optional<double> mw_a;
    auto* mw = app.add_subcommand("make-wright", "Write a Wright model file");
    mw->add_option("--N", mw_N, "Branch index")->check(CLI::Range(0, 8))->capture_default_str();
    mw->add_option("--Omega1", mw_Omega1, "Forcing amplitude (0: autonomous, beta = 1)")->capture_default_str();
    mw->add_option("--Omega2", mw_Omega2, "Forcing frequency")->capture_default_str();
    mw->add_option("--a", mw_a, "Override the linear coefficient a");
    add_common(mw, c_mw);

    Common c_mf;
    double mf_beta1 = 1.0, mf_T = 2.0 * std::numbers::pi;
    std::string mf_beta2 = "0,1,0;1,0,-0.5;-1,0,0.5";
    auto* mf = app.add_subcommand("make-fold", "Write the fold example model file");
    mf->add_option("--beta1", mf_beta1, "beta1 (not -1)")->capture_default_str();
    mf->add_option("--beta2", mf_beta2, "Modes of beta2 as m,re,im;m,re,im;...")->capture_default_str();
    mf->add_option("--T", mf_T, "Forcing period")->capture_default_str();
    add_common(mf, c_mf);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
        return kValidation;
    }

    CLI::App* chosen = app.get_subcommands().front();
    Run run(chosen->get_name(), args, out);

    try {
        if (chosen == spectrum) {
            run.set_out(c_spec.out);
            run.set_stamp(c_spec.stamp);
            Model model = load(spec_model, run);
            Rect rect = parse_rect(spec_rect);
            run.manifest()["tolerances"] = {{"tol", spec_opts.tol}, {"max_refinements", spec_opts.max_refinements}};
            run.manifest()["rect"] = {rect.re_min, rect.re_max, rect.im_min, rect.im_max};
            run.emit_csv(root_list_csv(find_roots(model, rect, spec_opts)));
        } else if (chosen == fold) {
            run.set_out(c_fold.out);
            run.set_stamp(c_fold.stamp);
            Model model = load(fold_model_path, run);
            run.manifest()["tolerances"] = {{"root_tol", fold_opts.root_tol}, {"simple_tol", fold_opts.simple_tol}};
            run.emit_json(fold_report_to_json(fold_coefficient(model, fold_opts), model));
        } else if (chosen == hopf) {
            run.set_out(c_hopf.out);
            run.set_stamp(c_hopf.stamp);
            Model model = load(hopf_model_path, run);
            hopf_opts.h11 = variant_from_flag(hopf_variant);
            run.manifest()["variant"] = hopf_variant;
            run.manifest()["tolerances"] = {{"mode_cap", hopf_opts.mode_cap},
                                            {"res_scale", hopf_opts.solve.res_scale},
                                            {"eps_rat", hopf_opts.eps_rat},
                                            {"max_denominator", hopf_opts.max_denominator}};
            const double omega = hopf_omega ? *hopf_omega : locate_hopf_frequency(model, hopf_omega_max);
            run.emit_json(hopf_report_to_json(hopf_coefficients(model, omega, hopf_opts), model, hopf_opts));
        } else if (chosen == sweep) {
            run.set_out(c_sweep.out);
            run.set_stamp(c_sweep.stamp);
            const auto grid = parse_grid(sweep_grid);
            HopfOptions opts;
            opts.h11 = variant_from_flag(sweep_variant);
            run.manifest()["variant"] = sweep_variant;
            run.manifest()["model"] = "wright N=" + std::to_string(sweep_N);
            run.manifest()["tolerances"] = {{"mode_cap", opts.mode_cap}, {"res_scale", opts.solve.res_scale},
                                            {"Omega1", sweep_Omega1}};
            const WrightBranch br = wright_branch(sweep_N);

            struct Row {
                double l1 = std::numeric_limits<double>::quiet_NaN();
                double closed = std::numeric_limits<double>::quiet_NaN();
                double printed = std::numeric_limits<double>::quiet_NaN();
                std::string resonance, status = "ok";
            };
            auto rows = parallel_map<Row>(grid.size(), [&](std::size_t k) {
                Row r;
                const double O2 = grid[k];
                r.resonance = classify_resonance(br.omega, O2, opts.max_denominator, opts.eps_rat).label();
                if (!(O2 > 0.0)) {
                    r.status = "invalid";
                    return r;
                }
                try {
                    r.closed = opts.h11 == H11Source::plain ? l1_forced_plain(sweep_N, sweep_Omega1, O2)
                                                            : l1_forced_default(sweep_N, sweep_Omega1, O2);
                    r.printed = l1_forced_paper(sweep_N, sweep_Omega1, O2);
                } catch (const PoleError&) {
                    r.status = "pole";
                    return r;
                }
                try {
                    r.l1 = hopf_coefficients(wright_model(sweep_N, sweep_Omega1, O2), br.omega, opts).l1;
                } catch (const ResonantMode& e) {
                    r.status = "resonant";
                }
                return r;
            }, sweep_threads);

            std::ostringstream os;
            os << "Omega2,l1_pipeline,l1_closed_form,l1_printed,resonance,status,sign_change,pole_distance\n";
            double prev = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const Row& r = rows[k];
                const double v = std::isfinite(r.l1) ? r.l1 : r.closed;
                const bool change = std::isfinite(prev) && std::isfinite(v) && ((prev < 0) != (v < 0));
                if (std::isfinite(v)) prev = v;
                os << fmt(grid[k]) << ',' << fmt(r.l1) << ',' << fmt(r.closed) << ',' << fmt(r.printed) << ','
                   << r.resonance << ',' << r.status << ',' << (change ? 1 : 0) << ','
                   << fmt(std::abs(grid[k] - br.omega)) << '\n';
            }
            run.emit_csv(os.str());
        } else if (chosen == simulate) {
            run.set_out(c_sim.out);
            run.set_stamp(c_sim.stamp);
            Model model = load(sim_model_path, run);
            std::optional<RVec> constant;
            if (!sim_constant.empty()) {
                auto v = parse_list(sim_constant, static_cast<std::size_t>(model.n()), "constant");
                constant = Eigen::Map<RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
            }
            const double T = sim_period ? *sim_period : (model.period() ? *model.period() : 4.0);
            if (!(T > 0.0)) throw ValidationError("--strobe-period must be positive");
            IntegrateOptions iopts{sim_dt, sim_guard};
            run.manifest()["tolerances"] = {{"dt", sim_dt},
                                            {"guard", sim_guard},
                                            {"eps_dec", sim_strobe.eps_dec},
                                            {"eps_cyc", sim_strobe.eps_cyc},
                                            {"eps_env", sim_strobe.eps_env},
                                            {"strobe_period", T},
                                            {"transient", sim_transient},
                                            {"tmax", sim_tmax},
                                            {"history", sim_history}};
            Trajectory traj = integrate_dde(model_system(model, constant),
                                            constant_history(RVec::Constant(model.n(), sim_history)), 0.0,
                                            sim_tmax, iopts);
            StrobeResult sr;
            if (traj.diverged) {
                sr.verdict = Verdict::diverged;
            } else {
                sr = strobe(traj, T, 0.0, sim_transient, sim_strobe);
            }
            json verdict = strobe_to_json(sr, sim_strobe);
            verdict["t_end"] = traj.t_end();
            if (c_sim.out.empty()) {
                run.emit_json(verdict);
            } else {
                run.emit_csv(traj.csv(std::max<std::size_t>(1, sim_stride)));
                run.emit_csv(sr.csv(), sibling(c_sim.out, ".strobe.csv"));
                run.emit_json(verdict, sibling(c_sim.out, ".verdict.json"));
            }
        } else if (chosen == bif) {
            run.set_out(c_bif.out);
            run.set_stamp(c_bif.stamp);
            const double O2max = bif_Omega2_max > 0.0 ? bif_Omega2_max : 1.2 * wright_branch(bif_N).omega;
            run.manifest()["model"] = "wright";
            run.manifest()["tolerances"] = {
                {"N_max", bif_N}, {"s_max", bif_s}, {"Omega2_max", O2max}, {"samples", bif_samples},
                {"Omega1", bif_Omega1}};
            run.emit_csv(bifdiag_csv(bifdiag(bif_N, bif_s, O2max, bif_samples, bif_Omega1)));
        } else if (chosen == mw) {
            run.set_out(c_mw.out);
            run.set_stamp(c_mw.stamp);
            Model m;
            const WrightBranch br = wright_branch(mw_N);
            const double a = mw_a ? *mw_a : br.a;
            if (mw_Omega1 == 0.0) {
                m = wright_model_at(a, FourierSeries::scalar(std::nullopt, {{0, 1.0}}));
            } else {
                if (!(mw_Omega2 > 0.0)) throw ValidationError("--Omega2 must be positive");
                m = wright_model_at(a, FourierSeries::scalar(2.0 * std::numbers::pi / mw_Omega2,
                                                             {{-1, 0.5 * mw_Omega1}, {1, 0.5 * mw_Omega1}}));
            }
            run.manifest()["model"] = "wright";
            run.emit_text_model(serialize_model(m) + "\n");
        } else if (chosen == mf) {
            run.set_out(c_mf.out);
            run.set_stamp(c_mf.stamp);
            FourierSeries b2(1, mf_T);
            std::stringstream ss(mf_beta2);
            std::string item;
            while (std::getline(ss, item, ';')) {
                auto v = parse_list(item, 3, "beta2");
                if (v[0] != std::round(v[0])) throw ValidationError("beta2 mode index must be an integer");
                b2.accumulate(static_cast<int>(v[0]), CVec::Constant(1, cplx(v[1], v[2])));
            }
            run.manifest()["model"] = "fold";
            run.emit_text_model(serialize_model(fold_model(mf_beta1, b2)) + "\n");
        }
        run.finish();
    } catch (const Error& e) {
        err << error_to_json(e).dump() << '\n';
        switch (e.category()) {
            case ErrorCategory::validation: return kValidation;
            case ErrorCategory::numerical: return kNumerical;
            case ErrorCategory::io: return kIo;
        }
    } catch (const std::exception& e) {
        err << error_to_json(e).dump() << '\n';
        return kNumerical;
    }
    return kOk;
}

}  // namespace pfdde::cli
