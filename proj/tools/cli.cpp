#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "accum/bootstrap.hpp"
#include "accum/compare.hpp"
#include "accum/curves.hpp"
#include "accum/freq_data.hpp"
#include "accum/good_toulmin.hpp"
#include "accum/mixture.hpp"
#include "accum/npmle.hpp"
#include "accum/rarefaction.hpp"
#include "accum/simulator.hpp"
#include "svg_plot.hpp"

namespace accum::cli {
namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<std::int64_t, double, std::string>;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json meta = json::object();
};

struct Output {
    std::string format = "csv";
    int precision = 6;
};

double round_sig(double v, int precision) {
    if (!std::isfinite(v) || v == 0.0) return v;
    std::ostringstream o;
    o << std::setprecision(precision) << v;
    return std::stod(o.str());
}

json to_json(const Cell& c, int precision) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return nullptr;
        return round_sig(*d, precision);
    }
    return std::get<std::string>(c);
}

json round_meta(const json& j, int precision) {
    if (j.is_number_float()) return round_sig(j.get<double>(), precision);
    if (j.is_structured()) {
        json out = j;
        for (auto& [k, v] : out.items()) v = round_meta(v, precision);
        return out;
    }
    return j;
}

void emit(const Table& t, const Output& o, std::ostream& out) {
    if (o.format == "json") {
        json doc = round_meta(t.meta, o.precision);
        json rows = json::array();
        for (const auto& r : t.rows) {
            json obj = json::object();
            for (std::size_t k = 0; k < t.columns.size(); ++k) obj[t.columns[k]] = to_json(r[k], o.precision);
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        out << doc.dump(2) << '\n';
        return;
    }
    const auto flags = out.flags();
    out << std::setprecision(o.precision);
    for (const auto& [k, v] : t.meta.items()) {
        if (v.is_array() || v.is_object()) continue;
        out << "# " << k << '=';
        if (v.is_number_float())
            out << v.get<double>();
        else if (v.is_string())
            out << v.get<std::string>();
        else
            out << v.dump();
        out << '\n';
    }
    for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) out << ',';
            std::visit([&out](const auto& v) { out << v; }, r[k]);
        }
        out << '\n';
    }
    out.flags(flags);
}

void warn(std::ostream& err, const std::string& msg) { err << json{{"warning", msg}}.dump() << '\n'; }

int fail(std::ostream& err, const char* kind, const std::string& msg, int code) {
    err << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << '\n';
    return code;
}

struct Input {
    std::string path;
    bool raw = false;
};

FrequencyCounts load(const Input& in) {
    const auto fmt = in.raw ? InputFormat::raw_abundances : InputFormat::pairs;
    if (in.path == "-") return parse_counts(std::cin, fmt);
    std::ifstream f(in.path);
    if (!f) throw UsageError("cannot open " + in.path);
    return parse_counts(f, fmt);
}

std::vector<double> make_t_grid(double t_min, double t_max, double step) {
    if (!(step > 0.0)) throw UsageError("--grid must be positive");
    if (!(t_max >= t_min)) throw UsageError("--t-max must be >= the first grid point");
    std::vector<double> t;
    const auto n = static_cast<long>(std::floor((t_max - t_min) / step + 1e-9));
    for (long i = 0; i <= n; ++i) t.push_back(t_min + static_cast<double>(i) * step);
    return t;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("ACCUM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("ACCUM_SEED is not an unsigned integer");
        }
    }
    return 1;
}

void add_input(CLI::App* sub, Input& in) {
    sub->add_option("input", in.path, "frequency-count file ('-' for stdin)")->required();
    sub->add_flag("--raw", in.raw, "input lists one abundance per species instead of 'j n_j' pairs");
}

void add_solver(CLI::App* sub, SolverOptions& s) {
    sub->add_option("--tol", s.tol, "stop when the gradient supremum is below this")->capture_default_str();
    sub->add_option("--max-iter", s.max_iter, "iteration cap")->capture_default_str();
    sub->add_option("--grid-size", s.grid_size, "gradient search grid points")->capture_default_str();
    sub->add_option("--weight-floor", s.weight_floor, "support points below this weight are pruned")
        ->capture_default_str();
}

void add_output(CLI::App* sub, Output& o) {
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--precision", o.precision, "significant digits")->check(CLI::Range(1, 17))->capture_default_str();
}

NpmleFit fit_or_fail(const FrequencyCounts& fc, const SolverOptions& opts, std::ostream& err) {
    NpmleFit fit;
    try {
        fit = fit_npmle(fc, opts);
    } catch (const BoundaryFitError& e) {
        warn(err, e.what());
        fit = e.fit();
    }
    if (!fit.converged)
        throw ConvergenceError("NPMLE did not converge: gradient supremum " + std::to_string(fit.gradient_sup) +
                               " after " + std::to_string(fit.iterations) + " iterations");
    return fit;
}

json fit_meta(const NpmleFit& fit, const FrequencyCounts& fc) {
    return json{{"n_plus", fc.n_plus()},
                {"individuals", fc.individuals()},
                {"loglik", fit.loglik},
                {"gradient_sup", fit.gradient_sup},
                {"iterations", fit.iterations},
                {"converged", fit.converged}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Species accumulation curves from frequency counts"};
    app.require_subcommand(1);

    Input input;
    Output output;
    SolverOptions solver;
    std::optional<std::uint64_t> seed_flag;
    std::string plot;

    auto* fit_cmd = app.add_subcommand("fit", "NPMLE of the mixing distribution");
    add_input(fit_cmd, input);
    add_solver(fit_cmd, solver);
    add_output(fit_cmd, output);

    double t_max = 3.0, grid = 0.01, t_min = 1.0;
    bool no_cap = false, with_gt = false;
    int j_max = 4;
    std::string plot_kind = "phi";
    auto* curve_cmd = app.add_subcommand("curve", "likelihood (and Good-Toulmin) curve estimates");
    add_input(curve_cmd, input);
    add_solver(curve_cmd, solver);
    add_output(curve_cmd, output);
    curve_cmd->add_option("--t-max", t_max, "largest effort")->capture_default_str();
    curve_cmd->add_flag("--no-t-cap", no_cap, "allow --t-max beyond 3");
    curve_cmd->add_option("--grid", grid, "effort spacing")->capture_default_str();
    curve_cmd->add_option("--j-max", j_max, "largest frequency reported")->check(CLI::PositiveNumber)
        ->capture_default_str();
    curve_cmd->add_flag("--gt", with_gt, "add Good-Toulmin columns");
    curve_cmd->add_option("--plot", plot, "write an SVG plot");
    curve_cmd->add_option("--plot-kind", plot_kind, "phi or richness")
        ->check(CLI::IsMember({"phi", "richness"}))
        ->capture_default_str();

    std::int64_t h_step = 1;
    int rare_j_max = 4;
    auto* rarefy_cmd = app.add_subcommand("rarefy", "exact rarefaction m_bar_j(h)");
    add_input(rarefy_cmd, input);
    add_output(rarefy_cmd, output);
    rarefy_cmd->add_option("--h-step", h_step, "subsample size spacing")->check(CLI::PositiveNumber)
        ->capture_default_str();
    rarefy_cmd->add_option("--j-max", rare_j_max, "largest frequency reported")->check(CLI::PositiveNumber)
        ->capture_default_str();
    rarefy_cmd->add_option("--plot", plot, "write an SVG plot");

    BootstrapOptions boot;
    std::string functional = "chao";
    double boot_grid = 0.2;
    auto* boot_cmd = app.add_subcommand("bootstrap", "parametric bootstrap percentile band");
    add_input(boot_cmd, input);
    add_solver(boot_cmd, solver);
    add_output(boot_cmd, output);
    boot_cmd->add_option("--functional", functional, "chao or phi_plus")
        ->check(CLI::IsMember({"chao", "phi_plus"}))
        ->capture_default_str();
    boot_cmd->add_option("--replicates", boot.replicates, "bootstrap replicates")->capture_default_str();
    boot_cmd->add_option("--level", boot.level, "two-sided coverage")->capture_default_str();
    boot_cmd->add_option("--seed", seed_flag, "master seed (default: ACCUM_SEED, then 1)");
    boot_cmd->add_option("--threads", boot.threads, "worker threads")->capture_default_str();
    boot_cmd->add_option("--t-min", t_min, "first effort")->capture_default_str();
    boot_cmd->add_option("--t-max", t_max, "largest effort")->capture_default_str();
    boot_cmd->add_flag("--no-t-cap", no_cap, "allow --t-max beyond 3");
    boot_cmd->add_option("--grid", boot_grid, "effort spacing")->capture_default_str();
    boot_cmd->add_option("--plot", plot, "write an SVG plot");

    std::string mixture_path;
    std::int64_t species = 0;
    double t_end = 1.0;
    std::int64_t h_multi = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "draw frequency counts from a rate distribution");
    sim_cmd->add_option("--mixture", mixture_path, "'gamma weight' file giving the rate distribution")->required();
    sim_cmd->add_option("--species", species, "true number of species")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--t-end", t_end, "sampling effort")->capture_default_str();
    sim_cmd->add_option("--individuals", h_multi, "draw this many individuals multinomially instead")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", seed_flag, "seed (default: ACCUM_SEED, then 1)");

    int cmp_j_max = 10;
    double step = 0.001;
    auto* cmp_cmd = app.add_subcommand("compare", "Good-Toulmin vs likelihood vs rarefaction diagnostics");
    add_input(cmp_cmd, input);
    add_solver(cmp_cmd, solver);
    add_output(cmp_cmd, output);
    cmp_cmd->add_option("--j-max", cmp_j_max, "largest frequency compared")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmp_cmd->add_option("--step", step, "effort spacing on [0, 1]")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return ok;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage", e.what(), usage);
    }

    try {
        if ((*curve_cmd || *boot_cmd) && t_max > 3.0 && !no_cap)
            throw UsageError("--t-max above 3 needs --no-t-cap");

        if (*fit_cmd) {
            const auto fc = load(input);
            const auto fit = fit_or_fail(fc, solver, err);
            Table t{{"gamma", "weight"}, {}, fit_meta(fit, fc)};
            for (std::size_t u = 0; u < fit.q_hat.size(); ++u)
                t.rows.push_back({fit.q_hat.gamma(u), fit.q_hat.weight(u)});
            emit(t, output, out);
        } else if (*curve_cmd) {
            const auto fc = load(input);
            const auto fit = fit_or_fail(fc, solver, err);
            const auto ts = make_t_grid(grid, t_max, grid);
            const auto n_plus = fc.n_plus();
            Table t{{"t", "j", "phi_hat"}, {}, fit_meta(fit, fc)};
            if (with_gt) t.columns.push_back("phi_tilde");
            t.columns.insert(t.columns.end(), {"phi_plus", "chao"});
            if (with_gt) t.columns.insert(t.columns.end(), {"phi_tilde_plus", "chao_tilde"});
            for (double tv : ts) {
                const double plus = lik_phi_plus(fit.q_hat, n_plus, tv);
                const double chao = lik_chao(fit.q_hat, n_plus, tv).value;
                for (int j = 1; j <= j_max; ++j) {
                    std::vector<Cell> row{tv, std::int64_t{j}, lik_phi(fit.q_hat, n_plus, j, tv)};
                    if (with_gt) row.push_back(gt_phi(fc, j, tv));
                    row.insert(row.end(), {plus, chao});
                    if (with_gt) row.insert(row.end(), {gt_phi_plus(fc, tv), gt_chao(fc, tv)});
                    t.rows.push_back(std::move(row));
                }
            }
            emit(t, output, out);
            if (!plot.empty()) {
                PlotSpec p;
                if (plot_kind == "phi") {
                    p.title = "Expected frequency counts";
                    p.y_label = "phi_j(t)";
                    for (int j = 1; j <= std::min(j_max, 4); ++j) {
                        Series s{"j=" + std::to_string(j), ts, {}, style_for(static_cast<std::size_t>(j - 1))};
                        for (double tv : ts) s.y.push_back(lik_phi(fit.q_hat, n_plus, j, tv));
                        p.series.push_back(std::move(s));
                    }
                } else {
                    p.title = "Generalized accumulation curves";
                    p.y_label = "species";
                    Series plus{"phi_plus", ts, {}, LineStyle::solid};
                    Series chao{"Chao", ts, {}, LineStyle::dashed};
                    for (double tv : ts) {
                        plus.y.push_back(lik_phi_plus(fit.q_hat, n_plus, tv));
                        chao.y.push_back(lik_chao(fit.q_hat, n_plus, tv).value);
                    }
                    p.series = {std::move(plus), std::move(chao)};
                }
                write_svg(plot, p);
            }
        } else if (*rarefy_cmd) {
            const auto fc = load(input);
            std::vector<std::int64_t> hs;
            for (std::int64_t h = h_step; h < fc.individuals(); h += h_step) hs.push_back(h);
            hs.push_back(fc.individuals());
            const auto curve = rarefaction_curve(fc, hs, rare_j_max);
            Table t{{"h", "j", "m_bar", "m_bar_plus"},
                    {},
                    json{{"n_plus", fc.n_plus()}, {"individuals", fc.individuals()}}};
            for (std::size_t i = 0; i < hs.size(); ++i)
                for (int j = 1; j <= curve.j_max; ++j)
                    t.rows.push_back(
                        {hs[i], std::int64_t{j}, curve.m_bar[i][static_cast<std::size_t>(j - 1)], curve.m_bar_plus[i]});
            emit(t, output, out);
            if (!plot.empty()) {
                PlotSpec p{"Rarefaction", "h", "m_bar_j(h)", {}};
                std::vector<double> xs(hs.begin(), hs.end());
                for (int j = 1; j <= std::min(curve.j_max, 4); ++j) {
                    Series s{"j=" + std::to_string(j), xs, {}, style_for(static_cast<std::size_t>(j - 1))};
                    for (std::size_t i = 0; i < hs.size(); ++i)
                        s.y.push_back(curve.m_bar[i][static_cast<std::size_t>(j - 1)]);
                    p.series.push_back(std::move(s));
                }
                write_svg(plot, p);
            }
        } else if (*boot_cmd) {
            const auto fc = load(input);
            boot.seed = resolve_seed(seed_flag);
            boot.solver = solver;
            const auto f = functional == "chao" ? Functional::chao : Functional::phi_plus;
            if (!(t_min > 0.0)) throw UsageError("--t-min must be positive");
            const auto ts = make_t_grid(t_min, t_max, boot_grid);
            BootstrapBand band;
            try {
                band = bootstrap_band(fc, f, ts, boot);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            for (const auto& w : band.warnings) warn(err, w);
            Table t{{"t", "estimate", "lower", "upper"},
                    {},
                    json{{"functional", to_string(f)},
                         {"replicates", band.replicates},
                         {"level", band.level},
                         {"seed", band.seed},
                         {"refit_failures", band.refit_failures},
                         {"unreliable", band.unreliable}}};
            for (std::size_t i = 0; i < ts.size(); ++i)
                t.rows.push_back({ts[i], band.estimate[i], band.lower[i], band.upper[i]});
            emit(t, output, out);
            if (!plot.empty()) {
                PlotSpec p{"Bootstrap band", "t", to_string(f), {}};
                p.series.push_back({"estimate", ts, band.estimate, LineStyle::solid});
                p.series.push_back({"lower", ts, band.lower, LineStyle::dotted});
                p.series.push_back({"upper", ts, band.upper, LineStyle::dotted});
                write_svg(plot, p);
            }
        } else if (*sim_cmd) {
            std::ifstream mf(mixture_path);
            if (!mf) throw UsageError("cannot open " + mixture_path);
            SimulationConfig cfg;
            cfg.s = species;
            cfg.theta = read_mixture(mf);
            cfg.t_end = t_end;
            cfg.seed = resolve_seed(seed_flag);
            if (h_multi > 0) {
                write_counts(out, simulate_multinomial(cfg, h_multi));
            } else {
                const auto r = simulate_counts(cfg);
                if (!r.counts) throw ValidationError("no species observed");
                write_counts(out, *r.counts);
            }
        } else if (*cmp_cmd) {
            const auto fc = load(input);
            const auto fit = fit_or_fail(fc, solver, err);
            const auto d = compare_estimates(fit, fc, cmp_j_max, step);
            Table t{{"quantity", "j", "value"}, {}, fit_meta(fit, fc)};
            for (int j = 1; j <= cmp_j_max; ++j)
                t.rows.push_back({std::string("delta"), std::int64_t{j}, d.delta[static_cast<std::size_t>(j - 1)]});
            for (int j = 1; j <= cmp_j_max; ++j)
                t.rows.push_back({std::string("D"), std::int64_t{j}, d.dee[static_cast<std::size_t>(j - 1)]});
            t.rows.push_back({std::string("gap_phi_plus"), std::int64_t{0}, d.gap_plus});
            t.rows.push_back({std::string("gap_chao"), std::int64_t{0}, d.gap_chao});
            emit(t, output, out);
        }
    } catch (const UsageError& e) {
        return fail(err, "usage", e.what(), usage);
    } catch (const ConvergenceError& e) {
        return fail(err, "nonconvergence", e.what(), nonconvergence);
    } catch (const DataError& e) {
        return fail(err, "data", e.what(), data);
    } catch (const DegenerateSupportError& e) {
        return fail(err, "data", e.what(), data);
    } catch (const std::domain_error& e) {
        return fail(err, "data", e.what(), data);
    } catch (const std::invalid_argument& e) {
        return fail(err, "usage", e.what(), usage);
    } catch (const std::exception& e) {
        return fail(err, "internal", e.what(), 1);
    }
    return ok;
}

}  // namespace accum::cli
