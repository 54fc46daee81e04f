#include "mse/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mse/config.hpp"
#include "mse/csv.hpp"
#include "mse/errors.hpp"
#include "mse/montecarlo.hpp"

namespace mse {

namespace {

namespace fs = std::filesystem;

DgpConfig parse_dgp(const Config& cfg) {
    DgpConfig dgp;
    const std::string design = cfg.get_string("dgp", "design", "linear");
    if (design == "linear") dgp.design = Design::Linear;
    else if (design == "nonlinear") dgp.design = Design::Nonlinear;
    else throw ConfigError("dgp.design must be 'linear' or 'nonlinear', got '" + design + "'");
    dgp.beta1 = cfg.get_number("dgp", "beta1", dgp.beta1);
    dgp.beta2 = cfg.get_number("dgp", "beta2", dgp.beta2);
    dgp.g01 = cfg.get_number("dgp", "gamma01", dgp.g01);
    dgp.g11 = cfg.get_number("dgp", "gamma11", dgp.g11);
    dgp.g00 = cfg.get_number("dgp", "gamma00", dgp.g00);
    dgp.g10 = cfg.get_number("dgp", "gamma10", dgp.g10);
    dgp.rho = cfg.get_number("dgp", "rho", dgp.rho);
    dgp.sigma_u = cfg.get_number("dgp", "sigma_u", dgp.sigma_u);
    dgp.error_scale = cfg.get_number("dgp", "error_scale", dgp.error_scale);
    if (!(std::abs(dgp.rho) < 1.0)) throw ConfigError("dgp.rho must satisfy |rho| < 1");
    if (!(dgp.sigma_u >= 0.0)) throw ConfigError("dgp.sigma_u must be nonnegative");
    return dgp;
}

GridSpec parse_grid(const Config& cfg) {
    const double lower = cfg.get_number("grid", "lower", -5.0);
    const double upper = cfg.get_number("grid", "upper", 5.0);
    const auto count = cfg.get_int("grid", "count", 5001);
    if (!(lower <= upper)) throw ConfigError("grid.lower must not exceed grid.upper");
    if (count < 1) throw ConfigError("grid.count must be at least 1");
    return GridSpec::uniform(lower, upper, static_cast<int>(count));
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError(what + ": expected a number, got '" + text + "'");
    return v;
}

std::int64_t parse_integer(const std::string& text, const std::string& what) {
    std::int64_t v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError(what + ": expected an integer, got '" + text + "'");
    return v;
}

StudyVariant parse_variant(const std::string& token) {
    if (token == "single") return StudyVariant::single_stage();
    if (token == "ols") return StudyVariant::two_stage_ols();
    const auto colon = token.find(':');
    const std::string family = token.substr(0, colon);
    if (family == "kernel2" || family == "kernel8") {
        if (colon == std::string::npos)
            throw ConfigError("variant '" + token + "' needs a bandwidth scale, e.g. '" +
                              family + ":0.8'");
        const double c = parse_number(token.substr(colon + 1), "variant '" + token + "'");
        if (!(c > 0.0)) throw ConfigError("variant '" + token + "': scale must be positive");
        return StudyVariant::two_stage_kernel(family == "kernel2"
                                                  ? KernelSpec::gaussian2(c)
                                                  : KernelSpec::multi_gauss8(c));
    }
    throw ConfigError("unknown variant '" + token +
                      "' (expected single, ols, kernel2:<c> or kernel8:<c>)");
}

std::string variant_family(const std::string& id) {
    const auto colon = id.find(':');
    return colon == std::string::npos ? id : id.substr(0, colon);
}

void write_summary_csv(const StudyResult& res, std::ostream& os) {
    os << "variant,N,c,bias,rmse,median,mean_ad,median_ad,reps_used\n";
    for (const SummaryRow& r : res.rows) {
        os << variant_family(r.variant) << ',' << r.n << ','
           << (r.c ? fmt_double(*r.c) : std::string{}) << ',' << fmt_double(r.bias)
           << ',' << fmt_double(r.rmse) << ',' << fmt_double(r.median) << ','
           << fmt_double(r.mean_ad) << ',' << fmt_double(r.median_ad) << ','
           << r.reps_used << "\n";
    }
}

void write_edf_csv(const StudyResult& res, std::ostream& os) {
    os << "variant,N,value,fraction\n";
    for (const EdfCurve& curve : res.curves)
        for (std::size_t r = 0; r < curve.values.size(); ++r)
            os << curve.variant << ',' << curve.n << ',' << fmt_double(curve.values[r])
               << ',' << fmt_double(curve.fractions[r]) << "\n";
}

void print_summary(const StudyResult& res) {
    std::printf("%-14s %6s %6s %9s %9s %9s %9s %10s %6s\n", "variant", "N", "c",
                "bias", "rmse", "median", "mean_ad", "median_ad", "reps");
    for (const SummaryRow& r : res.rows) {
        char cbuf[32] = "-";
        if (r.c) std::snprintf(cbuf, sizeof(cbuf), "%g", *r.c);
        std::printf("%-14s %6lld %6s %9.4f %9.4f %9.4f %9.4f %10.4f %6d\n",
                    variant_family(r.variant).c_str(), static_cast<long long>(r.n),
                    cbuf, r.bias, r.rmse, r.median, r.mean_ad, r.median_ad,
                    r.reps_used);
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
    return os;
}

// Composite Simpson rule with an even number of panels of width <= max_step.
double simpson(double lo, double hi, double max_step, const auto& f) {
    auto panels = static_cast<long>(std::ceil((hi - lo) / max_step));
    if (panels % 2 != 0) ++panels;
    const double h = (hi - lo) / static_cast<double>(panels);
    double acc = f(lo) + f(hi);
    for (long i = 1; i < panels; ++i)
        acc += f(lo + h * static_cast<double>(i)) * (i % 2 == 0 ? 2.0 : 4.0);
    return acc * h / 3.0;
}

int dispatch_errors(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_config_error;
    } catch (const EstimationError& e) {
        std::cerr << "estimation failed: " << e.what() << "\n";
        return exit_compute_error;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io_error;
    }
}

} // namespace

int cmd_simulate(const CliOptions& opt) {
    return dispatch_errors([&] {
        const Config cfg = Config::parse_file(opt.config_path);

        StudyConfig study;
        study.dgp = parse_dgp(cfg);
        study.grid = parse_grid(cfg);
        for (const std::string& tok : cfg.get_list("study", "sample_sizes")) {
            const auto n = parse_integer(tok, "study.sample_sizes");
            if (n < 1) throw ConfigError("study.sample_sizes entries must be positive");
            study.sample_sizes.push_back(static_cast<Eigen::Index>(n));
        }
        if (study.sample_sizes.empty())
            throw ConfigError("missing required key 'study.sample_sizes'");
        study.reps = static_cast<int>(cfg.get_int("study", "reps", 0));
        if (study.reps < 1) throw ConfigError("study.reps must be a positive integer");
        study.master_seed = opt.seed ? *opt.seed : cfg.get_u64("study", "seed", 1);
        study.trim_bound = cfg.get_number("study", "trim_bound", 1.95);
        study.threads = opt.threads;

        const std::vector<std::string> tokens = cfg.get_list("study", "variants");
        if (tokens.empty()) throw ConfigError("missing required key 'study.variants'");
        for (const std::string& tok : tokens) {
            StudyVariant v = parse_variant(tok);
            const std::string key = "trim_" + (v.kind == VariantKind::SingleStage
                                                   ? std::string("single")
                                                   : v.kind == VariantKind::TwoStageOLS
                                                         ? std::string("ols")
                                                         : std::string("kernel"));
            if (cfg.has("study", key))
                v.trim_override = cfg.get_bool("study", key, v.trimmed());
            study.variants.push_back(std::move(v));
        }
        cfg.ensure_all_consumed();

        const StudyResult res = run_study(study);

        fs::create_directories(opt.out_dir);
        {
            auto os = open_out(fs::path(opt.out_dir) / "summary.csv");
            write_summary_csv(res, os);
        }
        {
            auto os = open_out(fs::path(opt.out_dir) / "edf.csv");
            write_edf_csv(res, os);
        }
        print_summary(res);
        return exit_ok;
    });
}

int cmd_estimate(const std::string& dataset_path, const CliOptions& opt) {
    return dispatch_errors([&] {
        const Dataset data = read_dataset_csv_file(dataset_path);
        data.validate();
        const Config cfg = Config::parse_file(opt.config_path);
        const GridSpec grid = parse_grid(cfg);
        // the [dgp] section is legitimate here whether or not the method
        // needs it (method=single reads the analytic G from it)
        const DgpConfig dgp = parse_dgp(cfg);

        const std::string method = cfg.require_string("estimate", "method");
        const double trim_bound = cfg.get_number("estimate", "trim_bound", 1.95);
        const std::string trim_mode = cfg.get_string("estimate", "trim", "auto");
        if (trim_mode != "auto" && trim_mode != "on" && trim_mode != "off")
            throw ConfigError("estimate.trim must be auto, on or off");

        // auto trimming follows the study defaults: the infeasible
        // single-stage estimator keeps all observations, both two-stage
        // estimators trim.
        const auto trim_on = [&](bool default_on) {
            return trim_mode == "auto" ? default_on : trim_mode == "on";
        };

        std::optional<FirstStageConfig> fs_cfg;
        MaxScoreEstimate est;
        if (method == "single") {
            if (data.p() != 1 || data.q() != 1)
                throw ConfigError("estimate.method single needs scalar y and x");
            Eigen::MatrixXd g(data.n(), 1);
            for (Eigen::Index i = 0; i < data.n(); ++i)
                g(i, 0) = true_G(data.x(i, 0), dgp);
            Eigen::VectorXi tau(data.n());
            const bool trim = trim_on(false);
            for (Eigen::Index i = 0; i < data.n(); ++i)
                tau(i) = trim ? trim_indicator(data.x.row(i).transpose(), trim_bound) : 1;
            est = single_stage_estimate(data, g, tau, grid);
        } else {
            FirstStageConfig fc;
            if (method == "ols") {
                fc.method = FirstStageMethod::OLS;
            } else if (method == "kernel2" || method == "kernel8") {
                fc.method = FirstStageMethod::Kernel;
                const double c = cfg.get_number("estimate", "c", 0.0);
                if (!(c > 0.0))
                    throw ConfigError("estimate.c must be set to a positive bandwidth scale");
                fc.kernel = method == "kernel2" ? KernelSpec::gaussian2(c)
                                                : KernelSpec::multi_gauss8(c);
            } else {
                throw ConfigError("estimate.method must be single, ols, kernel2 or kernel8");
            }
            if (trim_on(true)) fc.trim_bound = trim_bound;
            fs_cfg = fc;
            est = two_stage_estimate(data, fc, grid);
        }

        const bool subsample_on = cfg.get_bool("estimate", "subsample", false);
        auto b_count = static_cast<int>(cfg.get_int("estimate", "subsample_b", 0));
        auto m = static_cast<int>(cfg.get_int("estimate", "subsample_m", 0));
        const double level = cfg.get_number("estimate", "level", 0.90);
        const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_u64("estimate", "seed", 1);
        cfg.ensure_all_consumed();

        std::optional<SubsamplingInterval> ci;
        if (subsample_on || b_count != 0) {
            if (!fs_cfg)
                throw ConfigError("subsampling requires a two-stage method (ols/kernel2/kernel8)");
            if (b_count == 0) b_count = 200;
            if (m == 0)
                m = static_cast<int>(std::ceil(
                    std::pow(static_cast<double>(data.n()), 2.0 / 3.0)));
            ci = subsampling_ci(data, *fs_cfg, grid, m, b_count, level, seed);
        }

        const Eigen::Index trimmed_out = data.n() - est.n_effective;
        std::printf("method: %s\n", method.c_str());
        std::printf("b11: %d\n", est.estimate.b11);
        for (Eigen::Index c = 0; c < est.estimate.btilde.size(); ++c)
            std::printf("btilde[%lld]: %s\n", static_cast<long long>(c),
                        fmt_double(est.estimate.btilde(c)).c_str());
        std::printf("score: %s\n", fmt_double(est.score_value).c_str());
        std::printf("argmax_set_size: %zu\n", est.argmax_set.size());
        std::printf("n_effective: %lld (trimmed out: %lld)\n",
                    static_cast<long long>(est.n_effective),
                    static_cast<long long>(trimmed_out));
        if (ci)
            for (Eigen::Index c = 0; c < ci->lower.size(); ++c)
                std::printf("subsampling %g%% CI for btilde[%lld]: [%s, %s]  (m=%d, B=%d)\n",
                            100.0 * ci->level, static_cast<long long>(c),
                            fmt_double(ci->lower(c)).c_str(),
                            fmt_double(ci->upper(c)).c_str(), ci->m, ci->b_count);

        nlohmann::json out{
            {"method", method},
            {"b11", est.estimate.b11},
            {"btilde", std::vector<double>(est.estimate.btilde.begin(),
                                           est.estimate.btilde.end())},
            {"score", est.score_value},
            {"argmax_set_size", est.argmax_set.size()},
            {"n_effective", est.n_effective},
            {"trimmed_out", trimmed_out},
        };
        if (ci) {
            out["subsampling"] = {
                {"level", ci->level},
                {"m", ci->m},
                {"B", ci->b_count},
                {"lower", std::vector<double>(ci->lower.begin(), ci->lower.end())},
                {"upper", std::vector<double>(ci->upper.begin(), ci->upper.end())},
            };
        }
        fs::create_directories(opt.out_dir);
        auto os = open_out(fs::path(opt.out_dir) / "estimate.json");
        os << out.dump(2) << "\n";
        return exit_ok;
    });
}

int cmd_kernelcheck() {
    return dispatch_errors([&] {
        const KernelSpec spec = KernelSpec::multi_gauss8(1.0);
        std::printf("eighth-order kernel, b_s = s^(-1/2)\n");
        std::printf("a = (%s, %s, %s, %s)\n", fmt_double(spec.a(0)).c_str(),
                    fmt_double(spec.a(1)).c_str(), fmt_double(spec.a(2)).c_str(),
                    fmt_double(spec.a(3)).c_str());

        double worst_residual = std::abs(spec.a.sum() - 1.0);
        std::printf("|sum a - 1|       = %s\n", fmt_double(worst_residual).c_str());
        for (int l = 1; l <= 3; ++l) {
            const double r =
                std::abs((spec.a.array() * spec.b.array().pow(2 * l)).sum());
            std::printf("|sum a b^%d|      = %s\n", 2 * l, fmt_double(r).c_str());
            worst_residual = std::max(worst_residual, r);
        }

        const double mass =
            simpson(-12.0, 12.0, 1e-3, [&](double u) { return eval_kernel8(u, spec); });
        const double sqrt_2pi = std::sqrt(2.0 * std::acos(-1.0));
        std::printf("integral K        = %s (target %s)\n", fmt_double(mass).c_str(),
                    fmt_double(sqrt_2pi).c_str());
        double worst_moment = 0.0;
        for (int l = 1; l <= 3; ++l) {
            const double m = simpson(-12.0, 12.0, 1e-3, [&](double u) {
                return std::pow(u, 2 * l) * eval_kernel8(u, spec);
            });
            std::printf("|integral u^%d K|  = %s\n", 2 * l, fmt_double(std::abs(m)).c_str());
            worst_moment = std::max(worst_moment, std::abs(m));
        }

        const bool ok = worst_residual < 1e-12 && worst_moment < 1e-6 &&
                        std::abs(mass - sqrt_2pi) < 1e-6;
        std::printf("status: %s\n", ok ? "ok" : "tolerance breach");
        return ok ? exit_ok : exit_compute_error;
    });
}

int cmd_export_dgp(const CliOptions& opt) {
    return dispatch_errors([&] {
        const Config cfg = Config::parse_file(opt.config_path);
        const DgpConfig dgp = parse_dgp(cfg);
        const auto n = cfg.get_int("export", "n", 0);
        if (n < 1) throw ConfigError("export.n must be a positive integer");
        const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_u64("export", "seed", 1);
        cfg.ensure_all_consumed();

        const Dataset data = draw_sample(dgp, static_cast<Eigen::Index>(n), seed);
        fs::create_directories(opt.out_dir);
        const fs::path path = fs::path(opt.out_dir) / "dataset.csv";
        write_dataset_csv_file(data, path.string());
        std::printf("wrote %lld observations to %s\n", static_cast<long long>(n),
                    path.string().c_str());
        return exit_ok;
    });
}

} // namespace mse
