#include "maxprod/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxprod/image.hpp"
#include "maxprod/kernels.hpp"
#include "maxprod/operator.hpp"
#include "maxprod/orlicz.hpp"
#include "maxprod/series.hpp"

namespace maxprod::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsage = 2;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path.string());
    out << content;
    if (!out) throw DataError("failed writing output file: " + path.string());
}

// ----- run manifest ---------------------------------------------------------

class ManifestTimer {
public:
    double elapsed_ms() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const std::filesystem::path& anchor_output,
                    const std::string& subcommand, ordered_json parameters,
                    std::vector<std::string> inputs, std::vector<std::string> outputs,
                    const ManifestTimer& timer) {
    ordered_json manifest;
    manifest["subcommand"] = subcommand;
    manifest["parameters"] = std::move(parameters);
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["wall_time_ms"] = timer.elapsed_ms();
    const std::filesystem::path path = anchor_output.string() + ".manifest.json";
    write_text_file(path, manifest.dump(2) + "\n");
}

// ----- shared option parsing -------------------------------------------------

SigmoidalKernel require_kernel(const std::string& name) {
    const auto kernel = SigmoidalKernel::from_name(name);
    if (!kernel)
        throw CLI::ValidationError("--kernel",
                                   "unknown kernel '" + name +
                                       "' (expected logistic, tanh, or ramp)");
    return *kernel;
}

BoxDomain parse_domain_1d(const std::string& text) {
    const auto colon = text.find(':');
    double a = 0.0, b = 0.0;
    bool ok = colon != std::string::npos;
    if (ok) {
        try {
            size_t used = 0;
            a = std::stod(text.substr(0, colon), &used);
            ok = used == colon;
            b = std::stod(text.substr(colon + 1), &used);
            ok = ok && used == text.size() - colon - 1;
        } catch (...) {
            ok = false;
        }
    }
    if (!ok || !(a < b))
        throw CLI::ValidationError("--domain", "expected '<a>:<b>' with a < b");
    return BoxDomain::interval(a, b);
}

struct Metric {
    enum class Kind { Sup, Lp, Modular };
    Kind kind = Kind::Sup;
    double p = 1.0;
    std::optional<PhiFunction> phi;
    std::string token;
};

Metric parse_metric(const std::string& token) {
    Metric m;
    m.token = token;
    if (token == "sup") {
        m.kind = Metric::Kind::Sup;
        return m;
    }
    if (token == "l1" || token == "l2") {
        m.kind = Metric::Kind::Lp;
        m.p = token == "l1" ? 1.0 : 2.0;
        return m;
    }
    if (token.rfind("lp:", 0) == 0) {
        try {
            size_t used = 0;
            m.p = std::stod(token.substr(3), &used);
            if (used == token.size() - 3 && m.p >= 1.0) {
                m.kind = Metric::Kind::Lp;
                return m;
            }
        } catch (...) {
        }
    }
    if (token.rfind("mod:", 0) == 0) {
        m.phi = PhiFunction::parse(token.substr(4));
        if (m.phi) {
            m.kind = Metric::Kind::Modular;
            return m;
        }
    }
    throw CLI::ValidationError(
        "--metric", "unknown metric '" + token +
                        "' (expected sup, l1, l2, lp:<p>, or mod:<phi-spec>)");
}

double metric_value(const Metric& metric, const ScalarField& approximation,
                    const ScalarField& reference, double lambda) {
    switch (metric.kind) {
        case Metric::Kind::Sup:
            return sup_error(approximation, reference);
        case Metric::Kind::Lp:
            return lp_error(metric.p, approximation, reference);
        case Metric::Kind::Modular:
            return modular(*metric.phi, difference(approximation, reference), lambda)
                .value;
    }
    return 0.0;
}

std::function<double(double)> require_corpus_function(const std::string& name) {
    if (name == "square") return [](double x) { return x * x; };
    if (name == "sine")
        return [](double x) { return 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * x); };
    if (name == "abs") return [](double x) { return std::abs(x - 0.5); };
    if (name == "step") return [](double x) { return x < 0.5 ? 0.0 : 1.0; };
    throw CLI::ValidationError(
        "--f", "unknown function '" + name + "' (expected square, sine, abs, or step)");
}

EvalConfig make_eval_config(bool windowed, double epsilon, int quadrature_m) {
    EvalConfig cfg = windowed ? EvalConfig::windowed(epsilon) : EvalConfig::exact();
    cfg.quadrature_points = quadrature_m;
    return cfg;
}

ordered_json window_parameters(bool windowed, double epsilon) {
    ordered_json j;
    j["window"] = windowed ? "windowed" : "exact";
    if (windowed) j["epsilon"] = epsilon;
    return j;
}

// ----- subcommands -----------------------------------------------------------

struct KernelCheckOptions {
    std::string kernel_name;
    int samples = 2001;
    double range = 20.0;
    std::string report_path;
};

int run_kernel_check(const KernelCheckOptions& opt) {
    ManifestTimer timer;
    const SigmoidalKernel kernel = require_kernel(opt.kernel_name);
    const ConditionReport report =
        verify_sigma_conditions(kernel, opt.samples, opt.range);

    const double truncation = kernel.support_radius() ? 5.0 : 20.0;
    const double l1 = phi_l1_norm(kernel, truncation, 1e-3);

    std::ostringstream text;
    text << "kernel: " << kernel.name() << '\n'
         << report.to_text() << "phi(0): " << fmt17(kernel.phi(0.0)) << '\n'
         << "phi(2): " << fmt17(kernel.phi(2.0)) << '\n'
         << "phi_l1_estimate: " << fmt17(l1) << '\n';
    std::cout << text.str();

    ordered_json params;
    params["kernel"] = std::string(kernel.name());
    params["samples"] = opt.samples;
    params["range_radius"] = opt.range;
    if (!opt.report_path.empty()) {
        write_text_file(opt.report_path, text.str());
        write_manifest(opt.report_path, "kernel-check", params, {}, {opt.report_path},
                       timer);
    } else {
        ordered_json manifest;
        manifest["subcommand"] = "kernel-check";
        manifest["parameters"] = params;
        std::cout << manifest.dump(2) << '\n';
    }
    return report.all_passed() ? kExitOk : kExitDataError;
}

struct ApproxOptions {
    std::string function_name = "square";
    std::string kernel_name = "logistic";
    std::string domain_text = "0:1";
    int n = 13;
    int resolution = 201;
    int quadrature_m = 8;
    std::vector<std::string> metric_tokens = {"sup", "l1", "l2"};
    std::vector<double> lambdas = {1.0};
    bool windowed = false;
    double epsilon = 1e-9;
    std::string out_path;
};

int run_approx(const ApproxOptions& opt) {
    ManifestTimer timer;
    const SigmoidalKernel base = require_kernel(opt.kernel_name);
    const auto f = require_corpus_function(opt.function_name);
    const BoxDomain domain = parse_domain_1d(opt.domain_text);
    std::vector<Metric> metrics;
    for (const auto& token : opt.metric_tokens) metrics.push_back(parse_metric(token));

    const EvalConfig cfg = make_eval_config(opt.windowed, opt.epsilon, opt.quadrature_m);
    const CoefficientGrid coeffs =
        CoefficientGrid::from_function(f, opt.n, domain, cfg.quadrature_points);
    const ProductKernel kernel(base, 1);
    const ScalarField approximation = evaluate_grid(coeffs, kernel, {opt.resolution}, cfg);
    const ScalarField reference = sample_function(f, domain, opt.resolution);

    std::ostringstream csv;
    csv << "x,f,kn\n";
    for (long long i = 0; i < approximation.point_count(); ++i) {
        csv << fmt17(approximation.coordinate(0, static_cast<int>(i))) << ','
            << fmt17(reference.values[i]) << ',' << fmt17(approximation.values[i])
            << '\n';
    }
    write_text_file(opt.out_path, csv.str());

    std::cout << "approx f=" << opt.function_name << " kernel=" << base.name()
              << " n=" << opt.n << " coefficients=" << coeffs.indices().size() << '\n';
    for (const Metric& metric : metrics) {
        if (metric.kind == Metric::Kind::Modular) {
            for (double lambda : opt.lambdas)
                std::cout << "  " << metric.token << " lambda=" << lambda << " error="
                          << fmt17(metric_value(metric, approximation, reference, lambda))
                          << '\n';
        } else {
            std::cout << "  " << metric.token << " error="
                      << fmt17(metric_value(metric, approximation, reference, 1.0))
                      << '\n';
        }
    }

    ordered_json params = window_parameters(opt.windowed, opt.epsilon);
    params["f"] = opt.function_name;
    params["kernel"] = std::string(base.name());
    params["domain"] = opt.domain_text;
    params["n"] = opt.n;
    params["resolution"] = opt.resolution;
    params["quadrature_m"] = opt.quadrature_m;
    params["metrics"] = opt.metric_tokens;
    params["lambdas"] = opt.lambdas;
    write_manifest(opt.out_path, "approx", params, {}, {opt.out_path}, timer);
    return kExitOk;
}

struct ModelOptions {
    std::string csv_path;
    std::string kernel_name = "logistic";
    bool include_endpoint = false;
    int resolution = 500;
    bool windowed = false;
    double epsilon = 1e-9;
    std::string out_path;
};

int run_model(const ModelOptions& opt) {
    ManifestTimer timer;
    const SigmoidalKernel base = require_kernel(opt.kernel_name);
    const Series series = load_series_csv(opt.csv_path);
    const SeriesCoefficients coeffs = series_to_coefficients(series, opt.include_endpoint);
    const int n = coeffs.grid.indices().n();

    const EvalConfig cfg =
        make_eval_config(opt.windowed, opt.epsilon, EvalConfig{}.quadrature_points);
    const ProductKernel kernel(base, 1);
    const ScalarField curve = evaluate_grid(coeffs.grid, kernel, {opt.resolution}, cfg);

    std::ostringstream csv;
    csv << "x,value\n";
    for (long long i = 0; i < curve.point_count(); ++i) {
        csv << fmt17(curve.coordinate(0, static_cast<int>(i))) << ','
            << fmt17(curve.values[i]) << '\n';
    }
    write_text_file(opt.out_path, csv.str());

    std::cout << "model n=" << n << " kernel=" << base.name()
              << " endpoint=" << (opt.include_endpoint ? "included" : "excluded")
              << " shift=" << fmt17(coeffs.grid.shift()) << '\n';
    std::cout << "  k,node,label,input,coefficient\n";
    const long long grid_size = coeffs.grid.indices().size();
    for (long long k = 0; k < grid_size; ++k) {
        std::cout << "  " << k << ',' << fmt17(static_cast<double>(k) / n) << ','
                  << series.labels[static_cast<size_t>(k)] << ','
                  << fmt17(series.values[static_cast<size_t>(k)]) << ','
                  << fmt17(coeffs.grid.values()[static_cast<size_t>(k)]) << '\n';
    }
    if (coeffs.unused_trailing > 0)
        std::cout << "  note: last " << coeffs.unused_trailing
                  << " datum unused (lattice has n cells); pass --include-endpoint to map it"
                  << '\n';

    ordered_json params = window_parameters(opt.windowed, opt.epsilon);
    params["kernel"] = std::string(base.name());
    params["n"] = n;
    params["include_endpoint"] = opt.include_endpoint;
    params["resolution"] = opt.resolution;
    params["shift"] = coeffs.grid.shift();
    write_manifest(opt.out_path, "model", params, {opt.csv_path}, {opt.out_path}, timer);
    return kExitOk;
}

struct ImageOptions {
    std::string in_path;
    std::string kernel_name = "logistic";
    int n = 5;
    std::string size_text;  // "WxH"; empty = input size
    bool exact = false;
    double epsilon = 1e-9;
    std::string out_path;
};

int run_image(const ImageOptions& opt) {
    ManifestTimer timer;
    const SigmoidalKernel base = require_kernel(opt.kernel_name);
    const GrayImage input = load_pgm(opt.in_path);

    int out_width = input.width;
    int out_height = input.height;
    if (!opt.size_text.empty()) {
        const auto x = opt.size_text.find('x');
        bool ok = x != std::string::npos;
        if (ok) {
            try {
                size_t used = 0;
                out_width = std::stoi(opt.size_text.substr(0, x), &used);
                ok = used == x;
                out_height = std::stoi(opt.size_text.substr(x + 1), &used);
                ok = ok && used == opt.size_text.size() - x - 1;
            } catch (...) {
                ok = false;
            }
        }
        if (!ok || out_width < 2 || out_height < 2)
            throw CLI::ValidationError("--size", "expected '<width>x<height>', each >= 2");
    }

    const CoefficientGrid coeffs = image_to_coefficients(input, opt.n);
    const ProductKernel kernel(base, 2);
    const EvalConfig cfg =
        make_eval_config(!opt.exact, opt.epsilon, EvalConfig{}.quadrature_points);
    const ScalarField field = evaluate_grid(coeffs, kernel, {out_width, out_height}, cfg);
    const QuantizedField rendered = field_to_image(field, input.maxval);
    save_pgm(rendered.image, opt.out_path, PgmFormat::Binary);

    std::cout << "image " << input.width << 'x' << input.height << " -> " << out_width
              << 'x' << out_height << " n=" << opt.n << " kernel=" << base.name()
              << " clamped=" << rendered.clamped_count << '\n';

    ordered_json params = window_parameters(!opt.exact, opt.epsilon);
    params["kernel"] = std::string(base.name());
    params["n"] = opt.n;
    params["size"] = std::to_string(out_width) + "x" + std::to_string(out_height);
    params["maxval"] = input.maxval;
    write_manifest(opt.out_path, "image", params, {opt.in_path}, {opt.out_path}, timer);
    return kExitOk;
}

struct ConvergeOptions {
    std::string function_name = "square";
    std::string kernel_name = "logistic";
    std::string domain_text = "0:1";
    std::vector<int> n_list;
    int resolution = 201;
    int quadrature_m = 8;
    std::vector<std::string> metric_tokens = {"sup", "l1"};
    std::vector<double> lambdas = {1.0};
    bool windowed = false;
    double epsilon = 1e-9;
    std::string out_path;
};

int run_converge(const ConvergeOptions& opt) {
    ManifestTimer timer;
    const SigmoidalKernel base = require_kernel(opt.kernel_name);
    const auto f = require_corpus_function(opt.function_name);
    const BoxDomain domain = parse_domain_1d(opt.domain_text);
    if (opt.n_list.empty())
        throw CLI::ValidationError("--n", "need at least one n value");
    for (size_t i = 1; i < opt.n_list.size(); ++i) {
        if (opt.n_list[i] <= opt.n_list[i - 1])
            throw CLI::ValidationError("--n", "n list must be strictly ascending");
    }
    std::vector<Metric> metrics;
    for (const auto& token : opt.metric_tokens) metrics.push_back(parse_metric(token));

    const EvalConfig cfg = make_eval_config(opt.windowed, opt.epsilon, opt.quadrature_m);
    const ProductKernel kernel(base, 1);
    const ScalarField reference = sample_function(f, domain, opt.resolution);

    std::ostringstream csv;
    csv << "n,kernel,metric,lambda,value\n";
    for (int n : opt.n_list) {
        const CoefficientGrid coeffs =
            CoefficientGrid::from_function(f, n, domain, cfg.quadrature_points);
        const ScalarField approximation =
            evaluate_grid(coeffs, kernel, {opt.resolution}, cfg);
        for (const Metric& metric : metrics) {
            const std::vector<double> lambdas =
                metric.kind == Metric::Kind::Modular ? opt.lambdas
                                                     : std::vector<double>{1.0};
            for (double lambda : lambdas) {
                csv << n << ',' << base.name() << ',' << metric.token << ','
                    << fmt17(lambda) << ','
                    << fmt17(metric_value(metric, approximation, reference, lambda))
                    << '\n';
            }
        }
    }
    write_text_file(opt.out_path, csv.str());
    std::cout << "converge f=" << opt.function_name << " kernel=" << base.name()
              << " rows written to " << opt.out_path << '\n';

    ordered_json params = window_parameters(opt.windowed, opt.epsilon);
    params["f"] = opt.function_name;
    params["kernel"] = std::string(base.name());
    params["domain"] = opt.domain_text;
    params["n"] = opt.n_list;
    params["resolution"] = opt.resolution;
    params["quadrature_m"] = opt.quadrature_m;
    params["metrics"] = opt.metric_tokens;
    params["lambdas"] = opt.lambdas;
    write_manifest(opt.out_path, "converge", params, {}, {opt.out_path}, timer);
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"max-product Kantorovich sampling operators: kernel checks, "
                 "function approximation, series modeling, image resampling, "
                 "and convergence studies"};
    app.require_subcommand(1);

    KernelCheckOptions kernel_check;
    auto* kc = app.add_subcommand("kernel-check",
                                  "verify kernel admissibility conditions");
    kc->add_option("--kernel", kernel_check.kernel_name, "logistic|tanh|ramp")
        ->required();
    kc->add_option("--samples", kernel_check.samples, "sample count (>= 100)");
    kc->add_option("--range", kernel_check.range, "sample range radius");
    kc->add_option("--report", kernel_check.report_path, "write the report to a file");

    ApproxOptions approx;
    auto* ap = app.add_subcommand("approx", "approximate a built-in function");
    ap->add_option("--f", approx.function_name, "square|sine|abs|step");
    ap->add_option("--kernel", approx.kernel_name, "logistic|tanh|ramp");
    ap->add_option("--domain", approx.domain_text, "interval '<a>:<b>'");
    ap->add_option("--n", approx.n, "lattice density")->required();
    ap->add_option("--resolution", approx.resolution, "output samples (>= 2)");
    ap->add_option("--m", approx.quadrature_m, "quadrature nodes per axis");
    ap->add_option("--metric", approx.metric_tokens,
                   "sup|l1|l2|lp:<p>|mod:<phi-spec> (repeatable)")
        ->delimiter(',');
    ap->add_option("--lambda", approx.lambdas, "modular scaling (repeatable)")
        ->delimiter(',');
    ap->add_flag("--windowed", approx.windowed, "windowed evaluation");
    ap->add_option("--epsilon", approx.epsilon, "windowed deviation bound");
    ap->add_option("--out", approx.out_path, "output CSV path")->required();

    ModelOptions model;
    auto* mo = app.add_subcommand("model", "model a CSV series");
    mo->add_option("--csv", model.csv_path, "input series CSV")->required();
    mo->add_option("--kernel", model.kernel_name, "logistic|tanh|ramp");
    mo->add_flag("--include-endpoint", model.include_endpoint,
                 "extend the lattice so the final datum maps to node 1");
    mo->add_option("--resolution", model.resolution, "curve samples (>= 2)");
    mo->add_flag("--windowed", model.windowed, "windowed evaluation");
    mo->add_option("--epsilon", model.epsilon, "windowed deviation bound");
    mo->add_option("--out", model.out_path, "output CSV path")->required();

    ImageOptions image;
    auto* im = app.add_subcommand("image", "reconstruct or enlarge a PGM image");
    im->add_option("--in", image.in_path, "input PGM (P2 or P5)")->required();
    im->add_option("--kernel", image.kernel_name, "logistic|tanh|ramp");
    im->add_option("--n", image.n, "lattice density (<= min(width,height))")
        ->required();
    im->add_option("--size", image.size_text, "output '<width>x<height>'");
    im->add_flag("--exact", image.exact, "disable windowed evaluation");
    im->add_option("--epsilon", image.epsilon, "windowed deviation bound");
    im->add_option("--out", image.out_path, "output PGM path")->required();

    ConvergeOptions converge;
    auto* co = app.add_subcommand("converge", "error table over an n sweep");
    co->add_option("--f", converge.function_name, "square|sine|abs|step");
    co->add_option("--kernel", converge.kernel_name, "logistic|tanh|ramp");
    co->add_option("--domain", converge.domain_text, "interval '<a>:<b>'");
    co->add_option("--n", converge.n_list, "ascending n list (repeatable)")
        ->delimiter(',')
        ->required();
    co->add_option("--resolution", converge.resolution, "grid samples (>= 2)");
    co->add_option("--m", converge.quadrature_m, "quadrature nodes per axis");
    co->add_option("--metric", converge.metric_tokens,
                   "sup|l1|l2|lp:<p>|mod:<phi-spec> (repeatable)")
        ->delimiter(',');
    co->add_option("--lambda", converge.lambdas, "modular scaling (repeatable)")
        ->delimiter(',');
    co->add_flag("--windowed", converge.windowed, "windowed evaluation");
    co->add_option("--epsilon", converge.epsilon, "windowed deviation bound");
    co->add_option("--out", converge.out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(kc)) return run_kernel_check(kernel_check);
        if (app.got_subcommand(ap)) return run_approx(approx);
        if (app.got_subcommand(mo)) return run_model(model);
        if (app.got_subcommand(im)) return run_image(image);
        if (app.got_subcommand(co)) return run_converge(converge);
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("maxprod");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace maxprod::cli
