// tropdiv: command-line front end for tropical division and network compression.

#include "tropdiv/tropdiv.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace tropdiv;

namespace {

struct Common {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string out;        // empty: stdout
    std::string manifest;   // empty: <out>.manifest.json when --out is given
};

struct SampleOptions {
    std::size_t count = 200;
    std::string csv;
    double scale = 1.0;
};

void emit(const Common& c, const json& result)
{
    if (c.out.empty())
        std::cout << result.dump(2) << '\n';
    else
        write_json_file(c.out, result);
}

void emit_manifest(const Common& c, const std::string& command, const json& config, double seconds,
                   const std::vector<std::string>& extra_outputs)
{
    std::string path = c.manifest;
    if (path.empty() && !c.out.empty()) path = c.out + ".manifest.json";
    if (path.empty()) return;
    json outputs = json::array();
    if (!c.out.empty()) outputs.push_back(c.out);
    for (const auto& o : extra_outputs)
        if (!o.empty()) outputs.push_back(o);
    write_json_file(path, {{"command", command},
                           {"config", config},
                           {"seed", c.seed},
                           {"jobs", c.jobs},
                           {"tolerance", ScalarTraits<double>::dedup_tol()},
                           {"seconds", seconds},
                           {"outputs", outputs}});
}

void write_trace(const std::string& path, const std::vector<double>& trace)
{
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "iteration,error\n";
    for (std::size_t t = 0; t < trace.size(); ++t) out << t + 1 << ',' << trace[t] << '\n';
}

/// First `count` rows of the CSV, or `count` Gaussian samples when no file is given.
std::vector<Vec<double>> load_samples(const SampleOptions& s, std::size_t dim, std::uint64_t seed)
{
    if (s.csv.empty()) return gaussian_samples(s.count, dim, seed, s.scale);
    auto rows = read_csv(s.csv);
    if (rows.size() > s.count) rows.resize(s.count);
    for (const auto& r : rows)
        if (r.size() != dim)
            throw std::invalid_argument(s.csv + ": samples have " + std::to_string(r.size()) + " columns, expected " +
                                        std::to_string(dim));
    return rows;
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--seed", c.seed, "Seed for all randomness");
    cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--out", c.out, "Output JSON (default stdout)");
    cmd->add_option("--manifest", c.manifest, "Run manifest path (default <out>.manifest.json)");
}

void add_samples(CLI::App* cmd, SampleOptions& s)
{
    cmd->add_option("--samples", s.count, "Number of samples (first rows of --samples-csv, else Gaussian draws)");
    cmd->add_option("--samples-csv", s.csv, "Sample points, one per row")->check(CLI::ExistingFile);
    cmd->add_option("--sample-scale", s.scale, "Standard deviation of Gaussian samples");
}

std::pair<int, int> parse_pair(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("class pair must look like 3,5");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

bool is_compressed(const json& j) { return j.contains("kind"); }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tropical polynomial division and network compression"};
    app.require_subcommand(1);
    Common common;
    SampleOptions samples;
    ApproxConfig acfg;
    std::string problem_path, trace_path;
    std::string mode = "rational";

    // divide-exact
    auto* exact = app.add_subcommand("divide-exact", "Exact quotient and remainder");
    add_common(exact, common);
    exact->add_option("problem", problem_path, "Problem JSON {dividend, divisor}")->required()->check(CLI::ExistingFile);
    exact->add_option("--mode", mode, "Arithmetic")->check(CLI::IsMember({"rational", "float"}));

    // divide-approx
    auto* approx = app.add_subcommand("divide-approx", "Sample-based approximate division");
    add_common(approx, common);
    add_samples(approx, samples);
    approx->add_option("problem", problem_path, "Problem JSON {dividend, divisor}")->required()->check(CLI::ExistingFile);
    approx->add_option("--terms", acfg.terms, "Quotient terms");
    approx->add_option("--iterations", acfg.max_iterations, "Iteration cap");
    approx->add_option("--restarts", acfg.restarts, "Random restarts, best kept");
    approx->add_option("--trace", trace_path, "CSV of (iteration, e(t)) for the best run");

    // divide-composite
    std::string composite_path, divisor_path, method = "maxout";
    FwConfig fw;
    auto* comp = app.add_subcommand("divide-composite", "Divide a sum of ReLU units");
    add_common(comp, common);
    add_samples(comp, samples);
    comp->add_option("dividend", composite_path, "Composite JSON {dim, units}")->required()->check(CLI::ExistingFile);
    comp->add_option("--divisor", divisor_path, "Simple divisor polynomial (default zero)")->check(CLI::ExistingFile);
    comp->add_option("--method", method, "maxout: clustering quotient; relu: composite quotient")
        ->check(CLI::IsMember({"maxout", "relu"}));
    comp->add_option("--terms", acfg.terms, "Quotient terms or units");
    comp->add_option("--iterations", acfg.max_iterations, "Iteration cap");
    comp->add_option("--restarts", acfg.restarts, "Random restarts (maxout)");
    comp->add_option("--rho", fw.rho, "Step size (relu)");
    comp->add_option("--trace", trace_path, "CSV of (iteration, value)");

    // compress
    std::string network_path, kind_name = "maxout-binary", classes, head_path, features_path;
    std::size_t subset = 90;
    bool random_control = false;
    auto* compress = app.add_subcommand("compress", "Compress a one-hidden-layer network");
    add_common(compress, common);
    add_samples(compress, samples);
    compress->add_option("network", network_path, "Network JSON")->required()->check(CLI::ExistingFile);
    compress->add_option("--kind", kind_name, "Model kind")
        ->check(CLI::IsMember({"maxout-binary", "relu-binary", "multiclass-simplified", "multiclass-multibinary"}));
    compress->add_option("--terms", acfg.terms, "Terms per quotient");
    compress->add_option("--iterations", acfg.max_iterations, "Iteration cap");
    compress->add_option("--restarts", acfg.restarts, "Random restarts per division");
    compress->add_option("--rho", fw.rho, "Step size for relu-binary");
    compress->add_option("--classes", classes, "Binary reduction of a multiclass net, e.g. 3,5");
    compress->add_option("--subset", subset, "Polynomials kept (multibinary)");
    compress->add_flag("--random-control", random_control, "Random vectors instead of quotients (multibinary)");
    compress->add_option("--head", head_path, "Trained head network to attach")->check(CLI::ExistingFile);
    compress->add_option("--features-out", features_path, "CSV of head features at the samples");

    // prune-l1
    std::size_t keep = 0, params = 0;
    std::string norm = "full";
    auto* prune = app.add_subcommand("prune-l1", "Structured L1 pruning of hidden units");
    add_common(prune, common);
    prune->add_option("network", network_path, "Network JSON")->required()->check(CLI::ExistingFile);
    auto* keep_opt = prune->add_option("--keep", keep, "Hidden units kept");
    auto* params_opt = prune->add_option("--params", params, "Target parameter count (sets --keep)");
    keep_opt->excludes(params_opt);
    prune->add_option("--norm", norm, "full: weights, bias and outgoing weights; incoming: weights only")
        ->check(CLI::IsMember({"full", "incoming"}));

    // evaluate
    std::string model_path, xs_path, labels_path;
    auto* eval = app.add_subcommand("evaluate", "Error rate of a network or compressed model");
    add_common(eval, common);
    eval->add_option("model", model_path, "Network or compressed model JSON")->required()->check(CLI::ExistingFile);
    eval->add_option("--samples-csv", xs_path, "Inputs")->required()->check(CLI::ExistingFile);
    eval->add_option("--labels", labels_path, "Labels CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--classes", classes, "Keep only these two classes, relabelled 1 and 0");

    // count-params
    std::string formula;
    std::size_t n_in = 0, hidden = 0, count_terms = 0;
    auto* count = app.add_subcommand("count-params", "Parameter count of a model or a formula");
    add_common(count, common);
    count->add_option("model", model_path, "Network or compressed model JSON")->check(CLI::ExistingFile);
    count->add_option("--formula", formula, "Count without a model file")
        ->check(CLI::IsMember({"maxout-binary", "original-binary", "dense"}));
    count->add_option("--n", n_in, "Input dimension");
    count->add_option("--hidden", hidden, "Hidden units");
    count->add_option("--terms", count_terms, "Terms per quotient");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", e.what()}, {"type", "usage"}}.dump() << '\n';
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    acfg.seed = common.seed;
    acfg.jobs = common.jobs;
    acfg.samples = samples.count;
    acfg.sample_scale = samples.scale;

    try {
        if (*exact) {
            const auto pj = read_json_file(problem_path);
            json result = mode == "rational" ? to_json(exact_divide(problem_from_json<Rational>(pj), common.jobs))
                                             : to_json(exact_divide(problem_from_json<double>(pj), common.jobs));
            emit(common, result);
            emit_manifest(common, "divide-exact", {{"problem", problem_path}, {"mode", mode}}, elapsed(), {});
        } else if (*approx) {
            auto prob = problem_from_json<double>(read_json_file(problem_path));
            auto xs = load_samples(samples, prob.dim(), common.seed);
            acfg.samples = xs.size();
            auto res = approx_divide(prob, acfg, xs);
            write_trace(trace_path, res.error_trace);
            emit(common, to_json(res));
            emit_manifest(common, "divide-approx",
                          {{"problem", problem_path}, {"terms", acfg.terms}, {"samples", xs.size()},
                           {"samples_csv", samples.csv}, {"iterations", acfg.max_iterations}, {"restarts", acfg.restarts}},
                          elapsed(), {trace_path});
        } else if (*comp) {
            auto p = composite_from_json<double>(read_json_file(composite_path));
            auto d = divisor_path.empty() ? TropicalPolynomial<double>::constant(p.dim, 0.0)
                                          : polynomial_from_json<double>(read_json_file(divisor_path));
            auto xs = load_samples(samples, p.dim, common.seed);
            acfg.samples = xs.size();
            json result;
            if (method == "maxout") {
                auto run = approx_divide_composite(p, d, acfg, xs);
                result = {{"quotient", to_json(TropicalPolynomial<double>(p.dim, run.terms))},
                          {"error_trace", run.error_trace},
                          {"iterations", run.iterations},
                          {"converged", run.converged}};
                write_trace(trace_path, run.error_trace);
            } else {
                if (!divisor_path.empty()) throw std::invalid_argument("--method relu divides by zero only");
                fw.terms = acfg.terms;
                fw.iterations = acfg.max_iterations;
                fw.seed = common.seed;
                auto res = composite_quotient_fw(p, xs, fw);
                result = {{"quotient", to_json(res.quotient)},
                          {"objective_trace", res.objective},
                          {"feasible_throughout", res.feasible_throughout}};
                write_trace(trace_path, res.objective);
            }
            emit(common, result);
            emit_manifest(common, "divide-composite",
                          {{"dividend", composite_path}, {"divisor", divisor_path}, {"method", method}, {"terms", acfg.terms},
                           {"samples", xs.size()}, {"iterations", acfg.max_iterations}},
                          elapsed(), {trace_path});
        } else if (*compress) {
            auto net = load_network(network_path);
            auto xs = load_samples(samples, net.input_dim, common.seed);
            acfg.samples = xs.size();
            const auto kind = parse_model_kind(kind_name);
            CompressedModel model;
            if (kind == ModelKind::maxout_binary || kind == ModelKind::relu_binary) {
                if (!classes.empty()) {
                    auto [i1, i2] = parse_pair(classes);
                    net = binary_reduce(net, i1, i2);
                }
                auto pair = to_tropical_pair(net);
                if (kind == ModelKind::maxout_binary) {
                    model = compress_binary_maxout(pair, xs, acfg);
                } else {
                    fw.terms = acfg.terms;
                    fw.iterations = acfg.max_iterations;
                    fw.seed = common.seed;
                    model = compress_binary_relu(pair, xs, fw, common.jobs);
                }
            } else if (kind == ModelKind::multiclass_simplified) {
                model = compress_multiclass(net, xs, {acfg.terms, acfg.max_iterations, common.seed, common.jobs});
            } else {
                MultibinaryConfig mb{acfg, subset, random_control, common.seed};
                model = compress_multibinary(net, xs, mb);
            }
            if (!head_path.empty()) {
                if (kind != ModelKind::multiclass_simplified && kind != ModelKind::multiclass_multibinary)
                    throw std::invalid_argument("--head applies to multiclass models only");
                auto head = load_network(head_path);
                if (head.input_dim != model.features(xs.at(0)).size())
                    throw std::invalid_argument("head expects " + std::to_string(head.input_dim) + " features, model gives " +
                                                std::to_string(model.features(xs.at(0)).size()));
                model.head = head;
            }
            if (!features_path.empty()) write_csv(features_path, export_features(model, xs));
            emit(common, to_json(model));
            emit_manifest(common, "compress",
                          {{"network", network_path}, {"kind", kind_name}, {"terms", acfg.terms}, {"samples", xs.size()},
                           {"samples_csv", samples.csv}, {"classes", classes}, {"subset", subset},
                           {"random_control", random_control}, {"head", head_path}},
                          elapsed(), {features_path});
        } else if (*prune) {
            auto net = load_network(network_path);
            if (params_opt->count()) keep = l1_width_for_params(net, params);
            if (!keep_opt->count() && !params_opt->count()) throw std::invalid_argument("give --keep or --params");
            auto pruned = l1_structured_prune(net, keep, norm == "full" ? L1Norm::full : L1Norm::incoming);
            auto j = to_json(pruned);
            j["param_count"] = count_params(pruned);
            emit(common, j);
            emit_manifest(common, "prune-l1", {{"network", network_path}, {"keep", keep}, {"norm", norm}}, elapsed(), {});
        } else if (*eval) {
            auto xs = read_csv(xs_path);
            auto ys = read_labels(labels_path);
            if (!classes.empty()) {
                auto [i1, i2] = parse_pair(classes);
                std::vector<Vec<double>> bx;
                std::vector<int> by;
                binary_subset(xs, ys, i1, i2, bx, by);
                xs = std::move(bx);
                ys = std::move(by);
            }
            const auto mj = read_json_file(model_path);
            const double err = is_compressed(mj) ? evaluate_error(compressed_from_json(mj), xs, ys)
                                                 : evaluate_error(network_from_json(mj), xs, ys);
            emit(common, {{"error", err}, {"samples", xs.size()}});
            emit_manifest(common, "evaluate", {{"model", model_path}, {"samples_csv", xs_path}, {"labels", labels_path}},
                          elapsed(), {});
        } else if (*count) {
            std::size_t k = 0;
            if (!model_path.empty()) {
                const auto mj = read_json_file(model_path);
                k = is_compressed(mj) ? count_params(compressed_from_json(mj)) : count_params(network_from_json(mj));
            } else if (formula == "maxout-binary") {
                k = 2 * count_terms * (n_in + 1) + 1;
            } else if (formula == "original-binary") {
                k = n_in * hidden + 2 * hidden + 1;
            } else if (formula == "dense") {
                k = dense_layer_params(n_in, hidden);
            } else {
                throw std::invalid_argument("give a model file or --formula");
            }
            emit(common, {{"params", k}});
            emit_manifest(common, "count-params", {{"model", model_path}, {"formula", formula}}, elapsed(), {});
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"type", "runtime"}}.dump() << '\n';
        return 1;
    }
    return 0;
}
