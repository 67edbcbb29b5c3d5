#pragma once

/**
 * @file compress.hpp
 * @brief Network compression through tropical division.
 *
 * A one-hidden-layer ReLU net with scalar output is p1(x) - p2(x) + beta2 with
 * composite p1, p2.  Each p_l is reduced to the span of its unit vectors, divided
 * by zero there, and the quotient is folded back to input coordinates so the
 * compressed model stores only input-space terms.
 */

#include "tropdiv/approx_division.hpp"
#include "tropdiv/composite.hpp"
#include "tropdiv/json_io.hpp"
#include "tropdiv/network.hpp"
#include "tropdiv/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tropdiv {

struct TropicalPair {
    CompositePolynomial<double> p1;  ///< units with positive output weight
    CompositePolynomial<double> p2;  ///< units with negative output weight (magnitudes)
    double beta2 = 0;

    double eval(const Vec<double>& x) const { return p1.eval(x) - p2.eval(x) + beta2; }
};

/// Splits a scalar-output net by the sign of its output weights.
inline TropicalPair to_tropical_pair(const NetworkSpec& net)
{
    net.require_single_hidden();
    const auto& L1 = net.layers[0];
    const auto& L2 = net.layers[1];
    if (L2.out() != 1) throw std::invalid_argument("to_tropical_pair: output layer must have one unit");
    const std::size_t n = net.input_dim;
    std::vector<TropicalTerm<double>> pos, neg;
    for (Eigen::Index v = 0; v < L1.out(); ++v) {
        const double w = L2.W(0, v);
        if (w == 0) continue;
        const double mag = std::abs(w);
        Vec<double> a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = mag * L1.W(v, static_cast<Eigen::Index>(k));
        TropicalTerm<double> t{std::move(a), MaxPlus<double>(mag * L1.b(v))};
        (w > 0 ? pos : neg).push_back(std::move(t));
    }
    return {CompositePolynomial<double>(n, pos), CompositePolynomial<double>(n, neg), L2.b(0)};
}

/// Two-class head: output row w_{i1} - w_{i2}, bias b_{i1} - b_{i2}.
inline NetworkSpec binary_reduce(const NetworkSpec& net, int i1, int i2)
{
    net.require_single_hidden();
    const auto K = net.layers[1].out();
    if (i1 == i2) throw std::invalid_argument("binary_reduce: classes must differ");
    if (i1 < 0 || i2 < 0 || i1 >= K || i2 >= K) throw std::invalid_argument("binary_reduce: class index out of range");
    NetworkSpec out = net;
    auto& L2 = out.layers[1];
    Eigen::MatrixXd W = net.layers[1].W.row(i1) - net.layers[1].W.row(i2);
    Eigen::VectorXd b(1);
    b(0) = net.layers[1].b(i1) - net.layers[1].b(i2);
    L2.W = W;
    L2.b = b;
    return out;
}

/// Logits shifted by the sum of all negative parts: z~_k = sum_i wbar_ki max(z1_i, 0) + b_k.
struct MulticlassForm {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    std::vector<Vec<double>> wbar;  ///< K rows of length M, all entries >= 0
    Vec<double> offsets;            ///< b_k

    Eigen::VectorXd hidden_pre(const Vec<double>& x) const
    {
        return W1 * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) + b1;
    }

    Eigen::VectorXd eval(const Vec<double>& x) const
    {
        const Eigen::VectorXd h = hidden_pre(x).cwiseMax(0.0);
        Eigen::VectorXd z(static_cast<Eigen::Index>(wbar.size()));
        for (std::size_t k = 0; k < wbar.size(); ++k) z(static_cast<Eigen::Index>(k)) = to_eigen(wbar[k]).dot(h) + offsets[k];
        return z;
    }
};

inline MulticlassForm multiclass_common_denominator(const NetworkSpec& net)
{
    net.require_single_hidden();
    const auto& W2 = net.layers[1].W;
    const auto K = W2.rows(), M = W2.cols();
    MulticlassForm f;
    f.W1 = net.layers[0].W;
    f.b1 = net.layers[0].b;
    Eigen::VectorXd negsum = Eigen::VectorXd::Zero(M);
    for (Eigen::Index k = 0; k < K; ++k) negsum += (-W2.row(k)).cwiseMax(0.0).transpose();
    for (Eigen::Index k = 0; k < K; ++k) {
        // own positive part plus the negative parts of every other class
        Eigen::VectorXd w = W2.row(k).cwiseMax(0.0).transpose() + negsum - (-W2.row(k)).cwiseMax(0.0).transpose();
        f.wbar.push_back(from_eigen(w));
        f.offsets.push_back(net.layers[1].b(k));
    }
    return f;
}

/// p(x) = reduced(Q^T x) with Q an orthonormal basis of span{a_v}.
struct QrReduction {
    Eigen::MatrixXd Q;  ///< n x r
    CompositePolynomial<double> reduced;

    Vec<double> project(const Vec<double>& x) const { return from_eigen(Q.transpose() * to_eigen(x)); }

    /// Input-space term of a reduced-space term (a^ -> Q a^).
    TropicalTerm<double> lift(const TropicalTerm<double>& t) const { return {from_eigen(Q * to_eigen(t.a)), t.b}; }
};

inline QrReduction qr_reduce(const CompositePolynomial<double>& p, double rank_tol = 1e-10)
{
    if (p.units.empty()) throw std::invalid_argument("qr_reduce: no units");
    const auto n = static_cast<Eigen::Index>(p.dim), N = static_cast<Eigen::Index>(p.units.size());
    Eigen::MatrixXd A(n, N);
    for (Eigen::Index v = 0; v < N; ++v) A.col(v) = to_eigen(p.units[static_cast<std::size_t>(v)].a);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(rank_tol);
    const auto r = std::max<Eigen::Index>(qr.rank(), 1);
    QrReduction out;
    out.Q = Eigen::MatrixXd(qr.householderQ()).leftCols(r);
    std::vector<TropicalTerm<double>> units;
    for (const auto& u : p.units) units.push_back({from_eigen(out.Q.transpose() * to_eigen(u.a)), u.b});
    out.reduced = CompositePolynomial<double>(static_cast<std::size_t>(r), std::move(units));
    return out;
}

// ---------------------------------------------------------------------------

enum class ModelKind { maxout_binary, relu_binary, multiclass_simplified, multiclass_multibinary };

inline std::string to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::maxout_binary: return "maxout-binary";
    case ModelKind::relu_binary: return "relu-binary";
    case ModelKind::multiclass_simplified: return "multiclass-simplified";
    case ModelKind::multiclass_multibinary: return "multiclass-multibinary";
    }
    return "?";
}

inline ModelKind parse_model_kind(const std::string& s)
{
    for (auto k : {ModelKind::maxout_binary, ModelKind::relu_binary, ModelKind::multiclass_simplified,
                   ModelKind::multiclass_multibinary})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown model kind: " + s);
}

inline double max_of_terms(const TropicalPolynomial<double>& q, const Vec<double>& x) { return q.eval(x).value(); }

struct CompressedModel {
    ModelKind kind = ModelKind::maxout_binary;
    std::size_t input_dim = 0;
    std::vector<TropicalPolynomial<double>> maxout;   ///< binary: {q1, q2}; multiclass: one per class or per feature
    std::vector<CompositePolynomial<double>> relu;    ///< relu-binary: {q1, q2}
    double beta2 = 0;
    Vec<double> offsets;                              ///< multiclass-simplified without head
    std::optional<NetworkSpec> head;
    std::vector<std::pair<int, int>> pairs;           ///< multibinary: class pair of each stored polynomial
    std::vector<std::vector<double>> error_traces;    ///< e(t) or FW objective per division

    /// Head inputs: every term value (simplified) or every polynomial value (multibinary).
    Vec<double> features(const Vec<double>& x) const
    {
        Vec<double> f;
        if (kind == ModelKind::multiclass_simplified) {
            for (const auto& q : maxout)
                for (const auto& t : q.terms()) f.push_back(dot(t.a, x) + t.b.value());
        } else if (kind == ModelKind::multiclass_multibinary) {
            for (const auto& q : maxout) f.push_back(max_of_terms(q, x));
        } else {
            throw std::logic_error("features: binary models have no head features");
        }
        return f;
    }

    Eigen::VectorXd logits(const Vec<double>& x) const
    {
        if (x.size() != input_dim) throw std::invalid_argument("CompressedModel: input dimension mismatch");
        Eigen::VectorXd out(1);
        switch (kind) {
        case ModelKind::maxout_binary:
            out(0) = max_of_terms(maxout.at(0), x) - max_of_terms(maxout.at(1), x) + beta2;
            return out;
        case ModelKind::relu_binary:
            out(0) = relu.at(0).eval(x) - relu.at(1).eval(x) + beta2;
            return out;
        case ModelKind::multiclass_simplified:
            if (head) return head->logits(features(x));
            out.resize(static_cast<Eigen::Index>(maxout.size()));
            for (std::size_t k = 0; k < maxout.size(); ++k) out(static_cast<Eigen::Index>(k)) = max_of_terms(maxout[k], x) + offsets.at(k);
            return out;
        case ModelKind::multiclass_multibinary:
            if (!head) throw std::logic_error("multibinary model needs a trained head to classify");
            return head->logits(features(x));
        }
        return out;
    }
};

/// Stored parameters: n+1 per input-space term or unit, plus the output bias
/// (binary), class offsets (simplified without head) and the head network.
inline std::size_t count_params(const CompressedModel& m)
{
    const std::size_t per = m.input_dim + 1;
    std::size_t k = 0;
    for (const auto& q : m.maxout) k += q.size() * per;
    for (const auto& q : m.relu) k += q.size() * per;
    switch (m.kind) {
    case ModelKind::maxout_binary:
    case ModelKind::relu_binary: k += 1; break;
    case ModelKind::multiclass_simplified:
        if (!m.head) k += m.offsets.size();
        break;
    case ModelKind::multiclass_multibinary: break;
    }
    if (m.head) k += count_params(*m.head);
    return k;
}

/// Hidden-layer parameters N(n+1) plus the scalar output bias, the convention
/// used for the dense layer of a convolutional net.
inline std::size_t dense_layer_params(std::size_t n, std::size_t N) { return N * (n + 1) + 1; }

inline json to_json(const CompressedModel& m)
{
    json j{{"kind", to_string(m.kind)}, {"input_dim", m.input_dim}, {"beta2", m.beta2}};
    json polys = json::array();
    for (const auto& q : m.maxout) polys.push_back(to_json(q));
    j["maxout"] = polys;
    json units = json::array();
    for (const auto& q : m.relu) units.push_back(to_json(q));
    j["relu"] = units;
    j["offsets"] = m.offsets;
    json pairs = json::array();
    for (auto [a, b] : m.pairs) pairs.push_back({a, b});
    j["pairs"] = pairs;
    if (m.head) j["head"] = to_json(*m.head);
    j["error_traces"] = m.error_traces;
    j["param_count"] = count_params(m);
    return j;
}

inline CompressedModel compressed_from_json(const json& j)
{
    CompressedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.beta2 = j.value("beta2", 0.0);
    for (const auto& q : j.value("maxout", json::array())) m.maxout.push_back(polynomial_from_json<double>(q));
    for (const auto& q : j.value("relu", json::array())) m.relu.push_back(composite_from_json<double>(q));
    m.offsets = j.value("offsets", std::vector<double>{});
    for (const auto& p : j.value("pairs", json::array())) m.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    if (j.contains("head")) m.head = network_from_json(j.at("head"));
    m.error_traces = j.value("error_traces", std::vector<std::vector<double>>{});
    for (const auto& q : m.maxout)
        if (q.dim() != m.input_dim) throw std::invalid_argument("compressed model: polynomial dimension mismatch");
    for (const auto& q : m.relu)
        if (q.dim != m.input_dim) throw std::invalid_argument("compressed model: composite dimension mismatch");
    const std::size_t need = m.kind == ModelKind::relu_binary ? 0 : 2;
    if ((m.kind == ModelKind::maxout_binary && m.maxout.size() != need) || (m.kind == ModelKind::relu_binary && m.relu.size() != 2))
        throw std::invalid_argument("compressed model: binary models need two polynomials");
    return m;
}

// ---------------------------------------------------------------------------

/// Maxout quotient of one composite: divide by zero in the reduced space, fold back.
inline std::pair<TropicalPolynomial<double>, std::vector<double>> maxout_quotient(const CompositePolynomial<double>& p,
                                                                                    const std::vector<Vec<double>>& xs,
                                                                                    const ApproxConfig& cfg)
{
    if (p.units.empty()) return {TropicalPolynomial<double>::constant(p.dim, 0.0), {}};
    auto red = qr_reduce(p);
    std::vector<Vec<double>> xr;
    for (const auto& x : xs) xr.push_back(red.project(x));
    auto run = approx_divide_composite(red.reduced, TropicalPolynomial<double>::constant(red.reduced.dim, 0.0), cfg, xr);
    std::vector<TropicalTerm<double>> terms;
    for (const auto& t : run.terms) terms.push_back(red.lift(t));
    return {TropicalPolynomial<double>(p.dim, std::move(terms)), run.error_trace};
}

inline CompressedModel compress_binary_maxout(const TropicalPair& pair, const std::vector<Vec<double>>& xs,
                                              const ApproxConfig& cfg)
{
    CompressedModel m;
    m.kind = ModelKind::maxout_binary;
    m.input_dim = pair.p1.dim;
    m.beta2 = pair.beta2;
    m.maxout.resize(2, TropicalPolynomial<double>::neg_inf(m.input_dim));
    m.error_traces.resize(2);
    ApproxConfig inner = cfg;
    inner.jobs = 1;
    parallel_for(2, cfg.jobs, [&](std::size_t l) {
        auto [q, trace] = maxout_quotient(l == 0 ? pair.p1 : pair.p2, xs, inner);
        m.maxout[l] = std::move(q);
        m.error_traces[l] = std::move(trace);
    });
    return m;
}

inline CompressedModel compress_binary_relu(const TropicalPair& pair, const std::vector<Vec<double>>& xs, const FwConfig& cfg,
                                            unsigned jobs = 1)
{
    CompressedModel m;
    m.kind = ModelKind::relu_binary;
    m.input_dim = pair.p1.dim;
    m.beta2 = pair.beta2;
    m.relu.resize(2);
    m.error_traces.resize(2);
    parallel_for(2, jobs, [&](std::size_t l) {
        const auto& p = l == 0 ? pair.p1 : pair.p2;
        if (p.units.empty()) {
            m.relu[l] = CompositePolynomial<double>(p.dim, {});
            return;
        }
        auto red = qr_reduce(p);
        if (red.reduced.size() != red.reduced.dim)
            throw std::invalid_argument("compress_binary_relu: unit vectors are linearly dependent");
        std::vector<Vec<double>> xr;
        for (const auto& x : xs) xr.push_back(red.project(x));
        auto res = composite_quotient_fw(red.reduced, xr, cfg);
        std::vector<TropicalTerm<double>> units;
        for (const auto& u : res.quotient.units) units.push_back(red.lift(u));
        m.relu[l] = CompositePolynomial<double>(p.dim, std::move(units));
        m.error_traces[l] = res.objective;
    });
    return m;
}

struct MulticlassConfig {
    std::size_t terms = 3;
    std::size_t iterations = 20;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// Per class k: terms a^_l in [0, wbar_k] on the hidden pre-activations,
/// folded to input space as (W1^T a^, a^^T b1).
inline CompressedModel compress_multiclass(const NetworkSpec& net, const std::vector<Vec<double>>& xs,
                                           const MulticlassConfig& cfg)
{
    auto form = multiclass_common_denominator(net);
    std::vector<Vec<double>> zs;
    for (const auto& x : xs) zs.push_back(from_eigen(form.hidden_pre(x)));
    const std::size_t K = form.wbar.size();
    CompressedModel m;
    m.kind = ModelKind::multiclass_simplified;
    m.input_dim = net.input_dim;
    m.offsets = form.offsets;
    m.maxout.resize(K, TropicalPolynomial<double>::neg_inf(net.input_dim));
    m.error_traces.resize(K);
    parallel_for(K, cfg.jobs, [&](std::size_t k) {
        auto vd = vector_divide_simplified(form.wbar[k], zs, cfg.terms, cfg.iterations, cfg.seed + k);
        std::vector<TropicalTerm<double>> terms;
        for (const auto& a : vd.terms) {
            const Eigen::VectorXd ah = to_eigen(a);
            terms.push_back({from_eigen(form.W1.transpose() * ah), MaxPlus<double>(ah.dot(form.b1))});
        }
        m.maxout[k] = TropicalPolynomial<double>(net.input_dim, std::move(terms));
        m.error_traces[k] = vd.error_trace;
    });
    return m;
}

struct MultibinaryConfig {
    ApproxConfig division;
    std::size_t subset = 90;    ///< m polynomials kept as head features
    bool random_control = false;  ///< replace the quotients by random vectors
    std::uint64_t seed = 0;
};

/// Divides every class pair, then keeps a random subset of the 2*pairs quotients.
inline CompressedModel compress_multibinary(const NetworkSpec& net, const std::vector<Vec<double>>& xs,
                                            const MultibinaryConfig& cfg,
                                            std::vector<std::pair<int, int>> class_pairs = {})
{
    net.require_single_hidden();
    const int K = static_cast<int>(net.layers[1].out());
    if (class_pairs.empty())
        for (int i = 0; i < K; ++i)
            for (int k = i + 1; k < K; ++k) class_pairs.emplace_back(i, k);
    const std::size_t total = 2 * class_pairs.size();
    if (cfg.subset < 1 || cfg.subset > total)
        throw std::invalid_argument("compress_multibinary: subset size must lie in [1, " + std::to_string(total) + "]");

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(cfg.subset);
    std::sort(order.begin(), order.end());

    CompressedModel m;
    m.kind = ModelKind::multiclass_multibinary;
    m.input_dim = net.input_dim;
    m.maxout.resize(cfg.subset, TropicalPolynomial<double>::neg_inf(net.input_dim));
    m.error_traces.resize(cfg.subset);
    for (auto idx : order) m.pairs.push_back(class_pairs[idx / 2]);

    if (cfg.random_control) {
        std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(net.input_dim)));
        for (std::size_t s = 0; s < cfg.subset; ++s) {
            std::vector<TropicalTerm<double>> terms;
            for (std::size_t t = 0; t < cfg.division.terms; ++t) {
                Vec<double> a(net.input_dim);
                for (auto& v : a) v = g(rng);
                terms.push_back({std::move(a), MaxPlus<double>(0.0)});
            }
            m.maxout[s] = TropicalPolynomial<double>(net.input_dim, std::move(terms));
        }
        return m;
    }

    ApproxConfig inner = cfg.division;
    inner.jobs = 1;
    parallel_for(cfg.subset, cfg.division.jobs, [&](std::size_t s) {
        const auto idx = order[s];
        auto [i1, i2] = class_pairs[idx / 2];
        auto pair = to_tropical_pair(binary_reduce(net, i1, i2));
        auto [q, trace] = maxout_quotient(idx % 2 == 0 ? pair.p1 : pair.p2, xs, inner);
        m.maxout[s] = std::move(q);
        m.error_traces[s] = std::move(trace);
    });
    return m;
}

inline std::vector<Vec<double>> export_features(const CompressedModel& m, const std::vector<Vec<double>>& xs)
{
    std::vector<Vec<double>> out;
    for (const auto& x : xs) out.push_back(m.features(x));
    return out;
}

// ---------------------------------------------------------------------------

enum class L1Norm { full, incoming };

/// Keeps the `keep` hidden units with the largest L1 norm (stable on ties).
/// full: incoming weights, bias and outgoing weights; incoming: weights only.
inline NetworkSpec l1_structured_prune(const NetworkSpec& net, std::size_t keep, L1Norm norm = L1Norm::full)
{
    net.require_single_hidden();
    const auto& L1 = net.layers[0];
    const auto& L2 = net.layers[1];
    const auto N = static_cast<std::size_t>(L1.out());
    if (keep == 0) throw std::invalid_argument("l1_structured_prune: keep must be >= 1");
    if (keep > N) throw std::invalid_argument("l1_structured_prune: keep exceeds hidden width");
    std::vector<double> score(N);
    for (std::size_t v = 0; v < N; ++v) {
        const auto vi = static_cast<Eigen::Index>(v);
        score[v] = L1.W.row(vi).lpNorm<1>();
        if (norm == L1Norm::full) score[v] += std::abs(L1.b(vi)) + L2.W.col(vi).lpNorm<1>();
    }
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    NetworkSpec out = net;
    out.layers[0].W.resize(static_cast<Eigen::Index>(keep), L1.in());
    out.layers[0].b.resize(static_cast<Eigen::Index>(keep));
    out.layers[1].W.resize(L2.out(), static_cast<Eigen::Index>(keep));
    for (std::size_t r = 0; r < keep; ++r) {
        const auto src = static_cast<Eigen::Index>(idx[r]), dst = static_cast<Eigen::Index>(r);
        out.layers[0].W.row(dst) = L1.W.row(src);
        out.layers[0].b(dst) = L1.b(src);
        out.layers[1].W.col(dst) = L2.W.col(src);
    }
    return out;
}

/// Hidden width of a pruned net with about `params` parameters (at least 1).
inline std::size_t l1_width_for_params(const NetworkSpec& net, std::size_t params)
{
    net.require_single_hidden();
    const std::size_t per_unit = net.input_dim + 1 + static_cast<std::size_t>(net.layers[1].out());
    const std::size_t fixed = static_cast<std::size_t>(net.layers[1].out());
    if (params <= fixed + per_unit) return 1;
    return std::min<std::size_t>((params - fixed) / per_unit, static_cast<std::size_t>(net.layers[0].out()));
}

}  // namespace tropdiv
