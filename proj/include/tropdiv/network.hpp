#pragma once

/**
 * @file network.hpp
 * @brief Dense feed-forward networks, JSON/CSV I/O and error rates.
 */

#include "tropdiv/scalar.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropdiv {

using json = nlohmann::json;

enum class Activation { relu, linear };

inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

inline Activation parse_activation(const std::string& s)
{
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw std::invalid_argument("unknown activation: " + s);
}

struct Layer {
    Eigen::MatrixXd W;  ///< out x in
    Eigen::VectorXd b;
    Activation activation = Activation::linear;

    Eigen::Index in() const { return W.cols(); }
    Eigen::Index out() const { return W.rows(); }
};

struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<Layer> layers;

    void validate() const
    {
        if (input_dim == 0) throw std::invalid_argument("network: input_dim must be >= 1");
        if (layers.empty()) throw std::invalid_argument("network: no layers");
        auto width = static_cast<Eigen::Index>(input_dim);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& L = layers[l];
            if (L.in() != width)
                throw std::invalid_argument("network: layer " + std::to_string(l) + " expects " + std::to_string(L.in()) +
                                            " inputs, previous width is " + std::to_string(width));
            if (L.b.size() != L.out()) throw std::invalid_argument("network: bias length mismatch in layer " + std::to_string(l));
            if (!L.W.allFinite() || !L.b.allFinite()) throw std::invalid_argument("network: non-finite parameter");
            width = L.out();
        }
        if (layers.back().activation != Activation::linear) throw std::invalid_argument("network: last layer must be linear");
    }

    std::size_t output_dim() const { return static_cast<std::size_t>(layers.back().out()); }

    /// Pre-softmax output.
    Eigen::VectorXd forward(const Eigen::VectorXd& x) const
    {
        if (x.size() != static_cast<Eigen::Index>(input_dim)) throw std::invalid_argument("network: input dimension mismatch");
        Eigen::VectorXd h = x;
        for (const auto& L : layers) {
            h = L.W * h + L.b;
            if (L.activation == Activation::relu) h = h.cwiseMax(0.0);
        }
        return h;
    }

    Eigen::VectorXd logits(const Vec<double>& x) const
    {
        return forward(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
    }

    /// The single hidden layer and the output layer of a 1-hidden-layer net.
    void require_single_hidden() const
    {
        validate();
        if (layers.size() != 2 || layers[0].activation != Activation::relu)
            throw std::invalid_argument("network: expected one ReLU hidden layer followed by a linear output");
    }
};

inline std::size_t count_params(const NetworkSpec& net)
{
    std::size_t k = 0;
    for (const auto& L : net.layers) k += static_cast<std::size_t>(L.W.size() + L.b.size());
    return k;
}

// ---- JSON ----

inline json to_json(const NetworkSpec& net)
{
    json layers = json::array();
    for (const auto& L : net.layers) {
        json W = json::array();
        for (Eigen::Index r = 0; r < L.W.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < L.W.cols(); ++c) row.push_back(L.W(r, c));
            W.push_back(std::move(row));
        }
        layers.push_back({{"W", W}, {"b", std::vector<double>(L.b.data(), L.b.data() + L.b.size())},
                          {"activation", to_string(L.activation)}});
    }
    return {{"input_dim", net.input_dim}, {"layers", layers}};
}

inline NetworkSpec network_from_json(const json& j)
{
    NetworkSpec net;
    net.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& jl : j.at("layers")) {
        Layer L;
        const auto& W = jl.at("W");
        const auto rows = static_cast<Eigen::Index>(W.size());
        const auto cols = rows ? static_cast<Eigen::Index>(W[0].size()) : 0;
        L.W.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(W[static_cast<std::size_t>(r)].size()) != cols)
                throw std::invalid_argument("network: ragged weight matrix");
            for (Eigen::Index c = 0; c < cols; ++c) L.W(r, c) = W[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
        auto b = jl.at("b").get<std::vector<double>>();
        L.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
        L.activation = parse_activation(jl.value("activation", std::string("linear")));
        net.layers.push_back(std::move(L));
    }
    net.validate();
    return net;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline NetworkSpec load_network(const std::string& path) { return network_from_json(read_json_file(path)); }
inline void save_network(const std::string& path, const NetworkSpec& net) { write_json_file(path, to_json(net)); }

// ---- CSV ----

/// Numeric CSV without header; every row must have the same length.
inline std::vector<Vec<double>> read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Vec<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Vec<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": row length differs");
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<int> read_labels(const std::string& path)
{
    std::vector<int> out;
    for (const auto& r : read_csv(path)) {
        if (r.size() != 1) throw std::runtime_error(path + ": labels must be a single column");
        out.push_back(static_cast<int>(r[0]));
    }
    return out;
}

inline void write_csv(const std::string& path, const std::vector<Vec<double>>& rows)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

// ---- evaluation ----

/// Class from logits: a scalar output means sigmoid > 1/2 -> 1, else 0.
inline int predict_class(const Eigen::VectorXd& logits)
{
    if (logits.size() == 1) return logits(0) > 0 ? 1 : 0;
    Eigen::Index arg = 0;
    logits.maxCoeff(&arg);
    return static_cast<int>(arg);
}

/// Fraction of misclassified rows.  Works for any model with logits(x).
template <class Model>
double evaluate_error(const Model& model, const std::vector<Vec<double>>& xs, const std::vector<int>& labels)
{
    if (xs.size() != labels.size()) throw std::invalid_argument("evaluate_error: sample and label counts differ");
    if (xs.empty()) throw std::invalid_argument("evaluate_error: no samples");
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) wrong += predict_class(model.logits(xs[j])) != labels[j];
    return static_cast<double>(wrong) / static_cast<double>(xs.size());
}

/// Rows whose label is i1 or i2, relabelled 1 (i1) and 0 (i2).
inline void binary_subset(const std::vector<Vec<double>>& xs, const std::vector<int>& labels, int i1, int i2,
                          std::vector<Vec<double>>& out_x, std::vector<int>& out_y)
{
    if (xs.size() != labels.size()) throw std::invalid_argument("binary_subset: sample and label counts differ");
    out_x.clear();
    out_y.clear();
    for (std::size_t j = 0; j < xs.size(); ++j)
        if (labels[j] == i1 || labels[j] == i2) {
            out_x.push_back(xs[j]);
            out_y.push_back(labels[j] == i1 ? 1 : 0);
        }
}

}  // namespace tropdiv
