#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "s2sl/errors.hpp"
#include "s2sl/matrix.hpp"
#include "s2sl/rng.hpp"

namespace s2sl {

enum class OutputActivation { sigmoid, softmax };
enum class Loss { bce, cross_entropy };

/// Hyperparameters of a single-hidden-layer network. The two valid
/// combinations are sigmoid+bce (paired-sample nets, multi-hot targets) and
/// softmax+cross_entropy (conventional classifier, one-hot targets).
struct NetConfig {
    std::size_t input_dim = 0;
    std::size_t hidden_units = 0;
    std::size_t output_dim = 0;
    OutputActivation output_activation = OutputActivation::sigmoid;
    Loss loss = Loss::bce;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const {
        if (input_dim < 1 || hidden_units < 1 || output_dim < 1)
            throw ConfigError("NetConfig: dimensions must be >= 1");
        if (epochs < 1 || batch_size < 1)
            throw ConfigError("NetConfig: epochs and batch_size must be >= 1");
        if (!(learning_rate > 0.0))
            throw ConfigError("NetConfig: learning_rate must be positive");
        if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
            throw ConfigError("NetConfig: betas must lie in [0, 1)");
        if (!(epsilon > 0.0)) throw ConfigError("NetConfig: epsilon must be positive");
        const bool bce_sigmoid =
            loss == Loss::bce && output_activation == OutputActivation::sigmoid;
        const bool ce_softmax =
            loss == Loss::cross_entropy && output_activation == OutputActivation::softmax;
        if (!bce_sigmoid && !ce_softmax)
            throw ConfigError(
                "NetConfig: loss/activation must pair as bce+sigmoid or "
                "cross_entropy+softmax");
    }
};

/// Feed-forward net: input -> ReLU hidden -> sigmoid or softmax output.
/// w1 is hidden_units x input_dim, w2 is output_dim x hidden_units.
struct Network {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
    NetConfig config;

    std::size_t parameter_count() const {
        return w1.size() + b1.size() + w2.size() + b2.size();
    }
};

struct TrainReport {
    double final_loss = 0.0;
    std::size_t epochs_run = 0;
    std::vector<double> loss_history;  // one entry per epoch
};

struct TrainResult {
    Network net;
    TrainReport report;
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Predictions are clamped to [kLogClip, 1 - kLogClip] before any log.
inline constexpr double kLogClip = 1e-12;

inline double clip_prob(double y) {
    return std::clamp(y, kLogClip, 1.0 - kLogClip);
}

inline void softmax_in_place(std::span<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace detail

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, biases zero.
inline Network init_network(const NetConfig& config, RngStream& rng) {
    config.validate();
    Network net;
    net.config = config;
    net.w1 = Matrix(config.hidden_units, config.input_dim);
    net.b1.assign(config.hidden_units, 0.0);
    net.w2 = Matrix(config.output_dim, config.hidden_units);
    net.b2.assign(config.output_dim, 0.0);
    const double bound1 =
        std::sqrt(6.0 / static_cast<double>(config.input_dim + config.hidden_units));
    for (double& w : net.w1.data()) w = rng.next_uniform(-bound1, bound1);
    const double bound2 =
        std::sqrt(6.0 / static_cast<double>(config.hidden_units + config.output_dim));
    for (double& w : net.w2.data()) w = rng.next_uniform(-bound2, bound2);
    return net;
}

/// Batched forward pass; X is batch x input_dim, result is batch x output_dim.
inline Matrix forward_batch(const Network& net, const Matrix& x) {
    if (x.cols() != net.config.input_dim)
        throw ShapeError("forward: input is " + x.shape_str() + ", expected " +
                         std::to_string(x.rows()) + "x" +
                         std::to_string(net.config.input_dim));
    Matrix z1 = matmul_nt(x, net.w1);  // batch x hidden
    for (std::size_t i = 0; i < z1.rows(); ++i) {
        auto row = z1.row(i);
        for (std::size_t h = 0; h < row.size(); ++h)
            row[h] = std::max(0.0, row[h] + net.b1[h]);
    }
    Matrix y = matmul_nt(z1, net.w2);  // batch x output
    for (std::size_t i = 0; i < y.rows(); ++i) {
        auto row = y.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += net.b2[j];
        if (net.config.output_activation == OutputActivation::sigmoid) {
            for (double& v : row) v = detail::sigmoid(v);
        } else {
            detail::softmax_in_place(row);
        }
    }
    return y;
}

inline std::vector<double> forward(const Network& net, std::span<const double> x) {
    if (x.size() != net.config.input_dim)
        throw ShapeError("forward: input length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(net.config.input_dim));
    Matrix xm(1, x.size());
    std::copy(x.begin(), x.end(), xm.data().begin());
    Matrix y = forward_batch(net, xm);
    return {y.row(0).begin(), y.row(0).end()};
}

/// Binary cross-entropy, averaged over units:
/// mean_j of -[t_j ln y_j + (1 - t_j) ln(1 - y_j)], predictions clipped.
inline double bce_loss(std::span<const double> predicted, std::span<const double> target) {
    if (predicted.size() != target.size())
        throw ShapeError("bce_loss: lengths differ, " + std::to_string(predicted.size()) +
                         " vs " + std::to_string(target.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        const double y = detail::clip_prob(predicted[j]);
        sum -= target[j] * std::log(y) + (1.0 - target[j]) * std::log(1.0 - y);
    }
    return sum / static_cast<double>(predicted.size());
}

/// Categorical cross-entropy: -sum_j t_j ln y_j, predictions clipped.
inline double cross_entropy_loss(std::span<const double> predicted,
                                 std::span<const double> target) {
    if (predicted.size() != target.size())
        throw ShapeError("cross_entropy_loss: lengths differ, " +
                         std::to_string(predicted.size()) + " vs " +
                         std::to_string(target.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < predicted.size(); ++j)
        sum -= target[j] * std::log(detail::clip_prob(predicted[j]));
    return sum;
}

/// Mean per-sample loss of the network on a batch.
inline double loss_on_batch(const Network& net, const Matrix& x, const Matrix& targets) {
    if (x.rows() != targets.rows())
        throw ShapeError("loss_on_batch: " + x.shape_str() + " inputs vs " +
                         targets.shape_str() + " targets");
    const Matrix y = forward_batch(net, x);
    double total = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        total += net.config.loss == Loss::bce ? bce_loss(y.row(i), targets.row(i))
                                              : cross_entropy_loss(y.row(i), targets.row(i));
    }
    return total / static_cast<double>(x.rows());
}

/// Parameter-shaped gradients (same layout as the Network they came from).
struct Gradients {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
};

/// Analytic gradients of the mean batch loss w.r.t. every parameter.
///
/// The output-layer delta is (y - t) scaled by the loss normalization; for
/// cross-entropy with targets not summing to 1 the exact form
/// y_k * sum_j(t_j) - t_k is used. Gradients are of the unclipped loss; the
/// clip in the loss only guards the log evaluation.
inline Gradients gradient(const Network& net, const Matrix& x, const Matrix& targets) {
    if (x.rows() != targets.rows())
        throw ShapeError("gradient: " + x.shape_str() + " inputs vs " +
                         targets.shape_str() + " targets");
    if (x.cols() != net.config.input_dim || targets.cols() != net.config.output_dim)
        throw ShapeError("gradient: batch " + x.shape_str() + "/" + targets.shape_str() +
                         " does not match net dims " +
                         std::to_string(net.config.input_dim) + "/" +
                         std::to_string(net.config.output_dim));
    const std::size_t batch = x.rows();

    // forward, keeping hidden activations
    Matrix a1 = matmul_nt(x, net.w1);  // batch x hidden, ReLU applied below
    for (std::size_t i = 0; i < a1.rows(); ++i) {
        auto row = a1.row(i);
        for (std::size_t h = 0; h < row.size(); ++h)
            row[h] = std::max(0.0, row[h] + net.b1[h]);
    }
    Matrix y = matmul_nt(a1, net.w2);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        auto row = y.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += net.b2[j];
        if (net.config.output_activation == OutputActivation::sigmoid) {
            for (double& v : row) v = detail::sigmoid(v);
        } else {
            detail::softmax_in_place(row);
        }
    }

    // output delta: d(mean batch loss)/d(pre-activation of output layer)
    const double unit_norm =
        net.config.loss == Loss::bce
            ? 1.0 / static_cast<double>(batch * net.config.output_dim)
            : 1.0 / static_cast<double>(batch);
    Matrix dz2(batch, net.config.output_dim);
    for (std::size_t i = 0; i < batch; ++i) {
        auto yi = y.row(i);
        auto ti = targets.row(i);
        auto di = dz2.row(i);
        if (net.config.loss == Loss::cross_entropy) {
            const double tsum = std::accumulate(ti.begin(), ti.end(), 0.0);
            for (std::size_t j = 0; j < di.size(); ++j)
                di[j] = (yi[j] * tsum - ti[j]) * unit_norm;
        } else {
            for (std::size_t j = 0; j < di.size(); ++j)
                di[j] = (yi[j] - ti[j]) * unit_norm;
        }
    }

    Gradients g;
    g.w2 = matmul_tn(dz2, a1);  // output x hidden
    g.b2.assign(net.config.output_dim, 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
        auto di = dz2.row(i);
        for (std::size_t j = 0; j < di.size(); ++j) g.b2[j] += di[j];
    }

    Matrix dz1 = matmul(dz2, net.w2);  // batch x hidden
    for (std::size_t i = 0; i < batch; ++i) {
        auto hi = a1.row(i);
        auto di = dz1.row(i);
        for (std::size_t h = 0; h < di.size(); ++h)
            if (hi[h] <= 0.0) di[h] = 0.0;  // ReLU', taking 0 at the kink
    }
    g.w1 = matmul_tn(dz1, x);  // hidden x input
    g.b1.assign(net.config.hidden_units, 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
        auto di = dz1.row(i);
        for (std::size_t h = 0; h < di.size(); ++h) g.b1[h] += di[h];
    }
    return g;
}

namespace detail {

// One adam tensor update: bias-corrected first/second moments, standard rule.
inline void adam_update(std::vector<double>& params, const std::vector<double>& grad,
                        std::vector<double>& m, std::vector<double>& v,
                        const NetConfig& cfg, std::size_t step) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

}  // namespace detail

/// Mini-batch adam over reshuffled batches each epoch. Pure function of
/// (initial network, data, rng state): replay is bitwise identical.
inline TrainResult train(Network net, const Matrix& inputs, const Matrix& targets,
                         RngStream& rng) {
    net.config.validate();
    if (inputs.rows() != targets.rows())
        throw ShapeError("train: " + inputs.shape_str() + " inputs vs " +
                         targets.shape_str() + " targets");
    if (inputs.cols() != net.config.input_dim || targets.cols() != net.config.output_dim)
        throw ShapeError("train: data " + inputs.shape_str() + "/" + targets.shape_str() +
                         " does not match net dims");
    const std::size_t n = inputs.rows();
    const std::size_t bs = std::min(net.config.batch_size, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    // adam moments, one pair per parameter tensor
    std::vector<double> m_w1(net.w1.size(), 0.0), v_w1(net.w1.size(), 0.0);
    std::vector<double> m_b1(net.b1.size(), 0.0), v_b1(net.b1.size(), 0.0);
    std::vector<double> m_w2(net.w2.size(), 0.0), v_w2(net.w2.size(), 0.0);
    std::vector<double> m_b2(net.b2.size(), 0.0), v_b2(net.b2.size(), 0.0);
    std::size_t step = 0;

    TrainReport report;
    Matrix xb, tb;
    for (std::size_t epoch = 0; epoch < net.config.epochs; ++epoch) {
        seeded_shuffle(rng, order);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += bs, ++batch_index) {
            const std::size_t rows = std::min(bs, n - start);
            xb = Matrix(rows, inputs.cols());
            tb = Matrix(rows, targets.cols());
            for (std::size_t r = 0; r < rows; ++r) {
                const std::size_t src = order[start + r];
                auto xi = inputs.row(src);
                auto ti = targets.row(src);
                std::copy(xi.begin(), xi.end(), xb.row(r).begin());
                std::copy(ti.begin(), ti.end(), tb.row(r).begin());
            }
            const double batch_loss = loss_on_batch(net, xb, tb);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index));
            epoch_loss += batch_loss * static_cast<double>(rows);

            Gradients g = gradient(net, xb, tb);
            ++step;
            detail::adam_update(net.w1.data(), g.w1.data(), m_w1, v_w1, net.config, step);
            detail::adam_update(net.b1, g.b1, m_b1, v_b1, net.config, step);
            detail::adam_update(net.w2.data(), g.w2.data(), m_w2, v_w2, net.config, step);
            detail::adam_update(net.b2, g.b2, m_b2, v_b2, net.config, step);
        }
        report.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    report.epochs_run = net.config.epochs;
    report.final_loss = report.loss_history.empty() ? 0.0 : report.loss_history.back();
    return {std::move(net), std::move(report)};
}

struct FdResult {
    double max_rel_err = 0.0;
    std::string worst_coord;  // e.g. "w2[1][3]"
};

namespace detail {

template <typename LossFn>
void fd_scan_tensor(std::vector<double>& params, const std::vector<double>& analytic,
                    const char* tensor_name, std::size_t cols, double h,
                    const LossFn& batch_loss, FdResult& result) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double lp = batch_loss();
        params[i] = saved - h;
        const double lm = batch_loss();
        params[i] = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double rel = std::abs(analytic[i] - numeric) /
                           std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        if (rel > result.max_rel_err) {
            result.max_rel_err = rel;
            if (cols > 0) {
                result.worst_coord = std::string(tensor_name) + "[" +
                                     std::to_string(i / cols) + "][" +
                                     std::to_string(i % cols) + "]";
            } else {
                result.worst_coord = std::string(tensor_name) + "[" + std::to_string(i) + "]";
            }
        }
    }
}

}  // namespace detail

/// Central-difference check of `analytic` against the loss surface. Returns
/// max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
inline FdResult finite_diff_against(Network net, const Gradients& analytic,
                                    const Matrix& x, const Matrix& targets,
                                    double h = 1e-5) {
    FdResult result;
    const auto batch_loss = [&]() { return loss_on_batch(net, x, targets); };
    detail::fd_scan_tensor(net.w1.data(), analytic.w1.data(), "w1", net.w1.cols(), h,
                           batch_loss, result);
    detail::fd_scan_tensor(net.b1, analytic.b1, "b1", 0, h, batch_loss, result);
    detail::fd_scan_tensor(net.w2.data(), analytic.w2.data(), "w2", net.w2.cols(), h,
                           batch_loss, result);
    detail::fd_scan_tensor(net.b2, analytic.b2, "b2", 0, h, batch_loss, result);
    return result;
}

inline FdResult finite_diff_check(const Network& net, const Matrix& x,
                                  const Matrix& targets, double h = 1e-5) {
    return finite_diff_against(net, gradient(net, x, targets), x, targets, h);
}

/// FNV-1a over the raw parameter bytes; equal hashes on equal seeds/data is
/// the cheap bitwise-determinism witness used by the harness and tests.
inline std::uint64_t param_hash(const Network& net) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto absorb = [&h](const std::vector<double>& v) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(v.data());
        for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    absorb(net.w1.data());
    absorb(net.b1);
    absorb(net.w2.data());
    absorb(net.b2);
    return h;
}

namespace detail {

inline std::string real_to_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Text model format, version 1. Layout:
///   line 1          : "s2sl-model v1"
///   lines 2..13     : config key-value pairs, fixed order (input_dim,
///                     hidden_units, output_dim, output_activation, loss,
///                     learning_rate, beta1, beta2, epsilon, epochs,
///                     batch_size, seed)
///   then, each preceded by a line naming the tensor: w1 (one row per hidden
///   unit), b1 (one row), w2 (one row per output unit), b2 (one row);
///   rows are whitespace-separated reals printed with 17 significant digits.
inline void save_model(const Network& net, std::ostream& out) {
    const auto& c = net.config;
    out << "s2sl-model v1\n";
    out << "input_dim " << c.input_dim << "\n";
    out << "hidden_units " << c.hidden_units << "\n";
    out << "output_dim " << c.output_dim << "\n";
    out << "output_activation "
        << (c.output_activation == OutputActivation::sigmoid ? "sigmoid" : "softmax")
        << "\n";
    out << "loss " << (c.loss == Loss::bce ? "bce" : "cross_entropy") << "\n";
    out << "learning_rate " << detail::real_to_text(c.learning_rate) << "\n";
    out << "beta1 " << detail::real_to_text(c.beta1) << "\n";
    out << "beta2 " << detail::real_to_text(c.beta2) << "\n";
    out << "epsilon " << detail::real_to_text(c.epsilon) << "\n";
    out << "epochs " << c.epochs << "\n";
    out << "batch_size " << c.batch_size << "\n";
    out << "seed " << c.seed << "\n";
    const auto write_matrix = [&out](const char* name, const Matrix& m) {
        out << name << "\n";
        for (std::size_t i = 0; i < m.rows(); ++i) {
            auto row = m.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) out << ' ';
                out << detail::real_to_text(row[j]);
            }
            out << "\n";
        }
    };
    const auto write_vector = [&out](const char* name, const std::vector<double>& v) {
        out << name << "\n";
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) out << ' ';
            out << detail::real_to_text(v[j]);
        }
        out << "\n";
    };
    write_matrix("w1", net.w1);
    write_vector("b1", net.b1);
    write_matrix("w2", net.w2);
    write_vector("b2", net.b2);
}

inline void save_model(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("save_model: cannot open " + path);
    save_model(net, out);
    if (!out) throw DataError("save_model: write failed for " + path);
}

inline Network load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "s2sl-model v1")
        throw DataError("load_model: missing 's2sl-model v1' header");
    NetConfig c;
    const auto read_kv = [&](const char* key) -> std::string {
        if (!std::getline(in, line)) throw DataError("load_model: truncated header");
        std::istringstream ss(line);
        std::string k, v;
        ss >> k >> v;
        if (k != key) throw DataError("load_model: expected key '" + std::string(key) +
                                      "', got '" + k + "'");
        return v;
    };
    c.input_dim = std::stoull(read_kv("input_dim"));
    c.hidden_units = std::stoull(read_kv("hidden_units"));
    c.output_dim = std::stoull(read_kv("output_dim"));
    const std::string act = read_kv("output_activation");
    c.output_activation =
        act == "sigmoid" ? OutputActivation::sigmoid : OutputActivation::softmax;
    const std::string loss = read_kv("loss");
    c.loss = loss == "bce" ? Loss::bce : Loss::cross_entropy;
    c.learning_rate = std::stod(read_kv("learning_rate"));
    c.beta1 = std::stod(read_kv("beta1"));
    c.beta2 = std::stod(read_kv("beta2"));
    c.epsilon = std::stod(read_kv("epsilon"));
    c.epochs = std::stoull(read_kv("epochs"));
    c.batch_size = std::stoull(read_kv("batch_size"));
    c.seed = std::stoull(read_kv("seed"));
    c.validate();

    Network net;
    net.config = c;
    const auto read_matrix = [&](const char* name, std::size_t rows, std::size_t cols) {
        if (!std::getline(in, line) || line != name)
            throw DataError("load_model: expected tensor '" + std::string(name) + "'");
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (!std::getline(in, line))
                throw DataError("load_model: truncated tensor " + std::string(name));
            std::istringstream ss(line);
            for (std::size_t j = 0; j < cols; ++j)
                if (!(ss >> m(i, j)))
                    throw DataError("load_model: bad row in tensor " + std::string(name));
        }
        return m;
    };
    net.w1 = read_matrix("w1", c.hidden_units, c.input_dim);
    net.b1 = read_matrix("b1", 1, c.hidden_units).data();
    net.w2 = read_matrix("w2", c.output_dim, c.hidden_units);
    net.b2 = read_matrix("b2", 1, c.output_dim).data();
    return net;
}

inline Network load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_model: cannot open " + path);
    return load_model(in);
}

}  // namespace s2sl
