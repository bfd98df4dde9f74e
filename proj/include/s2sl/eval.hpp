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
#include <vector>

#include "s2sl/dataset.hpp"
#include "s2sl/errors.hpp"
#include "s2sl/nnet.hpp"
#include "s2sl/rng.hpp"
#include "s2sl/s2s.hpp"

namespace s2sl {

/// Stratified k-fold partition of [0, N). Test folds are disjoint, cover all
/// rows, and per-class test counts differ by at most 1 across folds.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> train;  // per fold, ascending
    std::vector<std::vector<std::size_t>> test;   // per fold, ascending
    std::uint64_t seed = 0;
};

inline FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, RngStream& rng) {
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] < k)
            throw ConfigError("stratified_kfold: class " + std::to_string(c) + " has " +
                              std::to_string(counts[c]) + " samples, fewer than k = " +
                              std::to_string(k));
    FoldPlan plan;
    plan.k = k;
    plan.seed = rng.seed();
    plan.test.assign(k, {});
    std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);
    for (auto& members : by_class) {
        seeded_shuffle(rng, members);
        // chunk sizes n/k with the remainder spread over the first folds
        const std::size_t n = members.size();
        std::size_t pos = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t take = n / k + (f < n % k ? 1 : 0);
            plan.test[f].insert(plan.test[f].end(), members.begin() + pos,
                                members.begin() + pos + take);
            pos += take;
        }
    }
    plan.train.assign(k, {});
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(plan.test[f].begin(), plan.test[f].end());
        std::vector<bool> in_test(ds.size(), false);
        for (std::size_t i : plan.test[f]) in_test[i] = true;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (!in_test[i]) plan.train[f].push_back(i);
    }
    return plan;
}

/// Training-data proportion p/4 with p in {1, 2, 3, 4}.
struct ProportionSpec {
    int numerator = 4;

    void validate() const {
        if (numerator < 1 || numerator > 4)
            throw ConfigError("ProportionSpec: numerator must be in {1, 2, 3, 4}, got " +
                              std::to_string(numerator));
    }
    double fraction() const { return numerator / 4.0; }
    std::string str() const { return std::to_string(numerator) + "/4"; }
};

/// Per class keeps round(p * n_c) samples (round half up, never below 1),
/// uniformly without replacement. Proportion 4/4 returns the input unchanged.
inline std::vector<std::size_t> take_proportion(std::span<const std::size_t> train_indices,
                                                std::span<const std::size_t> labels,
                                                ProportionSpec portion, RngStream& rng) {
    portion.validate();
    if (train_indices.empty()) throw ConfigError("take_proportion: empty training set");
    if (portion.numerator == 4) return {train_indices.begin(), train_indices.end()};

    std::size_t num_classes = 0;
    for (std::size_t i : train_indices) num_classes = std::max(num_classes, labels[i] + 1);
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i : train_indices) by_class[labels[i]].push_back(i);

    std::vector<std::size_t> kept;
    for (auto& members : by_class) {
        if (members.empty()) continue;
        const double want_real = portion.fraction() * static_cast<double>(members.size());
        std::size_t want = static_cast<std::size_t>(std::floor(want_real + 0.5));
        want = std::clamp<std::size_t>(want, 1, members.size());
        seeded_shuffle(rng, members);
        kept.insert(kept.end(), members.begin(), members.begin() + want);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

inline double accuracy(std::span<const std::size_t> predictions,
                       std::span<const std::size_t> truths) {
    if (predictions.size() != truths.size())
        throw ShapeError("accuracy: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(truths.size()) + " truths");
    if (predictions.empty()) throw ConfigError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truths[i]) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

struct ConfusionCounts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline ConfusionCounts confusion(std::span<const std::size_t> predictions,
                                 std::span<const std::size_t> truths,
                                 std::size_t positive_class) {
    if (predictions.size() != truths.size())
        throw ShapeError("confusion: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(truths.size()) + " truths");
    ConfusionCounts cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_pos = predictions[i] == positive_class;
        const bool true_pos = truths[i] == positive_class;
        if (pred_pos && true_pos) cm.tp++;
        else if (pred_pos) cm.fp++;
        else if (true_pos) cm.fn++;
        else cm.tn++;
    }
    return cm;
}

/// F1 = 2PR / (P + R); 0 when P + R = 0 (the degenerate-case convention).
inline double f1_from_counts(const ConfusionCounts& cm) {
    const double p = cm.tp + cm.fp == 0 ? 0.0
                                        : static_cast<double>(cm.tp) /
                                              static_cast<double>(cm.tp + cm.fp);
    const double r = cm.tp + cm.fn == 0 ? 0.0
                                        : static_cast<double>(cm.tp) /
                                              static_cast<double>(cm.tp + cm.fn);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

inline double f1_minority(std::span<const std::size_t> predictions,
                          std::span<const std::size_t> truths,
                          std::size_t positive_class) {
    if (predictions.empty() || truths.empty()) throw ConfigError("f1_minority: empty input");
    if (std::find(truths.begin(), truths.end(), positive_class) == truths.end())
        throw ConfigError("f1_minority: positive class " + std::to_string(positive_class) +
                          " absent from truths");
    return f1_from_counts(confusion(predictions, truths, positive_class));
}

/// Smallest class; ties go to the largest class id.
inline std::size_t minority_class(const Dataset& ds) {
    const auto counts = ds.class_counts();
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] <= counts[best]) best = c;
    return best;
}

enum class Method { mlp, s2sl };

inline std::string method_name(Method m) { return m == Method::mlp ? "MLP" : "s2sL"; }

struct HarnessConfig {
    std::size_t folds = 5;
    std::vector<int> proportions = {1, 2, 3, 4};  // numerators over 4
    bool run_mlp = true;
    bool run_s2sl = true;
    std::size_t hidden_units = 16;  // used when search_hidden is false
    bool search_hidden = false;
    bool exhaustive_grid = false;  // search every size in 2..2*input_width
    std::size_t refs = 10;
    ReferencePolicy ref_policy = ReferencePolicy::stratified_random;
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    std::size_t max_pairs = 1'000'000;
    double inner_split = 0.2;  // validation share of the hidden-unit search

    void validate() const {
        if (folds < 2) throw ConfigError("HarnessConfig: folds must be >= 2");
        if (proportions.empty()) throw ConfigError("HarnessConfig: no proportions");
        for (int p : proportions) ProportionSpec{p}.validate();
        if (!search_hidden && hidden_units < 1)
            throw ConfigError("HarnessConfig: hidden_units must be >= 1");
        if (refs < 1) throw ConfigError("HarnessConfig: refs must be >= 1");
        if (epochs < 1 || batch_size < 1)
            throw ConfigError("HarnessConfig: epochs and batch_size must be >= 1");
        if (!(learning_rate > 0.0))
            throw ConfigError("HarnessConfig: learning_rate must be positive");
        if (!(inner_split > 0.0) || !(inner_split < 1.0))
            throw ConfigError("HarnessConfig: inner_split must lie in (0, 1)");
    }
};

/// Candidate hidden sizes from 2 up to twice the input width: powers of two
/// below the bound plus the bound itself, or every integer when exhaustive.
inline std::vector<std::size_t> hidden_unit_grid(std::size_t input_width,
                                                 bool exhaustive = false) {
    if (input_width < 1) throw ConfigError("hidden_unit_grid: input width must be >= 1");
    const std::size_t upper = 2 * input_width;
    std::vector<std::size_t> grid;
    if (exhaustive) {
        for (std::size_t h = 2; h <= upper; ++h) grid.push_back(h);
        if (grid.empty()) grid.push_back(upper);
        return grid;
    }
    for (std::size_t h = 2; h < upper; h *= 2) grid.push_back(h);
    if (grid.empty() || grid.back() != upper) grid.push_back(upper);
    return grid;
}

/// Stratified two-way split; the second part receives round(fraction * n_c)
/// rows of each class (at least 1, at most n_c - 1).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_holdout_split(const Dataset& ds, double holdout_fraction, RngStream& rng) {
    if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0))
        throw ConfigError("stratified_holdout_split: fraction must lie in (0, 1), got " +
                          std::to_string(holdout_fraction));
    std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);
    std::vector<std::size_t> first, second;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.size() < 2)
            throw ConfigError("stratified_holdout_split: class " + std::to_string(c) +
                              " has " + std::to_string(members.size()) +
                              " samples, cannot populate both sides");
        std::size_t want = static_cast<std::size_t>(
            std::floor(holdout_fraction * static_cast<double>(members.size()) + 0.5));
        want = std::clamp<std::size_t>(want, 1, members.size() - 1);
        seeded_shuffle(rng, members);
        second.insert(second.end(), members.begin(), members.begin() + want);
        first.insert(first.end(), members.begin() + want, members.end());
    }
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {first, second};
}

namespace detail {

inline NetConfig make_net_config(Method method, std::size_t feature_dim,
                                 std::size_t num_classes, std::size_t hidden,
                                 const HarnessConfig& hc) {
    NetConfig nc;
    if (method == Method::s2sl) {
        nc.input_dim = 2 * feature_dim;
        nc.output_dim = 2 * num_classes;
        nc.output_activation = OutputActivation::sigmoid;
        nc.loss = Loss::bce;
    } else {
        nc.input_dim = feature_dim;
        nc.output_dim = num_classes;
        nc.output_activation = OutputActivation::softmax;
        nc.loss = Loss::cross_entropy;
    }
    nc.hidden_units = hidden;
    nc.learning_rate = hc.learning_rate;
    nc.beta1 = hc.beta1;
    nc.beta2 = hc.beta2;
    nc.epsilon = hc.epsilon;
    nc.epochs = hc.epochs;
    nc.batch_size = hc.batch_size;
    return nc;
}

inline Matrix one_hot_targets(const Dataset& ds) {
    Matrix t(ds.size(), ds.num_classes());
    for (std::size_t i = 0; i < ds.size(); ++i) t(i, ds.labels[i]) = 1.0;
    return t;
}

}  // namespace detail

/// Conventional classifier: d inputs, softmax over K classes, one-hot targets.
inline Network train_baseline(const Dataset& train_set, std::size_t hidden,
                              const HarnessConfig& hc, RngStream& rng) {
    const NetConfig nc =
        detail::make_net_config(Method::mlp, train_set.dim(), train_set.num_classes(),
                                hidden, hc);
    Network net = init_network(nc, rng);
    return train(std::move(net), train_set.features, detail::one_hot_targets(train_set),
                 rng).net;
}

inline std::vector<std::size_t> predict_baseline(const Network& net, const Matrix& x) {
    const Matrix y = forward_batch(net, x);
    std::vector<std::size_t> preds(y.rows());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        auto row = y.row(i);
        preds[i] = static_cast<std::size_t>(
            std::max_element(row.begin(), row.end()) - row.begin());
    }
    return preds;
}

/// Paired-sample net: 2d inputs, 2K sigmoid outputs, trained on the full
/// Cartesian square of the training set.
inline Network train_s2s(const Dataset& train_set, std::size_t hidden,
                         const HarnessConfig& hc, const LabelCodec& codec,
                         RngStream& rng) {
    const PairedSet pairs = build_train_pairs(train_set, codec, hc.max_pairs);
    const NetConfig nc = detail::make_net_config(Method::s2sl, train_set.dim(),
                                                 codec.num_classes(), hidden, hc);
    Network net = init_network(nc, rng);
    return train(std::move(net), pairs.inputs, pairs.targets, rng).net;
}

inline std::vector<std::size_t> predict_s2s(const Network& net, const Matrix& x,
                                            const ReferenceSet& refs,
                                            const LabelCodec& codec) {
    std::vector<std::size_t> preds(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        preds[i] = vote_decide(net, x.row(i), refs, codec).winner;
    return preds;
}

/// Trains one model per candidate on an inner 80/20 stratified split of the
/// (already proportioned) training data and returns the candidate with the
/// highest inner-validation accuracy; ties go to the smallest candidate.
inline std::size_t search_hidden_units(const Dataset& train_set, Method method,
                                       std::span<const std::size_t> candidate_grid,
                                       double inner_split_ratio, const HarnessConfig& hc,
                                       RngStream& rng) {
    if (candidate_grid.empty()) throw ConfigError("search_hidden_units: empty grid");
    for (std::size_t h : candidate_grid)
        if (h < 1) throw ConfigError("search_hidden_units: candidates must be >= 1");
    if (candidate_grid.size() == 1) return candidate_grid.front();

    const auto [inner_train_idx, inner_val_idx] =
        stratified_holdout_split(train_set, inner_split_ratio, rng);
    const Dataset inner_train = subset(train_set, inner_train_idx);
    const Dataset inner_val = subset(train_set, inner_val_idx);
    const std::uint64_t base = rng.next_u64();

    std::vector<std::size_t> grid(candidate_grid.begin(), candidate_grid.end());
    std::sort(grid.begin(), grid.end());
    std::size_t best_h = grid.front();
    double best_acc = -1.0;
    for (std::size_t h : grid) {
        RngStream cand_rng = RngStream::derive(base, {h});
        std::vector<std::size_t> preds;
        if (method == Method::mlp) {
            const Network net = train_baseline(inner_train, h, hc, cand_rng);
            preds = predict_baseline(net, inner_val.features);
        } else {
            const LabelCodec codec(train_set.num_classes());
            const Network net = train_s2s(inner_train, h, hc, codec, cand_rng);
            const std::size_t r = std::min(hc.refs, inner_train.size());
            const ReferenceSet refs =
                select_references(inner_train, hc.ref_policy, r, cand_rng);
            preds = predict_s2s(net, inner_val.features, refs, codec);
        }
        const double acc = accuracy(preds, inner_val.labels);
        if (acc > best_acc) {  // strict: ties keep the smaller candidate
            best_acc = acc;
            best_h = h;
        }
    }
    return best_h;
}

struct FoldResult {
    Method method;
    int proportion;  // numerator over 4
    std::size_t fold;
    double accuracy = 0.0;
    double f1 = 0.0;
    ConfusionCounts cm;
    std::size_t hidden_units = 0;
    std::uint64_t net_hash = 0;
};

struct MethodSummary {
    Method method;
    int proportion;
    double acc_mean = 0.0, acc_std = 0.0;
    double f1_mean = 0.0, f1_std = 0.0;
};

struct EvalReport {
    std::string task;
    HarnessConfig config;
    std::size_t positive_class = 0;  // minority class used for F1
    std::string positive_class_name;
    std::vector<FoldResult> rows;
    std::vector<MethodSummary> summary;
};

namespace detail {

// fixed stream tags, one per randomized stage
inline constexpr std::uint64_t kTagFolds = 0xF01D;
inline constexpr std::uint64_t kTagSubset = 0x5B5E7;
inline constexpr std::uint64_t kTagRefs = 0x0EF5;
inline constexpr std::uint64_t kTagNet = 0x0137;
inline constexpr std::uint64_t kTagSearch = 0x5EA2;

inline std::pair<double, double> mean_std(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace detail

/// The full protocol over an externally supplied fold plan: per proportion
/// and fold, subset the training data, fit a train-only normalizer, train
/// each requested method on identical subsets, score the test rows, and
/// aggregate fold means. Deterministic given the master seed.
inline EvalReport run_experiment(const Dataset& ds, const HarnessConfig& hc,
                                 const FoldPlan& plan) {
    hc.validate();
    if (ds.num_classes() < 2) throw DataError("run_experiment: need at least 2 classes");

    EvalReport report;
    report.task = ds.name;
    report.config = hc;
    report.positive_class = minority_class(ds);
    report.positive_class_name = ds.class_names[report.positive_class];

    std::vector<Method> methods;
    if (hc.run_mlp) methods.push_back(Method::mlp);
    if (hc.run_s2sl) methods.push_back(Method::s2sl);
    if (methods.empty()) throw ConfigError("run_experiment: no method selected");

    const LabelCodec codec(ds.num_classes());
    for (int prop : hc.proportions) {
        const ProportionSpec portion{prop};
        for (std::size_t fold = 0; fold < plan.k; ++fold) {
            // identical subsets across methods: the draw ignores the method
            RngStream subset_rng = RngStream::derive(
                hc.seed, {detail::kTagSubset, fold, static_cast<std::uint64_t>(prop)});
            const std::vector<std::size_t> sub_idx =
                take_proportion(plan.train[fold], ds.labels, portion, subset_rng);
            const Dataset train_raw = subset(ds, sub_idx);
            const Dataset test_raw = subset(ds, plan.test[fold]);
            const Normalizer nz = fit_normalizer(train_raw);
            const Dataset train_set = apply_normalizer(nz, train_raw);
            const Dataset test_set = apply_normalizer(nz, test_raw);

            for (Method method : methods) {
                const std::uint64_t mid = method == Method::mlp ? 0 : 1;
                std::size_t hidden = hc.hidden_units;
                if (hc.search_hidden) {
                    RngStream search_rng = RngStream::derive(
                        hc.seed,
                        {detail::kTagSearch, mid, fold, static_cast<std::uint64_t>(prop)});
                    const std::size_t width =
                        method == Method::s2sl ? 2 * ds.dim() : ds.dim();
                    const auto grid = hidden_unit_grid(width, hc.exhaustive_grid);
                    hidden = search_hidden_units(train_set, method, grid, hc.inner_split,
                                                 hc, search_rng);
                }
                RngStream net_rng = RngStream::derive(
                    hc.seed,
                    {detail::kTagNet, mid, fold, static_cast<std::uint64_t>(prop)});

                std::vector<std::size_t> preds;
                std::uint64_t net_hash = 0;
                if (method == Method::mlp) {
                    const Network net = train_baseline(train_set, hidden, hc, net_rng);
                    preds = predict_baseline(net, test_set.features);
                    net_hash = param_hash(net);
                } else {
                    const Network net = train_s2s(train_set, hidden, hc, codec, net_rng);
                    RngStream refs_rng = RngStream::derive(
                        hc.seed,
                        {detail::kTagRefs, fold, static_cast<std::uint64_t>(prop)});
                    const ReferenceSet refs = select_references(
                        train_set, hc.ref_policy, hc.refs, refs_rng);
                    preds = predict_s2s(net, test_set.features, refs, codec);
                    net_hash = param_hash(net);
                }

                FoldResult row;
                row.method = method;
                row.proportion = prop;
                row.fold = fold;
                row.accuracy = accuracy(preds, test_set.labels);
                row.cm = confusion(preds, test_set.labels, report.positive_class);
                row.f1 = f1_from_counts(row.cm);
                row.hidden_units = hidden;
                row.net_hash = net_hash;
                report.rows.push_back(row);
            }
        }
    }

    for (int prop : hc.proportions) {
        for (Method method : methods) {
            std::vector<double> accs, f1s;
            for (const auto& row : report.rows)
                if (row.method == method && row.proportion == prop) {
                    accs.push_back(row.accuracy);
                    f1s.push_back(row.f1);
                }
            MethodSummary s;
            s.method = method;
            s.proportion = prop;
            std::tie(s.acc_mean, s.acc_std) = detail::mean_std(accs);
            std::tie(s.f1_mean, s.f1_std) = detail::mean_std(f1s);
            report.summary.push_back(s);
        }
    }
    return report;
}

inline EvalReport run_experiment(const Dataset& ds, const HarnessConfig& hc) {
    hc.validate();
    RngStream fold_rng = RngStream::derive(hc.seed, {detail::kTagFolds});
    const FoldPlan plan = stratified_kfold(ds, hc.folds, fold_rng);
    return run_experiment(ds, hc, plan);
}

/// Machine-readable form: one row per (method, proportion, fold).
inline std::string format_report_csv(const EvalReport& report) {
    std::string out = "task,method,proportion,fold,accuracy,f1,tp,fp,fn,tn,seed\n";
    char buf[64];
    for (const auto& row : report.rows) {
        out += report.task + "," + method_name(row.method) + ",";
        out += ProportionSpec{row.proportion}.str() + ",";
        out += std::to_string(row.fold) + ",";
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,", row.accuracy, row.f1);
        out += buf;
        out += std::to_string(row.cm.tp) + "," + std::to_string(row.cm.fp) + "," +
               std::to_string(row.cm.fn) + "," + std::to_string(row.cm.tn) + ",";
        out += std::to_string(report.config.seed) + "\n";
    }
    return out;
}

/// Human-readable table: methods as rows, proportions as columns, fold means
/// with standard deviations in parentheses.
inline std::string format_report_table(const EvalReport& report) {
    std::ostringstream out;
    const auto& props = report.config.proportions;
    char buf[64];

    out << "Task: " << report.task << "  (" << report.config.folds << "-fold CV, seed "
        << report.config.seed << ")\n";
    const auto block = [&](const char* title, bool use_f1) {
        out << title << "\n";
        std::snprintf(buf, sizeof buf, "%-8s", "Method");
        out << buf;
        for (int p : props) {
            std::snprintf(buf, sizeof buf, "%16s", ProportionSpec{p}.str().c_str());
            out << buf;
        }
        out << "\n";
        for (Method method : {Method::mlp, Method::s2sl}) {
            bool any = false;
            std::string line;
            std::snprintf(buf, sizeof buf, "%-8s", method_name(method).c_str());
            line += buf;
            for (int p : props) {
                for (const auto& s : report.summary)
                    if (s.method == method && s.proportion == p) {
                        any = true;
                        if (use_f1)
                            std::snprintf(buf, sizeof buf, "%8.3f (%.3f)", s.f1_mean,
                                          s.f1_std);
                        else
                            std::snprintf(buf, sizeof buf, "%8.2f (%.2f)", s.acc_mean,
                                          s.acc_std);
                        line += buf;
                    }
            }
            if (any) out << line << "\n";
        }
    };
    block("Mean accuracy (%) by training-data proportion", false);
    block(("Mean F1 by training-data proportion (positive = " +
           report.positive_class_name + ")")
              .c_str(),
          true);
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw DataError("write failed for " + path);
}

}  // namespace s2sl
