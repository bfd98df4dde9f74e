// s2sl: paired-sample learning toolkit.
//
// Subcommands:
//   synth      write a synthetic two-class Gaussian dataset as CSV
//   gradcheck  finite-difference check of the backprop gradients
//   train      one stratified holdout run, metrics on the held-out rows
//   bench      the full cross-validated low-resource benchmark
//
// Exit codes: 0 success, 1 gradcheck failure, 2 data error, 3 config error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "s2sl/s2sl.hpp"

namespace {

constexpr std::uint64_t kTagSynth = 0x54E7;
constexpr std::uint64_t kTagHoldout = 0x401D;
constexpr std::uint64_t kTagTrainNet = 0x7321;
constexpr std::uint64_t kTagTrainRefs = 0x72EF;
constexpr std::uint64_t kTagGradcheck = 0x6C4D;

struct DataArgs {
    std::string path;  // empty means synthesize
    bool header = false;
    std::size_t d = 13;
    std::size_t n1 = 60;
    std::size_t n2 = 60;
    double sep = 1.0;
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.path, "dataset CSV (features..., label per row)");
    cmd->add_flag("--header", args.header, "skip the first CSV line");
    cmd->add_option("--d", args.d, "synthetic feature dimension");
    cmd->add_option("--n1", args.n1, "synthetic class 1 count");
    cmd->add_option("--n2", args.n2, "synthetic class 2 count");
    cmd->add_option("--sep", args.sep, "synthetic per-axis mean separation");
}

s2sl::Dataset resolve_dataset(const DataArgs& args, std::uint64_t seed) {
    if (!args.path.empty()) {
        s2sl::CsvSchema schema;
        schema.header = args.header;
        return s2sl::load_csv(args.path, schema);
    }
    s2sl::RngStream rng = s2sl::RngStream::derive(seed, {kTagSynth});
    return s2sl::gen_gaussian_two_class(args.d, args.n1, args.n2, args.sep, rng);
}

struct HiddenArg {
    std::string text = "16";

    void apply(s2sl::HarnessConfig& hc) const {
        if (text == "search") {
            hc.search_hidden = true;
            hc.exhaustive_grid = false;
            return;
        }
        if (text == "search-all") {
            hc.search_hidden = true;
            hc.exhaustive_grid = true;
            return;
        }
        try {
            const long v = std::stol(text);
            if (v < 1) throw std::out_of_range("");
            hc.search_hidden = false;
            hc.hidden_units = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw s2sl::ConfigError("--hidden expects a positive count, 'search', or "
                                    "'search-all', got '" + text + "'");
        }
    }
};

s2sl::ReferencePolicy parse_ref_policy(const std::string& text) {
    if (text == "stratified") return s2sl::ReferencePolicy::stratified_random;
    if (text == "all") return s2sl::ReferencePolicy::all_train;
    throw s2sl::ConfigError("--ref-policy expects 'stratified' or 'all', got '" + text +
                            "'");
}

void apply_method(const std::string& text, s2sl::HarnessConfig& hc) {
    if (text == "s2sl") {
        hc.run_s2sl = true;
        hc.run_mlp = false;
    } else if (text == "mlp") {
        hc.run_s2sl = false;
        hc.run_mlp = true;
    } else if (text == "both") {
        hc.run_s2sl = true;
        hc.run_mlp = true;
    } else {
        throw s2sl::ConfigError("--method expects 's2sl', 'mlp', or 'both', got '" +
                                text + "'");
    }
}

int run_synth(const DataArgs& data, std::uint64_t seed, const std::string& out_path) {
    s2sl::RngStream rng = s2sl::RngStream::derive(seed, {kTagSynth});
    const s2sl::Dataset ds =
        s2sl::gen_gaussian_two_class(data.d, data.n1, data.n2, data.sep, rng);
    s2sl::save_csv(ds, out_path);
    const auto counts = ds.class_counts();
    std::cout << "wrote " << out_path << ": " << ds.size() << " rows (" << counts[0]
              << " + " << counts[1] << "), d=" << ds.dim() << ", sep=" << data.sep
              << "\n";
    return 0;
}

int run_gradcheck(std::uint64_t seed, bool corrupt) {
    constexpr double kTolerance = 1e-4;
    s2sl::FdResult worst;
    worst.max_rel_err = 0.0;

    const auto check_mode = [&](s2sl::OutputActivation act, s2sl::Loss loss,
                                const char* label, std::uint64_t tag) {
        s2sl::NetConfig nc;
        nc.input_dim = 5;
        nc.hidden_units = 4;
        nc.output_dim = 3;
        nc.output_activation = act;
        nc.loss = loss;
        s2sl::RngStream rng = s2sl::RngStream::derive(seed, {kTagGradcheck, tag});
        const s2sl::Network net = s2sl::init_network(nc, rng);

        s2sl::Matrix x(6, nc.input_dim);
        for (double& v : x.data()) v = rng.next_uniform(-1.0, 1.0);
        s2sl::Matrix targets(6, nc.output_dim);
        if (loss == s2sl::Loss::bce) {
            for (double& v : targets.data()) v = rng.next_below(2) ? 1.0 : 0.0;
        } else {
            for (std::size_t i = 0; i < targets.rows(); ++i)
                targets(i, rng.next_below(nc.output_dim)) = 1.0;
        }

        s2sl::Gradients analytic = s2sl::gradient(net, x, targets);
        if (corrupt) analytic.w2(0, 0) += 0.05;
        const s2sl::FdResult fd = s2sl::finite_diff_against(net, analytic, x, targets);
        std::printf("%s: max rel err %.3e at %s\n", label, fd.max_rel_err,
                    fd.worst_coord.c_str());
        if (fd.max_rel_err > worst.max_rel_err) worst = fd;
    };

    check_mode(s2sl::OutputActivation::sigmoid, s2sl::Loss::bce, "sigmoid+bce", 1);
    check_mode(s2sl::OutputActivation::softmax, s2sl::Loss::cross_entropy, "softmax+ce",
               2);

    if (worst.max_rel_err >= kTolerance) {
        std::printf("FAIL: %.3e at %s exceeds %.0e\n", worst.max_rel_err,
                    worst.worst_coord.c_str(), kTolerance);
        return 1;
    }
    std::printf("OK: all gradients within %.0e\n", kTolerance);
    return 0;
}

int run_train(const DataArgs& data, const s2sl::HarnessConfig& hc, double holdout,
              const std::string& model_path) {
    if (hc.run_mlp == hc.run_s2sl)
        throw s2sl::ConfigError("train needs --method s2sl or --method mlp");
    if (!(holdout > 0.0) || !(holdout < 1.0))
        throw s2sl::ConfigError("--holdout must lie in (0, 1), got " +
                                std::to_string(holdout));
    hc.validate();

    const s2sl::Dataset ds = resolve_dataset(data, hc.seed);
    s2sl::RngStream split_rng = s2sl::RngStream::derive(hc.seed, {kTagHoldout});
    const auto [train_idx, test_idx] =
        s2sl::stratified_holdout_split(ds, holdout, split_rng);
    const s2sl::Dataset train_raw = s2sl::subset(ds, train_idx);
    const s2sl::Dataset test_raw = s2sl::subset(ds, test_idx);
    const s2sl::Normalizer nz = s2sl::fit_normalizer(train_raw);
    const s2sl::Dataset train_set = s2sl::apply_normalizer(nz, train_raw);
    const s2sl::Dataset test_set = s2sl::apply_normalizer(nz, test_raw);

    const s2sl::Method method = hc.run_s2sl ? s2sl::Method::s2sl : s2sl::Method::mlp;
    s2sl::RngStream net_rng = s2sl::RngStream::derive(hc.seed, {kTagTrainNet});
    std::size_t hidden = hc.hidden_units;
    if (hc.search_hidden) {
        s2sl::RngStream search_rng = s2sl::RngStream::derive(hc.seed, {kTagTrainNet, 1});
        const std::size_t width =
            method == s2sl::Method::s2sl ? 2 * ds.dim() : ds.dim();
        hidden = s2sl::search_hidden_units(train_set, method,
                                           s2sl::hidden_unit_grid(width,
                                                                  hc.exhaustive_grid),
                                           hc.inner_split, hc, search_rng);
    }

    std::vector<std::size_t> preds;
    s2sl::Network net{};
    if (method == s2sl::Method::mlp) {
        net = s2sl::train_baseline(train_set, hidden, hc, net_rng);
        preds = s2sl::predict_baseline(net, test_set.features);
    } else {
        const s2sl::LabelCodec codec(ds.num_classes());
        net = s2sl::train_s2s(train_set, hidden, hc, codec, net_rng);
        s2sl::RngStream refs_rng = s2sl::RngStream::derive(hc.seed, {kTagTrainRefs});
        const s2sl::ReferenceSet refs =
            s2sl::select_references(train_set, hc.ref_policy, hc.refs, refs_rng);
        preds = s2sl::predict_s2s(net, test_set.features, refs, codec);
    }

    const std::size_t positive = s2sl::minority_class(ds);
    const double acc = s2sl::accuracy(preds, test_set.labels);
    const double f1 = s2sl::f1_from_counts(
        s2sl::confusion(preds, test_set.labels, positive));
    std::printf("method=%s hidden=%zu holdout_acc=%.2f f1=%.3f (positive=%s)\n",
                s2sl::method_name(method).c_str(), hidden, acc, f1,
                ds.class_names[positive].c_str());

    if (!model_path.empty()) {
        s2sl::save_model(net, model_path);
        std::cout << "model written to " << model_path << "\n";
    }
    return 0;
}

int run_bench(const DataArgs& data, const s2sl::HarnessConfig& hc,
              const std::string& out_dir) {
    hc.validate();
    const s2sl::Dataset ds = resolve_dataset(data, hc.seed);
    const s2sl::EvalReport report = s2sl::run_experiment(ds, hc);

    std::filesystem::create_directories(out_dir);
    const std::string csv_path = out_dir + "/report.csv";
    const std::string table_path = out_dir + "/report.txt";
    const std::string table = s2sl::format_report_table(report);
    s2sl::write_text_file(csv_path, s2sl::format_report_csv(report));
    s2sl::write_text_file(table_path, table);
    std::cout << table;
    std::cout << "reports written to " << csv_path << " and " << table_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paired-sample learning toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "optional key=value config file (flags win)");

    DataArgs data;
    s2sl::HarnessConfig hc;
    HiddenArg hidden;
    std::string method_text = "both";
    std::string ref_policy_text = "stratified";
    std::string out_dir = ".";
    std::string out_file = "synth.csv";
    std::string model_path;
    double holdout = 0.2;
    bool corrupt = false;

    CLI::App* synth = app.add_subcommand("synth", "write a synthetic Gaussian CSV");
    synth->add_option("--d", data.d, "feature dimension");
    synth->add_option("--n1", data.n1, "class 1 count");
    synth->add_option("--n2", data.n2, "class 2 count");
    synth->add_option("--sep", data.sep, "per-axis mean separation");
    synth->add_option("--seed", hc.seed, "master seed");
    synth->add_option("--out", out_file, "output CSV path");

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference check");
    gradcheck->add_option("--seed", hc.seed, "fixture seed");
    gradcheck->add_flag("--corrupt", corrupt, "perturb one analytic entry (test hook)");

    CLI::App* train_cmd = app.add_subcommand("train", "single stratified holdout run");
    add_data_flags(train_cmd, data);
    train_cmd->add_option("--seed", hc.seed, "master seed");
    train_cmd->add_option("--method", method_text, "s2sl or mlp");
    train_cmd->add_option("--hidden", hidden.text, "count, 'search', or 'search-all'");
    train_cmd->add_option("--refs", hc.refs, "reference count");
    train_cmd->add_option("--ref-policy", ref_policy_text, "stratified or all");
    train_cmd->add_option("--epochs", hc.epochs, "training epochs");
    train_cmd->add_option("--lr", hc.learning_rate, "adam learning rate");
    train_cmd->add_option("--batch", hc.batch_size, "minibatch size");
    train_cmd->add_option("--holdout", holdout, "held-out fraction in (0, 1)");
    train_cmd->add_option("--save-model", model_path, "write the trained model here");

    CLI::App* bench = app.add_subcommand("bench", "cross-validated benchmark");
    add_data_flags(bench, data);
    bench->add_option("--seed", hc.seed, "master seed");
    bench->add_option("--folds", hc.folds, "cross-validation folds");
    bench->add_option("--proportions", hc.proportions,
                      "training-data numerators over 4, e.g. 1,2,3,4")
        ->delimiter(',');
    bench->add_option("--method", method_text, "s2sl, mlp, or both");
    bench->add_option("--hidden", hidden.text, "count, 'search', or 'search-all'");
    bench->add_option("--refs", hc.refs, "reference count");
    bench->add_option("--ref-policy", ref_policy_text, "stratified or all");
    bench->add_option("--epochs", hc.epochs, "training epochs");
    bench->add_option("--lr", hc.learning_rate, "adam learning rate");
    bench->add_option("--batch", hc.batch_size, "minibatch size");
    bench->add_option("--out", out_dir, "report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        hidden.apply(hc);
        apply_method(method_text, hc);
        hc.ref_policy = parse_ref_policy(ref_policy_text);
        if (*synth) return run_synth(data, hc.seed, out_file);
        if (*gradcheck) return run_gradcheck(hc.seed, corrupt);
        if (*train_cmd) return run_train(data, hc, holdout, model_path);
        return run_bench(data, hc, out_dir);
    } catch (const s2sl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const s2sl::ShapeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const s2sl::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
