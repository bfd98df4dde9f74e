#include "s2sl/nnet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "s2sl/errors.hpp"
#include "s2sl/matrix.hpp"
#include "s2sl/rng.hpp"

namespace s2sl {
namespace {

NetConfig small_config(OutputActivation act, Loss loss, std::size_t in = 3,
                       std::size_t hidden = 4, std::size_t out = 4) {
    NetConfig nc;
    nc.input_dim = in;
    nc.hidden_units = hidden;
    nc.output_dim = out;
    nc.output_activation = act;
    nc.loss = loss;
    return nc;
}

Matrix random_inputs(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix x(rows, cols);
    for (double& v : x.data()) v = rng.next_uniform(-1.0, 1.0);
    return x;
}

Matrix random_targets(std::size_t rows, std::size_t cols, Loss loss, RngStream& rng) {
    Matrix t(rows, cols);
    if (loss == Loss::bce) {
        for (double& v : t.data()) v = rng.next_below(2) ? 1.0 : 0.0;
    } else {
        for (std::size_t i = 0; i < rows; ++i) t(i, rng.next_below(cols)) = 1.0;
    }
    return t;
}

TEST(NetConfig, RejectsInvalidSettings) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    EXPECT_NO_THROW(nc.validate());

    NetConfig bad = nc;
    bad.input_dim = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.hidden_units = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.learning_rate = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.beta1 = 1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.epsilon = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.loss = Loss::cross_entropy;  // pairing broken: CE with sigmoid
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = nc;
    bad.output_activation = OutputActivation::softmax;  // softmax with BCE
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(InitNetwork, DeterministicGivenSeed) {
    const NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    RngStream a(7);
    RngStream b(7);
    const Network na = init_network(nc, a);
    const Network nb = init_network(nc, b);
    EXPECT_EQ(na.w1, nb.w1);
    EXPECT_EQ(na.b1, nb.b1);
    EXPECT_EQ(na.w2, nb.w2);
    EXPECT_EQ(na.b2, nb.b2);
    EXPECT_EQ(param_hash(na), param_hash(nb));
}

TEST(InitNetwork, BiasesZeroAndWeightsWithinGlorotBound) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 13, 10, 4);
    RngStream rng(3);
    const Network net = init_network(nc, rng);
    for (double b : net.b1) EXPECT_DOUBLE_EQ(b, 0.0);
    for (double b : net.b2) EXPECT_DOUBLE_EQ(b, 0.0);
    const double bound1 = std::sqrt(6.0 / 23.0);  // fan_in 13 + fan_out 10
    for (double w : net.w1.data()) EXPECT_LE(std::abs(w), bound1);
    const double bound2 = std::sqrt(6.0 / 14.0);
    for (double w : net.w2.data()) EXPECT_LE(std::abs(w), bound2);
    EXPECT_EQ(net.parameter_count(), 13u * 10 + 10 + 10 * 4 + 4);
}

TEST(Forward, ZeroNetworkGivesUniformOutputs) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 3, 4, 4);
    RngStream rng(1);
    Network net = init_network(nc, rng);
    net.w1 = Matrix(4, 3);
    net.w2 = Matrix(4, 4);
    const auto y = forward(net, std::vector<double>{0.3, -0.2, 0.9});
    for (double v : y) EXPECT_DOUBLE_EQ(v, 0.5);

    NetConfig nc2 = small_config(OutputActivation::softmax, Loss::cross_entropy, 3, 4, 2);
    Network net2 = init_network(nc2, rng);
    net2.w1 = Matrix(4, 3);
    net2.w2 = Matrix(2, 4);
    const auto y2 = forward(net2, std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(y2[0], 0.5);
    EXPECT_DOUBLE_EQ(y2[1], 0.5);
}

TEST(Forward, HandSetSingleUnitNet) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 1, 1, 1);
    RngStream rng(1);
    Network net = init_network(nc, rng);
    net.w1 = Matrix::from_rows({{1.0}});
    net.b1 = {0.0};
    net.w2 = Matrix::from_rows({{2.0}});
    net.b2 = {0.0};
    const auto y = forward(net, std::vector<double>{1.5});
    EXPECT_NEAR(y[0], 0.95257, 1e-5);  // sigmoid(3)
}

TEST(Forward, RejectsWrongInputLength) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    RngStream rng(2);
    const Network net = init_network(nc, rng);
    EXPECT_THROW(forward(net, std::vector<double>{1.0, 2.0}), ShapeError);
    EXPECT_THROW(forward_batch(net, Matrix(2, 5)), ShapeError);
}

TEST(Forward, BatchRowsMatchSingleForward) {
    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, 5, 6, 3);
    RngStream rng(4);
    const Network net = init_network(nc, rng);
    const Matrix x = random_inputs(7, 5, rng);
    const Matrix y = forward_batch(net, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto yi = forward(net, x.row(i));
        for (std::size_t j = 0; j < yi.size(); ++j) EXPECT_DOUBLE_EQ(y(i, j), yi[j]);
    }
}

TEST(Forward, SigmoidStrictlyInsideUnitInterval) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 4, 8, 6);
    RngStream rng(5);
    const Network net = init_network(nc, rng);
    const Matrix x = random_inputs(50, 4, rng);
    const Matrix y = forward_batch(net, x);
    for (double v : y.data()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Forward, SoftmaxRowsSumToOneAndShiftInvariant) {
    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, 4, 8, 5);
    RngStream rng(6);
    Network net = init_network(nc, rng);
    const Matrix x = random_inputs(20, 4, rng);
    const Matrix y = forward_batch(net, x);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        double sum = 0.0;
        for (double v : y.row(i)) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    // shifting every output bias by a constant leaves softmax unchanged
    Network shifted = net;
    for (double& b : shifted.b2) b += 1000.0;
    const Matrix y2 = forward_batch(shifted, x);
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < y.cols(); ++j) EXPECT_NEAR(y(i, j), y2(i, j), 1e-9);
}

TEST(BceLoss, HalfConfidenceIsLnTwo) {
    const std::vector<double> p{0.5, 0.5, 0.5, 0.5};
    const std::vector<double> t{0.0, 1.0, 0.0, 1.0};
    EXPECT_NEAR(bce_loss(p, t), std::log(2.0), 1e-12);
}

TEST(BceLoss, PerfectPredictionNearZero) {
    const std::vector<double> t{0.0, 1.0, 1.0, 0.0};
    EXPECT_LT(bce_loss(t, t), 1e-10);
}

TEST(BceLoss, SymmetricUnderJointFlip) {
    const std::vector<double> p{0.2, 0.7, 0.9};
    const std::vector<double> t{0.0, 1.0, 1.0};
    std::vector<double> p_flip{0.8, 0.3, 0.1};
    std::vector<double> t_flip{1.0, 0.0, 0.0};
    EXPECT_NEAR(bce_loss(p, t_flip), bce_loss(p_flip, t), 1e-12);
}

TEST(BceLoss, ClippingKeepsLossFinite) {
    const std::vector<double> p{0.0, 1.0};
    const std::vector<double> t{1.0, 0.0};
    const double loss = bce_loss(p, t);
    EXPECT_TRUE(std::isfinite(loss));
    EXPECT_NEAR(loss, -std::log(1e-12), 1e-3);
}

TEST(BceLoss, RejectsLengthMismatch) {
    EXPECT_THROW(bce_loss(std::vector<double>{0.5}, std::vector<double>{1.0, 0.0}),
                 ShapeError);
}

TEST(CrossEntropyLoss, OneHotPicksTrueClassLogProb) {
    const std::vector<double> p{0.1, 0.7, 0.2};
    const std::vector<double> t{0.0, 1.0, 0.0};
    EXPECT_NEAR(cross_entropy_loss(p, t), -std::log(0.7), 1e-12);
    EXPECT_THROW(cross_entropy_loss(p, std::vector<double>{1.0}), ShapeError);
}

TEST(AdamUpdate, FirstStepMovesByLearningRate) {
    NetConfig cfg = small_config(OutputActivation::sigmoid, Loss::bce);
    std::vector<double> params{0.0};
    std::vector<double> grad{1.0};
    std::vector<double> m{0.0}, v{0.0};
    detail::adam_update(params, grad, m, v, cfg, 1);
    EXPECT_NEAR(params[0], -0.001, 1e-6);  // mhat = vhat = 1 on the first step
}

TEST(Gradient, ZeroAtPerfectPredictionUnderBce) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 3, 4, 2);
    RngStream rng(8);
    Network net = init_network(nc, rng);
    net.w1 = Matrix(4, 3);
    net.w2 = Matrix(2, 4);  // all outputs sigmoid(0) = 0.5
    Matrix x(5, 3);
    Matrix t(5, 2, 0.5);  // targets equal to the prediction
    const Gradients g = gradient(net, x, t);
    double norm = 0.0;
    for (double v : g.w1.data()) norm += v * v;
    for (double v : g.b1) norm += v * v;
    for (double v : g.w2.data()) norm += v * v;
    for (double v : g.b2) norm += v * v;
    EXPECT_LT(std::sqrt(norm), 1e-8);
}

TEST(Gradient, InvariantUnderRowDuplication) {
    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, 3, 4, 3);
    RngStream rng(9);
    const Network net = init_network(nc, rng);
    const Matrix x = random_inputs(4, 3, rng);
    const Matrix t = random_targets(4, 3, Loss::cross_entropy, rng);
    Matrix x2(8, 3), t2(8, 3);
    for (std::size_t i = 0; i < 8; ++i) {
        auto xs = x.row(i % 4);
        auto ts = t.row(i % 4);
        std::copy(xs.begin(), xs.end(), x2.row(i).begin());
        std::copy(ts.begin(), ts.end(), t2.row(i).begin());
    }
    const Gradients g1 = gradient(net, x, t);
    const Gradients g2 = gradient(net, x2, t2);
    for (std::size_t i = 0; i < g1.w1.size(); ++i)
        EXPECT_NEAR(g1.w1.data()[i], g2.w1.data()[i], 1e-12);
    for (std::size_t i = 0; i < g1.b2.size(); ++i)
        EXPECT_NEAR(g1.b2[i], g2.b2[i], 1e-12);
}

TEST(Gradient, RejectsShapeMismatch) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    RngStream rng(10);
    const Network net = init_network(nc, rng);
    EXPECT_THROW(gradient(net, Matrix(2, 5), Matrix(2, 4)), ShapeError);
    EXPECT_THROW(gradient(net, Matrix(2, 3), Matrix(3, 4)), ShapeError);
}

TEST(FiniteDiff, BothLossModesStayBelowTolerance) {
    RngStream rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        for (Loss loss : {Loss::bce, Loss::cross_entropy}) {
            const auto act = loss == Loss::bce ? OutputActivation::sigmoid
                                               : OutputActivation::softmax;
            const NetConfig nc = small_config(act, loss);
            const Network net = init_network(nc, rng);
            const Matrix x = random_inputs(6, nc.input_dim, rng);
            const Matrix t = random_targets(6, nc.output_dim, loss, rng);
            const FdResult fd = finite_diff_check(net, x, t);
            EXPECT_LT(fd.max_rel_err, 1e-4) << "loss mode " << static_cast<int>(loss)
                                            << ", worst " << fd.worst_coord;
        }
    }
}

TEST(FiniteDiff, NonOneHotTargetsUnderCrossEntropy) {
    RngStream rng(12);
    const NetConfig nc =
        small_config(OutputActivation::softmax, Loss::cross_entropy, 3, 4, 3);
    const Network net = init_network(nc, rng);
    const Matrix x = random_inputs(5, 3, rng);
    Matrix t(5, 3);
    for (double& v : t.data()) v = rng.next_unit();  // arbitrary soft targets
    const FdResult fd = finite_diff_check(net, x, t);
    EXPECT_LT(fd.max_rel_err, 1e-4) << fd.worst_coord;
}

TEST(FiniteDiff, CorruptedGradientIsDetectedAndNamed) {
    RngStream rng(13);
    const NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    const Network net = init_network(nc, rng);
    const Matrix x = random_inputs(6, nc.input_dim, rng);
    const Matrix t = random_targets(6, nc.output_dim, Loss::bce, rng);
    Gradients g = gradient(net, x, t);
    g.w2(1, 2) += 0.05;
    const FdResult fd = finite_diff_against(net, g, x, t);
    EXPECT_GT(fd.max_rel_err, 1e-2);
    EXPECT_EQ(fd.worst_coord, "w2[1][2]");
}

TEST(FiniteDiff, ZeroInputPerfectTargetFixtureIsQuiet) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 3, 4, 2);
    RngStream rng(14);
    Network net = init_network(nc, rng);
    net.w1 = Matrix(4, 3);
    net.w2 = Matrix(2, 4);
    const Matrix x(4, 3);        // all-zero rows
    const Matrix t(4, 2, 0.5);   // equals the constant prediction
    const FdResult fd = finite_diff_check(net, x, t);
    EXPECT_LT(fd.max_rel_err, 1e-6);
}

TEST(Train, ConvergesOnSeparableToyset) {
    const Matrix x = Matrix::from_rows(
        {{1.0, 1.0}, {1.2, 0.8}, {-1.0, -1.0}, {-0.8, -1.2}});
    const Matrix t = Matrix::from_rows(
        {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}});
    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, 2, 8, 2);
    nc.epochs = 500;
    nc.learning_rate = 0.01;
    RngStream rng(15);
    Network net = init_network(nc, rng);
    const TrainResult result = train(std::move(net), x, t, rng);
    EXPECT_LT(result.report.final_loss, 0.1);
    EXPECT_EQ(result.report.epochs_run, 500u);
    EXPECT_EQ(result.report.loss_history.size(), 500u);
    for (double loss : result.report.loss_history) {
        EXPECT_TRUE(std::isfinite(loss));
        EXPECT_GE(loss, 0.0);
    }
}

TEST(Train, ReplayIsBitwiseIdentical) {
    RngStream data_rng(16);
    const Matrix x = random_inputs(20, 3, data_rng);
    const Matrix t = random_targets(20, 4, Loss::bce, data_rng);
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    nc.epochs = 30;

    const auto run = [&]() {
        RngStream rng(17);
        Network net = init_network(nc, rng);
        return train(std::move(net), x, t, rng);
    };
    const TrainResult a = run();
    const TrainResult b = run();
    EXPECT_EQ(a.net.w1, b.net.w1);
    EXPECT_EQ(a.net.b1, b.net.b1);
    EXPECT_EQ(a.net.w2, b.net.w2);
    EXPECT_EQ(a.net.b2, b.net.b2);
    EXPECT_EQ(a.report.loss_history, b.report.loss_history);
    EXPECT_EQ(param_hash(a.net), param_hash(b.net));
}

TEST(Train, LossNonIncreasingOnFullBatchLinearFixture) {
    // near-linear regime: identity first layer, bias keeps ReLU strictly active
    RngStream data_rng(18);
    const std::size_t d = 3;
    Matrix x = random_inputs(16, d, data_rng);
    Matrix t(16, 2);
    for (std::size_t i = 0; i < 16; ++i) t(i, x(i, 0) > 0.0 ? 0 : 1) = 1.0;

    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, d,
                                d, 2);
    nc.epochs = 50;
    nc.batch_size = 16;  // full batch: one step per epoch
    nc.learning_rate = 1e-3;
    RngStream rng(19);
    Network net = init_network(nc, rng);
    net.w1 = identity(d);
    net.b1.assign(d, 10.0);  // inputs lie in (-1, 1), so pre-activations stay > 0
    const TrainResult result = train(std::move(net), x, t, rng);
    for (std::size_t e = 1; e < result.report.loss_history.size(); ++e)
        EXPECT_LE(result.report.loss_history[e], result.report.loss_history[e - 1] + 1e-9)
            << "epoch " << e;
}

TEST(Train, AbortsOnNonFiniteLossWithDiagnostic) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 2, 3, 2);
    RngStream rng(20);
    Network net = init_network(nc, rng);
    Matrix x(4, 2);
    x(0, 0) = std::numeric_limits<double>::infinity();
    const Matrix t(4, 2);
    try {
        train(std::move(net), x, t, rng);
        FAIL() << "expected a non-finite loss abort";
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("non-finite loss"), std::string::npos) << msg;
        EXPECT_NE(msg.find("epoch 0"), std::string::npos) << msg;
    }
}

TEST(Train, RejectsMismatchedData) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    RngStream rng(21);
    Network net = init_network(nc, rng);
    EXPECT_THROW(train(std::move(net), Matrix(4, 3), Matrix(5, 4), rng), ShapeError);
}

TEST(ParamHash, SensitiveToSingleWeightChange) {
    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce);
    RngStream rng(22);
    const Network a = init_network(nc, rng);
    Network b = a;
    EXPECT_EQ(param_hash(a), param_hash(b));
    b.w1(0, 0) += 1e-15;
    EXPECT_NE(param_hash(a), param_hash(b));
}

TEST(ModelIo, RoundTripIsExact) {
    NetConfig nc = small_config(OutputActivation::softmax, Loss::cross_entropy, 5, 7, 3);
    nc.learning_rate = 0.0025;
    nc.seed = 99;
    RngStream rng(23);
    Network net = init_network(nc, rng);
    net.b2 = {0.125, -3.5e-7, 1.0 / 3.0};

    std::stringstream buffer;
    save_model(net, buffer);
    const Network loaded = load_model(buffer);
    EXPECT_EQ(loaded.w1, net.w1);
    EXPECT_EQ(loaded.b1, net.b1);
    EXPECT_EQ(loaded.w2, net.w2);
    EXPECT_EQ(loaded.b2, net.b2);
    EXPECT_EQ(loaded.config.input_dim, net.config.input_dim);
    EXPECT_EQ(loaded.config.learning_rate, net.config.learning_rate);
    EXPECT_EQ(loaded.config.seed, net.config.seed);
    EXPECT_EQ(loaded.config.loss, net.config.loss);
    EXPECT_EQ(param_hash(loaded), param_hash(net));

    RngStream xr(24);
    const Matrix x = random_inputs(3, 5, xr);
    EXPECT_EQ(forward_batch(loaded, x), forward_batch(net, x));
}

TEST(ModelIo, RejectsMalformedInput) {
    std::stringstream bad_magic("not-a-model v9\n");
    EXPECT_THROW(load_model(bad_magic), DataError);

    NetConfig nc = small_config(OutputActivation::sigmoid, Loss::bce, 2, 2, 2);
    RngStream rng(25);
    const Network net = init_network(nc, rng);
    std::stringstream buffer;
    save_model(net, buffer);
    std::string text = buffer.str();
    text.resize(text.size() / 2);  // truncate mid-tensor
    std::stringstream truncated(text);
    EXPECT_THROW(load_model(truncated), DataError);
}

}  // namespace
}  // namespace s2sl
