#include <doctest.h>

#include <benchcast/metrics.hpp>
#include <benchcast/predictor.hpp>
#include <benchcast/synth.hpp>

#include "test_support.hpp"

using namespace benchcast;
namespace ts = test_support;

namespace {

EncodedMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    EncodedMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.data.resize(rows * cols);
    for (auto& v : m.data) v = rng.next_uniform(-2, 2);
    m.columns.resize(cols);
    return m;
}

NeuralNetModel random_net(Rng& rng, std::size_t input, std::size_t hidden) {
    NeuralNetModel m;
    m.input = input;
    m.hidden = hidden;
    m.w1.resize(hidden * input);
    m.b1.resize(hidden);
    m.w2.resize(hidden);
    for (auto& v : m.w1) v = rng.next_uniform(-0.5, 0.5);
    for (auto& v : m.b1) v = rng.next_uniform(-0.5, 0.5);
    for (auto& v : m.w2) v = rng.next_uniform(-0.5, 0.5);
    m.b2 = rng.next_uniform(-0.5, 0.5);
    return m;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(61);
    const double eps = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t input = 2 + rng.next_index(4);
        std::size_t hidden = 1 + rng.next_index(5);
        EncodedMatrix x = random_matrix(rng, 5, input);
        std::vector<double> y(5);
        for (auto& v : y) v = rng.next_uniform(-1, 1);

        NeuralNetModel m = random_net(rng, input, hidden);
        nn_detail::Gradients g = nn_detail::gradients(m, x, y);

        auto check_one = [&](double& param, double analytic) {
            double keep = param;
            param = keep + eps;
            double up = nn_detail::loss(m, x, y);
            param = keep - eps;
            double down = nn_detail::loss(m, x, y);
            param = keep;
            double numeric = (up - down) / (2 * eps);
            double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            CHECK(std::abs(numeric - analytic) / scale < 1e-4);
        };

        for (std::size_t i = 0; i < m.w1.size(); ++i) check_one(m.w1[i], g.w1[i]);
        for (std::size_t i = 0; i < m.b1.size(); ++i) check_one(m.b1[i], g.b1[i]);
        for (std::size_t i = 0; i < m.w2.size(); ++i) check_one(m.w2[i], g.w2[i]);
        check_one(m.b2, g.b2);
    }
}

TEST_CASE("zero output layer on a constant target is a fixed point") {
    // constant target standardizes to all zeros; with w2 = 0 and b2 = 0 the
    // loss starts at 0 and every gradient vanishes
    Rng rng(67);
    EncodedMatrix x = random_matrix(rng, 8, 3);
    std::vector<double> y(8, 0.0);

    NeuralNetModel m = random_net(rng, 3, 4);
    std::fill(m.w2.begin(), m.w2.end(), 0.0);
    m.b2 = 0.0;
    m.y_mean = 321.0;
    m.y_std = 1.0;

    CHECK(nn_detail::loss(m, x, y) == 0.0);
    std::vector<double> w1_before = m.w1;
    nn_detail::train_full_batch(m, x, y, 0.2, 50);
    CHECK(nn_detail::loss(m, x, y) == 0.0);
    CHECK(m.w1 == w1_before);
    // prediction in original units is the training mean
    std::vector<double> probe(3, 0.5);
    CHECK(m.predict_encoded(probe) == doctest::Approx(321.0));
}

TEST_CASE("training reduces error on a learnable function") {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = 71;
    Dataset ds = generate(spec, 150).dataset;
    auto rows = ds.all_rows();

    NnOptions opt;
    opt.hidden = 12;
    opt.lr = 0.05;
    opt.max_iter = 400;
    opt.seed = 5;
    Predictor p = train_nn(ds, rows, opt);

    std::vector<double> pred = p.predict_rows(ds, rows);
    std::vector<double> obs(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) obs[r] = ds.exe_time(r);
    CHECK(rae(pred, obs) < 0.6);  // clearly better than the mean baseline
}

TEST_CASE("divergence reports the learning rate") {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = 73;
    Dataset ds = generate(spec, 60).dataset;
    auto rows = ds.all_rows();
    NnOptions opt;
    opt.hidden = 8;
    opt.lr = 1e6;  // guaranteed blow-up
    opt.max_iter = 200;
    opt.seed = 5;
    try {
        train_nn(ds, rows, opt);
        FAIL("expected divergence");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("1000000") != std::string::npos);
    }
}

TEST_CASE("nn option validation") {
    Dataset ds = ts::tiny_dataset({ts::tiny_record("1", "b1", 5, "SSD", "ETH", 1)});
    auto rows = ds.all_rows();
    NnOptions opt;
    opt.hidden = 0;
    CHECK_THROWS_AS(train_nn(ds, rows, opt), std::invalid_argument);
    opt.hidden = 2;
    opt.lr = 0;
    CHECK_THROWS_AS(train_nn(ds, rows, opt), std::invalid_argument);
    opt.lr = 0.1;
    opt.max_iter = 0;
    CHECK_THROWS_AS(train_nn(ds, rows, opt), std::invalid_argument);
}

TEST_CASE("the stock preset is the default") {
    NnOptions opt;
    CHECK(opt.hidden == 300);
    CHECK(opt.lr == 0.2);
    CHECK(opt.max_iter == 1000);
}
