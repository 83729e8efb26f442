#include "carets/nn.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace carets;
using namespace carets::nn;

TEST_CASE("dense layer gradients") {
    Rng rng(1);
    Dense d(4, 3, rng);
    MatrixXd x(2, 4), probe(2, 3);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
    for (long i = 0; i < probe.size(); ++i) probe.data()[i] = rng.uniform(-1, 1);

    d.zero_grads();
    d.forward(x);
    d.backward(probe);
    std::vector<ParamView> params;
    d.collect("dense", params);
    const auto res = testutil::grad_check(
        params, [&]() { return d.forward(x).cwiseProduct(probe).sum(); });
    CHECK(res.max_rel < 1e-6);
}

TEST_CASE("layer norm normalizes rows and passes gradients") {
    Rng rng(2);
    LayerNorm ln(6);
    MatrixXd x(3, 6), probe(3, 6);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2, 2);
    for (long i = 0; i < probe.size(); ++i) probe.data()[i] = rng.uniform(-1, 1);

    const MatrixXd y = ln.forward(x);
    for (long r = 0; r < 3; ++r) {
        CHECK(y.row(r).mean() == doctest::Approx(0.0).epsilon(1e-10));
        const double var = (y.row(r).array() - y.row(r).mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
    }

    ln.zero_grads();
    ln.forward(x);
    ln.backward(probe);
    std::vector<ParamView> params;
    ln.collect("ln", params);
    const auto res = testutil::grad_check(
        params, [&]() { return ln.forward(x).cwiseProduct(probe).sum(); });
    CHECK(res.max_rel < 1e-5);
}

TEST_CASE("adam minimizes a separable quadratic") {
    std::vector<double> w = {5.0, -3.0};
    std::vector<double> g = {0.0, 0.0};
    std::vector<ParamView> params{{"w", w.data(), g.data(), 2}};
    Adam opt(params, 0.1);
    for (int step = 0; step < 500; ++step) {
        g[0] = 2.0 * (w[0] - 1.0);
        g[1] = 2.0 * (w[1] + 2.0);
        opt.step();
    }
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(w[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("sinusoidal positions distinguish positions") {
    const MatrixXd p = sinusoidal_positions(15, 8);
    CHECK(p.rows() == 15);
    CHECK(p.cols() == 8);
    CHECK(p(0, 0) == 0.0);
    CHECK(p(0, 1) == 1.0);
    for (long s = 1; s < 15; ++s)
        CHECK((p.row(s) - p.row(0)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("mean pool and its adjoint") {
    Rng rng(3);
    MatrixXd x(2 * 3, 4);
    for (long i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
    const MatrixXd y = mean_pool(x, 2, 3);
    CHECK(y.rows() == 2);
    CHECK(y(0, 0) ==
          doctest::Approx((x(0, 0) + x(1, 0) + x(2, 0)) / 3.0).epsilon(1e-14));
    const MatrixXd g = mean_pool_backward(MatrixXd::Ones(2, 4), 2, 3);
    CHECK(g.rows() == 6);
    CHECK(g(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}
