#include "carets/heads.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace carets;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<long>(v.size()));
    long i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("sigmoid pins") {
    CHECK(trend_sigmoid(0.0) == 0.5);
    CHECK(trend_sigmoid(10.0) > 0.999);
    CHECK(trend_sigmoid(1.0) ==
          doctest::Approx(0.7310585786300049).epsilon(1e-14));
    CHECK(trend_sigmoid(-1000.0) >= 0.0);
    CHECK(trend_sigmoid(1000.0) <= 1.0);
}

TEST_CASE("threshold decision") {
    CHECK(trend_decide(0.5) == 1);
    CHECK(trend_decide(0.49) == -1);
    CHECK(trend_decide(0.9) == 1);
}

TEST_CASE("pair softmax") {
    const ProbPair eq = trend_softmax(3.0, 3.0);
    CHECK(eq.up == 0.5);
    CHECK(eq.down == 0.5);

    const ProbPair p = trend_softmax(1.0, 0.0);
    CHECK(p.up == doctest::Approx(0.7310585786300049).epsilon(1e-14));
    CHECK(p.up + p.down == 1.0);

    const ProbPair big = trend_softmax(1000.0, 0.0);
    CHECK(std::isfinite(big.up));
    CHECK(big.up == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(big.up + big.down == 1.0);

    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const ProbPair q = trend_softmax(rng.uniform(-50, 50), rng.uniform(-50, 50));
        CHECK(std::abs(q.up + q.down - 1.0) <= 1e-12);
        CHECK(q.up >= 0.0);
        CHECK(q.down >= 0.0);
    }
}

TEST_CASE("sign-magnitude fusion") {
    CHECK(fuse_sign_magnitude(1.0, vec({1.0}), vec({0.2}))(0) ==
          doctest::Approx(1.2).epsilon(1e-15));
    CHECK(fuse_sign_magnitude(0.33, vec({-1.0, 1.0}), vec({0.0, 0.0})) ==
          vec({0.33, 0.33}));
    const VectorXd y = fuse_sign_magnitude(0.5, vec({-1.0, 1.0}), vec({0.1, 0.3}));
    CHECK(y(0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(y(1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(fuse_sign_magnitude(0.0, vec({1.0}), vec({-0.1})), TrainError);
}

TEST_CASE("selected-direction fusion") {
    CHECK(fuse_selected_direction(1.0, vec({1.0}), vec({0.3}), vec({0.7}))(0) ==
          doctest::Approx(1.3).epsilon(1e-15));
    CHECK(fuse_selected_direction(1.0, vec({-1.0}), vec({0.3}), vec({0.2}))(0) ==
          doctest::Approx(0.8).epsilon(1e-15));
    CHECK(fuse_selected_direction(0.4, vec({1.0}), vec({0.0}), vec({0.0}))(0) == 0.4);
    CHECK(fuse_selected_direction(0.4, vec({-1.0}), vec({0.0}), vec({0.0}))(0) == 0.4);
}

TEST_CASE("soft-weighted fusion") {
    CHECK(fuse_soft_weighted(0.5, vec({0.6}), vec({0.2}), vec({0.1}))(0) ==
          doctest::Approx(0.58).epsilon(1e-12));
    CHECK(fuse_soft_weighted(0.5, vec({1.0}), vec({0.2}), vec({0.9}))(0) ==
          doctest::Approx(0.7).epsilon(1e-12));
    // brute-force interval bound
    Rng rng(17);
    for (int i = 0; i < 10000; ++i) {
        const double x_n = rng.uniform(-1.0, 1.0);
        const double p = rng.uniform();
        const double up = rng.uniform(0.0, 2.0);
        const double down = rng.uniform(0.0, 2.0);
        const double y = fuse_soft_weighted(x_n, vec({p}), vec({up}), vec({down}))(0);
        CHECK(y >= x_n - down - 1e-12);
        CHECK(y <= x_n + up + 1e-12);
    }
}

TEST_CASE("fc stack shapes and hand-traced affine math") {
    Rng rng(5);
    FcStack stack(3, 2, 2, 2, rng);
    // overwrite the random init with a known toy parameterization
    stack.layers[0].W << 1.0, 0.0,
                         0.5, -1.0,
                         2.0, 1.0;
    stack.layers[0].b << 0.1, -0.2;
    stack.layers[1].W << 1.0, -1.0,
                         0.5, 2.0;
    stack.layers[1].b << 0.0, 0.3;

    MatrixXd h(1, 3);
    h << 1.0, 2.0, -1.0;
    const MatrixXd y = stack.forward(h);

    // by hand: a = h W0 + b0 = (1*1+2*0.5+(-1)*2+0.1, 1*0+2*(-1)+(-1)*1-0.2)
    //            = (0.1, -3.2); relu -> (0.1, 0)
    // y = (0.1*1+0*0.5, 0.1*(-1)+0*2) + (0, 0.3) = (0.1, 0.2)
    CHECK(y.rows() == 1);
    CHECK(y.cols() == 2);
    CHECK(y(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(y(0, 1) == doctest::Approx(0.2).epsilon(1e-12));

    // single-layer stack is one affine map
    FcStack one(3, 8, 4, 1, rng);
    CHECK(one.layers.size() == 1);
    CHECK(one.forward(h).cols() == 4);
}
