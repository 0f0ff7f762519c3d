#include <cmath>
#include <cstdio>

#include <doctest.h>

#include "prmrl/mlp.hpp"

using namespace prmrl;

namespace {

// Central finite differences of a scalar loss over every weight.
double loss_of(const Mlp& net, const std::vector<double>& input, std::size_t n,
               const std::vector<double>& target) {
    auto trace = net.forward_batch(input, n);
    return mse_loss(net.output_of(trace), target, nullptr);
}

void gradcheck(Mlp& net, std::size_t n, Rng& rng, double tol) {
    std::vector<double> input(n * net.input_dim());
    std::vector<double> target(n * net.output_dim());
    for (auto& v : input) v = rng.uniform(-1.0, 1.0);
    for (auto& v : target) v = rng.uniform(-1.0, 1.0);

    auto trace = net.forward_batch(input, n);
    std::vector<double> dout;
    mse_loss(net.output_of(trace), target, &dout);
    Mlp::Gradients grads;
    grads.init(net);
    net.backward(trace, std::move(dout), grads);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t li = 0; li < net.layer_count(); ++li) {
        auto check_param = [&](double& w, double analytic) {
            const double keep = w;
            w = keep + h;
            const double up = loss_of(net, input, n, target);
            w = keep - h;
            const double down = loss_of(net, input, n, target);
            w = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({1e-6, std::fabs(numeric), std::fabs(analytic)});
            worst = std::max(worst, std::fabs(numeric - analytic) / denom);
        };
        auto& l = net.layer(li);
        for (std::size_t i = 0; i < l.w.size(); ++i) check_param(l.w[i], grads.dw[li][i]);
        for (std::size_t i = 0; i < l.b.size(); ++i) check_param(l.b[i], grads.db[li][i]);
    }
    CHECK(worst <= tol);
}

}  // namespace

TEST_CASE("zero network outputs zero") {
    Mlp net(std::vector<std::size_t>{3, 4, 1});
    net.zero();
    CHECK(net.forward({0.5, -0.2, 1.0}) == std::vector<double>{0.0});
}

TEST_CASE("identity single layer passes the input through") {
    Mlp net(std::vector<std::size_t>{3, 3});
    for (std::size_t i = 0; i < 3; ++i) net.layer(0).w[i * 3 + i] = 1.0;
    const std::vector<double> x{0.3, -0.7, 2.0};
    CHECK(net.forward(x) == x);
}

TEST_CASE("random 2-3-1 network equals a hand-composed chain") {
    Mlp net(std::vector<std::size_t>{2, 3, 1});
    Rng rng(5);
    net.init_random(rng);
    const std::vector<double> x{0.4, -1.2};
    const auto out = net.forward(x);

    double hidden[3];
    for (int k = 0; k < 3; ++k) {
        double acc = net.layer(0).b[static_cast<std::size_t>(k)];
        for (int i = 0; i < 2; ++i)
            acc += net.layer(0).w[static_cast<std::size_t>(k) * 2 + i] * x[static_cast<std::size_t>(i)];
        hidden[k] = acc > 0 ? acc : 0.0;
    }
    double y = net.layer(1).b[0];
    for (int k = 0; k < 3; ++k) y += net.layer(1).w[static_cast<std::size_t>(k)] * hidden[k];
    CHECK(std::fabs(out[0] - y) <= 1e-12);
}

TEST_CASE("single linear neuron recovers the textbook mse gradient") {
    Mlp net(std::vector<std::size_t>{2, 1});
    net.layer(0).w = {0.7, -0.3};
    net.layer(0).b = {0.1};
    const std::vector<double> x{1.5, 2.0};
    const std::vector<double> target{0.25};
    auto trace = net.forward_batch(x, 1);
    const double pred = net.output_of(trace)[0];
    std::vector<double> dout;
    mse_loss(net.output_of(trace), target, &dout);
    Mlp::Gradients grads;
    grads.init(net);
    net.backward(trace, std::move(dout), grads);
    for (int i = 0; i < 2; ++i)
        CHECK(grads.dw[0][static_cast<std::size_t>(i)] ==
              doctest::Approx(2.0 * (pred - target[0]) * x[static_cast<std::size_t>(i)])
                  .epsilon(1e-12));
    CHECK(grads.db[0][0] == doctest::Approx(2.0 * (pred - target[0])).epsilon(1e-12));
}

TEST_CASE("matching prediction zeroes the critic gradient") {
    Mlp net(std::vector<std::size_t>{2, 4, 1});
    Rng rng(3);
    net.init_random(rng);
    const std::vector<double> x{0.2, 0.8};
    auto trace = net.forward_batch(x, 1);
    const auto target = net.output_of(trace);
    std::vector<double> dout;
    mse_loss(net.output_of(trace), target, &dout);
    Mlp::Gradients grads;
    grads.init(net);
    net.backward(trace, std::move(dout), grads);
    for (std::size_t li = 0; li < net.layer_count(); ++li) {
        for (double g : grads.dw[li]) CHECK(g == 0.0);
        for (double g : grads.db[li]) CHECK(g == 0.0);
    }
}

TEST_CASE("analytic gradients agree with finite differences") {
    Rng rng(2024);
    for (int i = 0; i < 5; ++i) {
        Mlp a(std::vector<std::size_t>{2, 8, 1});
        a.init_random(rng);
        gradcheck(a, 4, rng, 1e-4);
        Mlp b(std::vector<std::size_t>{3, 16, 16, 1});
        b.init_random(rng);
        gradcheck(b, 4, rng, 1e-4);
        Mlp c(std::vector<std::size_t>{4, 32, 2});
        c.init_random(rng);
        gradcheck(c, 4, rng, 1e-4);
    }
}

TEST_CASE("squashed outputs stay inside the action box") {
    const Bounds box{{-1.0, 1.0}, {0.0, 4.0}};
    Mlp net(std::vector<std::size_t>{3, 8, 2}, box);
    Rng rng(8);
    net.init_random(rng);
    for (int i = 0; i < 200; ++i) {
        const auto out = net.forward({rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)});
        CHECK(out[0] >= -1.0);
        CHECK(out[0] <= 1.0);
        CHECK(out[1] >= 0.0);
        CHECK(out[1] <= 4.0);
    }
}

TEST_CASE("soft update extremes") {
    Mlp online(std::vector<std::size_t>{2, 3, 1});
    Rng rng(4);
    online.init_random(rng);
    Mlp target(std::vector<std::size_t>{2, 3, 1});
    target.init_random(rng);

    Mlp frozen = target;
    frozen.soft_update_from(online, 0.0);
    for (std::size_t li = 0; li < frozen.layer_count(); ++li)
        CHECK(frozen.layer(li).w == target.layer(li).w);

    Mlp copied = target;
    copied.soft_update_from(online, 1.0);
    for (std::size_t li = 0; li < copied.layer_count(); ++li)
        CHECK(copied.layer(li).w == online.layer(li).w);
}

TEST_CASE("checkpoints round trip") {
    Mlp net(std::vector<std::size_t>{3, 5, 2});
    Rng rng(12);
    net.init_random(rng);
    const std::string path = "mlp_checkpoint_test.bin";
    net.save(path);
    const Mlp back = Mlp::load(path);
    std::remove(path.c_str());
    REQUIRE(back.layer_count() == net.layer_count());
    for (std::size_t li = 0; li < net.layer_count(); ++li) {
        CHECK(back.layer(li).w == net.layer(li).w);
        CHECK(back.layer(li).b == net.layer(li).b);
    }
}

TEST_CASE("adam descends a simple quadratic") {
    // Fit a single weight to minimize (w x - 1)^2 with x = 1.
    Mlp net(std::vector<std::size_t>{1, 1});
    net.zero();
    AdamState adam;
    adam.init(net);
    for (int i = 0; i < 3000; ++i) {
        auto trace = net.forward_batch({1.0}, 1);
        std::vector<double> dout;
        mse_loss(net.output_of(trace), {1.0}, &dout);
        Mlp::Gradients g;
        g.init(net);
        net.backward(trace, std::move(dout), g);
        adam.apply(net, g, 1e-2);
    }
    const auto out = net.forward({1.0});
    CHECK(std::fabs(out[0] - 1.0) < 1e-3);
}
