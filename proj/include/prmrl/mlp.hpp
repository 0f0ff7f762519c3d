#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prmrl/flow.hpp"
#include "prmrl/rng.hpp"

namespace prmrl {

// Fully connected network with rectified-linear hidden layers. The output
// is linear, or squashed into a box through tanh for actors. Forward and
// reverse passes are hand rolled and operate on row-major batches.
class Mlp {
public:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::vector<double> w;  // out x in, row-major
        std::vector<double> b;
    };

    Mlp() = default;
    explicit Mlp(const std::vector<std::size_t>& sizes);          // linear output
    Mlp(const std::vector<std::size_t>& sizes, Bounds out_box);   // tanh-squashed output

    std::size_t input_dim() const { return layers_.front().in; }
    std::size_t output_dim() const { return layers_.back().out; }
    std::size_t layer_count() const { return layers_.size(); }
    const Layer& layer(std::size_t i) const { return layers_[i]; }
    Layer& layer(std::size_t i) { return layers_[i]; }
    bool squashed() const { return squash_; }
    const Bounds& out_box() const { return box_; }

    void init_random(Rng& rng);
    void zero();

    std::vector<double> forward(const std::vector<double>& input) const;

    // Batched forward pass keeping all activations for the reverse pass.
    struct Trace {
        std::size_t n = 0;
        std::vector<double> input;             // n x in
        std::vector<std::vector<double>> act;  // per layer, n x out (post-activation)
    };
    Trace forward_batch(std::vector<double> input, std::size_t n) const;
    const std::vector<double>& output_of(const Trace& t) const { return t.act.back(); }

    struct Gradients {
        std::vector<std::vector<double>> dw, db;
        void init(const Mlp& net);
    };

    // Reverse pass from dL/d(output); accumulates into `grads` and
    // optionally produces dL/d(input).
    void backward(const Trace& trace, std::vector<double> dout, Gradients& grads,
                  std::vector<double>* dinput = nullptr) const;

    void soft_update_from(const Mlp& online, double rate);

    void save(const std::string& path) const;
    static Mlp load(const std::string& path, Bounds out_box = {});

private:
    std::vector<Layer> layers_;
    bool squash_ = false;
    Bounds box_;
};

// Mean squared error (1/N) sum (target - pred)^2 and its gradient wrt pred.
double mse_loss(const std::vector<double>& pred, const std::vector<double>& target,
                std::vector<double>* dpred);

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long t = 0;
    std::vector<std::vector<double>> mw, vw, mb, vb;

    void init(const Mlp& net);
    void apply(Mlp& net, const Mlp::Gradients& grads, double lr);
};

}  // namespace prmrl
