#include "prmrl/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "prmrl/common.hpp"

namespace prmrl {

namespace {

void build_layers(std::vector<Mlp::Layer>& layers, const std::vector<std::size_t>& sizes) {
    if (sizes.size() < 2) throw ConfigError("network needs at least input and output sizes");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        Mlp::Layer l;
        l.in = sizes[i];
        l.out = sizes[i + 1];
        if (l.in == 0 || l.out == 0) throw ConfigError("zero-width network layer");
        l.w.assign(l.in * l.out, 0.0);
        l.b.assign(l.out, 0.0);
        layers.push_back(std::move(l));
    }
}

}  // namespace

Mlp::Mlp(const std::vector<std::size_t>& sizes) { build_layers(layers_, sizes); }

Mlp::Mlp(const std::vector<std::size_t>& sizes, Bounds out_box) : squash_(true), box_(std::move(out_box)) {
    build_layers(layers_, sizes);
    if (box_.size() != layers_.back().out)
        throw ConfigError("output box does not match the last layer width");
}

void Mlp::init_random(Rng& rng) {
    for (auto& l : layers_) {
        const double scale = std::sqrt(2.0 / static_cast<double>(l.in));
        for (auto& w : l.w) w = scale * rng.gaussian(0.0, 1.0);
        for (auto& b : l.b) b = 0.0;
    }
}

void Mlp::zero() {
    for (auto& l : layers_) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
    auto trace = forward_batch(input, 1);
    return trace.act.back();
}

Mlp::Trace Mlp::forward_batch(std::vector<double> input, std::size_t n) const {
    if (input.size() != n * input_dim()) throw ConfigError("network input dimension mismatch");
    Trace t;
    t.n = n;
    t.input = std::move(input);
    const std::vector<double>* prev = &t.input;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& l = layers_[li];
        std::vector<double> out(n * l.out);
        for (std::size_t s = 0; s < n; ++s) {
            const double* x = prev->data() + s * l.in;
            double* y = out.data() + s * l.out;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double* wr = l.w.data() + o * l.in;
                double acc = l.b[o];
                for (std::size_t i = 0; i < l.in; ++i) acc += wr[i] * x[i];
                y[o] = acc;
            }
        }
        const bool last = li + 1 == layers_.size();
        if (!last) {
            for (auto& v : out) v = v > 0.0 ? v : 0.0;  // ReLU
        } else if (squash_) {
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t o = 0; o < l.out; ++o) {
                    const double center = 0.5 * (box_[o].first + box_[o].second);
                    const double half = 0.5 * (box_[o].second - box_[o].first);
                    out[s * l.out + o] = center + half * std::tanh(out[s * l.out + o]);
                }
        }
        t.act.push_back(std::move(out));
        prev = &t.act.back();
    }
    return t;
}

void Mlp::Gradients::init(const Mlp& net) {
    dw.resize(net.layer_count());
    db.resize(net.layer_count());
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        dw[i].assign(net.layer(i).w.size(), 0.0);
        db[i].assign(net.layer(i).b.size(), 0.0);
    }
}

void Mlp::backward(const Trace& trace, std::vector<double> dout, Gradients& grads,
                   std::vector<double>* dinput) const {
    const std::size_t n = trace.n;
    if (dout.size() != n * output_dim()) throw ConfigError("network gradient dimension mismatch");

    std::vector<double> dcur = std::move(dout);
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const Layer& l = layers_[li];
        const auto& post = trace.act[li];
        // Activation derivative: ReLU on hidden layers, tanh chain on a
        // squashed output, identity otherwise.
        if (li + 1 == layers_.size()) {
            if (squash_) {
                for (std::size_t s = 0; s < n; ++s)
                    for (std::size_t o = 0; o < l.out; ++o) {
                        const double center = 0.5 * (box_[o].first + box_[o].second);
                        const double half = 0.5 * (box_[o].second - box_[o].first);
                        const double th = half != 0.0 ? (post[s * l.out + o] - center) / half : 0.0;
                        dcur[s * l.out + o] *= half * (1.0 - th * th);
                    }
            }
        } else {
            for (std::size_t j = 0; j < dcur.size(); ++j)
                if (post[j] <= 0.0) dcur[j] = 0.0;
        }

        const std::vector<double>& prev = li == 0 ? trace.input : trace.act[li - 1];
        auto& dw = grads.dw[li];
        auto& db = grads.db[li];
        for (std::size_t s = 0; s < n; ++s) {
            const double* x = prev.data() + s * l.in;
            const double* dy = dcur.data() + s * l.out;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double g = dy[o];
                if (g == 0.0) continue;
                double* wr = dw.data() + o * l.in;
                for (std::size_t i = 0; i < l.in; ++i) wr[i] += g * x[i];
                db[o] += g;
            }
        }

        if (li == 0 && !dinput) break;
        std::vector<double> dprev(n * l.in, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            const double* dy = dcur.data() + s * l.out;
            double* dx = dprev.data() + s * l.in;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double g = dy[o];
                if (g == 0.0) continue;
                const double* wr = l.w.data() + o * l.in;
                for (std::size_t i = 0; i < l.in; ++i) dx[i] += g * wr[i];
            }
        }
        if (li == 0) {
            *dinput = std::move(dprev);
            break;
        }
        dcur = std::move(dprev);
    }
}

void Mlp::soft_update_from(const Mlp& online, double rate) {
    if (layer_count() != online.layer_count()) throw ConfigError("network shape mismatch");
    // Lerp form keeps the rate 0 and rate 1 endpoints exact.
    const double keep = 1.0 - rate;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        auto& t = layers_[li];
        const auto& o = online.layers_[li];
        for (std::size_t i = 0; i < t.w.size(); ++i) t.w[i] = keep * t.w[i] + rate * o.w[i];
        for (std::size_t i = 0; i < t.b.size(); ++i) t.b[i] = keep * t.b[i] + rate * o.b[i];
    }
}

double mse_loss(const std::vector<double>& pred, const std::vector<double>& target,
                std::vector<double>* dpred) {
    if (pred.size() != target.size()) throw ConfigError("loss dimension mismatch");
    const double inv = 1.0 / static_cast<double>(pred.size());
    double loss = 0.0;
    if (dpred) dpred->assign(pred.size(), 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        loss += d * d * inv;
        if (dpred) (*dpred)[i] = 2.0 * inv * d;
    }
    return loss;
}

void AdamState::init(const Mlp& net) {
    t = 0;
    mw.resize(net.layer_count());
    vw.resize(net.layer_count());
    mb.resize(net.layer_count());
    vb.resize(net.layer_count());
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        mw[i].assign(net.layer(i).w.size(), 0.0);
        vw[i].assign(net.layer(i).w.size(), 0.0);
        mb[i].assign(net.layer(i).b.size(), 0.0);
        vb[i].assign(net.layer(i).b.size(), 0.0);
    }
}

void AdamState::apply(Mlp& net, const Mlp::Gradients& grads, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t li = 0; li < net.layer_count(); ++li) {
        auto& l = net.layer(li);
        auto step = [&](std::vector<double>& w, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                const double mh = m[i] / c1;
                const double vh = v[i] / c2;
                w[i] -= lr * mh / (std::sqrt(vh) + eps);
            }
        };
        step(l.w, grads.dw[li], mw[li], vw[li]);
        step(l.b, grads.db[li], mb[li], vb[li]);
    }
}

// Checkpoint layout: "PRMW", u32 layer count, then per layer u32 rows (out)
// and u32 cols (in), then for each layer the weight matrix row-major and the
// bias vector, all little-endian f64.
void Mlp::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint " + path);
    out.write("PRMW", 4);
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    put_u32(static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        put_u32(static_cast<std::uint32_t>(l.out));
        put_u32(static_cast<std::uint32_t>(l.in));
    }
    for (const auto& l : layers_) {
        out.write(reinterpret_cast<const char*>(l.w.data()),
                  static_cast<std::streamsize>(l.w.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(l.b.data()),
                  static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
}

Mlp Mlp::load(const std::string& path, Bounds out_box) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read checkpoint " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PRMW", 4) != 0)
        throw ConfigError(path + " is not a network checkpoint");
    auto get_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    const std::uint32_t count = get_u32();
    std::vector<std::size_t> sizes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto out = get_u32();
        const auto innd = get_u32();
        shapes.emplace_back(out, innd);
        if (i == 0) sizes.push_back(innd);
        sizes.push_back(out);
    }
    Mlp net = out_box.empty() ? Mlp(sizes) : Mlp(sizes, std::move(out_box));
    for (std::uint32_t i = 0; i < count; ++i) {
        auto& l = net.layers_[i];
        in.read(reinterpret_cast<char*>(l.w.data()),
                static_cast<std::streamsize>(l.w.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(l.b.data()),
                static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
    if (!in) throw ConfigError(path + " is truncated");
    return net;
}

}  // namespace prmrl
