#include "aam/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "aam/parallel.hpp"
#include "aam/rng.hpp"

namespace aam {

Dataset generate_dataset(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                         const TollSpace& space, const SurrogateConfig& cfg, std::uint64_t seed,
                         const milp::SolveLimits& limits, int jobs) {
    const int dim = space.dim();
    std::vector<std::vector<double>> xs(cfg.train_size);
    std::vector<double> ys(cfg.train_size, 0.0);
    std::vector<char> ok(cfg.train_size, 0);

    parallel_for(cfg.train_size, jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, "dataset-sample", i));
        std::vector<double> coords(dim);
        for (int d = 0; d < dim; ++d) coords[d] = rng.uniform(0.0, cfg.eps_max);
        try {
            LlpResult res = solve_llp(net, flights, space.expand(coords), {}, limits);
            xs[i] = std::move(coords);
            ys[i] = res.objective;
            ok[i] = 1;
        } catch (const SolveError&) {
            ok[i] = 0;
        }
    });

    Dataset out;
    for (int i = 0; i < cfg.train_size; ++i) {
        if (ok[i]) {
            out.inputs.push_back(std::move(xs[i]));
            out.targets.push_back(ys[i]);
        } else {
            ++out.skipped;
        }
    }
    return out;
}

std::string Dataset::to_csv() const {
    std::ostringstream out;
    if (inputs.empty()) return "";
    for (std::size_t d = 0; d < inputs[0].size(); ++d) out << "toll" << d << ",";
    out << "objective\n";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (double v : inputs[i]) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            out << buf << ",";
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", targets[i]);
        out << buf << "\n";
    }
    return out.str();
}

Mlp::Mlp(int input_dim, const std::vector<int>& hidden, std::uint64_t seed) : input_dim_(input_dim) {
    if (input_dim <= 0) throw ConfigError("network input dimension must be positive");
    Rng rng(derive_seed(seed, "mlp-init"));
    int in = input_dim;
    std::vector<int> sizes = hidden;
    sizes.push_back(1);  // scalar output
    for (int out : sizes) {
        if (out <= 0) throw ConfigError("network layer sizes must be positive");
        Layer layer;
        layer.in = in;
        layer.out = out;
        layer.w.resize(static_cast<std::size_t>(in) * out);
        layer.b.assign(out, 0.0);
        const double scale = std::sqrt(2.0 / in);  // He initialization for ReLU
        for (auto& w : layer.w) w = rng.normal(0.0, scale);
        layers_.push_back(std::move(layer));
        in = out;
    }
}

double Mlp::forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != input_dim_)
        throw ConfigError("network input has wrong length: got " + std::to_string(x.size()) +
                          ", expected " + std::to_string(input_dim_));
    std::vector<double> cur = x, next;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& layer = layers_[li];
        next.assign(layer.out, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double* wrow = &layer.w[static_cast<std::size_t>(o) * layer.in];
            double s = layer.b[o];
            for (int i = 0; i < layer.in; ++i) s += wrow[i] * cur[i];
            next[o] = (li + 1 < layers_.size()) ? std::max(0.0, s) : s;
        }
        cur.swap(next);
    }
    return cur[0];
}

std::vector<Mlp::Layer> Mlp::zero_grads() const {
    std::vector<Layer> grads = layers_;
    for (auto& g : grads) {
        std::fill(g.w.begin(), g.w.end(), 0.0);
        std::fill(g.b.begin(), g.b.end(), 0.0);
    }
    return grads;
}

double Mlp::loss_and_grad(const std::vector<const std::vector<double>*>& xs,
                          const std::vector<double>& ys, std::vector<Layer>& grads) const {
    const std::size_t batch = xs.size();
    const std::size_t depth = layers_.size();
    double loss = 0.0;

    std::vector<std::vector<double>> act(depth + 1);  // post-activation per layer
    std::vector<std::vector<double>> delta(depth);
    for (std::size_t s = 0; s < batch; ++s) {
        act[0] = *xs[s];
        for (std::size_t li = 0; li < depth; ++li) {
            const Layer& layer = layers_[li];
            act[li + 1].assign(layer.out, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double* wrow = &layer.w[static_cast<std::size_t>(o) * layer.in];
                double v = layer.b[o];
                for (int i = 0; i < layer.in; ++i) v += wrow[i] * act[li][i];
                act[li + 1][o] = (li + 1 < depth) ? std::max(0.0, v) : v;
            }
        }
        const double err = act[depth][0] - ys[s];
        loss += err * err;

        // d(mean sq err)/d(output) = 2 err / batch
        delta[depth - 1].assign(1, 2.0 * err / static_cast<double>(batch));
        for (std::size_t li = depth; li-- > 0;) {
            const Layer& layer = layers_[li];
            Layer& g = grads[li];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[li][o];
                if (d == 0.0) continue;
                g.b[o] += d;
                double* grow = &g.w[static_cast<std::size_t>(o) * layer.in];
                const double* a = act[li].data();
                for (int i = 0; i < layer.in; ++i) grow[i] += d * a[i];
            }
            if (li == 0) break;
            delta[li - 1].assign(layer.in, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[li][o];
                if (d == 0.0) continue;
                const double* wrow = &layer.w[static_cast<std::size_t>(o) * layer.in];
                for (int i = 0; i < layer.in; ++i) delta[li - 1][i] += d * wrow[i];
            }
            // ReLU gate: kill gradients where the activation was clipped
            for (int i = 0; i < layer.in; ++i)
                if (act[li][i] <= 0.0) delta[li - 1][i] = 0.0;
        }
    }
    return loss / static_cast<double>(batch);
}

void Mlp::sgd_step(const std::vector<Layer>& grads, double lr) {
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        Layer& layer = layers_[li];
        const Layer& g = grads[li];
        for (std::size_t k = 0; k < layer.w.size(); ++k) layer.w[k] -= lr * g.w[k];
        for (std::size_t k = 0; k < layer.b.size(); ++k) layer.b[k] -= lr * g.b[k];
    }
}

std::vector<double> TrainedSurrogate::normalize_input(const std::vector<double>& x) const {
    if (x.size() != x_mean.size()) throw ConfigError("surrogate input has wrong length");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - x_mean[i]) / x_std[i];
    return z;
}

std::vector<double> TrainedSurrogate::denormalize_input(const std::vector<double>& z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] * x_std[i] + x_mean[i];
    return x;
}

double TrainedSurrogate::predict(const std::vector<double>& tolls) const {
    return net.forward(normalize_input(tolls)) * y_std + y_mean;
}

TrainedSurrogate train(const Dataset& data, const SurrogateConfig& cfg, std::uint64_t seed) {
    if (data.inputs.empty()) throw ConfigError("train: empty dataset");
    const int n = static_cast<int>(data.inputs.size());
    const int dim = static_cast<int>(data.inputs[0].size());

    TrainedSurrogate s;
    s.x_mean.assign(dim, 0.0);
    s.x_std.assign(dim, 0.0);
    for (const auto& x : data.inputs)
        for (int d = 0; d < dim; ++d) s.x_mean[d] += x[d];
    for (int d = 0; d < dim; ++d) s.x_mean[d] /= n;
    for (const auto& x : data.inputs)
        for (int d = 0; d < dim; ++d) s.x_std[d] += (x[d] - s.x_mean[d]) * (x[d] - s.x_mean[d]);
    for (int d = 0; d < dim; ++d) s.x_std[d] = std::max(1e-9, std::sqrt(s.x_std[d] / n));
    for (double y : data.targets) s.y_mean += y;
    s.y_mean /= n;
    double var = 0.0;
    for (double y : data.targets) var += (y - s.y_mean) * (y - s.y_mean);
    s.y_std = std::max(1e-9, std::sqrt(var / n));

    std::vector<std::vector<double>> zx(n);
    std::vector<double> zy(n);
    for (int i = 0; i < n; ++i) {
        zx[i].resize(dim);
        for (int d = 0; d < dim; ++d) zx[i][d] = (data.inputs[i][d] - s.x_mean[d]) / s.x_std[d];
        zy[i] = (data.targets[i] - s.y_mean) / s.y_std;
    }

    s.net = Mlp(dim, cfg.hidden, seed);
    Rng shuffle_rng(derive_seed(seed, "train-shuffle"));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    double initial_loss = -1.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i)
            std::swap(order[i], order[static_cast<int>(shuffle_rng.below(i + 1))]);
        double epoch_loss = 0.0;
        int batches = 0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int end = std::min(n, start + cfg.batch_size);
            std::vector<const std::vector<double>*> bx;
            std::vector<double> by;
            for (int k = start; k < end; ++k) {
                bx.push_back(&zx[order[k]]);
                by.push_back(zy[order[k]]);
            }
            auto grads = s.net.zero_grads();
            epoch_loss += s.net.loss_and_grad(bx, by, grads);
            s.net.sgd_step(grads, cfg.learning_rate);
            ++batches;
        }
        epoch_loss /= std::max(1, batches);
        s.loss_trace.push_back(epoch_loss);
        if (initial_loss < 0.0) initial_loss = epoch_loss;
        if (epoch_loss > initial_loss * 10.0 || !std::isfinite(epoch_loss)) {
            std::ostringstream msg;
            msg << "training diverged at epoch " << epoch << " (loss " << epoch_loss << " vs initial "
                << initial_loss << "); trace tail:";
            const std::size_t from = s.loss_trace.size() > 8 ? s.loss_trace.size() - 8 : 0;
            for (std::size_t k = from; k < s.loss_trace.size(); ++k) msg << " " << s.loss_trace[k];
            throw SolveError(msg.str());
        }
    }
    return s;
}

double approx_ratio(double predicted, double true_value) {
    if (true_value <= 0.0)
        throw ConfigError("approximation ratio undefined for non-positive optimum");
    return std::abs(predicted - true_value) / true_value;
}

double approx_ratio(const TrainedSurrogate& s, const std::vector<double>& tolls, double true_value) {
    return approx_ratio(s.predict(tolls), true_value);
}

std::string TrainedSurrogate::to_json() const {
    nlohmann::json j;
    j["input_dim"] = net.input_dim();
    j["x_mean"] = x_mean;
    j["x_std"] = x_std;
    j["y_mean"] = y_mean;
    j["y_std"] = y_std;
    j["loss_trace"] = loss_trace;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers())
        j["layers"].push_back({{"in", layer.in}, {"out", layer.out}, {"w", layer.w}, {"b", layer.b}});
    return j.dump();
}

TrainedSurrogate TrainedSurrogate::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TrainedSurrogate s;
    s.x_mean = j.at("x_mean").get<std::vector<double>>();
    s.x_std = j.at("x_std").get<std::vector<double>>();
    s.y_mean = j.at("y_mean").get<double>();
    s.y_std = j.at("y_std").get<double>();
    s.loss_trace = j.at("loss_trace").get<std::vector<double>>();

    std::vector<int> hidden;
    const auto& jl = j.at("layers");
    for (std::size_t i = 0; i + 1 < jl.size(); ++i) hidden.push_back(jl[i].at("out").get<int>());
    s.net = Mlp(j.at("input_dim").get<int>(), hidden, 1);
    for (std::size_t i = 0; i < jl.size(); ++i) {
        s.net.layers()[i].w = jl[i].at("w").get<std::vector<double>>();
        s.net.layers()[i].b = jl[i].at("b").get<std::vector<double>>();
    }
    return s;
}

}  // namespace aam
