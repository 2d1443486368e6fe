#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aam/llp.hpp"

namespace aam {

struct SurrogateConfig {
    std::vector<int> hidden = {256, 128, 64};
    double learning_rate = 0.01;
    int epochs = 500;
    int batch_size = 32;
    int train_size = 1000;
    double eps_max = 30.0;
};

struct Dataset {
    std::vector<std::vector<double>> inputs;  // toll coordinates
    std::vector<double> targets;              // exact follower optima
    int skipped = 0;                          // infeasible samples dropped

    std::string to_csv() const;
};

/// Label uniformly sampled toll vectors with exact scheduling optima.
/// Deterministic given the seed; infeasible samples are skipped and counted.
Dataset generate_dataset(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                         const TollSpace& space, const SurrogateConfig& cfg, std::uint64_t seed,
                         const milp::SolveLimits& limits = {}, int jobs = 1);

/// Fully-connected ReLU network with a scalar output.
class Mlp {
public:
    struct Layer {
        int in = 0, out = 0;
        std::vector<double> w;  // out x in, row-major
        std::vector<double> b;
    };

    Mlp() = default;
    Mlp(int input_dim, const std::vector<int>& hidden, std::uint64_t seed);

    int input_dim() const { return input_dim_; }
    double forward(const std::vector<double>& x) const;

    /// Mean squared error over the batch; adds parameter gradients into grads
    /// (same shapes as layers).
    double loss_and_grad(const std::vector<const std::vector<double>*>& xs,
                         const std::vector<double>& ys, std::vector<Layer>& grads) const;
    std::vector<Layer> zero_grads() const;
    void sgd_step(const std::vector<Layer>& grads, double lr);

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

private:
    int input_dim_ = 0;
    std::vector<Layer> layers_;
};

/// Trained value-function approximation with its normalization statistics.
struct TrainedSurrogate {
    Mlp net;
    std::vector<double> x_mean, x_std;
    double y_mean = 0.0, y_std = 1.0;
    std::vector<double> loss_trace;  // per-epoch training loss (normalized units)

    double predict(const std::vector<double>& tolls) const;
    std::vector<double> normalize_input(const std::vector<double>& x) const;
    std::vector<double> denormalize_input(const std::vector<double>& z) const;

    std::string to_json() const;
    static TrainedSurrogate from_json(const std::string& text);
};

/// Mini-batch SGD on z-scored inputs/targets. Aborts (with the loss trace in
/// the message) if the loss diverges past 10x its initial value.
TrainedSurrogate train(const Dataset& data, const SurrogateConfig& cfg, std::uint64_t seed);

/// |phi_hat - phi| / phi; phi must be positive.
double approx_ratio(double predicted, double true_value);
double approx_ratio(const TrainedSurrogate& s, const std::vector<double>& tolls, double true_value);

}  // namespace aam
