#pragma once

#include <string>
#include <vector>

#include "hyperdet/nn.hpp"

namespace hyperdet::optim {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<nn::Mat> m, v;
    int64_t step = 0;

    void reset(const std::vector<nn::Mat*>& params);
};

// L2 applied as grad += wd * param before the moment updates.
void adam_step(const std::vector<nn::Mat*>& params, const std::vector<const nn::Mat*>& grads,
               const std::vector<std::string>& names, AdamState& state, double lr,
               double weight_decay, const AdamConfig& cfg = {});

}  // namespace hyperdet::optim
