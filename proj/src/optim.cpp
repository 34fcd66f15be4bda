#include "hyperdet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace hyperdet::optim {

void AdamState::reset(const std::vector<nn::Mat*>& params) {
    m.clear();
    v.clear();
    for (const auto* p : params) {
        m.emplace_back(p->rows, p->cols);
        v.emplace_back(p->rows, p->cols);
    }
    step = 0;
}

void adam_step(const std::vector<nn::Mat*>& params, const std::vector<const nn::Mat*>& grads,
               const std::vector<std::string>& names, AdamState& state, double lr,
               double weight_decay, const AdamConfig& cfg) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: param/grad count mismatch");
    if (state.m.size() != params.size()) state.reset(params);
    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t k = 0; k < params.size(); ++k) {
        nn::Mat& p = *params[k];
        const nn::Mat& g = *grads[k];
        for (size_t i = 0; i < p.size(); ++i) {
            double grad = g.a[i];
            if (!std::isfinite(grad)) {
                std::string name = k < names.size() ? names[k] : std::to_string(k);
                throw std::runtime_error("adam_step: non-finite gradient in parameter " + name);
            }
            grad += weight_decay * p.a[i];
            double& m = state.m[k].a[i];
            double& v = state.v[k].a[i];
            m = cfg.beta1 * m + (1 - cfg.beta1) * grad;
            v = cfg.beta2 * v + (1 - cfg.beta2) * grad * grad;
            double mhat = m / bc1;
            double vhat = v / bc2;
            p.a[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace hyperdet::optim
