#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperdet/convert.hpp"
#include "hyperdet/nn.hpp"

namespace hyperdet::model {

enum class Channel { Homogeneous, Hyper, HyperHomo };

std::string channel_name(Channel c);
Channel channel_from_name(const std::string& name);

struct ModelConfig {
    Channel channel = Channel::HyperHomo;
    int layers = 2;
    int hidden = 32;
    double dropout = 0.5;
    bool batch_norm = false;
    double lr = 0.01;
    double weight_decay = 5e-4;
    int epochs = 300;
    uint64_t seed = 0;
};

struct ModelParams {
    std::vector<nn::Mat> w;  // layer weights, biasless
    nn::Mat wc;              // classifier hidden x 2
    nn::Mat bc;              // classifier bias 1 x 2
    std::vector<nn::BatchNormState> bn;

    std::vector<nn::Mat*> trainable();  // w..., wc, bc
    std::vector<std::string> names() const;
};

ModelParams init_params(size_t in_dim, const ModelConfig& cfg);

// Per-epoch dropout masks, one per layer input; entries in {0, 1/(1-p)}.
std::vector<nn::Mat> make_dropout_masks(size_t n, size_t in_dim, const ModelConfig& cfg,
                                        uint64_t step_key);

struct ForwardIds {
    std::vector<int> param_ids;  // aligned with ModelParams::trainable()
    int embedding = -1;          // Z, n x hidden
    int probs = -1;
    int loss = -1;
};

// Stacked propagation layers: h' = act(BN?(Op h W)), ReLU between layers,
// none after the last; dropout (when masks provided) on each layer input.
ForwardIds embed_forward(nn::Tape& tape, const nn::SparseOp& op, const nn::Mat& x,
                         ModelParams& params, const ModelConfig& cfg,
                         const std::vector<nn::Mat>* dropout_masks, bool training);

// Full pass through the classifier head and loss.
ForwardIds model_forward(nn::Tape& tape, const nn::SparseOp& op, const nn::Mat& x,
                         ModelParams& params, const ModelConfig& cfg,
                         const std::vector<nn::Mat>* dropout_masks, bool training,
                         const std::vector<int>& labels, const std::vector<uint32_t>& loss_mask);

// Inference-style entry points (no taping, no dropout).
nn::Mat gnn_forward(const nn::Mat& x, const nn::SparseOp& op, ModelParams& params,
                    const ModelConfig& cfg, bool training = false);
nn::Mat hgnn_forward(const nn::Mat& x, const convert::HypergraphOperators& ops, ModelParams& params,
                     const ModelConfig& cfg, bool training = false);

nn::Mat classify(const nn::Mat& z, const nn::Mat& wc, const nn::Mat& bc);

}  // namespace hyperdet::model
