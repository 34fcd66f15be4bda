#include "hyperdet/model.hpp"

#include <stdexcept>

namespace hyperdet::model {

std::string channel_name(Channel c) {
    switch (c) {
        case Channel::Homogeneous: return "homogeneous";
        case Channel::Hyper: return "hyper";
        case Channel::HyperHomo: return "hyper-homo";
    }
    return "?";
}

Channel channel_from_name(const std::string& name) {
    if (name == "homogeneous") return Channel::Homogeneous;
    if (name == "hyper") return Channel::Hyper;
    if (name == "hyper-homo") return Channel::HyperHomo;
    throw std::invalid_argument("unknown channel: " + name);
}

std::vector<nn::Mat*> ModelParams::trainable() {
    std::vector<nn::Mat*> out;
    for (auto& m : w) out.push_back(&m);
    out.push_back(&wc);
    out.push_back(&bc);
    return out;
}

std::vector<std::string> ModelParams::names() const {
    std::vector<std::string> out;
    for (size_t i = 0; i < w.size(); ++i) out.push_back("w" + std::to_string(i));
    out.push_back("wc");
    out.push_back("bc");
    return out;
}

ModelParams init_params(size_t in_dim, const ModelConfig& cfg) {
    ModelParams p;
    auto rng = rng::Stream::derive(cfg.seed, 0x696e6974);
    size_t d = in_dim;
    for (int l = 0; l < cfg.layers; ++l) {
        p.w.push_back(nn::Mat::glorot_uniform(d, static_cast<size_t>(cfg.hidden), rng));
        d = static_cast<size_t>(cfg.hidden);
        p.bn.emplace_back();
        p.bn.back().reset(d);
    }
    p.wc = nn::Mat::glorot_uniform(d, 2, rng);
    p.bc = nn::Mat(1, 2);
    return p;
}

std::vector<nn::Mat> make_dropout_masks(size_t n, size_t in_dim, const ModelConfig& cfg,
                                        uint64_t step_key) {
    std::vector<nn::Mat> masks;
    if (cfg.dropout <= 0.0) return masks;
    double keep = 1.0 - cfg.dropout;
    double scale = 1.0 / keep;
    size_t d = in_dim;
    for (int l = 0; l < cfg.layers; ++l) {
        auto rng = rng::Stream::derive(cfg.seed, 0x64726f70, step_key, static_cast<uint64_t>(l));
        nn::Mat mask(n, d);
        for (double& v : mask.a) v = rng.uniform() < keep ? scale : 0.0;
        masks.push_back(std::move(mask));
        d = static_cast<size_t>(cfg.hidden);
    }
    return masks;
}

ForwardIds embed_forward(nn::Tape& tape, const nn::SparseOp& op, const nn::Mat& x,
                         ModelParams& params, const ModelConfig& cfg,
                         const std::vector<nn::Mat>* dropout_masks, bool training) {
    if (op.mat.rows() != x.rows)
        throw std::invalid_argument("forward: operator rows " + std::to_string(op.mat.rows()) +
                                    " != feature rows " + std::to_string(x.rows));
    ForwardIds ids;
    int h = tape.leaf(x);
    for (size_t l = 0; l < params.w.size(); ++l) {
        if (tape.value(h).cols != params.w[l].rows)
            throw std::invalid_argument("forward: layer " + std::to_string(l) + " expects " +
                                        std::to_string(params.w[l].rows) + " inputs, got " +
                                        std::to_string(tape.value(h).cols));
        if (training && dropout_masks && l < dropout_masks->size())
            h = tape.mul_mask(h, (*dropout_masks)[l]);
        h = tape.spmm(op, h);
        int wid = tape.leaf(params.w[l]);
        ids.param_ids.push_back(wid);
        h = tape.matmul_op(h, wid);
        if (cfg.batch_norm) h = tape.batchnorm(h, params.bn[l], training);
        if (l + 1 < params.w.size()) h = tape.relu(h);
    }
    ids.embedding = h;
    return ids;
}

ForwardIds model_forward(nn::Tape& tape, const nn::SparseOp& op, const nn::Mat& x,
                         ModelParams& params, const ModelConfig& cfg,
                         const std::vector<nn::Mat>* dropout_masks, bool training,
                         const std::vector<int>& labels, const std::vector<uint32_t>& loss_mask) {
    ForwardIds ids = embed_forward(tape, op, x, params, cfg, dropout_masks, training);
    int wc = tape.leaf(params.wc);
    int bc = tape.leaf(params.bc);
    ids.param_ids.push_back(wc);
    ids.param_ids.push_back(bc);
    int logits = tape.add_rowvec(tape.matmul_op(ids.embedding, wc), bc);
    ids.probs = tape.softmax_rows(logits);
    if (!loss_mask.empty()) ids.loss = tape.cross_entropy(ids.probs, labels, loss_mask);
    return ids;
}

nn::Mat gnn_forward(const nn::Mat& x, const nn::SparseOp& op, ModelParams& params,
                    const ModelConfig& cfg, bool training) {
    nn::Tape tape;
    auto ids = embed_forward(tape, op, x, params, cfg, nullptr, training);
    return tape.value(ids.embedding);
}

nn::Mat hgnn_forward(const nn::Mat& x, const convert::HypergraphOperators& ops, ModelParams& params,
                     const ModelConfig& cfg, bool training) {
    nn::SparseOp op(ops.layer_operator());
    return gnn_forward(x, op, params, cfg, training);
}

nn::Mat classify(const nn::Mat& z, const nn::Mat& wc, const nn::Mat& bc) {
    nn::Mat logits = nn::matmul(z, wc);
    for (size_t i = 0; i < logits.rows; ++i)
        for (size_t j = 0; j < logits.cols; ++j) logits(i, j) += bc(0, j);
    return nn::softmax_rows(logits);
}

}  // namespace hyperdet::model
