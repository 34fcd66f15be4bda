#include "hyperdet/train.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "hyperdet/optim.hpp"

namespace hyperdet::train {

std::vector<double> predict_scores(const DataBundle& data, model::ModelParams& params,
                                   const model::ModelConfig& cfg) {
    nn::Tape tape;
    std::vector<uint32_t> no_mask;
    auto ids = model::model_forward(tape, data.op, data.x, params, cfg, nullptr, false,
                                    data.labels, no_mask);
    const nn::Mat& p = tape.value(ids.probs);
    std::vector<double> scores(p.rows);
    for (size_t i = 0; i < p.rows; ++i) scores[i] = p(i, 1);
    return scores;
}

metrics::MetricsReport evaluate_mask(const DataBundle& data, const std::vector<double>& scores,
                                     const std::vector<uint32_t>& mask) {
    std::vector<int> pred, truth;
    std::vector<double> s;
    pred.reserve(mask.size());
    for (uint32_t i : mask) {
        pred.push_back(scores[i] >= 0.5 ? 1 : 0);  // argmax over 2 classes
        truth.push_back(data.labels[i]);
        s.push_back(scores[i]);
    }
    auto m = metrics::confusion_metrics(pred, truth);
    bool has_pos = false, has_neg = false;
    for (int y : truth) (y == 1 ? has_pos : has_neg) = true;
    m.auc = (has_pos && has_neg) ? metrics::auc(s, truth) : 0.0;
    return m;
}

TrainRun fit(const DataBundle& data, const model::ModelConfig& cfg) {
    if (data.train_mask.empty()) throw std::invalid_argument("fit: empty train mask");
    TrainRun run;
    run.config = cfg;
    auto params = model::init_params(data.x.cols, cfg);
    optim::AdamState adam;
    adam.reset(params.trainable());
    auto names = params.names();

    double best_f1 = -1.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto masks = model::make_dropout_masks(data.x.rows, data.x.cols, cfg,
                                               static_cast<uint64_t>(epoch));
        nn::Tape tape;
        auto ids = model::model_forward(tape, data.op, data.x, params, cfg,
                                        masks.empty() ? nullptr : &masks, true,
                                        data.labels, data.train_mask);
        double loss = tape.value(ids.loss)(0, 0);
        if (!std::isfinite(loss))
            throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) +
                                   " (lr=" + std::to_string(cfg.lr) + ", hidden=" +
                                   std::to_string(cfg.hidden) + ")");
        tape.backward(ids.loss);

        auto trainable = params.trainable();
        std::vector<const nn::Mat*> grads;
        for (int pid : ids.param_ids) grads.push_back(&tape.grad(pid));
        optim::adam_step(trainable, grads, names, adam, cfg.lr, cfg.weight_decay);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = loss;
        if (!data.val_mask.empty()) {
            auto scores = predict_scores(data, params, cfg);
            auto vm = evaluate_mask(data, scores, data.val_mask);
            rec.val_macro_f1 = vm.macro_f1;
            rec.val_auc = vm.auc;
            if (vm.macro_f1 > best_f1) {
                best_f1 = vm.macro_f1;
                run.best_epoch = epoch;
                run.best_params = params;
                run.val_metrics = vm;
            }
        }
        run.history.push_back(rec);
    }
    if (run.best_epoch < 0) {  // no validation: keep final parameters
        run.best_epoch = cfg.epochs - 1;
        run.best_params = params;
    }
    if (!data.test_mask.empty()) {
        auto scores = predict_scores(data, run.best_params, cfg);
        run.test_metrics = evaluate_mask(data, scores, data.test_mask);
    }
    return run;
}

std::string history_json(const TrainRun& run) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : run.history)
        arr.push_back({{"epoch", r.epoch},
                       {"loss", r.loss},
                       {"val_macro_f1", r.val_macro_f1},
                       {"val_auc", r.val_auc}});
    return arr.dump();
}

static constexpr char kCkptMagic[8] = {'H', 'D', 'C', 'K', '0', '0', '0', '1'};

static void write_mat(std::ostream& os, const nn::Mat& m) {
    uint64_t r = m.rows, c = m.cols;
    os.write(reinterpret_cast<const char*>(&r), 8);
    os.write(reinterpret_cast<const char*>(&c), 8);
    os.write(reinterpret_cast<const char*>(m.a.data()), static_cast<std::streamsize>(m.a.size() * 8));
}

static nn::Mat read_mat(std::istream& is) {
    uint64_t r = 0, c = 0;
    is.read(reinterpret_cast<char*>(&r), 8);
    is.read(reinterpret_cast<char*>(&c), 8);
    nn::Mat m(r, c);
    is.read(reinterpret_cast<char*>(m.a.data()), static_cast<std::streamsize>(m.a.size() * 8));
    if (!is) throw std::runtime_error("checkpoint: truncated matrix");
    return m;
}

void write_checkpoint(std::ostream& os, const model::ModelParams& params) {
    os.write(kCkptMagic, 8);
    uint64_t nw = params.w.size();
    os.write(reinterpret_cast<const char*>(&nw), 8);
    for (const auto& w : params.w) write_mat(os, w);
    write_mat(os, params.wc);
    write_mat(os, params.bc);
    uint64_t nbn = params.bn.size();
    os.write(reinterpret_cast<const char*>(&nbn), 8);
    for (const auto& bn : params.bn) {
        uint64_t d = bn.running_mean.size();
        os.write(reinterpret_cast<const char*>(&d), 8);
        os.write(reinterpret_cast<const char*>(bn.running_mean.data()), static_cast<std::streamsize>(d * 8));
        os.write(reinterpret_cast<const char*>(bn.running_var.data()), static_cast<std::streamsize>(d * 8));
    }
}

model::ModelParams read_checkpoint(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCkptMagic, 8) != 0) throw std::runtime_error("checkpoint: bad magic");
    model::ModelParams p;
    uint64_t nw = 0;
    is.read(reinterpret_cast<char*>(&nw), 8);
    for (uint64_t i = 0; i < nw; ++i) p.w.push_back(read_mat(is));
    p.wc = read_mat(is);
    p.bc = read_mat(is);
    uint64_t nbn = 0;
    is.read(reinterpret_cast<char*>(&nbn), 8);
    for (uint64_t i = 0; i < nbn; ++i) {
        uint64_t d = 0;
        is.read(reinterpret_cast<char*>(&d), 8);
        nn::BatchNormState bn;
        bn.running_mean.resize(d);
        bn.running_var.resize(d);
        is.read(reinterpret_cast<char*>(bn.running_mean.data()), static_cast<std::streamsize>(d * 8));
        is.read(reinterpret_cast<char*>(bn.running_var.data()), static_cast<std::streamsize>(d * 8));
        p.bn.push_back(std::move(bn));
    }
    if (!is) throw std::runtime_error("checkpoint: truncated");
    return p;
}

}  // namespace hyperdet::train
