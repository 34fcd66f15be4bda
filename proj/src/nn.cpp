#include "hyperdet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace hyperdet::nn {

Mat Mat::eye(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::glorot_uniform(size_t fan_in, size_t fan_out, rng::Stream& rng) {
    Mat m(fan_in, fan_out);
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : m.a) v = (2.0 * rng.uniform() - 1.0) * limit;
    return m;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat c(a.rows, b.cols);
    for (size_t i = 0; i < a.rows; ++i)
        for (size_t k = 0; k < a.cols; ++k) {
            double av = a(i, k);
            if (av == 0.0) continue;
            const double* br = &b.a[k * b.cols];
            double* cr = &c.a[i * c.cols];
            for (size_t j = 0; j < b.cols; ++j) cr[j] += av * br[j];
        }
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: shape mismatch");
    Mat c(a.cols, b.cols);
    for (size_t k = 0; k < a.rows; ++k)
        for (size_t i = 0; i < a.cols; ++i) {
            double av = a(k, i);
            if (av == 0.0) continue;
            const double* br = &b.a[k * b.cols];
            double* cr = &c.a[i * c.cols];
            for (size_t j = 0; j < b.cols; ++j) cr[j] += av * br[j];
        }
    return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: shape mismatch");
    Mat c(a.rows, b.rows);
    for (size_t i = 0; i < a.rows; ++i)
        for (size_t j = 0; j < b.rows; ++j) {
            double s = 0;
            const double* ar = &a.a[i * a.cols];
            const double* br = &b.a[j * b.cols];
            for (size_t k = 0; k < a.cols; ++k) s += ar[k] * br[k];
            c(i, j) = s;
        }
    return c;
}

Mat SparseOp::apply(const Mat& x) const {
    if (mat.cols() != x.rows) throw std::invalid_argument("SparseOp::apply: shape mismatch");
    Mat y(mat.rows(), x.cols);
    mat.multiply_dense(x.a.data(), x.cols, y.a.data());
    return y;
}

Mat SparseOp::apply_t(const Mat& x) const {
    if (mat_t.cols() != x.rows) throw std::invalid_argument("SparseOp::apply_t: shape mismatch");
    Mat y(mat_t.rows(), x.cols);
    mat_t.multiply_dense(x.a.data(), x.cols, y.a.data());
    return y;
}

int Tape::push(Mat value, std::function<void(Tape&, int)> back) {
    nodes_.push_back({std::move(value), Mat(), std::move(back)});
    return static_cast<int>(nodes_.size() - 1);
}

int Tape::leaf(Mat value) { return push(std::move(value), nullptr); }

int Tape::spmm(const SparseOp& op, int x) {
    Mat y = op.apply(value(x));
    return push(std::move(y), [&op, x](Tape& t, int self) {
        Mat gx = op.apply_t(t.grad(self));
        Mat& dst = t.grad_ref(x);
        for (size_t i = 0; i < dst.size(); ++i) dst.a[i] += gx.a[i];
    });
}

int Tape::matmul_op(int x, int w) {
    Mat y = matmul(value(x), value(w));
    return push(std::move(y), [x, w](Tape& t, int self) {
        Mat gx = matmul_nt(t.grad(self), t.value(w));
        Mat gw = matmul_tn(t.value(x), t.grad(self));
        Mat& dx = t.grad_ref(x);
        for (size_t i = 0; i < dx.size(); ++i) dx.a[i] += gx.a[i];
        Mat& dw = t.grad_ref(w);
        for (size_t i = 0; i < dw.size(); ++i) dw.a[i] += gw.a[i];
    });
}

int Tape::add_rowvec(int x, int bias) {
    const Mat& xv = value(x);
    const Mat& bv = value(bias);
    if (bv.rows != 1 || bv.cols != xv.cols) throw std::invalid_argument("add_rowvec: bias shape mismatch");
    Mat y = xv;
    for (size_t i = 0; i < y.rows; ++i)
        for (size_t j = 0; j < y.cols; ++j) y(i, j) += bv(0, j);
    return push(std::move(y), [x, bias](Tape& t, int self) {
        const Mat& g = t.grad(self);
        Mat& dx = t.grad_ref(x);
        for (size_t i = 0; i < dx.size(); ++i) dx.a[i] += g.a[i];
        Mat& db = t.grad_ref(bias);
        for (size_t i = 0; i < g.rows; ++i)
            for (size_t j = 0; j < g.cols; ++j) db(0, j) += g(i, j);
    });
}

int Tape::relu(int x) {
    Mat y = value(x);
    for (double& v : y.a) v = v > 0 ? v : 0.0;
    return push(std::move(y), [x](Tape& t, int self) {
        const Mat& g = t.grad(self);
        const Mat& xv = t.value(x);
        Mat& dx = t.grad_ref(x);
        for (size_t i = 0; i < dx.size(); ++i) dx.a[i] += xv.a[i] > 0 ? g.a[i] : 0.0;
    });
}

int Tape::mul_mask(int x, Mat mask) {
    const Mat& xv = value(x);
    if (!xv.same_shape(mask)) throw std::invalid_argument("mul_mask: shape mismatch");
    Mat y = xv;
    for (size_t i = 0; i < y.size(); ++i) y.a[i] *= mask.a[i];
    auto shared = std::make_shared<Mat>(std::move(mask));
    return push(std::move(y), [x, shared](Tape& t, int self) {
        const Mat& g = t.grad(self);
        Mat& dx = t.grad_ref(x);
        for (size_t i = 0; i < dx.size(); ++i) dx.a[i] += g.a[i] * shared->a[i];
    });
}

int Tape::batchnorm(int x, BatchNormState& state, bool training) {
    const Mat& xv = value(x);
    const size_t n = xv.rows, d = xv.cols;
    if (state.running_mean.size() != d) state.reset(d);
    Mat y(n, d);
    if (!training) {
        // eval mode scales by running statistics; constant w.r.t. the batch
        auto scale = std::make_shared<std::vector<double>>(d);
        for (size_t j = 0; j < d; ++j) (*scale)[j] = 1.0 / std::sqrt(state.running_var[j] + state.eps);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < d; ++j) y(i, j) = (xv(i, j) - state.running_mean[j]) * (*scale)[j];
        return push(std::move(y), [x, scale](Tape& t, int self) {
            const Mat& g = t.grad(self);
            Mat& dx = t.grad_ref(x);
            for (size_t i = 0; i < g.rows; ++i)
                for (size_t j = 0; j < g.cols; ++j) dx(i, j) += g(i, j) * (*scale)[j];
        });
    }
    auto mean = std::make_shared<std::vector<double>>(d, 0.0);
    auto inv_std = std::make_shared<std::vector<double>>(d, 0.0);
    auto xhat = std::make_shared<Mat>(n, d);
    for (size_t j = 0; j < d; ++j) {
        double mu = 0;
        for (size_t i = 0; i < n; ++i) mu += xv(i, j);
        mu /= static_cast<double>(n);
        double var = 0;
        for (size_t i = 0; i < n; ++i) {
            double dv = xv(i, j) - mu;
            var += dv * dv;
        }
        var /= static_cast<double>(n);
        (*mean)[j] = mu;
        (*inv_std)[j] = 1.0 / std::sqrt(var + state.eps);
        for (size_t i = 0; i < n; ++i) {
            double h = (xv(i, j) - mu) * (*inv_std)[j];
            (*xhat)(i, j) = h;
            y(i, j) = h;
        }
        state.running_mean[j] = state.momentum * state.running_mean[j] + (1 - state.momentum) * mu;
        state.running_var[j] = state.momentum * state.running_var[j] + (1 - state.momentum) * var;
    }
    return push(std::move(y), [x, inv_std, xhat](Tape& t, int self) {
        const Mat& g = t.grad(self);
        const size_t n = g.rows, d = g.cols;
        Mat& dx = t.grad_ref(x);
        for (size_t j = 0; j < d; ++j) {
            double sum_g = 0, sum_gx = 0;
            for (size_t i = 0; i < n; ++i) {
                sum_g += g(i, j);
                sum_gx += g(i, j) * (*xhat)(i, j);
            }
            double scale = (*inv_std)[j] / static_cast<double>(n);
            for (size_t i = 0; i < n; ++i)
                dx(i, j) += scale * (static_cast<double>(n) * g(i, j) - sum_g - (*xhat)(i, j) * sum_gx);
        }
    });
}

Mat softmax_rows(const Mat& logits) {
    Mat p(logits.rows, logits.cols);
    for (size_t i = 0; i < logits.rows; ++i) {
        double mx = logits(i, 0);
        for (size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, logits(i, j));
        if (!std::isfinite(mx)) throw std::runtime_error("softmax: non-finite logits");
        double sum = 0;
        for (size_t j = 0; j < logits.cols; ++j) {
            double e = std::exp(logits(i, j) - mx);
            p(i, j) = e;
            sum += e;
        }
        for (size_t j = 0; j < logits.cols; ++j) p(i, j) /= sum;
    }
    return p;
}

int Tape::softmax_rows(int logits) {
    Mat p = nn::softmax_rows(value(logits));
    return push(std::move(p), [logits](Tape& t, int self) {
        const Mat& g = t.grad(self);
        const Mat& p = t.value(self);
        Mat& dz = t.grad_ref(logits);
        for (size_t i = 0; i < p.rows; ++i) {
            double dot = 0;
            for (size_t j = 0; j < p.cols; ++j) dot += g(i, j) * p(i, j);
            for (size_t j = 0; j < p.cols; ++j) dz(i, j) += p(i, j) * (g(i, j) - dot);
        }
    });
}

double cross_entropy(const Mat& probs, const std::vector<int>& labels, const std::vector<uint32_t>& mask) {
    if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
    double loss = 0;
    for (uint32_t i : mask) {
        int y = labels.at(i);
        if (y < 0 || static_cast<size_t>(y) >= probs.cols)
            throw std::invalid_argument("cross_entropy: label out of range for masked row");
        loss -= std::log(std::max(probs(i, static_cast<size_t>(y)), kProbClamp));
    }
    return loss / static_cast<double>(mask.size());
}

int Tape::cross_entropy(int probs, const std::vector<int>& labels, const std::vector<uint32_t>& mask) {
    Mat l(1, 1);
    l(0, 0) = nn::cross_entropy(value(probs), labels, mask);
    auto lab = std::make_shared<std::vector<int>>(labels);
    auto msk = std::make_shared<std::vector<uint32_t>>(mask);
    return push(std::move(l), [probs, lab, msk](Tape& t, int self) {
        double g = t.grad(self)(0, 0);
        const Mat& p = t.value(probs);
        Mat& dp = t.grad_ref(probs);
        double inv_n = 1.0 / static_cast<double>(msk->size());
        for (uint32_t i : *msk) {
            auto y = static_cast<size_t>((*lab)[i]);
            double pv = std::max(p(i, y), kProbClamp);
            if (p(i, y) > kProbClamp) dp(i, y) -= g * inv_n / pv;
        }
    });
}

void Tape::backward(int root) {
    if (root < 0 || static_cast<size_t>(root) >= nodes_.size())
        throw std::invalid_argument("backward: invalid node");
    for (auto& n : nodes_) {
        n.grad = Mat(n.value.rows, n.value.cols);
    }
    Mat& g = nodes_[static_cast<size_t>(root)].grad;
    std::fill(g.a.begin(), g.a.end(), 1.0);
    for (int i = root; i >= 0; --i) {
        auto& n = nodes_[static_cast<size_t>(i)];
        if (n.back) n.back(*this, i);
    }
}

}  // namespace hyperdet::nn
