#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hyperdet/rng.hpp"
#include "hyperdet/sparse.hpp"

namespace hyperdet::nn {

struct Mat {
    size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
    double operator()(size_t i, size_t j) const { return a[i * cols + j]; }
    size_t size() const { return a.size(); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    static Mat eye(size_t n);
    static Mat glorot_uniform(size_t fan_in, size_t fan_out, rng::Stream& rng);
};

Mat matmul(const Mat& a, const Mat& b);
Mat matmul_tn(const Mat& a, const Mat& b);  // a^T * b
Mat matmul_nt(const Mat& a, const Mat& b);  // a * b^T

// Sparse operator with its transpose cached for the backward pass.
struct SparseOp {
    sparse::Csr mat;
    sparse::Csr mat_t;

    SparseOp() = default;
    explicit SparseOp(sparse::Csr m) : mat(std::move(m)), mat_t(mat.transposed()) {}
    Mat apply(const Mat& x) const;
    Mat apply_t(const Mat& x) const;
};

struct BatchNormState {
    std::vector<double> running_mean, running_var;
    double momentum = 0.9;
    double eps = 1e-5;

    void reset(size_t dim) {
        running_mean.assign(dim, 0.0);
        running_var.assign(dim, 1.0);
    }
};

// Reverse-mode tape over matrix ops. Node values are computed eagerly;
// backward() walks nodes in reverse creation order.
class Tape {
public:
    int leaf(Mat value);

    int spmm(const SparseOp& op, int x);
    int matmul_op(int x, int w);
    int add_rowvec(int x, int bias);  // bias: 1 x cols
    int relu(int x);
    int mul_mask(int x, Mat mask);    // elementwise; mask carries dropout scaling
    int batchnorm(int x, BatchNormState& state, bool training);
    int softmax_rows(int logits);     // max-subtracted, rows sum to 1
    // -(1/N) sum_{i in mask} log(max(p[i, label[i]], 1e-12)); scalar 1x1
    int cross_entropy(int probs, const std::vector<int>& labels, const std::vector<uint32_t>& mask);

    const Mat& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
    const Mat& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }

    void backward(int root);

private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void(Tape&, int)> back;  // reads grad(id), accumulates into parents
    };
    int push(Mat value, std::function<void(Tape&, int)> back);
    Mat& grad_ref(int id) { return nodes_[static_cast<size_t>(id)].grad; }
    std::vector<Node> nodes_;
};

// standalone helpers shared with the tape ops
Mat softmax_rows(const Mat& logits);
double cross_entropy(const Mat& probs, const std::vector<int>& labels, const std::vector<uint32_t>& mask);

constexpr double kProbClamp = 1e-12;

}  // namespace hyperdet::nn
