#pragma once

#include <cstddef>
#include <vector>

namespace textmark {

// Dense row-major matrix of doubles. Small on purpose; the models here are
// tiny and everything stays in cache.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    double* row(size_t r) { return data.data() + r * cols; }
    const double* row(size_t r) const { return data.data() + r * cols; }
    size_t size() const { return data.size(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// Token-id lists for a batch of documents, plus a per-document 1/length
// scale used by the mean-embedding layers.
struct TokenBatch {
    std::vector<std::vector<int>> ids;
};

// The training/inference kernels. `par` is the OpenMP implementation used by
// the classifier; `serial` is the plain-loop reference kept for tests and the
// benchmark. Both compute each output element with the same serial reduction
// order, so results are bitwise identical and independent of thread count.
namespace kernels {

namespace serial {
// Y = X * W + b, X is (B x I), W is (I x O), b has O entries.
void affine(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y);
// In-place max(0, .)
void relu(Matrix& y);
// dh *= (pre > 0)
void relu_backward(const Matrix& pre, Matrix& dh);
// Row-wise softmax, numerically stabilized.
void softmax_rows(Matrix& y);
// gW = X^T * dY
void grad_weights(const Matrix& x, const Matrix& dy, Matrix& gw);
// gb = column sums of dY
void grad_bias(const Matrix& dy, std::vector<double>& gb);
// dX = dY * W^T
void backprop_inputs(const Matrix& dy, const Matrix& w, Matrix& dx);
// x_b = mean of embedding rows for batch item b's token ids.
void embed_mean(const TokenBatch& batch, const Matrix& embedding, Matrix& x);
// gE[token] += dX[b] / len(b) for every token occurrence.
void embed_mean_backward(const Matrix& dx, const TokenBatch& batch, Matrix& ge);
// W += a * G
void axpy(double a, const Matrix& g, Matrix& w);
void axpy(double a, const std::vector<double>& g, std::vector<double>& w);
}  // namespace serial

namespace par {
void affine(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y);
void relu(Matrix& y);
void relu_backward(const Matrix& pre, Matrix& dh);
void softmax_rows(Matrix& y);
void grad_weights(const Matrix& x, const Matrix& dy, Matrix& gw);
void grad_bias(const Matrix& dy, std::vector<double>& gb);
void backprop_inputs(const Matrix& dy, const Matrix& w, Matrix& dx);
void embed_mean(const TokenBatch& batch, const Matrix& embedding, Matrix& x);
void embed_mean_backward(const Matrix& dx, const TokenBatch& batch, Matrix& ge);
void axpy(double a, const Matrix& g, Matrix& w);
void axpy(double a, const std::vector<double>& g, std::vector<double>& w);
}  // namespace par

}  // namespace kernels
}  // namespace textmark
