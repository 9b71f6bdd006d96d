#include "textmark/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace textmark {
namespace kernels {

namespace serial {

void affine(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y) {
    y = Matrix(x.rows, w.cols);
    for (size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.row(r);
        double* yr = y.row(r);
        for (size_t c = 0; c < w.cols; ++c) {
            double acc = b[c];
            for (size_t i = 0; i < x.cols; ++i) acc += xr[i] * w.at(i, c);
            yr[c] = acc;
        }
    }
}

void relu(Matrix& y) {
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
}

void relu_backward(const Matrix& pre, Matrix& dh) {
    for (size_t i = 0; i < dh.data.size(); ++i)
        if (pre.data[i] <= 0.0) dh.data[i] = 0.0;
}

void softmax_rows(Matrix& y) {
    for (size_t r = 0; r < y.rows; ++r) {
        double* row = y.row(r);
        double mx = row[0];
        for (size_t c = 1; c < y.cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (size_t c = 0; c < y.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (size_t c = 0; c < y.cols; ++c) row[c] /= sum;
    }
}

void grad_weights(const Matrix& x, const Matrix& dy, Matrix& gw) {
    gw = Matrix(x.cols, dy.cols);
    for (size_t i = 0; i < x.cols; ++i) {
        for (size_t o = 0; o < dy.cols; ++o) {
            double acc = 0.0;
            for (size_t b = 0; b < x.rows; ++b) acc += x.at(b, i) * dy.at(b, o);
            gw.at(i, o) = acc;
        }
    }
}

void grad_bias(const Matrix& dy, std::vector<double>& gb) {
    gb.assign(dy.cols, 0.0);
    for (size_t o = 0; o < dy.cols; ++o) {
        double acc = 0.0;
        for (size_t b = 0; b < dy.rows; ++b) acc += dy.at(b, o);
        gb[o] = acc;
    }
}

void backprop_inputs(const Matrix& dy, const Matrix& w, Matrix& dx) {
    dx = Matrix(dy.rows, w.rows);
    for (size_t b = 0; b < dy.rows; ++b) {
        const double* dyr = dy.row(b);
        double* dxr = dx.row(b);
        for (size_t i = 0; i < w.rows; ++i) {
            double acc = 0.0;
            for (size_t o = 0; o < w.cols; ++o) acc += dyr[o] * w.at(i, o);
            dxr[i] = acc;
        }
    }
}

void embed_mean(const TokenBatch& batch, const Matrix& embedding, Matrix& x) {
    x = Matrix(batch.ids.size(), embedding.cols);
    for (size_t b = 0; b < batch.ids.size(); ++b) {
        const auto& toks = batch.ids[b];
        double* xr = x.row(b);
        for (int id : toks) {
            const double* er = embedding.row(static_cast<size_t>(id));
            for (size_t d = 0; d < embedding.cols; ++d) xr[d] += er[d];
        }
        double inv = toks.empty() ? 0.0 : 1.0 / static_cast<double>(toks.size());
        for (size_t d = 0; d < embedding.cols; ++d) xr[d] *= inv;
    }
}

void embed_mean_backward(const Matrix& dx, const TokenBatch& batch, Matrix& ge) {
    for (size_t d = 0; d < ge.cols; ++d) {
        for (size_t b = 0; b < batch.ids.size(); ++b) {
            const auto& toks = batch.ids[b];
            if (toks.empty()) continue;
            double g = dx.at(b, d) / static_cast<double>(toks.size());
            for (int id : toks) ge.at(static_cast<size_t>(id), d) += g;
        }
    }
}

void axpy(double a, const Matrix& g, Matrix& w) {
    for (size_t i = 0; i < w.data.size(); ++i) w.data[i] += a * g.data[i];
}

void axpy(double a, const std::vector<double>& g, std::vector<double>& w) {
    for (size_t i = 0; i < w.size(); ++i) w[i] += a * g[i];
}

}  // namespace serial

namespace par {

// The parallel loops split work over independent output elements only; every
// element keeps the serial reduction order. That makes results bitwise equal
// to the serial reference for any thread count.

void affine(const Matrix& x, const Matrix& w, const std::vector<double>& b, Matrix& y) {
    y = Matrix(x.rows, w.cols);
    const int64_t n = static_cast<int64_t>(x.rows);
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < n; ++r) {
        const double* xr = x.row(static_cast<size_t>(r));
        double* yr = y.row(static_cast<size_t>(r));
        for (size_t c = 0; c < w.cols; ++c) {
            double acc = b[c];
            for (size_t i = 0; i < x.cols; ++i) acc += xr[i] * w.at(i, c);
            yr[c] = acc;
        }
    }
}

void relu(Matrix& y) {
    const int64_t n = static_cast<int64_t>(y.data.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) y.data[i] = y.data[i] > 0.0 ? y.data[i] : 0.0;
}

void relu_backward(const Matrix& pre, Matrix& dh) {
    const int64_t n = static_cast<int64_t>(dh.data.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i)
        if (pre.data[i] <= 0.0) dh.data[i] = 0.0;
}

void softmax_rows(Matrix& y) {
    const int64_t n = static_cast<int64_t>(y.rows);
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < n; ++r) {
        double* row = y.row(static_cast<size_t>(r));
        double mx = row[0];
        for (size_t c = 1; c < y.cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (size_t c = 0; c < y.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (size_t c = 0; c < y.cols; ++c) row[c] /= sum;
    }
}

void grad_weights(const Matrix& x, const Matrix& dy, Matrix& gw) {
    gw = Matrix(x.cols, dy.cols);
    const int64_t total = static_cast<int64_t>(x.cols * dy.cols);
#pragma omp parallel for schedule(static)
    for (int64_t idx = 0; idx < total; ++idx) {
        size_t i = static_cast<size_t>(idx) / dy.cols;
        size_t o = static_cast<size_t>(idx) % dy.cols;
        double acc = 0.0;
        for (size_t b = 0; b < x.rows; ++b) acc += x.at(b, i) * dy.at(b, o);
        gw.at(i, o) = acc;
    }
}

void grad_bias(const Matrix& dy, std::vector<double>& gb) {
    gb.assign(dy.cols, 0.0);
    const int64_t n = static_cast<int64_t>(dy.cols);
#pragma omp parallel for schedule(static)
    for (int64_t o = 0; o < n; ++o) {
        double acc = 0.0;
        for (size_t b = 0; b < dy.rows; ++b) acc += dy.at(b, static_cast<size_t>(o));
        gb[static_cast<size_t>(o)] = acc;
    }
}

void backprop_inputs(const Matrix& dy, const Matrix& w, Matrix& dx) {
    dx = Matrix(dy.rows, w.rows);
    const int64_t n = static_cast<int64_t>(dy.rows);
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < n; ++b) {
        const double* dyr = dy.row(static_cast<size_t>(b));
        double* dxr = dx.row(static_cast<size_t>(b));
        for (size_t i = 0; i < w.rows; ++i) {
            double acc = 0.0;
            for (size_t o = 0; o < w.cols; ++o) acc += dyr[o] * w.at(i, o);
            dxr[i] = acc;
        }
    }
}

void embed_mean(const TokenBatch& batch, const Matrix& embedding, Matrix& x) {
    x = Matrix(batch.ids.size(), embedding.cols);
    const int64_t n = static_cast<int64_t>(batch.ids.size());
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < n; ++b) {
        const auto& toks = batch.ids[static_cast<size_t>(b)];
        double* xr = x.row(static_cast<size_t>(b));
        for (int id : toks) {
            const double* er = embedding.row(static_cast<size_t>(id));
            for (size_t d = 0; d < embedding.cols; ++d) xr[d] += er[d];
        }
        double inv = toks.empty() ? 0.0 : 1.0 / static_cast<double>(toks.size());
        for (size_t d = 0; d < embedding.cols; ++d) xr[d] *= inv;
    }
}

void embed_mean_backward(const Matrix& dx, const TokenBatch& batch, Matrix& ge) {
    // Parallel over embedding columns: token rows collide between documents,
    // columns never do.
    const int64_t n = static_cast<int64_t>(ge.cols);
#pragma omp parallel for schedule(static)
    for (int64_t d = 0; d < n; ++d) {
        for (size_t b = 0; b < batch.ids.size(); ++b) {
            const auto& toks = batch.ids[b];
            if (toks.empty()) continue;
            double g = dx.at(b, static_cast<size_t>(d)) / static_cast<double>(toks.size());
            for (int id : toks) ge.at(static_cast<size_t>(id), static_cast<size_t>(d)) += g;
        }
    }
}

void axpy(double a, const Matrix& g, Matrix& w) {
    const int64_t n = static_cast<int64_t>(w.data.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) w.data[i] += a * g.data[i];
}

void axpy(double a, const std::vector<double>& g, std::vector<double>& w) {
    for (size_t i = 0; i < w.size(); ++i) w[i] += a * g[i];
}

}  // namespace par

}  // namespace kernels
}  // namespace textmark
