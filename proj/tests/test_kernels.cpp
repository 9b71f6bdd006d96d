#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "textmark/common.hpp"
#include "textmark/kernels.hpp"

using namespace textmark;

namespace {

Matrix random_matrix(size_t rows, size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform01() * 4.0 - 2.0;
    return m;
}

std::vector<double> random_vector(size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform01() * 4.0 - 2.0;
    return v;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.same_shape(b) && (a.size() == 0 || std::memcmp(a.data.data(), b.data.data(),
                                                            a.size() * sizeof(double)) == 0);
}

TokenBatch random_batch(size_t docs, size_t max_len, size_t vocab, Rng& rng) {
    TokenBatch batch;
    batch.ids.resize(docs);
    for (auto& ids : batch.ids) {
        size_t len = rng.below(max_len + 1);  // zero-length documents included
        ids.resize(len);
        for (int& id : ids) id = static_cast<int>(rng.below(vocab));
    }
    return batch;
}

}  // namespace

TEST_CASE("affine matches a hand-computed example") {
    Matrix x(1, 2);
    x.data = {1.0, 2.0};
    Matrix w(2, 2);
    w.data = {3.0, 4.0, 5.0, 6.0};  // row-major: w[0]={3,4}, w[1]={5,6}
    std::vector<double> b = {0.5, -0.5};
    Matrix y;
    kernels::serial::affine(x, w, b, y);
    REQUIRE(y.rows == 1);
    REQUIRE(y.cols == 2);
    CHECK(y.at(0, 0) == doctest::Approx(1 * 3 + 2 * 5 + 0.5));
    CHECK(y.at(0, 1) == doctest::Approx(1 * 4 + 2 * 6 - 0.5));
}

TEST_CASE("softmax rows sum to one and stay finite for huge logits") {
    Matrix y(2, 3);
    y.data = {1000.0, 1000.5, 999.0, -1000.0, -1000.5, -999.0};
    kernels::serial::softmax_rows(y);
    for (size_t r = 0; r < y.rows; ++r) {
        double sum = 0.0;
        for (size_t c = 0; c < y.cols; ++c) {
            CHECK(std::isfinite(y.at(r, c)));
            CHECK(y.at(r, c) >= 0.0);
            sum += y.at(r, c);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("relu zeroes negatives only") {
    Matrix y(1, 4);
    y.data = {-1.0, 0.0, 2.5, -0.0001};
    kernels::serial::relu(y);
    CHECK(y.data == std::vector<double>{0.0, 0.0, 2.5, 0.0});
}

TEST_CASE("embed_mean averages rows and zeroes empty documents") {
    Matrix e(3, 2);
    e.data = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    TokenBatch batch;
    batch.ids = {{0, 2}, {}};
    Matrix x;
    kernels::serial::embed_mean(batch, e, x);
    REQUIRE(x.rows == 2);
    CHECK(x.at(0, 0) == doctest::Approx(3.0));
    CHECK(x.at(0, 1) == doctest::Approx(4.0));
    CHECK(x.at(1, 0) == 0.0);
    CHECK(x.at(1, 1) == 0.0);
}

TEST_CASE("parallel kernels are bitwise identical to serial on random shapes") {
    Rng rng(2024);
    for (int round = 0; round < 4; ++round) {
        size_t B = 1 + rng.below(40);
        size_t I = 1 + rng.below(30);
        size_t O = 1 + rng.below(25);
        size_t V = 2 + rng.below(200);

        Matrix x = random_matrix(B, I, rng);
        Matrix w = random_matrix(I, O, rng);
        std::vector<double> b = random_vector(O, rng);
        Matrix dy = random_matrix(B, O, rng);
        Matrix embedding = random_matrix(V, I, rng);
        TokenBatch batch = random_batch(B, 30, V, rng);

        Matrix ys, yp;
        kernels::serial::affine(x, w, b, ys);
        kernels::par::affine(x, w, b, yp);
        CHECK(bitwise_equal(ys, yp));

        Matrix rs = ys, rp = yp;
        kernels::serial::relu(rs);
        kernels::par::relu(rp);
        CHECK(bitwise_equal(rs, rp));

        Matrix dhs = dy, dhp = dy;
        kernels::serial::relu_backward(ys, dhs);
        kernels::par::relu_backward(ys, dhp);
        CHECK(bitwise_equal(dhs, dhp));

        Matrix sms = ys, smp = ys;
        kernels::serial::softmax_rows(sms);
        kernels::par::softmax_rows(smp);
        CHECK(bitwise_equal(sms, smp));

        Matrix gws, gwp;
        kernels::serial::grad_weights(x, dy, gws);
        kernels::par::grad_weights(x, dy, gwp);
        CHECK(bitwise_equal(gws, gwp));

        std::vector<double> gbs, gbp;
        kernels::serial::grad_bias(dy, gbs);
        kernels::par::grad_bias(dy, gbp);
        CHECK(gbs == gbp);

        Matrix dxs, dxp;
        kernels::serial::backprop_inputs(dy, w, dxs);
        kernels::par::backprop_inputs(dy, w, dxp);
        CHECK(bitwise_equal(dxs, dxp));

        Matrix es, ep;
        kernels::serial::embed_mean(batch, embedding, es);
        kernels::par::embed_mean(batch, embedding, ep);
        CHECK(bitwise_equal(es, ep));

        Matrix dxe = random_matrix(B, I, rng);
        Matrix ges(V, I), gep(V, I);
        kernels::serial::embed_mean_backward(dxe, batch, ges);
        kernels::par::embed_mean_backward(dxe, batch, gep);
        CHECK(bitwise_equal(ges, gep));

        Matrix g = random_matrix(I, O, rng);
        Matrix as = w, ap = w;
        kernels::serial::axpy(-0.05, g, as);
        kernels::par::axpy(-0.05, g, ap);
        CHECK(bitwise_equal(as, ap));

        std::vector<double> vg = random_vector(O, rng);
        std::vector<double> vs = b, vp = b;
        kernels::serial::axpy(0.3, vg, vs);
        kernels::par::axpy(0.3, vg, vp);
        CHECK(vs == vp);
    }
}

TEST_CASE("grad_bias sums columns") {
    Matrix dy(2, 2);
    dy.data = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> gb;
    kernels::serial::grad_bias(dy, gb);
    REQUIRE(gb.size() == 2);
    CHECK(gb[0] == doctest::Approx(4.0));
    CHECK(gb[1] == doctest::Approx(6.0));
}

TEST_CASE("embed_mean_backward accumulates scaled gradients per occurrence") {
    // One doc [0, 0, 1]: token 0 gets 2/3 of the row gradient, token 1 gets 1/3.
    Matrix dx(1, 1);
    dx.data = {3.0};
    TokenBatch batch;
    batch.ids = {{0, 0, 1}};
    Matrix ge(2, 1);
    kernels::serial::embed_mean_backward(dx, batch, ge);
    CHECK(ge.at(0, 0) == doctest::Approx(2.0));
    CHECK(ge.at(1, 0) == doctest::Approx(1.0));
}
