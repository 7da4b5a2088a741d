#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tsf/error.hpp"
#include "tsf/gradcheck.hpp"
#include "tsf/tensor.hpp"

using namespace tsf;

TEST_CASE("construction and element access") {
    Tensor t = Tensor::from_data({1, 2, 3, 4, 5, 6}, 2, 3);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(1, 2) == 6.0);
    CHECK_THROWS_AS(Tensor::from_data({1, 2}, 2, 3), ShapeError);
    CHECK_THROWS_AS(Tensor::from_data({1, 2}, 1, 2).item(), ContractError);
}

TEST_CASE("matmul value and shape errors") {
    Tensor a = Tensor::from_data({1, 2, 3, 4}, 2, 2);
    Tensor b = Tensor::from_data({5, 6}, 2, 1);
    Tensor c = matmul(a, b);
    CHECK(c.at(0, 0) == 17.0);
    CHECK(c.at(1, 0) == 39.0);
    CHECK_THROWS_WITH_AS(matmul(b, a), "matmul: (2x1) vs (2x2)", ShapeError);
}

TEST_CASE("elementwise basics") {
    Tensor zero = Tensor::zeros(1, 2);
    CHECK(tanh(zero).at(0, 0) == 0.0);
    CHECK(sigmoid(zero).at(0, 1) == 0.5);

    Tensor a = Tensor::row({1, 2});
    Tensor b = Tensor::row({3, 4});
    Tensor m = mul(a, b);
    CHECK(m.at(0, 0) == 3.0);
    CHECK(m.at(0, 1) == 8.0);

    CHECK_THROWS_AS(mul(a, Tensor::column({1, 2})), ShapeError);
    CHECK_THROWS_AS(sub(a, Tensor::column({1, 2})), ShapeError);
}

TEST_CASE("bias broadcast adds a column vector across columns") {
    Tensor m = Tensor::from_data({1, 2, 3, 4, 5, 6}, 2, 3);
    Tensor bias = Tensor::column({10, 20});
    Tensor r = add(m, bias);
    CHECK(r.at(0, 2) == 13.0);
    CHECK(r.at(1, 0) == 24.0);
    // A row vector must not broadcast.
    CHECK_THROWS_AS(add(m, Tensor::row({1, 2, 3})), ShapeError);
}

TEST_CASE("concat_rows stacks and splits gradients at the seam") {
    Tensor a = Tensor::from_data({1}, 1, 1, true);
    Tensor b = Tensor::from_data({2, 3}, 2, 1, true);
    Tensor joined = concat_rows(a, b);
    REQUIRE(joined.rows() == 3);
    CHECK(joined.at(0, 0) == 1.0);
    CHECK(joined.at(2, 0) == 3.0);

    // loss = [1,2,3] . joined, so grads are the coefficients.
    Tensor w = Tensor::from_data({1, 2, 3}, 1, 3);
    Tensor loss = matmul(w, joined);
    backward(loss);
    CHECK(a.grad()[0] == 1.0);
    CHECK(b.grad()[0] == 2.0);
    CHECK(b.grad()[1] == 3.0);

    CHECK_THROWS_AS(concat_rows(Tensor::zeros(1, 2), Tensor::zeros(1, 3)), ShapeError);
    CHECK(concat_rows(Tensor::zeros(2, 1), Tensor::zeros(3, 1)).rows() == 5);
}

TEST_CASE("softmax rows") {
    Tensor u = softmax_rows(Tensor::row({7.5, 7.5, 7.5}));
    for (int j = 0; j < 3; ++j) CHECK(u.at(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-14));

    Tensor two = softmax_rows(Tensor::row({0.0, std::log(3.0)}));
    CHECK(two.at(0, 0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(two.at(0, 1) == doctest::Approx(0.75).epsilon(1e-13));

    Tensor big = softmax_rows(Tensor::row({1000.0, 0.0}));
    CHECK(std::isfinite(big.at(0, 0)));
    CHECK(big.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(big.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and shift invariance") {
    Rng rng(3);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<double> v(6);
        for (double& x : v) x = rng.uniform(-5.0, 5.0);
        Tensor t = Tensor::from_data(std::vector<double>(v), 2, 3);
        Tensor s = softmax_rows(t);
        for (int i = 0; i < 2; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 3; ++j) sum += s.at(i, j);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
        for (double& x : v) x += 2.5;
        Tensor shifted = softmax_rows(Tensor::from_data(std::vector<double>(v), 2, 3));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(s.at(i, j) - shifted.at(i, j)) <= 1e-12);
    }
}

TEST_CASE("backward basics") {
    SUBCASE("leaf as loss") {
        Tensor x = Tensor::from_data({2.0}, 1, 1, true);
        backward(x);
        CHECK(x.grad()[0] == 1.0);
    }
    SUBCASE("fan-out accumulates") {
        Tensor x = Tensor::from_data({2.0}, 1, 1, true);
        Tensor y = add(x, x);
        backward(y);
        CHECK(x.grad()[0] == 2.0);
    }
    SUBCASE("sum of squares") {
        Tensor x = Tensor::from_data({1.0, 2.0}, 1, 2, true);
        Tensor loss = sum(mul(x, x));
        backward(loss);
        CHECK(x.grad()[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(x.grad()[1] == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("gradient of sum(tanh(x)) at zero is all ones") {
        Tensor x = Tensor::zeros(2, 2, true);
        backward(sum(tanh(x)));
        for (double g : x.grad()) CHECK(g == 1.0);
    }
    SUBCASE("gradient of sum(matmul(a, b)) wrt a is ones * b^T") {
        Tensor a = Tensor::from_data({0.5, -1.0, 2.0, 0.25}, 2, 2, true);
        Tensor b = Tensor::from_data({3.0, 4.0}, 2, 1);
        backward(sum(matmul(a, b)));
        CHECK(a.grad()[0] == 3.0);
        CHECK(a.grad()[1] == 4.0);
        CHECK(a.grad()[2] == 3.0);
        CHECK(a.grad()[3] == 4.0);
    }
}

TEST_CASE("backward contract errors") {
    Tensor x = Tensor::from_data({1.0, 2.0}, 1, 2, true);
    CHECK_THROWS_AS(backward(mul(x, x)), ContractError);  // non-scalar

    Tensor loss = sum(mul(x, x));
    backward(loss);
    CHECK_THROWS_AS(backward(loss), ContractError);  // no reset

    Tensor no_grad = Tensor::from_data({1.0}, 1, 1);
    CHECK_THROWS_AS(backward(no_grad), ContractError);
}

TEST_CASE("zero_grad resets accumulation") {
    Tensor x = Tensor::from_data({3.0}, 1, 1, true);
    backward(scale(x, 2.0));
    CHECK(x.grad()[0] == 2.0);
    backward(scale(x, 5.0));
    CHECK(x.grad()[0] == 7.0);  // += across graphs until reset
    x.zero_grad();
    backward(scale(x, 5.0));
    CHECK(x.grad()[0] == 5.0);
}

TEST_CASE("slice, transpose, relu, layer norm and dropout gradients") {
    Rng rng(17);
    Tensor x = Tensor::uniform_init(4, 3, 1.0, rng);
    Tensor gamma = Tensor::uniform_init(4, 1, 1.0, rng);
    Tensor beta = Tensor::uniform_init(4, 1, 1.0, rng);
    std::vector<Tensor> params{x, gamma, beta};
    auto f = [&]() {
        Tensor s = slice_rows(x, 1, 2);
        Tensor t = transpose(s);
        Tensor r = relu(matmul(t, s));
        Tensor ln = layer_norm_cols(x, gamma, beta);
        return add(sum(r), sum(mul(ln, ln)));
    };
    CHECK(check_gradients(f, params) < 1e-6);
}

TEST_CASE("dropout keeps scale and masks gradients") {
    Rng rng(9);
    Tensor x = Tensor::full(1, 10000, 1.0);
    Tensor d = dropout(x, 0.25, rng);
    double mean = 0.0;
    int zeros = 0;
    for (double v : d.data()) {
        mean += v;
        if (v == 0.0) ++zeros;
    }
    mean /= 10000.0;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
    CHECK(zeros > 2000);
    CHECK(zeros < 3000);

    Rng rng2(9);
    Tensor y = Tensor::full(2, 2, 1.0);
    // rate zero is the identity
    CHECK(dropout(y, 0.0, rng2).node().get() == y.node().get());
    CHECK_THROWS_AS(dropout(y, 1.0, rng2), ContractError);
}

TEST_CASE("gradcheck examples") {
    Rng rng(23);
    SUBCASE("sum(tanh(W x)) on a random 3x3") {
        Tensor w = Tensor::uniform_init(3, 3, 1.0, rng);
        Tensor x = Tensor::uniform_init(3, 1, 1.0, rng);
        std::vector<Tensor> params{w};
        auto f = [&]() { return sum(tanh(matmul(w, x))); };
        CHECK(check_gradients(f, params, 1e-5) < 1e-6);
    }
    SUBCASE("linear function is exact to roundoff") {
        Tensor w = Tensor::uniform_init(1, 4, 1.0, rng);
        Tensor x = Tensor::uniform_init(4, 1, 1.0, rng);
        std::vector<Tensor> params{w};
        auto f = [&]() { return matmul(w, x); };
        CHECK(check_gradients(f, params, 1e-5) < 1e-9);
    }
    SUBCASE("dead parameter has zero gradient on both paths") {
        Tensor used = Tensor::from_data({1.0}, 1, 1, true);
        Tensor dead = Tensor::from_data({5.0}, 1, 1, true);
        std::vector<Tensor> params{used, dead};
        auto f = [&]() { return mul(used, used); };
        CHECK(check_gradients(f, params, 1e-5) < 1e-9);
        CHECK(dead.grad()[0] == 0.0);
    }
}

TEST_CASE("composite expression using every primitive stays within 1e-4") {
    Rng rng(31);
    Tensor w1 = Tensor::uniform_init(4, 3, 0.8, rng);
    Tensor w2 = Tensor::uniform_init(4, 4, 0.8, rng);
    Tensor bias = Tensor::uniform_init(4, 1, 0.5, rng);
    Tensor gamma = Tensor::uniform_init(4, 1, 0.5, rng);
    Tensor beta = Tensor::uniform_init(4, 1, 0.5, rng);
    Tensor x = Tensor::uniform_init(3, 5, 1.0, rng);
    std::vector<Tensor> params{w1, w2, bias, gamma, beta};
    auto f = [&]() {
        Tensor h = add(matmul(w1, x), bias);
        Tensor a = tanh(h);
        Tensor b = sigmoid(matmul(w2, h));
        Tensor c = mul(a, b);
        Tensor d = sub(c, scale(a, 0.25));
        Tensor ln = layer_norm_cols(d, gamma, beta);
        Tensor sm = softmax_rows(transpose(ln));
        Tensor top = slice_rows(sm, 0, 2);
        Tensor joined = concat_rows(top, relu(slice_rows(sm, 2, 2)));
        return sum(mul(joined, joined));
    };
    CHECK(check_gradients(f, params, 1e-5) < 1e-4);
}

TEST_CASE("operations are bitwise deterministic") {
    Rng rng1(77), rng2(77);
    Tensor a1 = Tensor::uniform_init(5, 7, 1.0, rng1);
    Tensor a2 = Tensor::uniform_init(5, 7, 1.0, rng2);
    Tensor b1 = Tensor::uniform_init(7, 4, 1.0, rng1);
    Tensor b2 = Tensor::uniform_init(7, 4, 1.0, rng2);
    Tensor c1 = softmax_rows(matmul(a1, b1));
    Tensor c2 = softmax_rows(matmul(a2, b2));
    for (std::size_t i = 0; i < c1.size(); ++i)
        CHECK(c1.data()[i] == c2.data()[i]);
}
