#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "oracles/winding.hpp"
#include "pfdde/charmatrix.hpp"
#include "pfdde/errors.hpp"
#include "pfdde/model_io.hpp"
#include "pfdde/wright.hpp"

using namespace pfdde;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

Model scalar_model(double a0, double a1) {
    LinearPart L{{0.0, 1.0}, {Eigen::MatrixXd::Constant(1, 1, a0), Eigen::MatrixXd::Constant(1, 1, a1)}, 0.0};
    return Model(1, std::nullopt, L);
}

Model random_2d(unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd A0(2, 2), A1(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            A0(i, j) = g(rng);
            A1(i, j) = g(rng);
        }
    return Model(2, std::nullopt, LinearPart{{0.0, 1.0}, {A0, A1}, 0.0});
}

}  // namespace

TEST_CASE("delta and its derivative") {
    Model m = scalar_model(0.0, -0.5 * kPi);
    CHECK(std::abs(det_delta(m, I * kPi / 2.0)) < 1e-15);
    const cplx z(0.3, -0.7), h = 1e-6;
    cplx fd = (det_delta(m, z + h) - det_delta(m, z - h)) / (2.0 * h);
    CHECK(std::abs(fd - det_delta_derivative(m, z)) < 1e-8);

    Model r = random_2d(5);
    CMat fdm = (delta(r, z + h) - delta(r, z - h)) / (2.0 * h);
    CHECK((fdm - delta_prime(r, z)).norm() < 1e-8);
    cplx fdd = (det_delta(r, z + h) - det_delta(r, z - h)) / (2.0 * h);
    CHECK(std::abs(fdd - det_delta_derivative(r, z)) < 1e-7);
}

TEST_CASE("exponential decay root") {
    Model m = scalar_model(-1.0, 0.0);
    auto roots = find_roots(m, {-2.0, 1.0, -1.0, 1.0});
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].lambda + 1.0) < 1e-12);
    CHECK(roots[0].multiplicity == 1);
}

TEST_CASE("wright at the first hopf point") {
    Model m = wright_model(0, 0.0, 1.0);
    auto roots = find_roots(m, {-2.0, 1.0, -10.0, 10.0});
    int total = 0;
    for (auto& r : roots) total += r.multiplicity;
    CHECK(total == oracle::winding(m, {-2.0, 1.0, -10.0, 10.0}));
    REQUIRE(roots.size() >= 2);
    CHECK(std::abs(roots[0].lambda - cplx(0, -kPi / 2)) < 1e-8);
    CHECK(std::abs(roots[1].lambda - cplx(0, kPi / 2)) < 1e-8);
}

TEST_CASE("wright a = -1 count matches brute force winding") {
    Model m = wright_model_at(-1.0, FourierSeries(1, std::nullopt));
    for (Rect r : {Rect{-2, 1, -10, 10}, Rect{-4, 1, -30, 30}, Rect{-1, 0.5, 0.5, 5}}) {
        auto roots = find_roots(m, r);
        int total = 0;
        for (auto& x : roots) {
            total += x.multiplicity;
            CHECK(r.contains(x.lambda));
        }
        CHECK(total == oracle::winding(m, r));
        CHECK(total == winding_number(m, r));
    }
}

TEST_CASE("root lists of real models are conjugation closed") {
    for (unsigned seed : {1u, 2u, 3u}) {
        Model m = random_2d(seed);
        auto roots = find_roots(m, {-3, 3, -15, 15});
        for (auto& r : roots) {
            auto hit = std::find_if(roots.begin(), roots.end(), [&](const Root& o) {
                return std::abs(o.lambda - std::conj(r.lambda)) < 1e-10 * (1 + std::abs(r.lambda));
            });
            CHECK(hit != roots.end());
        }
    }
}

TEST_CASE("sorted by real part descending") {
    auto roots = find_roots(random_2d(4), {-3, 3, -15, 15});
    for (std::size_t k = 1; k < roots.size(); ++k) CHECK(roots[k - 1].lambda.real() >= roots[k].lambda.real());
}

TEST_CASE("empty and degenerate rectangles") {
    Model m = scalar_model(-1.0, 0.0);
    CHECK(find_roots(m, {0.5, 1.0, -1.0, 1.0}).empty());
    CHECK(find_roots(m, {0.0, 0.0, 0.0, 0.0}).empty());
    CHECK(root_list_csv({}) == "re,im,multiplicity,residual\n");
}

TEST_CASE("double root is counted twice") {
    // x' = -2 x + ... : det = (z+1)^2 via a diagonal 2x2 with equal entries
    LinearPart L{{0.0}, {-Eigen::MatrixXd::Identity(2, 2)}, 0.0};
    Model m(2, std::nullopt, L);
    auto roots = find_roots(m, {-2, 1, -1, 1});
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].multiplicity == 2);
}

TEST_CASE("eigen triples are normalized") {
    std::vector<std::pair<Model, cplx>> cases;
    for (int N = 0; N <= 4; ++N) {
        auto br = wright_branch(N);
        cases.emplace_back(wright_model(N, 0.0, 1.0), cplx(0, br.omega));
        cases.emplace_back(wright_model(N, 0.0, 1.0), cplx(0, -br.omega));
    }
    cases.emplace_back(fold_model(0.5, FourierSeries::scalar(std::nullopt, {{0, 1.0}})), 0.0);
    for (unsigned seed : {1u, 2u}) {
        Model m = random_2d(seed);
        for (auto& r : find_roots(m, {-2, 2, -8, 8})) cases.emplace_back(m, r.lambda);
    }
    for (auto& [m, lambda] : cases) {
        auto t = eigen_triple(m, lambda);
        CHECK(std::abs(t.normalization(m) - 1.0) < 1e-12);
        CHECK(t.right_residual(m) < 1e-10);
        CHECK(t.left_residual(m) < 1e-10);
    }
}

TEST_CASE("wright triple closed form") {
    auto t = eigen_triple(wright_model(0, 0.0, 1.0), cplx(0, kPi / 2));
    CHECK(std::abs(t.q(0) - 1.0) < 1e-14);
    const double w = kPi / 2;
    CHECK(std::abs(t.p(0) - (1.0 - I * w) / (1.0 + w * w)) < 1e-13);

    auto t1 = eigen_triple(wright_model(1, 0.0, 1.0), cplx(0, 1.5 * kPi));
    CHECK(std::abs(t1.p(0) - (1.0 - I * 1.5 * kPi) / (1.0 + 2.25 * kPi * kPi)) < 1e-13);
}

TEST_CASE("fold triple") {
    for (double b1 : {-0.5, 0.5, 2.0}) {
        auto t = eigen_triple(fold_model(b1, FourierSeries::scalar(std::nullopt, {{0, 1.0}})), 0.0);
        CHECK(std::abs(t.p(0) * t.q(0) - 1.0 / (1.0 + b1)) < 1e-13);
    }
}

TEST_CASE("not a root and not simple") {
    CHECK_THROWS_AS(eigen_triple(scalar_model(-1.0, 0.0), 0.0), NotARoot);
    LinearPart L{{0.0}, {Eigen::MatrixXd::Zero(2, 2)}, 0.0};
    CHECK_THROWS_AS(eigen_triple(Model(2, std::nullopt, L), 0.0), NotSimple);
}

TEST_CASE("root sensitivity against re-rooting") {
    const double a = -kPi / 2, da = 1e-6;
    auto t = eigen_triple(wright_model(0, 0.0, 1.0), cplx(0, kPi / 2));
    cplx s = root_sensitivity(t, wright_dDelta_da(t.lambda));
    auto shifted = find_roots(wright_model_at(a + da, FourierSeries(1, std::nullopt)), {-0.5, 0.5, 1.0, 2.0});
    REQUIRE(shifted.size() == 1);
    cplx fd = (shifted[0].lambda - t.lambda) / da;
    CHECK(std::abs(fd - s) < 1e-5);
    CHECK(s.real() < 0.0);
    CHECK(std::abs(root_sensitivity(t, CMat::Zero(1, 1))) == 0.0);
}

TEST_CASE("spectral accuracy on the hopf branches") {
    for (int N = 0; N <= 4; ++N) {
        auto br = wright_branch(N);
        CHECK(std::abs(det_delta(wright_model(N, 0.0, 1.0), cplx(0, br.omega))) < 1e-12);
    }
}
