#include <doctest.h>

#include <numbers>

#include "pfdde/charmatrix.hpp"
#include "pfdde/errors.hpp"
#include "pfdde/wright.hpp"

using namespace pfdde;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);
}  // namespace

TEST_CASE("branch data") {
    auto b0 = wright_branch(0);
    CHECK(b0.omega == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(b0.a == doctest::Approx(-kPi / 2).epsilon(1e-15));
    auto b1 = wright_branch(1);
    CHECK(b1.a == doctest::Approx(1.5 * kPi).epsilon(1e-15));
    CHECK(b1.sign == -1);
    CHECK_THROWS_AS(wright_branch(-1), ValidationError);
}

TEST_CASE("forced model coefficients") {
    Model m = wright_model(0, 1.0, 1.0);
    REQUIRE(m.period());
    CHECK(*m.period() == doctest::Approx(2 * kPi).epsilon(1e-15));
    const auto& B = *m.bilinear();
    REQUIRE(B.terms.size() == 2);
    CHECK(std::abs(B.terms[0].coeff.coeff(1)(0) - (-kPi / 4)) < 1e-15);
    CHECK(std::abs(B.terms[0].coeff.coeff(-1)(0) - (-kPi / 4)) < 1e-15);
    CHECK(m.is_real());
    CHECK(wright_model(0, 0.0, 1.0).autonomous());
    CHECK_FALSE(wright_model(0, 0.0, 1.0).bilinear());
}

TEST_CASE("J is 2 i w / Delta(i x)") {
    for (int N = 0; N <= 2; ++N) {
        const auto br = wright_branch(N);
        Model m = wright_model(N, 0.0, 1.0);
        for (double x : {0.0, 0.4, -1.3, 2.0 * br.omega + 0.3}) {
            cplx ref = 2.0 * I * br.omega / delta(m, cplx(0, x))(0, 0);
            CHECK(std::abs(J(N, x) - ref) < 1e-13);
            CHECK(wright_w(N, x) == doctest::Approx(std::norm(delta(m, cplx(0, x))(0, 0))).epsilon(1e-13));
        }
    }
}

TEST_CASE("J at the doubled frequency") {
    for (int N = 0; N <= 4; ++N) {
        const auto br = wright_branch(N);
        cplx J0 = J(N, 2.0 * br.omega);
        CHECK(std::abs(J0 - cplx(4.0, -2.0 * br.sign) / 5.0) < 1e-12);
    }
}

TEST_CASE("pole at the hopf frequency") {
    const double w = kPi / 2;
    CHECK_THROWS_AS(J(0, w), PoleError);
    CHECK(std::abs(J(0, w + 1e-5)) > 1e4);
    CHECK(wright_w(0, 0.3) > 0.0);
}

TEST_CASE("w vanishes only at the hopf frequency on the scanned grid") {
    for (int N = 0; N <= 3; ++N) {
        const auto br = wright_branch(N);
        double min_far = 1e300;
        for (int k = 1; k <= 4000; ++k) {
            const double x = 3.0 * br.omega * k / 4000.0;
            if (std::abs(x - br.omega) < 1e-2) continue;
            min_far = std::min(min_far, wright_w(N, x));
        }
        CHECK(min_far > 1e-6);
    }
}

TEST_CASE("autonomous closed forms") {
    CHECK(l1_autonomous_paper(0) == doctest::Approx(-1.69697).epsilon(1e-5));
    CHECK(l1_autonomous_default(0) == doctest::Approx(-0.21414).epsilon(1e-4));
    for (int N = 0; N <= 4; ++N) CHECK(l1_autonomous_paper(N) < 0.0);
}

TEST_CASE("corrected forced forms reduce to the autonomous values") {
    // l1 is quadratic in beta and the mean of (Omega1 cos)^2 is Omega1^2 / 2
    for (int N = 0; N <= 2; ++N) {
        CHECK(std::abs(l1_forced_default(N, 2.0, 1e-6) - 2.0 * l1_autonomous_default(N)) < 1e-4);
        CHECK(std::abs(l1_forced_plain(N, 2.0, 1e-6) - 2.0 * l1_autonomous_paper(N)) < 1e-4);
    }
}

TEST_CASE("printed forced formula versus the corrected one") {
    // printed = (2 / Omega1) corrected on even branches
    for (double O2 : {0.3, 0.9, 2.2}) {
        CHECK(l1_forced_paper(0, 1.0, O2) == doctest::Approx(2.0 * l1_forced_plain(0, 1.0, O2)).epsilon(1e-12));
        CHECK(l1_forced_paper(2, 0.5, O2) == doctest::Approx(4.0 * l1_forced_plain(2, 0.5, O2)).epsilon(1e-12));
    }
    CHECK(std::abs(l1_forced_paper(0, 1.0, 1e-4) - l1_autonomous_paper(0)) < 1e-3);
}

TEST_CASE("fold model") {
    CHECK_THROWS_AS(fold_model(-1.0, FourierSeries::scalar(std::nullopt, {{0, 1.0}})), ValidationError);
    Model m = fold_model(1.0, FourierSeries::scalar(std::nullopt, {{0, 1.0}}));
    CHECK(std::abs(det_delta(m, 0.0)) < 1e-15);
    CHECK(fold_b_closed_form(1.0, FourierSeries::scalar(std::nullopt, {{0, 1.0}})) == 0.5);
}

TEST_CASE("strong resonance enumeration") {
    auto pts = strong_resonance_points(0, 3, 2);
    // r/s in {1/2, 1, 3/2, 2, 3}
    REQUIRE(pts.size() == 5);
    CHECK(pts[0] == doctest::Approx(kPi / 4));
    CHECK(pts[4] == doctest::Approx(1.5 * kPi));
}

TEST_CASE("bifdiag rows") {
    auto rows = bifdiag(2, 4, 6.0, 20);
    int poles = 0, strong = 0;
    for (auto& r : rows) {
        if (r.kind == "pole") ++poles;
        if (r.kind == "strong_resonance") ++strong;
    }
    CHECK(poles == 2);  // omega_0 and omega_1 below 6
    CHECK(strong > 0);
    CHECK(bifdiag_csv(rows).rfind("N,omega_N,a_N,Omega2,kind,l1_paper,l1_default\n", 0) == 0);
}
