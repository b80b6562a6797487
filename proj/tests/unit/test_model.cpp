#include <doctest.h>

#include <numbers>

#include "pfdde/errors.hpp"
#include "pfdde/model.hpp"
#include "pfdde/model_io.hpp"
#include "pfdde/periodic_linops.hpp"
#include "pfdde/wright.hpp"

using namespace pfdde;

namespace {

const char* kWrightDoc = R"({
  "n": 1,
  "forcing": {"type": "periodic", "T": 6.283185307179586},
  "delays": [0, 1],
  "matrices": [[[0]], [[-1.5707963267948966]]],
  "bilinear": [{"slots": [[0, 0], [1, 0]],
                "coeff": [[[-1, -0.7853981633974483, 0], [1, -0.7853981633974483, 0]]]}]
})";

MultilinearStencil one_term(const FourierSeries& g, Slot a, Slot b) {
    MultilinearStencil s;
    s.order = 2;
    s.terms.push_back({g, {a, b}, true});
    return s;
}

}  // namespace

TEST_CASE("scalar linear model parses") {
    Model m = parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[0],"matrices":[[[-1]]]})");
    CHECK(m.n() == 1);
    CHECK(m.autonomous());
    CHECK(m.max_delay() == 0.0);
    CHECK(!m.bilinear());
}

TEST_CASE("wright document") {
    Model m = parse_model(std::string(kWrightDoc));
    CHECK_FALSE(m.autonomous());
    CHECK(m.max_delay() == 1.0);
    REQUIRE(m.bilinear());
    // one explicit term symmetrizes into two half-weight arrangements
    const auto& B = *m.bilinear();
    REQUIRE(B.terms.size() == 2);
    CHECK(is_symmetric(B));
    CHECK(std::abs(B.terms[0].coeff.coeff(1)(0) - cplx(-0.7853981633974483 / 2)) < 1e-16);
}

TEST_CASE("slot delay beyond h is rejected") {
    std::string doc = kWrightDoc;
    doc.replace(doc.find("[1, 0]]"), 7, "[2, 0]]");
    CHECK_THROWS_WITH_AS(parse_model(doc), doctest::Contains("delay out of range"), ValidationError);
}

TEST_CASE("real flag enforced") {
    LinearPart L{{0.0}, {Eigen::MatrixXd::Zero(1, 1)}, 0.0};
    auto g = FourierSeries::scalar(1.0, {{1, 1.0}});
    CHECK_THROWS_AS(Model(1, 1.0, L, one_term(g, {0, 0}, {0, 0})), ValidationError);
    MultilinearStencil s = one_term(g, {0, 0}, {0, 0});
    s.terms[0].real = false;
    Model m(1, 1.0, L, s);
    CHECK_FALSE(m.is_real());
}

TEST_CASE("dimension and ordering checks") {
    CHECK_THROWS_AS(parse_model(R"({"n":2,"forcing":{"type":"autonomous"},"delays":[0],"matrices":[[[1]]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[1,1],"matrices":[[[1]],[[1]]]})"),
                    ValidationError);
    Model sorted = parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[1,0],"matrices":[[[2]],[[3]]]})");
    CHECK(sorted.linear().delays == std::vector<double>{0.0, 1.0});
    CHECK(sorted.linear().matrices[0](0, 0) == 3.0);
    CHECK_THROWS_AS(parse_model(R"({"n":1,"forcing":{"type":"periodic","T":-1},"delays":[0],"matrices":[[[1]]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_model("{not json"), ValidationError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

TEST_CASE("autonomous model rejects periodic coefficients") {
    CHECK_THROWS_AS(parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[0],"matrices":[[[0]]],
        "bilinear":[{"slots":[[0,0],[0,0]],"coeff":[[[1,1,0],[-1,1,0]]]}]})"),
                    ValidationError);
}

TEST_CASE("symmetrize averages arrangements and is idempotent") {
    auto g = FourierSeries::scalar(std::nullopt, {{0, 3.0}});
    MultilinearStencil s = one_term(g, {0.0, 0}, {1.0, 0});
    auto sym = symmetrize(s);
    REQUIRE(sym.terms.size() == 2);
    CHECK(sym.terms[0].coeff.coeff(0)(0) == cplx(1.5));
    CHECK(sym.terms[1].coeff.coeff(0)(0) == cplx(1.5));
    CHECK(sym.terms[0].slots[0] == sym.terms[1].slots[1]);
    auto twice = symmetrize(sym);
    REQUIRE(twice.terms.size() == sym.terms.size());
    for (std::size_t k = 0; k < sym.terms.size(); ++k) {
        CHECK(twice.terms[k].coeff == sym.terms[k].coeff);
        CHECK(twice.terms[k].slots == sym.terms[k].slots);
    }
}

TEST_CASE("evaluation is symmetric in its arguments") {
    Model m = wright_model(0, 1.0, 0.7);
    HistoryField u(cplx(0.1, 1.3), FourierSeries::scalar(m.period(), {{0, 1.0}, {1, cplx(0.2, 0.1)}}));
    HistoryField w(cplx(-0.2, 0.4), FourierSeries::scalar(m.period(), {{-1, cplx(0.3, -0.5)}}));
    auto uw = eval_bilinear(*m.bilinear(), u, w);
    auto wu = eval_bilinear(*m.bilinear(), w, u);
    for (const auto& [k, v] : uw.modes()) CHECK((v - wu.coeff(k)).norm() < 1e-15);
}

TEST_CASE("real-flagged stencil maps real fields to real series") {
    Model m = wright_model(1, 0.8, 1.1);
    HistoryField u(0.0, FourierSeries::scalar(m.period(), {{1, cplx(1, 2)}, {-1, cplx(1, -2)}}));
    CHECK(eval_bilinear(*m.bilinear(), u, u).is_real(1e-14));
}

TEST_CASE("serialization round trip is byte exact") {
    Model m = wright_model(2, 1.0, 0.37);
    const std::string once = serialize_model(m);
    const std::string twice = serialize_model(parse_model(once));
    CHECK(once == twice);

    Model f = fold_model(0.5, FourierSeries::scalar(6.0, {{0, 1.0}, {1, cplx(0, -0.5)}, {-1, cplx(0, 0.5)}}));
    CHECK(serialize_model(parse_model(serialize_model(f))) == serialize_model(f));
}

TEST_CASE("optional max_delay") {
    Model m = parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[0,1],"max_delay":2,
        "matrices":[[[0]],[[-1]]],"bilinear":[{"slots":[[2,0],[0,0]],"coeff":[[[0,1,0]]]}]})");
    CHECK(m.max_delay() == 2.0);
    CHECK_THROWS_AS(parse_model(R"({"n":1,"forcing":{"type":"autonomous"},"delays":[0,1],"max_delay":0.5,
        "matrices":[[[0]],[[-1]]]})"),
                    ValidationError);
}
