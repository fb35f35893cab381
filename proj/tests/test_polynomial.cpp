#include <doctest.h>

#include <algorithm>
#include <random>

#include "lorentz/errors.hpp"
#include "lorentz/polynomial.hpp"

using namespace lorentz;

namespace {

ComplexPolynomial from_roots(const std::vector<cplx>& r) {
    ComplexPolynomial p = ComplexPolynomial::constant(1.0);
    for (cplx z : r) p = p * ComplexPolynomial::linear(z);
    return p;
}

double match_error(std::vector<cplx> a, std::vector<cplx> b) {
    double worst = 0.0;
    for (cplx x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) { return std::abs(u - x) < std::abs(v - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

}  // namespace

TEST_CASE("polynomial arithmetic and evaluation") {
    ComplexPolynomial p({1.0, 2.0, 3.0});  // 1 + 2x + 3x^2
    CHECK(p.degree() == 2);
    CHECK(std::abs(p.eval(2.0) - cplx(17.0)) < 1e-15);
    cplx v, d;
    p.eval_d(cplx(0, 1), v, d);
    CHECK(std::abs(v - cplx(-2.0, 2.0)) < 1e-15);
    CHECK(std::abs(d - cplx(2.0, 6.0)) < 1e-15);
    auto q = p * ComplexPolynomial::linear(1.0);
    CHECK(q.degree() == 3);
    cplx rem;
    auto back = q.deflate(1.0, &rem);
    CHECK(std::abs(rem) < 1e-15);
    CHECK(std::abs((back - p).max_coeff()) < 1e-15);
}

TEST_CASE("trim removes negligible leading coefficients") {
    ComplexPolynomial p({1.0, 1.0, 1e-20});
    p.trim();
    CHECK(p.degree() == 1);
}

TEST_CASE("roots of polynomials built from known roots") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cplx> r;
        const int n = 2 + trial % 9;
        for (int i = 0; i < n; ++i) r.emplace_back(U(g), U(g));
        auto found = poly_roots(from_roots(r));
        REQUIRE(found.size() == r.size());
        CHECK(match_error(found, r) < 1e-8);
    }
}

TEST_CASE("exact zero roots are split off") {
    auto p = from_roots({0.0, 0.0, cplx(1, -1)});
    auto r = poly_roots(p);
    REQUIRE(r.size() == 3);
    CHECK(std::count(r.begin(), r.end(), cplx(0.0)) == 2);
}

TEST_CASE("badly scaled coefficients still pass the residual certificate") {
    // roots spread over twelve orders of magnitude
    auto p = from_roots({1e-6, 1.0, 1e6, cplx(0, -1e3)});
    auto r = poly_roots(p);
    for (cplx z : {cplx(1e-6), cplx(1.0), cplx(1e6), cplx(0, -1e3)}) {
        double best = 1e300;
        for (cplx x : r) best = std::min(best, std::abs(x - z) / std::abs(z));
        CHECK(best < 1e-8);
    }
}
