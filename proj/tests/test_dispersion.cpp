#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "common.hpp"
#include "lorentz/dispersion.hpp"
#include "lorentz/errors.hpp"

using namespace lorentz;
using namespace testing_media;

namespace {

bool contains(const std::vector<cplx>& v, cplx z, double tol) {
    return std::any_of(v.begin(), v.end(), [&](cplx w) { return std::abs(w - z) <= tol; });
}

}  // namespace

TEST_CASE("dispersion polynomial shape") {
    auto m = reference();
    auto d = dispersion_polynomial(m, 2.0);
    CHECK(d.degree() == m.N());
    CHECK(std::abs(d.coeffs().back() - cplx(m.eps0() * m.mu0())) < 1e-15);
    for (cplx w : {cplx(0.4, -0.3), cplx(2.2, 0.5)}) {
        const auto rf = numerator_denominator(m);
        const cplx expect = rf.numerator.eval(w) - 4.0 * rf.denominator.eval(w);
        CHECK(std::abs(d.eval(w) - expect) < 1e-12 * (1 + std::abs(expect)));
    }
}

TEST_CASE("roots at k = 0 are the zero catalog") {
    for (auto m : {reference(), critical_m2(), double_pole_m4()}) {
        auto roots = solve_dispersion(m, 0.0);
        REQUIRE(static_cast<int>(roots.size()) == m.N());
        for (const auto& z : catalog_poles_zeros(m).zeros) {
            const auto hits = std::count_if(roots.begin(), roots.end(),
                                            [&](cplx r) { return std::abs(r - z.location) < 1e-6; });
            CHECK(hits == z.multiplicity);
        }
    }
}

TEST_CASE("lossless roots are real") {
    auto m = lossless();
    for (double k : {0.01, 0.3, 1.0, 4.0, 100.0})
        for (cplx r : solve_dispersion(m, k)) CHECK(std::abs(r.imag()) < 1e-9 * (1 + std::abs(r)));
}

TEST_CASE("roots solve the relation, are symmetric and lie in the closed lower half-plane") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 30; ++i) {
        auto m = random_medium(g, true);
        for (double k : {0.05, 0.7, 3.0, 40.0}) {
            auto roots = solve_dispersion(m, k);
            CHECK(static_cast<int>(roots.size()) == m.N());
            for (cplx r : roots) {
                CHECK(r.imag() <= 1e-9 * (1 + std::abs(r)));
                CHECK(contains(roots, -std::conj(r), 1e-7 * (1 + std::abs(r))));
                CHECK(std::abs(dispersion_value(m, r) - k * k) < 1e-8 * k * k);
            }
        }
    }
}

TEST_CASE("refine_root polishes a perturbed root") {
    auto m = reference();
    const double k = 5.0;
    for (cplx r : solve_dispersion(m, k)) {
        const cplx w = refine_root(m, k, r + cplx(1e-9, -1e-9));
        CHECK(std::abs(w - r) < 1e-12 * (1 + std::abs(r)));
    }
}

TEST_CASE("tracking and labels on the reference medium") {
    auto m = reference();
    auto t = asymptotic_coefficients(m);
    auto br = track_branches(m, log_grid(1e-3, 1e3, 20));
    REQUIRE(static_cast<int>(br.size()) == m.N());
    classify_branches(br, t);

    auto hf = hf_labels(t), lf = lf_labels(t);
    CHECK(static_cast<int>(hf.size()) == m.N());
    CHECK(static_cast<int>(lf.size()) == m.N());
    std::vector<BranchLabel> seen_hf, seen_lf;
    for (const auto& b : br) {
        seen_hf.push_back(b.hf_label);
        seen_lf.push_back(b.lf_label);
        const double kh = b.k.back(), kl = b.k.front();
        if (b.hf_label.kind == BranchKind::PlusInf) CHECK(b.omega.back().real() / kh == doctest::Approx(t.c).epsilon(1e-3));
        if (b.hf_label.kind == BranchKind::MinusInf) CHECK(b.omega.back().real() / kh == doctest::Approx(-t.c).epsilon(1e-3));
        if (b.lf_label.kind == BranchKind::Zero0) CHECK(std::abs(b.omega.front().real() / kl) == doctest::Approx(t.c0).epsilon(1e-3));
    }
    // every label used exactly once
    for (const auto& l : hf) CHECK(std::count(seen_hf.begin(), seen_hf.end(), l) == 1);
    for (const auto& l : lf) CHECK(std::count(seen_lf.begin(), seen_lf.end(), l) == 1);
}

TEST_CASE("track_branches rejects unsorted grids") {
    CHECK_THROWS(track_branches(reference(), {1.0, 0.5}));
}

TEST_CASE("hungarian assignment") {
    std::vector<std::vector<double>> c{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    auto p = hungarian(c);
    // optimum 1 + 2 + 2 = 5
    CHECK(p == std::vector<int>{1, 0, 2});
}

TEST_CASE("asymptotic expansions converge at the omitted order") {
    for (auto m : {reference(), critical_m2(), double_pole_m4()}) {
        auto t = asymptotic_coefficients(m);
        auto bd = diagnose_bands(m, t);
        CHECK(bd.k_plus > 0.0);
        CHECK(bd.k_minus > 0.0);
        auto labels = hf_labels(t);
        for (const auto& l : lf_labels(t)) labels.push_back(l);
        for (const auto& l : labels) {
            auto rep = verify_asymptotics(m, t, l, default_probes(l, bd), false);
            CHECK_MESSAGE(rep.ok, l.str() << " fitted " << rep.fitted_order << " expected " << rep.expected_order);
        }
    }
}

TEST_CASE("double real pole first-order coefficients") {
    auto m = double_pole_m4();
    auto t = asymptotic_coefficients(m);
    int seen = 0;
    for (const auto& pc : t.poles) {
        if (pc.pole.cls != PoleClass::Pd) continue;
        ++seen;
        const auto& e = m.electric()[0];
        const auto& h = m.magnetic()[0];
        const double mag = e.Omega * h.Omega / (2.0 * m.c());
        REQUIRE(pc.first_order.size() == 2);
        CHECK(std::abs(std::abs(pc.first_order[0]) - mag) < 1e-10);
        CHECK(std::abs(pc.first_order[0] + pc.first_order[1]) < 1e-12);
        const double k = 1e3;
        const cplx w = branch_root(m, t, {BranchKind::Pole, pc.pole.location, 1}, k);
        CHECK(std::abs(w - pc.pole.location) == doctest::Approx(mag / k).epsilon(1e-2));
    }
    CHECK(seen == 2);
}

TEST_CASE("puiseux expansion on model functions") {
    auto sq = puiseux_expand([](cplx w) { return w * w; }, 0.0, 2);
    REQUIRE(sq.first_order.size() == 2);
    CHECK(std::abs(sq.first_order[0] - cplx(-1.0)) < 1e-12);
    CHECK(std::abs(sq.first_order[1] - cplx(1.0)) < 1e-12);

    auto m = reference();
    auto t = asymptotic_coefficients(m);
    auto d0 = puiseux_expand([&](cplx w) { return dispersion_value(m, w); }, 0.0, 2);
    CHECK(std::abs(std::abs(d0.first_order[0]) - t.c0) < 1e-10);
    CHECK(std::abs(d0.first_order[0] + d0.first_order[1]) < 1e-10);

    auto m2 = critical_m2();
    auto t2 = asymptotic_coefficients(m2);
    for (const auto& pc : t2.poles) {
        if (pc.pole.cls != PoleClass::Ps) continue;
        auto r = puiseux_expand([&](cplx w) { return 1.0 / dispersion_value(m2, w); }, pc.pole.location, 1);
        CHECK(std::abs(r.first_order[0] - pc.A2) < 1e-9 * std::abs(pc.A2));
    }

    CHECK_THROWS_AS(puiseux_expand([](cplx w) { return w * w * w; }, 0.0, 2), DegenerateLeadingCoefficient);
}

TEST_CASE("log grid endpoints") {
    auto g = log_grid(1e-2, 1e2, 10);
    CHECK(g.size() == 41);
    CHECK(g.front() == 1e-2);
    CHECK(g.back() == 1e2);
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 0.1)));
}
