#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "common.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/operator.hpp"

using namespace lorentz;
using namespace testing_media;

namespace {

Vec random_vec(std::mt19937_64& g, int n) {
    std::normal_distribution<double> N;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(N(g), N(g));
    return v;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("layout and dimensions") {
    auto m = reference();
    auto A = build_perp_operator(m, 1.0);
    CHECK(A.matrix.rows() == 2 * m.N());
    CHECK(A.layout.dim() == 2 * m.N());
    CHECK(layout_of(m, 3).dim() == 3 * m.N());
    CHECK(build_full_operator(m, {0, 0, 1}).rows() == 3 * m.N());
    CHECK_THROWS_AS(build_perp_operator(m, -1.0), DimensionMismatch);
    auto L = layout_of(double_pole_m4(), 2);
    std::vector<int> all;
    for (int c = 0; c < 2; ++c) {
        all.push_back(L.E(c));
        all.push_back(L.H(c));
        for (int j = 0; j < L.Ne; ++j) all.insert(all.end(), {L.P(j, c), L.Pd(j, c)});
        for (int l = 0; l < L.Nm; ++l) all.insert(all.end(), {L.M(l, c), L.Md(l, c)});
    }
    std::sort(all.begin(), all.end());
    for (int i = 0; i < L.dim(); ++i) CHECK(all[static_cast<size_t>(i)] == i);
}

TEST_CASE("spectrum equals the dispersion roots, each twice") {
    std::mt19937_64 g(2);
    for (int it = 0; it < 15; ++it) {
        auto m = random_medium(g, false);
        for (double k : {0.2, 1.5, 20.0}) {
            auto A = build_perp_operator(m, k);
            Eigen::ComplexEigenSolver<Mat> es(A.matrix, false);
            auto roots = solve_dispersion(m, k);
            const double scale = 1 + A.matrix.norm();
            for (cplx r : roots) {
                int hits = 0;
                for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                    if (std::abs(es.eigenvalues()(i) - r) < 1e-7 * scale) ++hits;
                CHECK(hits >= 2);
            }
        }
    }
}

TEST_CASE("dissipation identity") {
    std::mt19937_64 g(8);
    for (int it = 0; it < 20; ++it) {
        auto m = random_medium(g, true);
        auto A = build_perp_operator(m, 0.9);
        Vec U = random_vec(g, A.layout.dim());
        const double lhs = weighted_inner(A.gram, A.matrix * U, U).imag();
        double rhs = 0.0;
        const auto& L = A.layout;
        for (int c = 0; c < 2; ++c) {
            for (int j = 0; j < m.Ne(); ++j) {
                const auto& o = m.electric()[j];
                rhs -= o.alpha * m.eps0() / 2 * o.Omega * o.Omega * std::norm(U(L.Pd(j, c)));
            }
            for (int l = 0; l < m.Nm(); ++l) {
                const auto& o = m.magnetic()[l];
                rhs -= o.alpha * m.mu0() / 2 * o.Omega * o.Omega * std::norm(U(L.Md(l, c)));
            }
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
        CHECK(lhs <= 1e-13);
    }
    auto A = build_perp_operator(lossless(), 3.0);
    CHECK(rel(gram_adjoint(A.gram, A.matrix), A.matrix) < 1e-14);
}

TEST_CASE("weighted inner product and norms") {
    std::mt19937_64 g(1);
    auto m = reference();
    auto gw = gram_weights(m);
    Vec u = random_vec(g, gw.size()), v = random_vec(g, gw.size());
    CHECK(std::abs(weighted_inner(gw, u, v) - std::conj(weighted_inner(gw, v, u))) < 1e-13);
    CHECK(std::abs(weighted_inner(m, u, v) - weighted_inner(gw, u, v)) < 1e-13);
    CHECK(gram_norm(gw, u) * gram_norm(gw, u) == doctest::Approx(weighted_inner(gw, u, u).real()));
    CHECK_THROWS_AS(weighted_inner(gw, u, Vec::Zero(3)), DimensionMismatch);

    auto A = build_perp_operator(m, 2.0);
    Eigen::VectorXd s = A.gram.cwiseSqrt();
    Mat B = s.asDiagonal() * A.matrix * s.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> se(B.adjoint() * B);
    CHECK(gram_operator_norm(A.gram, A.matrix) == doctest::Approx(std::sqrt(se.eigenvalues().maxCoeff())));
    Mat X = random_vec(g, A.layout.dim()) * random_vec(g, A.layout.dim()).transpose();
    Vec a = random_vec(g, A.layout.dim()), b = random_vec(g, A.layout.dim());
    CHECK(std::abs(weighted_inner(A.gram, X * a, b) - weighted_inner(A.gram, a, gram_adjoint(A.gram, X) * b)) <
          1e-10 * X.norm() * a.norm() * b.norm());
}

TEST_CASE("rotation maps the wave vector to e3 and conjugates the full operator") {
    std::mt19937_64 g(4);
    std::normal_distribution<double> N;
    auto m = reference();
    std::vector<Eigen::Vector3d> ks{{0, 0, 2}, {0, 0, -3}, {1e-17, 0, -1}};
    for (int i = 0; i < 10; ++i) ks.emplace_back(N(g), N(g), N(g));
    for (const auto& k : ks) {
        auto rm = build_rotation(k);
        CHECK((rm.R * rm.R.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
        CHECK(rm.R.determinant() == doctest::Approx(1.0));
        CHECK((rm.R * k.normalized() - Eigen::Vector3d(0, 0, 1)).norm() < 1e-14);
        const Eigen::MatrixXd Rl = rm.lifted(m.N());
        Mat lhs = Rl.cast<cplx>() * build_full_operator(m, k) * Rl.transpose().cast<cplx>();
        Mat rhs = build_full_operator(m, {0, 0, k.norm()});
        CHECK(rel(lhs, rhs) < 1e-13);
    }
    CHECK_THROWS_AS(build_rotation({0, 0, 0}), ZeroWaveVector);
}

TEST_CASE("full operator along e3 restricts to the transverse operator") {
    auto m = critical_m2();
    const double k = 1.7;
    Mat F = build_full_operator(m, {0, 0, k});
    auto A = build_perp_operator(m, k);
    auto L3 = layout_of(m, 3);
    std::vector<int> map;
    for (int b = 0; b < L3.blocks(); ++b) map.insert(map.end(), {3 * b, 3 * b + 1});
    for (int i = 0; i < A.layout.dim(); ++i)
        for (int j = 0; j < A.layout.dim(); ++j)
            CHECK(std::abs(F(map[static_cast<size_t>(i)], map[static_cast<size_t>(j)]) - A.matrix(i, j)) < 1e-15);
}

TEST_CASE("closed-form resolvent agrees with the dense inverse") {
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int it = 0; it < 20; ++it) {
        auto m = random_medium(g, true);
        const double k = std::exp(U(g));
        auto A = build_perp_operator(m, k);
        cplx w(U(g), U(g));
        Mat Rf = resolvent_formula(m, k, w), Rd = resolvent_dense(A, w);
        CHECK(rel(Rf, Rd) < 1e-9);
        const auto n = A.layout.dim();
        CHECK(rel((A.matrix - w * Mat::Identity(n, n)) * Rf, Mat::Identity(n, n)) < 1e-9);
    }
}

TEST_CASE("resolvent refuses the singular set") {
    auto m = reference();
    const double k = 2.0;
    for (cplx r : solve_dispersion(m, k)) CHECK_THROWS_AS(resolvent_formula(m, k, r), NearSingularEvaluation);
    CHECK_THROWS_AS(resolvent_formula(m, k, 0.0), NearSingularEvaluation);
    const auto [q1, q2] = q_roots(m.electric()[0]);
    CHECK_THROWS_AS(resolvent_formula(m, k, q1), NearSingularEvaluation);
    CHECK_THROWS_AS(resolvent_formula(m, k, q2), NearSingularEvaluation);
}

TEST_CASE("v_map produces eigenvectors") {
    auto m = reference();
    const double k = 1.3;
    auto A = build_perp_operator(m, k);
    for (cplx w : solve_dispersion(m, k)) {
        for (Eigen::Vector2cd X : {Eigen::Vector2cd(1, 0), Eigen::Vector2cd(cplx(0.3, 1), 2)}) {
            Vec v = v_map(m, k, w, X);
            CHECK((A.matrix * v - w * v).norm() < 1e-10 * (1 + std::abs(w)) * v.norm());
        }
        Vec o = optimal_initial_data(m, k, w);
        CHECK(gram_norm(A.gram, o) == doctest::Approx(1.0));
        CHECK((A.matrix * o - w * o).norm() < 1e-10 * (1 + std::abs(w)) * o.norm());
    }
}

TEST_CASE("spectral projectors") {
    for (auto m : {reference(), critical_m2(), double_pole_m4()}) {
        for (double k : {1e-3, 1.0, 1e3}) {
            auto A = build_perp_operator(m, k);
            auto sd = spectral_decomposition(A);
            const auto n = A.layout.dim();
            REQUIRE(static_cast<int>(sd.eigenvalues.size()) == m.N());
            CHECK(sd.completeness_residual < 1e-10);
            CHECK(sd.reconstruction_residual < 1e-10);
            refine_eigenvalues(m, k, sd);
            auto roots = solve_dispersion(m, k);
            for (size_t i = 0; i < sd.projectors.size(); ++i) {
                const Mat& P = sd.projectors[i];
                const double s = std::max(1.0, P.norm());
                CHECK(rel(P * P, P) < 1e-9 * s);
                CHECK(std::abs(P.trace() - cplx(2.0)) < 1e-9 * s);
                CHECK((A.matrix * P - sd.eigenvalues[i] * P).norm() < 1e-9 * s * (1 + A.matrix.norm()));
                for (size_t j = 0; j < sd.projectors.size(); ++j)
                    if (j != i) CHECK((P * sd.projectors[j]).norm() < 1e-9 * s * sd.projectors[j].norm());
                auto it = std::min_element(roots.begin(), roots.end(), [&](cplx a, cplx b) {
                    return std::abs(a - sd.eigenvalues[i]) < std::abs(b - sd.eigenvalues[i]);
                });
                CHECK(std::abs(*it - sd.eigenvalues[i]) < 1e-12 * (1 + std::abs(*it)));
            }
            (void)n;
        }
    }
}

TEST_CASE("contour projectors agree with the eigen projectors") {
    for (auto m : {reference(), critical_m2()}) {
        for (double k : {1e-2, 1.0, 1e2}) {
            auto A = build_perp_operator(m, k);
            auto sd = spectral_decomposition(A);
            for (size_t i = 0; i < sd.eigenvalues.size(); ++i) {
                Mat Pc = projector_contour(m, k, sd.eigenvalues[i]);
                CHECK(rel(Pc, sd.projectors[i]) < 1e-8 * std::max(1.0, sd.projectors[i].norm()));
            }
        }
    }
}

TEST_CASE("coincident eigenvalues are not decomposed") {
    CHECK_THROWS_AS(spectral_decomposition(build_perp_operator(reference(), 0.0)), NotDiagonalizable);
}

TEST_CASE("projector norms stay bounded on the high-frequency band") {
    auto m = reference();
    auto t = asymptotic_coefficients(m);
    auto bd = diagnose_bands(m, t);
    for (const auto& l : hf_labels(t)) {
        auto rep = projector_norm_sweep(m, t, l, log_grid(bd.k_plus, 100 * bd.k_plus, 10));
        CHECK(rep.points.size() == 21);
        CHECK_FALSE(rep.growth_warning);
        CHECK(rep.variation < 10.0);
    }
}
