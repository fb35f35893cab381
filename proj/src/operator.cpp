#include "lorentz/operator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

constexpr cplx I{0.0, 1.0};

using V2 = Eigen::Vector2cd;

V2 cross_e3(const V2& a) { return V2(-a(1), a(0)); }

V2 block2(const Vec& u, int start) { return V2(u(start), u(start + 1)); }

void put2(Vec& u, int start, const V2& x) {
    u(start) = x(0);
    u(start + 1) = x(1);
}

double nearest_distance(const std::vector<cplx>& pts, cplx w) {
    double d = std::numeric_limits<double>::infinity();
    for (auto p : pts) d = std::min(d, std::abs(p - w));
    return d;
}

// Closed-form resolvent applied to F without any admissibility check.
Vec apply_resolvent(const LorentzMedium& m, const StateLayout& L, double k, cplx w, const Vec& F) {
    const int Ne = m.Ne(), Nm = m.Nm();
    std::vector<cplx> qe(Ne), qm(Nm);
    for (int j = 0; j < Ne; ++j) qe[j] = q_value(m.electric()[j], w);
    for (int l = 0; l < Nm; ++l) qm[l] = q_value(m.magnetic()[l], w);

    std::vector<V2> Aej(Ne), Adej(Ne), Aml(Nm), Adml(Nm);
    V2 sum_e = V2::Zero(), sum_m = V2::Zero();
    for (int j = 0; j < Ne; ++j) {
        const auto& o = m.electric()[j];
        V2 p = block2(F, L.P(j, 0)), pd = block2(F, L.Pd(j, 0));
        Aej[j] = ((-I * o.alpha - w) * p - I * pd) / qe[j];
        Adej[j] = (I * o.omega * o.omega * p - w * pd) / qe[j];
        sum_e += o.Omega * o.Omega * Adej[j];
    }
    for (int l = 0; l < Nm; ++l) {
        const auto& o = m.magnetic()[l];
        V2 p = block2(F, L.M(l, 0)), pd = block2(F, L.Md(l, 0));
        Aml[l] = ((-I * o.alpha - w) * p - I * pd) / qm[l];
        Adml[l] = (I * o.omega * o.omega * p - w * pd) / qm[l];
        sum_m += o.Omega * o.Omega * Adml[l];
    }
    V2 Ae = -m.eps0() * (block2(F, L.E(0)) + I * sum_e);
    V2 Am = -m.mu0() * (block2(F, L.H(0)) + I * sum_m);

    const cplx mu = permeability(m, w);
    const cplx D = dispersion_value(m, w);
    V2 S = (w * mu * Ae - k * cross_e3(Am)) / (D - k * k);

    Vec out = Vec::Zero(L.dim());
    // V(w) S
    put2(out, L.E(0), S);
    const cplx f = k / (w * mu);
    V2 xS = cross_e3(S);
    put2(out, L.H(0), f * xS);
    for (int j = 0; j < Ne; ++j) {
        put2(out, L.P(j, 0), -S / qe[j] + Aej[j]);
        put2(out, L.Pd(j, 0), I * w * S / qe[j] + Adej[j]);
    }
    // T(w) F
    V2 Hm = Am / (w * mu);
    put2(out, L.H(0), block2(out, L.H(0)) + Hm);
    for (int l = 0; l < Nm; ++l) {
        put2(out, L.M(l, 0), -f * xS / qm[l] - Hm / qm[l] + Aml[l]);
        put2(out, L.Md(l, 0), I * w * f * xS / qm[l] + I * Am / (mu * qm[l]) + Adml[l]);
    }
    return out;
}

Mat resolvent_unchecked(const LorentzMedium& m, double k, cplx w) {
    StateLayout L = layout_of(m, 2);
    Mat R(L.dim(), L.dim());
    for (int c = 0; c < L.dim(); ++c) R.col(c) = apply_resolvent(m, L, k, w, Vec::Unit(L.dim(), c));
    return R;
}

// Index sets of the two invariant chains of the transverse operator.
std::vector<int> chain_indices(const StateLayout& L, int chain) {
    const int a = chain, b = 1 - chain;
    std::vector<int> idx{L.E(a), L.H(b)};
    for (int j = 0; j < L.Ne; ++j) idx.push_back(L.P(j, a));
    for (int j = 0; j < L.Ne; ++j) idx.push_back(L.Pd(j, a));
    for (int l = 0; l < L.Nm; ++l) idx.push_back(L.M(l, b));
    for (int l = 0; l < L.Nm; ++l) idx.push_back(L.Md(l, b));
    return idx;
}

struct ChainEig {
    std::vector<cplx> lambda;
    std::vector<Vec> right, left;  // biorthogonal: left^H right = 1
};

ChainEig chain_eigen(const Mat& B) {
    const int n = static_cast<int>(B.rows());
    Eigen::ComplexEigenSolver<Mat> es(B, true);
    Eigen::ComplexEigenSolver<Mat> esl(B.adjoint(), true);
    if (es.info() != Eigen::Success || esl.info() != Eigen::Success)
        throw NotDiagonalizable("eigensolver did not converge");

    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(es.eigenvalues()(i)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)) < 1e-10 * scale)
                throw NotDiagonalizable("clustered eigenvalues");

    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[i][j] = std::abs(es.eigenvalues()(i) - std::conj(esl.eigenvalues()(j)));
    auto perm = hungarian(cost);

    ChainEig out;
    for (int i = 0; i < n; ++i) {
        Vec v = es.eigenvectors().col(i);
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::abs(v(imax)) / v(imax);
        v /= v.norm();
        Vec wl = esl.eigenvectors().col(perm[i]);
        cplx s = wl.dot(v);  // w^H v
        if (std::abs(s) < 1e-12 * wl.norm()) throw NotDiagonalizable("left/right eigenvectors nearly orthogonal");
        wl /= std::conj(s);
        out.lambda.push_back(es.eigenvalues()(i));
        out.right.push_back(v);
        out.left.push_back(wl);
    }
    return out;
}

}  // namespace

StateLayout layout_of(const LorentzMedium& m, int comps) {
    StateLayout L;
    L.Ne = m.Ne();
    L.Nm = m.Nm();
    L.comps = comps;
    return L;
}

Eigen::VectorXd gram_weights(const LorentzMedium& m, int comps) {
    StateLayout L = layout_of(m, comps);
    Eigen::VectorXd g(L.dim());
    for (int c = 0; c < comps; ++c) {
        g(L.E(c)) = m.eps0() / 2;
        g(L.H(c)) = m.mu0() / 2;
        for (int j = 0; j < L.Ne; ++j) {
            const auto& o = m.electric()[j];
            g(L.P(j, c)) = m.eps0() / 2 * o.omega * o.omega * o.Omega * o.Omega;
            g(L.Pd(j, c)) = m.eps0() / 2 * o.Omega * o.Omega;
        }
        for (int l = 0; l < L.Nm; ++l) {
            const auto& o = m.magnetic()[l];
            g(L.M(l, c)) = m.mu0() / 2 * o.omega * o.omega * o.Omega * o.Omega;
            g(L.Md(l, c)) = m.mu0() / 2 * o.Omega * o.Omega;
        }
    }
    return g;
}

namespace {

// Operator on blocks of `comps` components; `curl` is the matrix of
// v -> k x v on one block.
Mat assemble(const LorentzMedium& m, int comps, const Eigen::MatrixXd& curl) {
    StateLayout L = layout_of(m, comps);
    Mat A = Mat::Zero(L.dim(), L.dim());
    for (int a = 0; a < comps; ++a) {
        for (int b = 0; b < comps; ++b) {
            A(L.E(a), L.H(b)) += -curl(a, b) / m.eps0();
            A(L.H(a), L.E(b)) += curl(a, b) / m.mu0();
        }
        for (int j = 0; j < L.Ne; ++j) {
            const auto& o = m.electric()[j];
            A(L.E(a), L.Pd(j, a)) += -I * o.Omega * o.Omega;
            A(L.P(j, a), L.Pd(j, a)) += I;
            A(L.Pd(j, a), L.Pd(j, a)) += -I * o.alpha;
            A(L.Pd(j, a), L.P(j, a)) += -I * o.omega * o.omega;
            A(L.Pd(j, a), L.E(a)) += I;
        }
        for (int l = 0; l < L.Nm; ++l) {
            const auto& o = m.magnetic()[l];
            A(L.H(a), L.Md(l, a)) += -I * o.Omega * o.Omega;
            A(L.M(l, a), L.Md(l, a)) += I;
            A(L.Md(l, a), L.Md(l, a)) += -I * o.alpha;
            A(L.Md(l, a), L.M(l, a)) += -I * o.omega * o.omega;
            A(L.Md(l, a), L.H(a)) += I;
        }
    }
    return A;
}

}  // namespace

PerpOperator build_perp_operator(const LorentzMedium& m, double k) {
    if (!(k >= 0.0)) throw DimensionMismatch("wavenumber must be nonnegative");
    Eigen::MatrixXd curl(2, 2);
    curl << 0.0, -k, k, 0.0;
    PerpOperator A;
    A.matrix = assemble(m, 2, curl);
    A.gram = gram_weights(m, 2);
    A.k = k;
    A.layout = layout_of(m, 2);
    return A;
}

Mat build_full_operator(const LorentzMedium& m, const Eigen::Vector3d& k) {
    Eigen::MatrixXd curl(3, 3);
    curl << 0.0, -k(2), k(1), k(2), 0.0, -k(0), -k(1), k(0), 0.0;
    return assemble(m, 3, curl);
}

Eigen::MatrixXd RotationMap::lifted(int blocks) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3 * blocks, 3 * blocks);
    for (int b = 0; b < blocks; ++b) out.block(3 * b, 3 * b, 3, 3) = R;
    return out;
}

RotationMap build_rotation(const Eigen::Vector3d& k) {
    const double n = k.norm();
    if (!(n > 0.0)) throw ZeroWaveVector("rotation needs a nonzero wave vector");
    RotationMap rm;
    rm.k_vector = k;
    Eigen::Vector3d kh = k / n;
    Eigen::Vector3d e3(0, 0, 1);
    Eigen::Vector3d x = kh.cross(e3);
    if (x.norm() < 1e-14) {
        if (kh(2) > 0) {
            rm.R.setIdentity();
        } else {
            rm.R << 0, -1, 0, -1, 0, 0, 0, 0, -1;
        }
        return rm;
    }
    Eigen::Vector3d w = x / x.norm();
    Eigen::Vector3d u = kh.cross(w);
    rm.R.row(0) = w.transpose();
    rm.R.row(1) = u.transpose();
    rm.R.row(2) = kh.transpose();
    return rm;
}

cplx weighted_inner(const Eigen::VectorXd& gram, const Vec& u, const Vec& v) {
    if (u.size() != gram.size() || v.size() != gram.size())
        throw DimensionMismatch("state size does not match the inner product");
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += gram(i) * u(i) * std::conj(v(i));
    return s;
}

cplx weighted_inner(const LorentzMedium& m, const Vec& u, const Vec& v) {
    return weighted_inner(gram_weights(m, u.size() == 3 * m.N() ? 3 : 2), u, v);
}

double gram_norm(const Eigen::VectorXd& gram, const Vec& u) { return std::sqrt(weighted_inner(gram, u, u).real()); }

double gram_operator_norm(const Eigen::VectorXd& gram, const Mat& A) {
    Eigen::VectorXd s = gram.cwiseSqrt();
    Mat B = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Mat> svd(B);
    return svd.singularValues()(0);
}

Mat gram_adjoint(const Eigen::VectorXd& gram, const Mat& A) {
    return gram.cwiseInverse().asDiagonal() * A.adjoint() * gram.asDiagonal();
}

namespace {

// Poles, zeros of mu and the origin.
std::vector<cplx> structural_singular_set(const LorentzMedium& m) {
    std::vector<cplx> pts;
    for (const auto& o : m.electric()) {
        auto [a, b] = q_roots(o);
        pts.push_back(a);
        pts.push_back(b);
    }
    for (const auto& o : m.magnetic()) {
        auto [a, b] = q_roots(o);
        pts.push_back(a);
        pts.push_back(b);
    }
    auto rf = numerator_denominator(m);
    if (rf.Pm.degree() > 0)
        for (auto z : poly_roots(rf.Pm)) pts.push_back(z);
    pts.push_back(0.0);
    return pts;
}

}  // namespace

std::vector<cplx> resolvent_singular_set(const LorentzMedium& m, double k) {
    std::vector<cplx> pts = solve_dispersion(m, k);
    auto rest = structural_singular_set(m);
    pts.insert(pts.end(), rest.begin(), rest.end());
    return pts;
}

Mat resolvent_formula(const LorentzMedium& m, double k, cplx w) {
    double d = nearest_distance(resolvent_singular_set(m, k), w);
    if (d < 1e-8 * (1.0 + std::abs(w)))
        throw NearSingularEvaluation("distance " + std::to_string(d) + " to the singular set");
    return resolvent_unchecked(m, k, w);
}

Mat resolvent_dense(const PerpOperator& A, cplx w) {
    const auto n = A.matrix.rows();
    Mat B = A.matrix - w * Mat::Identity(n, n);
    return B.fullPivLu().solve(Mat::Identity(n, n));
}

Vec v_map(const LorentzMedium& m, double k, cplx w, const Eigen::Vector2cd& X) {
    StateLayout L = layout_of(m, 2);
    Vec out = Vec::Zero(L.dim());
    const cplx f = k / (w * permeability(m, w));
    V2 xX = cross_e3(X);
    put2(out, L.E(0), X);
    put2(out, L.H(0), f * xX);
    for (int j = 0; j < L.Ne; ++j) {
        cplx q = q_value(m.electric()[j], w);
        put2(out, L.P(j, 0), -X / q);
        put2(out, L.Pd(j, 0), I * w * X / q);
    }
    for (int l = 0; l < L.Nm; ++l) {
        cplx q = q_value(m.magnetic()[l], w);
        put2(out, L.M(l, 0), -f * xX / q);
        put2(out, L.Md(l, 0), I * w * f * xX / q);
    }
    return out;
}

SpectralDecomposition spectral_decomposition(const PerpOperator& A) {
    const StateLayout& L = A.layout;
    const int n = L.dim();
    Eigen::VectorXd s = A.gram.cwiseSqrt();
    Mat B = s.asDiagonal() * A.matrix * s.cwiseInverse().asDiagonal();

    ChainEig ch[2];
    std::vector<int> idx[2];
    for (int c = 0; c < 2; ++c) {
        idx[c] = chain_indices(L, c);
        const int h = static_cast<int>(idx[c].size());
        Mat Bc(h, h);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j) Bc(i, j) = B(idx[c][i], idx[c][j]);
        ch[c] = chain_eigen(Bc);
    }
    const int h = static_cast<int>(ch[0].lambda.size());
    std::vector<std::vector<double>> cost(h, std::vector<double>(h));
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) cost[i][j] = std::abs(ch[0].lambda[i] - ch[1].lambda[j]);
    auto perm = hungarian(cost);

    SpectralDecomposition sd;
    Mat sum = Mat::Zero(n, n), recon = Mat::Zero(n, n);
    for (int i = 0; i < h; ++i) {
        Mat Pb = Mat::Zero(n, n);
        int pick[2] = {i, perm[i]};
        for (int c = 0; c < 2; ++c) {
            const Vec& v = ch[c].right[pick[c]];
            const Vec& w = ch[c].left[pick[c]];
            for (int a = 0; a < h; ++a)
                for (int b = 0; b < h; ++b) Pb(idx[c][a], idx[c][b]) = v(a) * std::conj(w(b));
        }
        Mat P = s.cwiseInverse().asDiagonal() * Pb * s.asDiagonal();
        cplx lam = 0.5 * (ch[0].lambda[i] + ch[1].lambda[perm[i]]);
        sum += P;
        recon += lam * P;
        sd.eigenvalues.push_back(lam);
        sd.projectors.push_back(std::move(P));
    }
    sd.completeness_residual = (sum - Mat::Identity(n, n)).norm();
    sd.reconstruction_residual = (recon - A.matrix).norm() / std::max(1.0, A.matrix.norm());
    return sd;
}

void refine_eigenvalues(const LorentzMedium& m, double k, SpectralDecomposition& sd) {
    if (k > 0.0)
        for (auto& w : sd.eigenvalues) w = refine_root(m, k, w);
}

Mat projector_contour(const LorentzMedium& m, double k, cplx w0, const ContourOptions& opt) {
    auto roots = solve_dispersion(m, k);
    auto it = std::min_element(roots.begin(), roots.end(),
                               [&](cplx a, cplx b) { return std::abs(a - w0) < std::abs(b - w0); });
    const cplx center = *it;
    auto sing = resolvent_singular_set(m, k);
    double d = std::numeric_limits<double>::infinity();
    bool skipped = false;
    for (auto p : sing) {
        if (!skipped && p == center) {
            skipped = true;
            continue;
        }
        d = std::min(d, std::abs(p - center));
    }
    const double rho = 0.5 * d;
    if (!(rho >= 1e-10)) throw ContourTooTight("contour radius " + std::to_string(rho));
    if (std::abs(w0 - center) > 0.5 * rho) throw ContourTooTight("requested point is not an isolated eigenvalue");

    auto node = [&](double theta) {
        cplx e = std::polar(1.0, theta);
        return Mat(resolvent_unchecked(m, k, center + rho * e) * e);
    };
    int nodes = opt.initial_nodes;
    Mat acc = Mat::Zero(2 * m.N(), 2 * m.N());
    for (int j = 0; j < nodes; ++j) acc += node(2.0 * M_PI * j / nodes);
    Mat prev = -(rho / nodes) * acc;
    while (nodes < opt.max_nodes) {
        for (int j = 0; j < nodes; ++j) acc += node(2.0 * M_PI * (j + 0.5) / nodes);
        nodes *= 2;
        Mat cur = -(rho / nodes) * acc;
        if ((cur - prev).norm() < opt.tol * std::max(1.0, cur.norm())) return cur;
        prev = std::move(cur);
    }
    throw QuadratureNonconvergent("contour projector after " + std::to_string(nodes) + " nodes");
}

SweepReport projector_norm_sweep(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label,
                                 const std::vector<double>& k_grid) {
    SweepReport rep;
    rep.label = label;
    for (double k : k_grid) {
        cplx target = branch_root(m, t, label, k);
        auto sd = spectral_decomposition(build_perp_operator(m, k));
        std::size_t best = 0;
        for (std::size_t i = 1; i < sd.eigenvalues.size(); ++i)
            if (std::abs(sd.eigenvalues[i] - target) < std::abs(sd.eigenvalues[best] - target)) best = i;
        rep.points.push_back({k, sd.eigenvalues[best], gram_operator_norm(gram_weights(m, 2), sd.projectors[best])});
    }
    if (rep.points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, lo = rep.points[0].norm, hi = lo;
        const double n = static_cast<double>(rep.points.size());
        for (const auto& p : rep.points) {
            double x = std::log(p.k), y = std::log(p.norm);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            lo = std::min(lo, p.norm);
            hi = std::max(hi, p.norm);
        }
        rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.variation = hi / lo;
        rep.growth_warning = rep.slope > 0.1;
    }
    return rep;
}

Vec optimal_initial_data(const LorentzMedium& m, double k, cplx w) {
    // w lies in the spectrum; only the structural singular points matter
    if (nearest_distance(structural_singular_set(m), w) < 1e-8 * (1.0 + std::abs(w)))
        throw NearSingularEvaluation("eigenvalue too close to a pole, a zero of mu or the origin");
    Eigen::Vector2cd e1(1.0, 0.0);
    Vec v = v_map(m, k, w, e1);
    return v / gram_norm(gram_weights(m, 2), v);
}

}  // namespace lorentz
