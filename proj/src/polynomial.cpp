#include "lorentz/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "lorentz/errors.hpp"

namespace lorentz {

ComplexPolynomial::ComplexPolynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(cplx(0.0));
}

ComplexPolynomial ComplexPolynomial::constant(cplx a) { return ComplexPolynomial({a}); }

ComplexPolynomial ComplexPolynomial::linear(cplx r) { return ComplexPolynomial({-r, cplx(1.0)}); }

cplx ComplexPolynomial::eval(cplx x) const {
    cplx p = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) p = p * x + *it;
    return p;
}

void ComplexPolynomial::eval_d(cplx x, cplx& p, cplx& dp) const {
    p = 0.0;
    dp = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
}

double ComplexPolynomial::abs_scale(double ax) const {
    double s = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * ax + std::abs(*it);
    return s;
}

double ComplexPolynomial::max_coeff() const {
    double m = 0.0;
    for (const auto& a : c_) m = std::max(m, std::abs(a));
    return m;
}

ComplexPolynomial ComplexPolynomial::derivative() const {
    if (c_.size() <= 1) return ComplexPolynomial();
    std::vector<cplx> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return ComplexPolynomial(std::move(d));
}

ComplexPolynomial ComplexPolynomial::operator+(const ComplexPolynomial& o) const {
    std::vector<cplx> r(std::max(c_.size(), o.c_.size()), cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return ComplexPolynomial(std::move(r));
}

ComplexPolynomial ComplexPolynomial::operator-(const ComplexPolynomial& o) const {
    return *this + o * cplx(-1.0);
}

ComplexPolynomial ComplexPolynomial::operator*(const ComplexPolynomial& o) const {
    std::vector<cplx> r(c_.size() + o.c_.size() - 1, cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return ComplexPolynomial(std::move(r));
}

ComplexPolynomial ComplexPolynomial::operator*(cplx s) const {
    std::vector<cplx> r(c_);
    for (auto& a : r) a *= s;
    return ComplexPolynomial(std::move(r));
}

ComplexPolynomial ComplexPolynomial::deflate(cplx z, cplx* rem) const {
    const int n = degree();
    if (n == 0) {
        if (rem) *rem = c_[0];
        return ComplexPolynomial();
    }
    std::vector<cplx> q(static_cast<size_t>(n));
    cplx b = c_[static_cast<size_t>(n)];
    for (int i = n - 1; i >= 0; --i) {
        q[static_cast<size_t>(i)] = b;
        b = c_[static_cast<size_t>(i)] + b * z;
    }
    if (rem) *rem = b;
    return ComplexPolynomial(std::move(q));
}

void ComplexPolynomial::trim(double rel_tol) {
    const double m = max_coeff();
    while (c_.size() > 1 && std::abs(c_.back()) <= rel_tol * m) c_.pop_back();
}

namespace {

// Parlett-Reinsch balancing of a square matrix in place (radix 2).
void balance(Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / 2.0, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while (c > g) {
                f /= 2.0;
                c /= 4.0;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<cplx> poly_roots(const ComplexPolynomial& p_in, const RootOptions& opt) {
    ComplexPolynomial p = p_in;
    p.trim();
    const int n = p.degree();
    std::vector<cplx> roots;
    if (n <= 0) return roots;

    // Exact zero roots are split off so the companion matrix stays regular.
    const auto& cc = p.coeffs();
    int nzero = 0;
    while (nzero < n && cc[static_cast<size_t>(nzero)] == cplx(0.0)) ++nzero;
    std::vector<cplx> rest(cc.begin() + nzero, cc.end());
    ComplexPolynomial q(rest);
    const int m = q.degree();
    for (int i = 0; i < nzero; ++i) roots.push_back(cplx(0.0));
    if (m == 0) return roots;

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
    const cplx lead = q.leading();
    for (int j = 0; j < m; ++j) comp(0, j) = -q[m - 1 - j] / lead;
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    if (opt.balance) balance(comp);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw RootFindingFailure("companion eigensolver did not converge");

    for (int i = 0; i < m; ++i) {
        cplx r = es.eigenvalues()(i);
        double best = std::abs(q.eval(r)) / q.abs_scale(std::abs(r));
        for (int it = 0; it < opt.newton_steps; ++it) {
            cplx v, dv;
            q.eval_d(r, v, dv);
            if (dv == cplx(0.0)) break;
            const cplx rn = r - v / dv;
            const double res = std::abs(q.eval(rn)) / q.abs_scale(std::abs(rn));
            if (!(res < best)) break;
            best = res;
            r = rn;
        }
        if (!(best < opt.residual_tol))
            throw RootFindingFailure("residual certificate not met (" + std::to_string(best) + ")");
        roots.push_back(r);
    }
    return roots;
}

}  // namespace lorentz
