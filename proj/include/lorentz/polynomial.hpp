#pragma once

#include <complex>
#include <vector>

namespace lorentz {

using cplx = std::complex<double>;

// Complex polynomial, coefficients in ascending degree.
class ComplexPolynomial {
   public:
    ComplexPolynomial() : c_{cplx(0.0)} {}
    explicit ComplexPolynomial(std::vector<cplx> coeffs);

    static ComplexPolynomial constant(cplx a);
    // Monic linear factor (x - r).
    static ComplexPolynomial linear(cplx r);

    const std::vector<cplx>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx leading() const { return c_.back(); }
    cplx operator[](int i) const { return c_[static_cast<size_t>(i)]; }

    cplx eval(cplx x) const;
    // Value and first derivative by Horner.
    void eval_d(cplx x, cplx& p, cplx& dp) const;
    // Sum of |c_i| |x|^i, scale for residual certificates.
    double abs_scale(double ax) const;
    double max_coeff() const;

    ComplexPolynomial derivative() const;
    ComplexPolynomial operator+(const ComplexPolynomial& o) const;
    ComplexPolynomial operator-(const ComplexPolynomial& o) const;
    ComplexPolynomial operator*(const ComplexPolynomial& o) const;
    ComplexPolynomial operator*(cplx s) const;

    // Synthetic division by (x - z): returns quotient, remainder in rem.
    ComplexPolynomial deflate(cplx z, cplx* rem = nullptr) const;

    // Drops leading coefficients below rel_tol * max|c|.
    void trim(double rel_tol = 1e-14);

   private:
    std::vector<cplx> c_;
};

struct RootOptions {
    int newton_steps = 5;
    double residual_tol = 1e-10;
    bool balance = true;
};

// Companion-matrix eigenvalues (balanced) plus Newton refinement on the
// original polynomial. Throws RootFindingFailure if a root fails the
// residual certificate |p(r)| / abs_scale(|r|) < residual_tol.
std::vector<cplx> poly_roots(const ComplexPolynomial& p, const RootOptions& opt = {});

}  // namespace lorentz
