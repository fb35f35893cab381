#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lorentz/medium.hpp"
#include "lorentz/polynomial.hpp"

namespace lorentz {

// D_k(w) = eps0 mu0 w^2 Pe Pm - k^2 Qe Qm, degree N, leading coefficient eps0 mu0.
ComplexPolynomial dispersion_polynomial(const LorentzMedium& m, double k);

// All N roots of D_k, sorted by (Re, Im). For k > 0 each root is
// additionally polished by Newton on the rational form D(w) = k^2.
std::vector<cplx> solve_dispersion(const LorentzMedium& m, double k);

// Newton on D(w) - k^2 started at w0. Returns w0 unchanged if the
// iteration wanders further than max_shift (relative to 1 + |w0|).
cplx refine_root(const LorentzMedium& m, double k, cplx w0, double max_shift = 1e-6);

enum class BranchKind { PlusInf, MinusInf, Pole, Zero0, ZeroSimple, ZeroMinus, None };

struct BranchLabel {
    BranchKind kind = BranchKind::None;
    cplx center = 0.0;
    int n = 0;  // 1-based index among the m branches at center, or r for Zero0
    std::string str() const;
    bool operator==(const BranchLabel& o) const {
        return kind == o.kind && center == o.center && n == o.n;
    }
};

struct BranchFamily {
    BranchLabel hf_label;  // limit object as k grows
    BranchLabel lf_label;  // limit object as k shrinks
    std::vector<double> k;
    std::vector<cplx> omega;
};

// All N labels of the high-frequency (or low-frequency) partition.
std::vector<BranchLabel> hf_labels(const CoefficientTable& t);
std::vector<BranchLabel> lf_labels(const CoefficientTable& t);

// Truncated expansion of the labelled branch at k. order 1 keeps the
// leading correction only, order 2 adds the next available term.
cplx asymptotic_prediction(const CoefficientTable& t, const BranchLabel& label, double k, int order = 2);
// Leading correction term alone (prediction minus the limit object).
cplx leading_term(const CoefficientTable& t, const BranchLabel& label, double k);
// Power of k of the first omitted term of the order-2 expansion.
double omitted_order(const CoefficientTable& t, const BranchLabel& label);

// Root of D(w) = k^2 on the labelled branch: nearest root to the
// prediction, refined on the rational form. Only meaningful where the
// expansion separates the branches.
cplx branch_root(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label, double k);

std::vector<double> log_grid(double kmin, double kmax, int per_decade);

struct TrackOptions {
    double jump_fraction = 0.2;
    int max_refinements = 10;
};

std::vector<BranchFamily> track_branches(const LorentzMedium& m, const std::vector<double>& k_grid,
                                         const TrackOptions& opt = {});

// Labels every branch by its limits at both ends of the tracked range.
void classify_branches(std::vector<BranchFamily>& branches, const CoefficientTable& t);

// Optimal one-to-one assignment; returns perm with row i -> column perm[i].
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

struct BandDiagnosis {
    double k_plus = 0.0;
    double k_minus = 0.0;
};

// Smallest grid point beyond which all roots are simple and each sits
// within 25% of its leading term; k_minus is the symmetric quantity.
double diagnose_k_plus(const LorentzMedium& m, const CoefficientTable& t, const std::vector<double>& grid);
double diagnose_k_minus(const LorentzMedium& m, const CoefficientTable& t, const std::vector<double>& grid);
BandDiagnosis diagnose_bands(const LorentzMedium& m, const CoefficientTable& t);

// Probe wavenumbers for verify_asymptotics: three decades past k_plus for
// the infinite branches, k_plus * {2, 4, 8} for pole branches and
// k_minus * {1/8, 1/4, 1/2} for the low-frequency labels. Deeper probes put
// the k^-6 and k^4 remainders below roundoff.
std::vector<double> default_probes(const BranchLabel& label, const BandDiagnosis& bands);

struct ConvergenceReport {
    BranchLabel label;
    std::vector<double> k;
    std::vector<double> residual;
    double expected_order = 0.0;
    double fitted_order = 0.0;
    bool ok = false;
};

// Residuals of the branch against its order-2 expansion and the fitted
// power law over the three probes deepest in the asymptotic regime.
// Throws AsymptoticMismatch if the fitted order is off by more than 20%.
ConvergenceReport verify_asymptotics(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label,
                                     const std::vector<double>& k_probe, bool throw_on_mismatch = true);

struct PuiseuxResult {
    cplx z;
    int m = 1;
    cplx g0, dg0;  // g(z), g'(z) with G = (w - z)^m g
    std::vector<cplx> a;
    std::vector<cplx> first_order;
    std::vector<cplx> second_order;
};

PuiseuxResult puiseux_expand(const std::function<cplx(cplx)>& G, cplx z, int m, double radius = 1e-3);

}  // namespace lorentz
