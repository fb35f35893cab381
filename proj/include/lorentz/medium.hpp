#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lorentz/polynomial.hpp"

namespace lorentz {

struct Oscillator {
    double Omega = 1.0;  // coupling strength
    double omega = 1.0;  // resonance frequency
    double alpha = 0.0;  // damping
};

enum class Family { Electric, Magnetic, Both };

class LorentzMedium {
   public:
    LorentzMedium(double eps0, double mu0, std::vector<Oscillator> electric,
                  std::vector<Oscillator> magnetic);

    double eps0() const { return eps0_; }
    double mu0() const { return mu0_; }
    const std::vector<Oscillator>& electric() const { return electric_; }
    const std::vector<Oscillator>& magnetic() const { return magnetic_; }
    int Ne() const { return static_cast<int>(electric_.size()); }
    int Nm() const { return static_cast<int>(magnetic_.size()); }
    // Number of dispersion branches, 2 + 2 Ne + 2 Nm.
    int N() const { return 2 + 2 * Ne() + 2 * Nm(); }
    // Vacuum speed (eps0 mu0)^(-1/2).
    double c() const;

   private:
    double eps0_, mu0_;
    std::vector<Oscillator> electric_, magnetic_;
};

LorentzMedium new_medium(double eps0, double mu0, std::vector<Oscillator> electric,
                         std::vector<Oscillator> magnetic);

// q(w) = w^2 + i alpha w - omega^2
cplx q_value(const Oscillator& o, cplx w);
cplx q_derivative(const Oscillator& o, cplx w);
// Both roots of q, closed form. Underdamped roots come as (r, -conj r)
// with Re r > 0.
std::pair<cplx, cplx> q_roots(const Oscillator& o);

// Absolute distance under which w counts as sitting on a pole.
inline constexpr double kPoleTolerance = 1e-12;

cplx permittivity(const LorentzMedium& m, cplx w);
cplx permeability(const LorentzMedium& m, cplx w);
cplx permittivity_derivative(const LorentzMedium& m, cplx w);
cplx permeability_derivative(const LorentzMedium& m, cplx w);
cplx dispersion_value(const LorentzMedium& m, cplx w);
cplx dispersion_derivative(const LorentzMedium& m, cplx w);

// (w - p) eps(w) and (w - p) mu(w) with the factor at p cancelled
// analytically; valid at w = p. Also their first derivatives.
cplx h_electric(const LorentzMedium& m, cplx p, cplx w);
cplx h_magnetic(const LorentzMedium& m, cplx p, cplx w);
cplx h_electric_derivative(const LorentzMedium& m, cplx p, cplx w);
cplx h_magnetic_derivative(const LorentzMedium& m, cplx p, cplx w);

struct RationalForm {
    ComplexPolynomial numerator;    // eps0 mu0 w^2 Pe Pm, degree N
    ComplexPolynomial denominator;  // Qe Qm, degree 2(Ne + Nm)
    ComplexPolynomial Pe, Qe, Pm, Qm;
};

RationalForm numerator_denominator(const LorentzMedium& m);

enum class PoleClass { Pminus, Ps, Pd };
enum class ZeroClass { Zminus, Zs, Origin };

std::string to_string(PoleClass c);
std::string to_string(ZeroClass c);

struct Pole {
    cplx location;
    int multiplicity = 1;
    PoleClass cls = PoleClass::Pminus;
    int electric_index = -1;  // oscillator whose q vanishes at the pole
    int magnetic_index = -1;
    cplx residue;  // lim (w - p)^m D(w)
};

struct Zero {
    cplx location;
    int multiplicity = 1;
    ZeroClass cls = ZeroClass::Zminus;
    Family family = Family::Electric;
    cplx residue;  // lim D(w) / (w - z)^m
};

struct PoleZeroCatalog {
    std::vector<Pole> poles;
    std::vector<Zero> zeros;
};

PoleZeroCatalog catalog_poles_zeros(const LorentzMedium& m);

enum class Dissipation { None, Weak, Strong };
enum class Criticality { Critical, NonCritical };

std::string to_string(Dissipation d);
std::string to_string(Criticality c);

struct ConfigurationReport {
    Dissipation dissipation = Dissipation::None;
    Criticality criticality = Criticality::NonCritical;
    int critical_condition = 0;  // 1 electric undamped pole, 2 magnetic, 0 none
    int critical_oscillator = -1;
    bool h1_satisfied = true;
    bool h2_satisfied = true;
    std::vector<std::string> h1_witnesses;
    std::vector<std::string> h2_witnesses;
};

ConfigurationReport check_assumptions(const LorentzMedium& m);
// Throws AssumptionViolated when H1 or H2 fails.
void require_assumptions(const LorentzMedium& m);

struct PoleCoefficients {
    Pole pole;
    // Puiseux first-order coefficients a_n^{-1}, n = 1..m, principal order.
    std::vector<cplx> first_order;
    cplx A2;  // simple or double real pole: k^-2 coefficient
    cplx A4;  // simple pole: k^-4 coefficient
};

struct ZeroCoefficients {
    Zero zero;
    std::vector<cplx> first_order;
    cplx Az;  // simple zero: k^2 coefficient, 1 / g(z)
};

struct CoefficientTable {
    double c = 0.0;
    double A1_inf = 0.0;
    double A2_inf = 0.0;
    double c0 = 0.0;
    cplx deps_mu0;       // (eps mu)'(0)
    double im_neg_deps_mu0 = 0.0;  // Im(-(eps mu)'(0))
    cplx zero0_second;   // -(1/2) (eps mu)'(0) c0^4
    std::vector<PoleCoefficients> poles;
    std::vector<ZeroCoefficients> zeros;
};

CoefficientTable asymptotic_coefficients(const LorentzMedium& m);
CoefficientTable asymptotic_coefficients(const LorentzMedium& m, const PoleZeroCatalog& cat);

// m-th roots of A ordered as |A|^{1/m} e^{i theta/m} e^{2 i n pi/m}, n = 1..m,
// theta the principal argument in (-pi, pi].
std::vector<cplx> principal_roots(cplx A, int m);

}  // namespace lorentz
