#include "lorentz/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

const cplx I(0.0, 1.0);

bool same_root(cplx a, cplx b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

void validate_family(const std::vector<Oscillator>& osc, const char* name) {
    for (size_t j = 0; j < osc.size(); ++j) {
        const auto& o = osc[j];
        if (!(o.Omega > 0.0) || !std::isfinite(o.Omega))
            throw NonPositiveCoefficient(std::string(name) + " coupling must be > 0");
        if (!(o.omega > 0.0) || !std::isfinite(o.omega))
            throw NonPositiveCoefficient(std::string(name) + " resonance must be > 0");
        if (!(o.alpha >= 0.0) || !std::isfinite(o.alpha))
            throw NonPositiveCoefficient(std::string(name) + " damping must be >= 0");
        for (size_t i = 0; i < j; ++i)
            if (osc[i].alpha == o.alpha && osc[i].omega == o.omega)
                throw DuplicateOscillator(std::string(name) + " oscillators " + std::to_string(i) +
                                          " and " + std::to_string(j) + " share (alpha, omega)");
    }
}

// 1 - sum Omega^2 / q over a family, skipping index skip.
cplx susceptibility_factor(const std::vector<Oscillator>& osc, cplx w, int skip = -1) {
    cplx s = 1.0;
    for (size_t j = 0; j < osc.size(); ++j) {
        if (static_cast<int>(j) == skip) continue;
        s -= osc[j].Omega * osc[j].Omega / q_value(osc[j], w);
    }
    return s;
}

cplx susceptibility_factor_derivative(const std::vector<Oscillator>& osc, cplx w, int skip = -1) {
    cplx s = 0.0;
    for (size_t j = 0; j < osc.size(); ++j) {
        if (static_cast<int>(j) == skip) continue;
        const cplx q = q_value(osc[j], w);
        s += osc[j].Omega * osc[j].Omega * q_derivative(osc[j], w) / (q * q);
    }
    return s;
}

void check_not_pole(const std::vector<Oscillator>& osc, cplx w) {
    for (const auto& o : osc) {
        auto [r1, r2] = q_roots(o);
        for (cplx r : {r1, r2})
            if (std::abs(w - r) <= kPoleTolerance * (1.0 + std::abs(r))) {
                std::ostringstream os;
                os << "w = " << w << " coincides with pole " << r;
                throw EvaluationAtPole(os.str());
            }
    }
}

// Index of the oscillator in osc with a root at p, and that root's partner.
int find_root_owner(const std::vector<Oscillator>& osc, cplx p, cplx& partner) {
    for (size_t j = 0; j < osc.size(); ++j) {
        auto [r1, r2] = q_roots(osc[j]);
        if (same_root(r1, p)) {
            partner = r2;
            return static_cast<int>(j);
        }
        if (same_root(r2, p)) {
            partner = r1;
            return static_cast<int>(j);
        }
    }
    return -1;
}

cplx h_generic(const std::vector<Oscillator>& osc, double scale, cplx p, cplx w) {
    cplx partner;
    const int j = find_root_owner(osc, p, partner);
    if (j < 0) {
        check_not_pole(osc, w);
        return scale * (w - p) * susceptibility_factor(osc, w);
    }
    const double O2 = osc[j].Omega * osc[j].Omega;
    return scale * ((w - p) * susceptibility_factor(osc, w, j) - O2 / (w - partner));
}

cplx h_generic_derivative(const std::vector<Oscillator>& osc, double scale, cplx p, cplx w) {
    cplx partner;
    const int j = find_root_owner(osc, p, partner);
    if (j < 0) {
        check_not_pole(osc, w);
        return scale * (susceptibility_factor(osc, w) + (w - p) * susceptibility_factor_derivative(osc, w));
    }
    const double O2 = osc[j].Omega * osc[j].Omega;
    const cplx d = w - partner;
    return scale * (susceptibility_factor(osc, w, j) + (w - p) * susceptibility_factor_derivative(osc, w, j) +
                    O2 / (d * d));
}

ComplexPolynomial q_poly(const Oscillator& o) {
    return ComplexPolynomial({cplx(-o.omega * o.omega), I * o.alpha, cplx(1.0)});
}

// Pe = Qe - sum_j Omega_j^2 prod_{k != j} q_k, evaluated from factors.
cplx p_value(const std::vector<Oscillator>& osc, cplx w) {
    const size_t n = osc.size();
    std::vector<cplx> q(n);
    for (size_t j = 0; j < n; ++j) q[j] = q_value(osc[j], w);
    cplx prod = 1.0;
    for (auto v : q) prod *= v;
    cplx s = prod;
    for (size_t j = 0; j < n; ++j) {
        cplx pj = osc[j].Omega * osc[j].Omega;
        for (size_t k = 0; k < n; ++k)
            if (k != j) pj *= q[k];
        s -= pj;
    }
    return s;
}

struct TaggedRoot {
    cplx r;
    Family fam;
    int index;
};

}  // namespace

LorentzMedium::LorentzMedium(double eps0, double mu0, std::vector<Oscillator> electric,
                             std::vector<Oscillator> magnetic)
    : eps0_(eps0), mu0_(mu0), electric_(std::move(electric)), magnetic_(std::move(magnetic)) {
    if (!(eps0_ > 0.0) || !std::isfinite(eps0_)) throw NonPositiveCoefficient("eps0 must be > 0");
    if (!(mu0_ > 0.0) || !std::isfinite(mu0_)) throw NonPositiveCoefficient("mu0 must be > 0");
    if (electric_.empty() && magnetic_.empty()) throw EmptyMedium("medium needs at least one oscillator");
    validate_family(electric_, "electric");
    validate_family(magnetic_, "magnetic");
}

double LorentzMedium::c() const { return 1.0 / std::sqrt(eps0_ * mu0_); }

LorentzMedium new_medium(double eps0, double mu0, std::vector<Oscillator> electric,
                         std::vector<Oscillator> magnetic) {
    return LorentzMedium(eps0, mu0, std::move(electric), std::move(magnetic));
}

std::pair<cplx, cplx> q_roots(const Oscillator& o) {
    const double a = o.alpha, w = o.omega;
    const double disc = 4.0 * w * w - a * a;
    if (disc > 0.0) {
        const double re = 0.5 * std::sqrt(disc);
        return {cplx(re, -0.5 * a), cplx(-re, -0.5 * a)};
    }
    // Overdamped or critical: both roots on the negative imaginary axis.
    const double s = std::sqrt(-disc);
    const cplx big(0.0, -0.5 * (a + s));
    const cplx small = -w * w / big;
    return {small, big};
}

cplx q_value(const Oscillator& o, cplx w) {
    auto [r1, r2] = q_roots(o);
    return (w - r1) * (w - r2);
}

cplx q_derivative(const Oscillator& o, cplx w) { return 2.0 * w + I * o.alpha; }

cplx permittivity(const LorentzMedium& m, cplx w) {
    check_not_pole(m.electric(), w);
    return m.eps0() * susceptibility_factor(m.electric(), w);
}

cplx permeability(const LorentzMedium& m, cplx w) {
    check_not_pole(m.magnetic(), w);
    return m.mu0() * susceptibility_factor(m.magnetic(), w);
}

cplx permittivity_derivative(const LorentzMedium& m, cplx w) {
    check_not_pole(m.electric(), w);
    return m.eps0() * susceptibility_factor_derivative(m.electric(), w);
}

cplx permeability_derivative(const LorentzMedium& m, cplx w) {
    check_not_pole(m.magnetic(), w);
    return m.mu0() * susceptibility_factor_derivative(m.magnetic(), w);
}

cplx dispersion_value(const LorentzMedium& m, cplx w) { return w * w * permittivity(m, w) * permeability(m, w); }

cplx dispersion_derivative(const LorentzMedium& m, cplx w) {
    const cplx e = permittivity(m, w), mu = permeability(m, w);
    const cplx de = permittivity_derivative(m, w), dmu = permeability_derivative(m, w);
    return 2.0 * w * e * mu + w * w * (de * mu + e * dmu);
}

cplx h_electric(const LorentzMedium& m, cplx p, cplx w) { return h_generic(m.electric(), m.eps0(), p, w); }
cplx h_magnetic(const LorentzMedium& m, cplx p, cplx w) { return h_generic(m.magnetic(), m.mu0(), p, w); }
cplx h_electric_derivative(const LorentzMedium& m, cplx p, cplx w) {
    return h_generic_derivative(m.electric(), m.eps0(), p, w);
}
cplx h_magnetic_derivative(const LorentzMedium& m, cplx p, cplx w) {
    return h_generic_derivative(m.magnetic(), m.mu0(), p, w);
}

RationalForm numerator_denominator(const LorentzMedium& m) {
    auto family = [](const std::vector<Oscillator>& osc, ComplexPolynomial& P, ComplexPolynomial& Q) {
        Q = ComplexPolynomial::constant(1.0);
        for (const auto& o : osc) Q = Q * q_poly(o);
        P = Q;
        for (size_t j = 0; j < osc.size(); ++j) {
            ComplexPolynomial prod = ComplexPolynomial::constant(osc[j].Omega * osc[j].Omega);
            for (size_t k = 0; k < osc.size(); ++k)
                if (k != j) prod = prod * q_poly(osc[k]);
            P = P - prod;
        }
    };
    RationalForm rf;
    family(m.electric(), rf.Pe, rf.Qe);
    family(m.magnetic(), rf.Pm, rf.Qm);
    const ComplexPolynomial w2({0.0, 0.0, m.eps0() * m.mu0()});
    rf.numerator = w2 * rf.Pe * rf.Pm;
    rf.denominator = rf.Qe * rf.Qm;
    return rf;
}

std::string to_string(PoleClass c) {
    switch (c) {
        case PoleClass::Pminus: return "Pminus";
        case PoleClass::Ps: return "Ps";
        case PoleClass::Pd: return "Pd";
    }
    return "?";
}

std::string to_string(ZeroClass c) {
    switch (c) {
        case ZeroClass::Zminus: return "Zminus";
        case ZeroClass::Zs: return "Zs";
        case ZeroClass::Origin: return "Origin";
    }
    return "?";
}

std::string to_string(Dissipation d) {
    switch (d) {
        case Dissipation::None: return "None";
        case Dissipation::Weak: return "Weak";
        case Dissipation::Strong: return "Strong";
    }
    return "?";
}

std::string to_string(Criticality c) { return c == Criticality::Critical ? "Critical" : "NonCritical"; }

ConfigurationReport check_assumptions(const LorentzMedium& m) {
    ConfigurationReport r;
    double sum = 0.0;
    bool all_pos = true;
    for (const auto* fam : {&m.electric(), &m.magnetic()})
        for (const auto& o : *fam) {
            sum += o.alpha;
            all_pos = all_pos && o.alpha > 0.0;
        }
    r.dissipation = sum > 0.0 ? (all_pos ? Dissipation::Strong : Dissipation::Weak) : Dissipation::None;

    auto undamped = [](const std::vector<Oscillator>& f) {
        return std::all_of(f.begin(), f.end(), [](const Oscillator& o) { return o.alpha == 0.0; });
    };
    auto lone_undamped = [](const std::vector<Oscillator>& f, const std::vector<Oscillator>& other) {
        for (size_t j = 0; j < f.size(); ++j) {
            if (f[j].alpha != 0.0) continue;
            bool shared = false;
            for (const auto& o : other) shared = shared || o.omega == f[j].omega;
            if (!shared) return static_cast<int>(j);
        }
        return -1;
    };
    if (r.dissipation != Dissipation::None) {
        if (undamped(m.magnetic())) {
            const int j = lone_undamped(m.electric(), m.magnetic());
            if (j >= 0) {
                r.criticality = Criticality::Critical;
                r.critical_condition = 1;
                r.critical_oscillator = j;
            }
        }
        if (r.criticality == Criticality::NonCritical && undamped(m.electric())) {
            const int l = lone_undamped(m.magnetic(), m.electric());
            if (l >= 0) {
                r.criticality = Criticality::Critical;
                r.critical_condition = 2;
                r.critical_oscillator = l;
            }
        }
    }

    // H1: q polynomials of one family pairwise without common roots.
    auto h1 = [&](const std::vector<Oscillator>& f, const char* name) {
        for (size_t i = 0; i < f.size(); ++i)
            for (size_t j = i + 1; j < f.size(); ++j) {
                auto [a1, a2] = q_roots(f[i]);
                auto [b1, b2] = q_roots(f[j]);
                for (cplx a : {a1, a2})
                    for (cplx b : {b1, b2})
                        if (same_root(a, b)) {
                            std::ostringstream os;
                            os << name << " oscillators " << i << " and " << j << " share root " << a;
                            r.h1_satisfied = false;
                            r.h1_witnesses.push_back(os.str());
                        }
            }
    };
    h1(m.electric(), "electric");
    h1(m.magnetic(), "magnetic");

    // H2: poles of one family are not zeros of the other.
    auto h2 = [&](const std::vector<Oscillator>& poles_of, const std::vector<Oscillator>& other,
                  const char* pname, const char* zname) {
        for (size_t j = 0; j < poles_of.size(); ++j) {
            auto [r1, r2] = q_roots(poles_of[j]);
            for (cplx p : {r1, r2}) {
                cplx partner;
                if (find_root_owner(other, p, partner) >= 0) continue;  // pole of both, not a zero
                const cplx val = susceptibility_factor(other, p);
                double mag = 1.0;
                for (const auto& o : other) mag += o.Omega * o.Omega / std::abs(q_value(o, p));
                if (std::abs(val) <= 1e-9 * mag) {
                    std::ostringstream os;
                    os << pname << " pole " << p << " (oscillator " << j << ") is a zero of " << zname;
                    r.h2_satisfied = false;
                    r.h2_witnesses.push_back(os.str());
                }
            }
        }
    };
    h2(m.electric(), m.magnetic(), "electric", "mu");
    h2(m.magnetic(), m.electric(), "magnetic", "eps");
    return r;
}

void require_assumptions(const LorentzMedium& m) {
    const auto r = check_assumptions(m);
    if (!r.h1_satisfied) throw AssumptionViolated("H1: " + r.h1_witnesses.front());
    if (!r.h2_satisfied) throw AssumptionViolated("H2: " + r.h2_witnesses.front());
}

PoleZeroCatalog catalog_poles_zeros(const LorentzMedium& m) {
    require_assumptions(m);
    PoleZeroCatalog cat;

    std::vector<TaggedRoot> qr;
    for (size_t j = 0; j < m.electric().size(); ++j) {
        auto [a, b] = q_roots(m.electric()[j]);
        qr.push_back({a, Family::Electric, static_cast<int>(j)});
        qr.push_back({b, Family::Electric, static_cast<int>(j)});
    }
    for (size_t l = 0; l < m.magnetic().size(); ++l) {
        auto [a, b] = q_roots(m.magnetic()[l]);
        qr.push_back({a, Family::Magnetic, static_cast<int>(l)});
        qr.push_back({b, Family::Magnetic, static_cast<int>(l)});
    }

    const double e0m0 = m.eps0() * m.mu0();
    std::vector<bool> used(qr.size(), false);
    for (size_t i = 0; i < qr.size(); ++i) {
        if (used[i]) continue;
        Pole p;
        p.location = qr[i].r;
        std::vector<size_t> group{i};
        for (size_t j = i + 1; j < qr.size(); ++j)
            if (!used[j] && same_root(qr[i].r, qr[j].r)) group.push_back(j);
        for (size_t g : group) {
            used[g] = true;
            if (qr[g].fam == Family::Electric) p.electric_index = qr[g].index;
            else p.magnetic_index = qr[g].index;
        }
        p.multiplicity = static_cast<int>(group.size());
        const bool real = std::abs(p.location.imag()) <= 1e-14 * (1.0 + std::abs(p.location));
        if (!real) p.cls = PoleClass::Pminus;
        else p.cls = p.multiplicity == 1 ? PoleClass::Ps : PoleClass::Pd;

        cplx denom = 1.0;
        for (size_t j = 0; j < qr.size(); ++j)
            if (std::find(group.begin(), group.end(), j) == group.end()) denom *= p.location - qr[j].r;
        const cplx w = p.location;
        p.residue = e0m0 * w * w * p_value(m.electric(), w) * p_value(m.magnetic(), w) / denom;
        cat.poles.push_back(p);
    }

    const RationalForm rf = numerator_denominator(m);
    auto family_zeros = [&](const ComplexPolynomial& P, const std::vector<Oscillator>& osc, Family fam) {
        std::vector<Zero> out;
        if (P.degree() <= 0) return out;
        auto roots = poly_roots(P);
        const bool undamped =
            std::all_of(osc.begin(), osc.end(), [](const Oscillator& o) { return o.alpha == 0.0; });
        for (auto& r : roots)
            if (undamped) r = cplx(r.real(), 0.0);
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                if (same_root(roots[i], roots[j], 1e-7)) {
                    std::ostringstream os;
                    os << "zeros " << roots[i] << " and " << roots[j] << " cluster";
                    throw UnresolvedClustering(os.str());
                }
        for (auto r : roots) {
            Zero z;
            z.location = r;
            z.family = fam;
            out.push_back(z);
        }
        return out;
    };
    auto ze = family_zeros(rf.Pe, m.electric(), Family::Electric);
    auto zm = family_zeros(rf.Pm, m.magnetic(), Family::Magnetic);
    std::vector<Zero> zeros = ze;
    for (const auto& z : zm) {
        bool merged = false;
        for (auto& e : zeros)
            if (same_root(e.location, z.location, 1e-7)) {
                e.multiplicity += 1;
                e.family = Family::Both;
                merged = true;
            }
        if (!merged) zeros.push_back(z);
    }
    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });

    Zero origin;
    origin.location = 0.0;
    origin.multiplicity = 2;
    origin.cls = ZeroClass::Origin;
    origin.family = Family::Both;
    zeros.insert(zeros.begin(), origin);

    for (auto& z : zeros) {
        if (z.cls != ZeroClass::Origin)
            z.cls = z.location.imag() == 0.0 ? ZeroClass::Zs : ZeroClass::Zminus;
        ComplexPolynomial num = rf.numerator;
        for (int i = 0; i < z.multiplicity; ++i) num = num.deflate(z.location);
        cplx denom = 1.0;
        for (const auto& t : qr) denom *= z.location - t.r;
        z.residue = num.eval(z.location) / denom;
    }
    cat.zeros = zeros;
    return cat;
}

std::vector<cplx> principal_roots(cplx A, int m) {
    double theta = std::arg(A);
    if (theta <= -std::numbers::pi) theta = std::numbers::pi;
    const double r = std::pow(std::abs(A), 1.0 / m);
    std::vector<cplx> out;
    const double eps = 4.0 * std::numeric_limits<double>::epsilon() * r;
    for (int n = 1; n <= m; ++n) {
        cplx a = std::polar(r, theta / m + 2.0 * n * std::numbers::pi / m);
        if (std::abs(a.real()) < eps) a.real(0.0);
        if (std::abs(a.imag()) < eps) a.imag(0.0);
        out.push_back(a);
    }
    return out;
}

CoefficientTable asymptotic_coefficients(const LorentzMedium& m) {
    return asymptotic_coefficients(m, catalog_poles_zeros(m));
}

CoefficientTable asymptotic_coefficients(const LorentzMedium& m, const PoleZeroCatalog& cat) {
    require_assumptions(m);
    CoefficientTable t;
    t.c = m.c();
    for (const auto& o : m.electric()) {
        t.A1_inf += o.Omega * o.Omega;
        t.A2_inf += o.alpha * o.Omega * o.Omega;
    }
    for (const auto& o : m.magnetic()) {
        t.A1_inf += o.Omega * o.Omega;
        t.A2_inf += o.alpha * o.Omega * o.Omega;
    }
    const cplx e0 = permittivity(m, 0.0), m0 = permeability(m, 0.0);
    t.c0 = 1.0 / std::sqrt((e0 * m0).real());
    t.deps_mu0 = permittivity_derivative(m, 0.0) * m0 + e0 * permeability_derivative(m, 0.0);
    t.im_neg_deps_mu0 = (-t.deps_mu0).imag();
    t.zero0_second = -0.5 * t.deps_mu0 * std::pow(t.c0, 4);

    for (const auto& p : cat.poles) {
        PoleCoefficients pc;
        pc.pole = p;
        for (cplx a : principal_roots(1.0 / p.residue, p.multiplicity)) pc.first_order.push_back(1.0 / a);
        const cplx w = p.location;
        if (p.multiplicity == 1) {
            // f = w^2 mu h_e (electric pole) or w^2 eps h_m (magnetic pole); 1/D = (w - p) / f.
            cplx f, df;
            if (p.electric_index >= 0) {
                const cplx mu = permeability(m, w), dmu = permeability_derivative(m, w);
                const cplx h = h_electric(m, w, w), dh = h_electric_derivative(m, w, w);
                f = w * w * mu * h;
                df = 2.0 * w * mu * h + w * w * dmu * h + w * w * mu * dh;
            } else {
                const cplx e = permittivity(m, w), de = permittivity_derivative(m, w);
                const cplx h = h_magnetic(m, w, w), dh = h_magnetic_derivative(m, w, w);
                f = w * w * e * h;
                df = 2.0 * w * e * h + w * w * de * h + w * w * e * dh;
            }
            pc.A2 = f;
            pc.A4 = f * df;
        } else if (p.multiplicity == 2 && p.electric_index >= 0 && p.magnetic_index >= 0) {
            const cplx he = h_electric(m, w, w), dhe = h_electric_derivative(m, w, w);
            const cplx hm = h_magnetic(m, w, w), dhm = h_magnetic_derivative(m, w, w);
            pc.A2 = 0.5 * (2.0 * w * he * hm + w * w * (dhe * hm + he * dhm));
        }
        t.poles.push_back(pc);
    }
    for (const auto& z : cat.zeros) {
        ZeroCoefficients zc;
        zc.zero = z;
        for (cplx a : principal_roots(z.residue, z.multiplicity)) zc.first_order.push_back(1.0 / a);
        if (z.multiplicity == 1) zc.Az = 1.0 / z.residue;
        t.zeros.push_back(zc);
    }
    return t;
}

}  // namespace lorentz
