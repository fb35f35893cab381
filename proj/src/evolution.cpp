#include "lorentz/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lorentz/errors.hpp"

namespace lorentz {

std::string to_string(PropagationMethod m) { return m == PropagationMethod::Eigen ? "Eigen" : "Oracle"; }

std::string to_string(Band b) {
    switch (b) {
        case Band::HF: return "HF";
        case Band::LF: return "LF";
        case Band::Mid: return "Mid";
    }
    return "?";
}

namespace {

constexpr cplx I{0.0, 1.0};

void check_grid(const std::vector<double>& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= 0.0)) throw DimensionMismatch("times must be nonnegative");
        if (i > 0 && t[i] < t[i - 1]) throw DimensionMismatch("time grid must be sorted");
    }
}

// Dormand-Prince 5(4) on dU/dt = -i A U.
std::vector<Vec> dopri(const Mat& A, const Vec& U0, const std::vector<double>& t_grid, const OracleOptions& opt) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Mat B = -I * A;
    auto f = [&](const Vec& u) { return Vec(B * u); };

    std::vector<Vec> out;
    out.reserve(t_grid.size());
    Vec u = U0;
    double t = 0.0;
    double h = 0.01 / std::max(1.0, B.cwiseAbs().rowwise().sum().maxCoeff());
    Vec k1 = f(u);
    long steps = 0;
    for (double target : t_grid) {
        while (t < target) {
            if (++steps > opt.max_steps) throw QuadratureNonconvergent("ODE oracle step budget exhausted");
            bool last = false;
            double hh = h;
            if (t + hh >= target) {
                hh = target - t;
                last = true;
            }
            Vec k2 = f(u + hh * (a21 * k1));
            Vec k3 = f(u + hh * (a31 * k1 + a32 * k2));
            Vec k4 = f(u + hh * (a41 * k1 + a42 * k2 + a43 * k3));
            Vec k5 = f(u + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            Vec k6 = f(u + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Vec un = u + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            Vec k7 = f(un);
            Vec err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = 0.0;
            for (Eigen::Index i = 0; i < u.size(); ++i) {
                double sc = opt.atol + opt.rtol * std::max(std::abs(u(i)), std::abs(un(i)));
                en = std::max(en, std::abs(err(i)) / sc);
            }
            if (en <= 1.0) {
                t = last ? target : t + hh;
                u = std::move(un);
                k1 = std::move(k7);
            }
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (!(en <= 1.0) || !last) h = hh * fac;
        }
        out.push_back(u);
    }
    return out;
}

}  // namespace

PropagatorResult propagate(const PerpOperator& A, const SpectralDecomposition& sd, const Vec& U0,
                           const std::vector<double>& t_grid) {
    check_grid(t_grid);
    if (U0.size() != A.matrix.rows()) throw DimensionMismatch("initial state size");
    PropagatorResult r;
    r.k = A.k;
    r.t = t_grid;
    r.method = PropagationMethod::Eigen;
    std::vector<Vec> comp;
    for (const auto& P : sd.projectors) comp.push_back(P * U0);
    for (double t : t_grid) {
        Vec u;
        if (t == 0.0) {
            u = U0;
        } else {
            u = Vec::Zero(U0.size());
            for (std::size_t i = 0; i < comp.size(); ++i) u += std::exp(-I * sd.eigenvalues[i] * t) * comp[i];
        }
        r.norms.push_back(gram_norm(A.gram, u));
        r.states.push_back(std::move(u));
    }
    return r;
}

PropagatorResult propagate(const PerpOperator& A, const Vec& U0, const std::vector<double>& t_grid,
                           PropagationMethod method, const OracleOptions& opt) {
    check_grid(t_grid);
    if (U0.size() != A.matrix.rows()) throw DimensionMismatch("initial state size");
    bool fallback = false;
    if (method == PropagationMethod::Eigen) {
        try {
            return propagate(A, spectral_decomposition(A), U0, t_grid);
        } catch (const NotDiagonalizable&) {
            fallback = true;
        }
    }
    PropagatorResult r;
    r.k = A.k;
    r.t = t_grid;
    r.method = PropagationMethod::Oracle;
    r.fallback = fallback;
    r.states = dopri(A.matrix, U0, t_grid, opt);
    for (const auto& u : r.states) r.norms.push_back(gram_norm(A.gram, u));
    return r;
}

double spectral_abscissa(const PerpOperator& A) {
    Eigen::ComplexEigenSolver<Mat> es(A.matrix, false);
    return es.eigenvalues().imag().maxCoeff();
}

RateFit fit_tail_rate(const std::vector<double>& t, const std::vector<double>& norms) {
    if (t.size() != norms.size() || t.empty()) throw DimensionMismatch("time and norm series differ");
    std::size_t s = 0;
    while (s < t.size() && norms[s] >= 0.5 * norms[0]) ++s;
    std::vector<double> x, y;
    for (std::size_t i = s; i < t.size(); ++i) {
        if (!(norms[i] > 0.0)) break;
        x.push_back(t[i]);
        y.push_back(std::log(norms[i]));
    }
    if (x.size() < 3) throw WindowTooShort("fewer than 3 samples after the norm halved");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    RateFit f;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.rate = -slope;
    f.intercept = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = y[i] - (f.intercept + slope * x[i]);
        ss += d * d;
    }
    f.residual = std::sqrt(ss / n);
    f.t_start = x.front();
    f.points = x.size();
    return f;
}

Vec random_state(const LorentzMedium& m, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Vec u(2 * m.N());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = cplx(nd(gen), nd(gen));
    return u / gram_norm(gram_weights(m, 2), u);
}

namespace {

struct Trace {
    std::vector<double> t, norms;
    double abscissa;
};

Trace run_one(const LorentzMedium& m, double k, const std::vector<double>& t_grid, const EnvelopeOptions& opt,
              std::uint64_t seed) {
    PerpOperator A = build_perp_operator(m, k);
    SpectralDecomposition sd = spectral_decomposition(A);
    refine_eigenvalues(m, k, sd);
    std::size_t slow = 0;
    for (std::size_t i = 1; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues[i].imag() > sd.eigenvalues[slow].imag()) slow = i;
    const double absc = sd.eigenvalues[slow].imag();
    std::vector<double> grid = t_grid;
    if (grid.empty()) {
        if (!(absc < 0.0)) throw NonPositiveRate("spectral abscissa is not negative at k = " + std::to_string(k));
        const double tmax = opt.horizon / -absc;
        for (int i = 0; i < opt.samples; ++i) grid.push_back(tmax * i / (opt.samples - 1));
    }
    Vec U0 = opt.data == InitialData::Optimal ? optimal_initial_data(m, k, sd.eigenvalues[slow])
                                               : random_state(m, seed);
    auto r = propagate(A, sd, U0, grid);
    return {grid, r.norms, absc};
}

EnvelopeFit envelope(const LorentzMedium& m, Band band, double k_power, const std::vector<double>& k_list,
                     const std::vector<double>& t_grid, const EnvelopeOptions& opt) {
    EnvelopeFit fit;
    fit.band = band;
    fit.k_power = k_power;
    std::vector<Trace> traces;
    double C = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        const double k = k_list[i];
        Trace tr = run_one(m, k, t_grid, opt, opt.seed + i);
        RateFit rf = fit_tail_rate(tr.t, tr.norms);
        fit.k.push_back(k);
        fit.rates.push_back(rf.rate);
        fit.abscissa.push_back(tr.abscissa);
        fit.residuals.push_back(rf.residual);
        fit.residual = std::max(fit.residual, rf.residual);
        C = std::min(C, rf.rate / std::pow(k, k_power));
        traces.push_back(std::move(tr));
    }
    fit.C = C;
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& tr = traces[i];
        const double r = C * std::pow(fit.k[i], k_power);
        for (std::size_t j = 0; j < tr.t.size(); ++j) {
            double v = tr.norms[j] / tr.norms[0] * std::exp(r * tr.t[j]);
            hi = std::max(hi, v);
            if (tr.norms[j] < 0.5 * tr.norms[0]) lo = std::min(lo, v);
        }
    }
    fit.C_tilde = hi;
    fit.C_lower = std::isfinite(lo) ? lo : hi;
    return fit;
}

}  // namespace

EnvelopeFit hf_envelope_check(const LorentzMedium& m, const std::vector<double>& k_list,
                              const std::vector<double>& t_grid, const EnvelopeOptions& opt) {
    auto rep = check_assumptions(m);
    const double p = rep.criticality == Criticality::Critical ? -4.0 : -2.0;
    EnvelopeFit fit = envelope(m, Band::HF, p, k_list, t_grid, opt);
    if (!(fit.C > 0.0)) throw BandViolation("no positive high-frequency rate constant fits");
    return fit;
}

EnvelopeFit lf_envelope_check(const LorentzMedium& m, const std::vector<double>& k_list,
                              const std::vector<double>& t_grid, const EnvelopeOptions& opt) {
    require_assumptions(m);
    EnvelopeFit fit = envelope(m, Band::LF, 2.0, k_list, t_grid, opt);
    if (!(fit.C > 0.0)) throw BandViolation("no positive low-frequency rate constant fits");
    return fit;
}

EnvelopeFit midband_rate(const LorentzMedium& m, double k_lo, double k_hi, int samples, const EnvelopeOptions& opt) {
    if (!(k_lo > 0.0) || !(k_hi >= k_lo)) throw BandViolation("mid band needs 0 < k_lo <= k_hi");
    require_assumptions(m);
    std::vector<double> ks;
    for (int i = 0; i < samples; ++i)
        ks.push_back(samples == 1 ? k_lo : k_lo * std::pow(k_hi / k_lo, double(i) / (samples - 1)));
    EnvelopeFit fit = envelope(m, Band::Mid, 0.0, ks, {}, opt);
    if (!(fit.C > 0.0)) throw NonPositiveRate("fitted mid-band rate " + std::to_string(fit.C));
    return fit;
}

}  // namespace lorentz
