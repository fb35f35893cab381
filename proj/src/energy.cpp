#include "lorentz/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lorentz/errors.hpp"
#include "lorentz/evolution.hpp"
#include "lorentz/operator.hpp"
#include "lorentz/parallel.hpp"

namespace lorentz {

double RadialProfile::operator()(double k) const {
    if (k < kmin || k > kmax) return 0.0;
    switch (shape) {
        case ProfileShape::PowerLaw: return std::pow(k, p);
        case ProfileShape::SobolevTail: return std::pow(1.0 + k * k, -s / 2);
        case ProfileShape::Tabulated: {
            auto it = std::upper_bound(table_k.begin(), table_k.end(), k);
            if (it == table_k.begin()) return table_phi.front();
            if (it == table_k.end()) return table_phi.back();
            const std::size_t i = static_cast<std::size_t>(it - table_k.begin());
            const double f = (k - table_k[i - 1]) / (table_k[i] - table_k[i - 1]);
            return (1 - f) * table_phi[i - 1] + f * table_phi[i];
        }
    }
    return 0.0;
}

RadialProfile RadialProfile::power_law(double p, double kmin, double kmax) {
    if (!(kmin >= 0.0) || !(kmax > kmin)) throw ConfigError("power law band must satisfy 0 <= kmin < kmax");
    RadialProfile r;
    r.shape = ProfileShape::PowerLaw;
    r.p = p;
    r.kmin = kmin;
    r.kmax = kmax;
    return r;
}

RadialProfile RadialProfile::sobolev_tail(int m, double s, double kmin, double kmax) {
    if (!(s > 1.5 + m)) throw ConfigError("Sobolev tail needs s > 3/2 + m");
    if (!(kmin > 0.0) || !(kmax > kmin)) throw ConfigError("Sobolev tail band must satisfy 0 < kmin < kmax");
    RadialProfile r;
    r.shape = ProfileShape::SobolevTail;
    r.m = m;
    r.s = s;
    r.kmin = kmin;
    r.kmax = kmax;
    return r;
}

RadialProfile RadialProfile::tabulated(std::vector<double> k, std::vector<double> phi) {
    if (k.size() < 2 || k.size() != phi.size()) throw ConfigError("tabulated profile needs matching k and phi");
    if (!std::is_sorted(k.begin(), k.end()) || !(k.front() >= 0.0)) throw ConfigError("tabulated k must be sorted");
    RadialProfile r;
    r.shape = ProfileShape::Tabulated;
    r.kmin = k.front();
    r.kmax = k.back();
    r.table_k = std::move(k);
    r.table_phi = std::move(phi);
    return r;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

namespace {

struct Nodes {
    std::vector<double> k, w;
};

Nodes panel_nodes(double a, double b, int panels, int nodes) {
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    Nodes out;
    const double r = std::log(b / a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a * std::exp(r * p), hi = p == panels - 1 ? b : a * std::exp(r * (p + 1));
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            out.k.push_back(mid + half * gx[i]);
            out.w.push_back(half * gw[i]);
        }
    }
    return out;
}

// |exp(-i A_k t) v(k)|^2 on the time grid.
std::vector<double> node_trace(const LorentzMedium& m, const CoefficientTable& table, const DirectionRule& rule,
                               double k, const std::vector<double>& t_grid) {
    PerpOperator A = build_perp_operator(m, k);
    Vec v;
    if (rule.kind == DirectionKind::OptimalBranch) {
        v = optimal_initial_data(m, k, branch_root(m, table, rule.label, k));
    } else {
        v = random_state(m, rule.seed);
    }
    PropagatorResult r;
    try {
        SpectralDecomposition sd = spectral_decomposition(A);
        refine_eigenvalues(m, k, sd);
        r = propagate(A, sd, v, t_grid);
    } catch (const NotDiagonalizable&) {
        r = propagate(A, v, t_grid, PropagationMethod::Oracle);
    }
    std::vector<double> out;
    out.reserve(r.norms.size());
    for (double n : r.norms) out.push_back(n * n);
    return out;
}

}  // namespace

double integrate_log_panels(const std::function<double(double)>& f, double a, double b, int panels, int nodes) {
    if (!(a > 0.0) || !(b > a)) throw QuadratureNonconvergent("log panels need 0 < a < b");
    Nodes nd = panel_nodes(a, b, panels, nodes);
    double s = 0.0;
    for (std::size_t i = 0; i < nd.k.size(); ++i) s += nd.w[i] * f(nd.k[i]);
    return s;
}

std::vector<double> log_time_grid(double t0, double t1, int per_decade) {
    return log_grid(t0, t1, per_decade);
}

DecayRecord simulate_energy(const LorentzMedium& m, const RadialProfile& profile, const DirectionRule& rule,
                            const std::vector<double>& t_grid, const QuadratureOptions& opt) {
    if (t_grid.empty()) throw DimensionMismatch("empty time grid");
    require_assumptions(m);
    const CoefficientTable table = asymptotic_coefficients(m);
    const double b = profile.kmax;
    const double a = profile.kmin > 0.0 ? profile.kmin : b * opt.kmin_floor;
    int panels = std::max(1, static_cast<int>(std::ceil(std::log10(b / a) * opt.panels_per_decade)));

    DecayRecord rec;
    rec.t = t_grid;
    std::vector<double> prev;
    for (;;) {
        Nodes nd = panel_nodes(a, b, panels, opt.nodes);
        std::vector<std::vector<double>> traces(nd.k.size());
        parallel_for(nd.k.size(), opt.threads,
                     [&](std::size_t i) { traces[i] = node_trace(m, table, rule, nd.k[i], t_grid); });
        std::vector<double> E(t_grid.size(), 0.0);
        for (std::size_t i = 0; i < nd.k.size(); ++i) {
            const double phi = profile(nd.k[i]);
            const double wk = 4.0 * M_PI * nd.w[i] * nd.k[i] * nd.k[i] * phi * phi;
            for (std::size_t j = 0; j < t_grid.size(); ++j) E[j] += wk * traces[i][j];
        }
        if (!prev.empty()) {
            const double last = E.back(), before = prev.back();
            if (std::abs(last - before) <= opt.rel_tol * std::abs(last)) {
                rec.energy = std::move(E);
                rec.panels = panels;
                return rec;
            }
        }
        if (2 * panels > opt.max_panels)
            throw QuadratureNonconvergent("energy quadrature after " + std::to_string(panels) + " panels");
        prev = std::move(E);
        panels *= 2;
    }
}

ExponentFit fit_exponent(const DecayRecord& rec, double t_lo, double t_hi) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        if (rec.t[i] < t_lo || rec.t[i] > t_hi) continue;
        if (!(rec.energy[i] > 0.0)) throw NonPolynomialDecay("energy vanishes inside the window");
        x.push_back(std::log(rec.t[i]));
        y.push_back(std::log(rec.energy[i]));
    }
    if (x.size() < 3 || !(t_lo > 0.0) || x.back() - x.front() < std::log(10.0) - 1e-12)
        throw WindowTooShort("fit window needs 3 samples spanning a decade");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    ExponentFit f;
    f.gamma = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.t_lo = std::exp(x.front());
    f.t_hi = std::exp(x.back());
    for (std::size_t i = 1; i < x.size(); ++i) f.local_slopes.push_back(-(y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    bool up = true, down = true;
    for (std::size_t i = 1; i < f.local_slopes.size(); ++i) {
        const double d = f.local_slopes[i] - f.local_slopes[i - 1];
        if (d < -1e-3) up = false;
        if (d > 1e-3) down = false;
    }
    const double drift = f.local_slopes.back() - f.local_slopes.front();
    if ((up || down) && std::abs(drift) > 0.3)
        throw NonPolynomialDecay("local slopes drift by " + std::to_string(drift));
    for (double s : f.local_slopes) f.confidence = std::max(f.confidence, std::abs(s - f.gamma));
    return f;
}

namespace {

std::string config_tag(const ConfigurationReport& r) {
    std::string s = to_string(r.dissipation) + ", " + to_string(r.criticality);
    if (r.criticality == Criticality::Critical) s += " (condition " + std::to_string(r.critical_condition) + ")";
    return s;
}

// Decay rate of the energy carried by `label` at k.
double energy_rate(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label, double k) {
    return -2.0 * branch_root(m, t, label, k).imag();
}

GammaReport finish(GammaReport rep, const LorentzMedium& m, const RadialProfile& prof, double edge_rate,
                   const GammaOptions& opt) {
    if (!(edge_rate > 0.0)) throw ExponentMismatch("branch does not decay at the band edge");
    rep.t_lo = opt.t_lo > 0.0 ? opt.t_lo : 50.0 / edge_rate;
    rep.t_hi = opt.t_hi > 0.0 ? opt.t_hi : 100.0 * rep.t_lo;
    std::vector<double> grid{0.0};
    for (double t : log_time_grid(rep.t_lo / 10.0, rep.t_hi, 20)) grid.push_back(t);
    rep.record = simulate_energy(m, prof, DirectionRule::optimal(rep.branch), grid, opt.quad);
    ExponentFit f = fit_exponent(rep.record, rep.t_lo, rep.t_hi);
    rep.gamma = f.gamma;
    rep.confidence = f.confidence;
    rep.record.gamma = f.gamma;
    rep.record.window_lo = rep.t_lo;
    rep.record.window_hi = rep.t_hi;
    rep.record.tag = rep.configuration;
    rep.passed = std::abs(rep.gamma - rep.expected) <= 0.1 * rep.expected;
    if (!rep.passed && opt.throw_on_mismatch)
        throw ExponentMismatch("fitted " + std::to_string(rep.gamma) + ", expected " + std::to_string(rep.expected));
    return rep;
}

}  // namespace

GammaReport verify_gamma_hf(const LorentzMedium& m, int order, const GammaOptions& opt) {
    if (order < 0) throw ConfigError("Sobolev order must be nonnegative");
    require_assumptions(m);
    const ConfigurationReport cr = check_assumptions(m);
    const CoefficientTable t = asymptotic_coefficients(m);
    GammaReport rep;
    rep.configuration = config_tag(cr);
    rep.band_edge = diagnose_bands(m, t).k_plus;
    if (cr.criticality == Criticality::Critical) {
        rep.expected = order / 2.0;
        // slowest pole branch: undamped simple pole with real A2
        const PoleCoefficients* best = nullptr;
        for (const auto& pc : t.poles) {
            if (pc.pole.multiplicity != 1 || pc.pole.location.real() <= 0.0) continue;
            if (std::abs(pc.pole.location.imag()) > 0.0) continue;
            if (std::abs(pc.A2.imag()) > 1e-12 * std::abs(pc.A2)) continue;
            if (!best || pc.A4.imag() > best->A4.imag()) best = &pc;
        }
        if (!best) throw UnclassifiableBranch("no critical pole branch found");
        rep.branch = {BranchKind::Pole, best->pole.location, 1};
    } else {
        rep.expected = order;
        rep.branch = {BranchKind::PlusInf, 0.0, 0};
    }
    const double s = 1.5 + order + opt.eps;
    // truncation keeps a 1e-12 fraction of the undamped tail mass
    const double kmax = rep.band_edge * std::pow(10.0, 12.0 / (2.0 * s - 3.0));
    RadialProfile prof = RadialProfile::sobolev_tail(order, s, rep.band_edge, kmax);
    return finish(rep, m, prof, energy_rate(m, t, rep.branch, rep.band_edge), opt);
}

GammaReport verify_gamma_lf(const LorentzMedium& m, double p, const GammaOptions& opt) {
    require_assumptions(m);
    const ConfigurationReport cr = check_assumptions(m);
    const CoefficientTable t = asymptotic_coefficients(m);
    GammaReport rep;
    rep.configuration = config_tag(cr);
    rep.band_edge = diagnose_bands(m, t).k_minus;
    rep.expected = p + 1.5;
    rep.branch = {BranchKind::Zero0, 0.0, 1};
    RadialProfile prof = RadialProfile::power_law(p, 0.0, rep.band_edge);
    return finish(rep, m, prof, energy_rate(m, t, rep.branch, rep.band_edge), opt);
}

ZeroLimitReport convergence_to_zero(const LorentzMedium& m, const RadialProfile& profile,
                                    const std::vector<double>& t_list, std::uint64_t seed,
                                    const QuadratureOptions& opt) {
    DecayRecord rec = simulate_energy(m, profile, DirectionRule::random(seed), t_list, opt);
    ZeroLimitReport r;
    r.t = rec.t;
    r.energy = rec.energy;
    for (std::size_t i = 1; i < r.energy.size(); ++i)
        if (r.energy[i] > r.energy[i - 1] * (1.0 + 1e-9)) r.monotone = false;
    r.ratio = r.energy.back() / r.energy.front();
    return r;
}

}  // namespace lorentz
