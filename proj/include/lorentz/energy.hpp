#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lorentz/dispersion.hpp"
#include "lorentz/medium.hpp"

namespace lorentz {

enum class ProfileShape { PowerLaw, SobolevTail, Tabulated };

// Radial Fourier profile phi(k), supported on [kmin, kmax].
struct RadialProfile {
    ProfileShape shape = ProfileShape::PowerLaw;
    double kmin = 0.0, kmax = 1.0;
    double p = 0.0;  // PowerLaw: phi = k^p
    int m = 0;       // SobolevTail: phi = (1 + k^2)^(-s/2), s > 3/2 + m
    double s = 0.0;
    std::vector<double> table_k, table_phi;  // Tabulated, linear interpolation

    double operator()(double k) const;

    static RadialProfile power_law(double p, double kmin, double kmax);
    static RadialProfile sobolev_tail(int m, double s, double kmin, double kmax);
    static RadialProfile tabulated(std::vector<double> k, std::vector<double> phi);
};

enum class DirectionKind { OptimalBranch, FixedRandomUnit };

struct DirectionRule {
    DirectionKind kind = DirectionKind::FixedRandomUnit;
    BranchLabel label;
    std::uint64_t seed = 1;

    static DirectionRule optimal(const BranchLabel& l) { return {DirectionKind::OptimalBranch, l, 1}; }
    static DirectionRule random(std::uint64_t seed) { return {DirectionKind::FixedRandomUnit, {}, seed}; }
};

struct QuadratureOptions {
    int nodes = 32;              // Gauss-Legendre nodes per panel
    double panels_per_decade = 1.0;
    int max_panels = 8192;
    double rel_tol = 1e-6;       // convergence at the last time
    double kmin_floor = 1e-6;    // profiles starting at 0 are cut at kmax * kmin_floor
    int threads = 0;
};

struct DecayRecord {
    std::vector<double> t;
    std::vector<double> energy;
    double gamma = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::string tag;
    int panels = 0;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Composite Gauss-Legendre over `panels` log-spaced panels of [a, b], a > 0.
double integrate_log_panels(const std::function<double(double)>& f, double a, double b, int panels, int nodes = 32);

// Log-spaced times, per_decade points per decade, both ends included.
std::vector<double> log_time_grid(double t0, double t1, int per_decade = 20);

// E(t) = 4 pi int k^2 phi(k)^2 |exp(-i A_k t) v(k)|^2 dk.
DecayRecord simulate_energy(const LorentzMedium& m, const RadialProfile& profile, const DirectionRule& rule,
                            const std::vector<double>& t_grid, const QuadratureOptions& opt = {});

struct ExponentFit {
    double gamma = 0.0;
    double confidence = 0.0;  // max deviation of local slopes from gamma
    double t_lo = 0.0, t_hi = 0.0;
    std::vector<double> local_slopes;
};

// Least squares slope of log E against log t on [t_lo, t_hi].
ExponentFit fit_exponent(const DecayRecord& rec, double t_lo, double t_hi);

struct GammaReport {
    double gamma = 0.0;
    double expected = 0.0;
    double confidence = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    double band_edge = 0.0;  // k_plus or k_minus
    std::string configuration;
    BranchLabel branch;
    DecayRecord record;
    bool passed = false;
};

struct GammaOptions {
    double eps = 0.1;  // Sobolev excess in the optimal high-frequency profile
    double t_lo = 0.0, t_hi = 0.0;  // 0: chosen from the band edge rate
    bool throw_on_mismatch = true;
    QuadratureOptions quad;
};

GammaReport verify_gamma_hf(const LorentzMedium& m, int order, const GammaOptions& opt = {});
GammaReport verify_gamma_lf(const LorentzMedium& m, double p, const GammaOptions& opt = {});

struct ZeroLimitReport {
    std::vector<double> t;
    std::vector<double> energy;
    bool monotone = true;
    double ratio = 1.0;  // E(t_max) / E(t_0)
};

ZeroLimitReport convergence_to_zero(const LorentzMedium& m, const RadialProfile& profile,
                                       const std::vector<double>& t_list, std::uint64_t seed = 1,
                                       const QuadratureOptions& opt = {});

}  // namespace lorentz
