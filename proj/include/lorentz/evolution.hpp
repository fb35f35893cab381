#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lorentz/operator.hpp"

namespace lorentz {

enum class PropagationMethod { Eigen, Oracle };

std::string to_string(PropagationMethod m);

struct PropagatorResult {
    double k = 0.0;
    std::vector<double> t;
    std::vector<Vec> states;
    std::vector<double> norms;  // gram norms
    PropagationMethod method = PropagationMethod::Eigen;
    bool fallback = false;  // eigen path requested but the operator was not diagonalizable
};

struct OracleOptions {
    double atol = 1e-12;
    double rtol = 1e-10;
    long max_steps = 50'000'000;
};

// U(t) = exp(-i A t) U0 on a sorted grid of nonnegative times.
PropagatorResult propagate(const PerpOperator& A, const Vec& U0, const std::vector<double>& t_grid,
                           PropagationMethod method = PropagationMethod::Eigen, const OracleOptions& opt = {});

// Same, reusing an existing decomposition of A.
PropagatorResult propagate(const PerpOperator& A, const SpectralDecomposition& sd, const Vec& U0,
                           const std::vector<double>& t_grid);

// max Im of the spectrum
double spectral_abscissa(const PerpOperator& A);

struct RateFit {
    double rate = 0.0;      // -(slope of log|U| against t)
    double intercept = 0.0;
    double residual = 0.0;  // rms of the log-linear fit
    double t_start = 0.0;
    std::size_t points = 0;
};

// Least squares of log|U| against t over [t_half, t_max], t_half the first
// time |U| < |U(0)| / 2. Throws WindowTooShort with fewer than 3 points.
RateFit fit_tail_rate(const std::vector<double>& t, const std::vector<double>& norms);

enum class Band { HF, LF, Mid };
enum class InitialData { Random, Optimal };

std::string to_string(Band b);

struct EnvelopeOptions {
    InitialData data = InitialData::Random;
    std::uint64_t seed = 1;
    int samples = 400;     // time points of the default grid
    double horizon = 30.0; // default grid spans [0, horizon / |abscissa|]
};

struct EnvelopeFit {
    Band band = Band::HF;
    double k_power = 0.0;  // rate model C |k|^k_power
    std::vector<double> k;
    std::vector<double> rates;     // fitted tail rate per k
    std::vector<double> abscissa;  // max Im of the spectrum per k
    std::vector<double> residuals;
    double C = 0.0;        // largest C with the model rate below every fitted rate
    double C_tilde = 0.0;  // smallest prefactor making the bound hold on the samples
    double C_lower = 0.0;  // matching lower prefactor over the tail windows
    double residual = 0.0;
};

// Random unit state with a fixed seed (gram norm 1).
Vec random_state(const LorentzMedium& m, std::uint64_t seed);

// Decay envelopes on the high- and low-frequency bands. An empty t_grid
// picks a linear grid per k from its spectral abscissa.
EnvelopeFit hf_envelope_check(const LorentzMedium& m, const std::vector<double>& k_list,
                              const std::vector<double>& t_grid = {}, const EnvelopeOptions& opt = {});
EnvelopeFit lf_envelope_check(const LorentzMedium& m, const std::vector<double>& k_list,
                              const std::vector<double>& t_grid = {}, const EnvelopeOptions& opt = {});

// beta = min over log-spaced samples of [k_lo, k_hi] of the fitted rate.
// Throws NonPositiveRate if beta <= 0.
EnvelopeFit midband_rate(const LorentzMedium& m, double k_lo, double k_hi, int samples,
                         const EnvelopeOptions& opt = {});

}  // namespace lorentz
