#include "lorentz/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

const cplx I(0.0, 1.0);

bool cplx_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

const PoleCoefficients& find_pole(const CoefficientTable& t, cplx p) {
    for (const auto& pc : t.poles)
        if (pc.pole.location == p) return pc;
    throw UnclassifiableBranch("no pole at requested center");
}

const ZeroCoefficients& find_zero(const CoefficientTable& t, cplx z) {
    for (const auto& zc : t.zeros)
        if (zc.zero.location == z) return zc;
    throw UnclassifiableBranch("no zero at requested center");
}

double min_pairwise(const std::vector<cplx>& r, size_t i) {
    double d = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < r.size(); ++j)
        if (j != i) d = std::min(d, std::abs(r[i] - r[j]));
    return d;
}

// Assignment of new roots to previous ones: greedy nearest neighbour,
// Hungarian when any choice is ambiguous within a factor of two.
std::vector<int> match_roots(const std::vector<cplx>& prev, const std::vector<cplx>& next) {
    const size_t n = prev.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) cost[i][j] = std::abs(prev[i] - next[j]);
    std::vector<int> perm(n, -1);
    std::vector<bool> taken(n, false);
    bool ambiguous = false;
    for (size_t i = 0; i < n && !ambiguous; ++i) {
        size_t best = 0, second = 0;
        double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
        for (size_t j = 0; j < n; ++j) {
            if (cost[i][j] < b1) {
                b2 = b1;
                second = best;
                b1 = cost[i][j];
                best = j;
            } else if (cost[i][j] < b2) {
                b2 = cost[i][j];
                second = j;
            }
        }
        (void)second;
        if (taken[best] || (n > 1 && b2 < 2.0 * b1)) ambiguous = true;
        taken[best] = true;
        perm[i] = static_cast<int>(best);
    }
    if (ambiguous) perm = hungarian(cost);
    return perm;
}

// Assigns roots to predictions; returns perm root -> prediction index.
std::vector<int> assign_to_predictions(const std::vector<cplx>& roots, const std::vector<cplx>& preds) {
    const size_t n = roots.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) cost[i][j] = std::abs(roots[i] - preds[j]);
    return hungarian(cost);
}

cplx pole_term(const PoleCoefficients& pc, int n, double k) {
    const int m = pc.pole.multiplicity;
    return pc.first_order[static_cast<size_t>(n - 1)] * std::pow(k, -2.0 / m);
}

}  // namespace

ComplexPolynomial dispersion_polynomial(const LorentzMedium& m, double k) {
    const RationalForm rf = numerator_denominator(m);
    ComplexPolynomial d = rf.numerator - rf.denominator * cplx(k * k);
    d.trim();
    return d;
}

cplx refine_root(const LorentzMedium& m, double k, cplx w0, double max_shift) {
    const double k2 = k * k;
    cplx w = w0;
    double best = std::numeric_limits<double>::infinity();
    try {
        best = std::abs(dispersion_value(m, w) - k2);
        for (int it = 0; it < 8; ++it) {
            const cplx f = dispersion_value(m, w) - k2;
            const cplx df = dispersion_derivative(m, w);
            if (df == cplx(0.0)) break;
            const cplx wn = w - f / df;
            if (std::abs(wn - w0) > max_shift * (1.0 + std::abs(w0))) break;
            const double r = std::abs(dispersion_value(m, wn) - k2);
            if (!(r <= best)) break;
            const bool done = std::abs(wn - w) <= 1e-16 * std::abs(wn);
            best = r;
            w = wn;
            if (done) break;
        }
    } catch (const EvaluationAtPole&) {
        return w0;
    }
    return w;
}

std::vector<cplx> solve_dispersion(const LorentzMedium& m, double k) {
    if (k < 0.0) throw std::invalid_argument("k must be nonnegative");
    auto roots = poly_roots(dispersion_polynomial(m, k));
    if (k > 0.0)
        for (auto& r : roots) r = refine_root(m, k, r);
    std::sort(roots.begin(), roots.end(), cplx_less);
    return roots;
}

std::string BranchLabel::str() const {
    std::ostringstream os;
    os.precision(10);
    auto c = [&]() {
        os << center.real();
        if (center.imag() != 0.0) os << (center.imag() < 0 ? "" : "+") << center.imag() << "i";
    };
    switch (kind) {
        case BranchKind::PlusInf: os << "PlusInf"; break;
        case BranchKind::MinusInf: os << "MinusInf"; break;
        case BranchKind::Pole: os << "Pole("; c(); os << ";" << n << ")"; break;
        case BranchKind::Zero0: os << "Zero0(" << n << ")"; break;
        case BranchKind::ZeroSimple: os << "ZeroSimple("; c(); os << ")"; break;
        case BranchKind::ZeroMinus: os << "ZeroMinus("; c(); os << ";" << n << ")"; break;
        case BranchKind::None: os << "None"; break;
    }
    return os.str();
}

std::vector<BranchLabel> hf_labels(const CoefficientTable& t) {
    std::vector<BranchLabel> out{{BranchKind::PlusInf, 0.0, 0}, {BranchKind::MinusInf, 0.0, 0}};
    for (const auto& pc : t.poles)
        for (int n = 1; n <= pc.pole.multiplicity; ++n) out.push_back({BranchKind::Pole, pc.pole.location, n});
    return out;
}

std::vector<BranchLabel> lf_labels(const CoefficientTable& t) {
    std::vector<BranchLabel> out;
    for (const auto& zc : t.zeros) {
        const auto& z = zc.zero;
        if (z.cls == ZeroClass::Origin) {
            out.push_back({BranchKind::Zero0, 0.0, 1});
            out.push_back({BranchKind::Zero0, 0.0, 2});
        } else if (z.cls == ZeroClass::Zs && z.multiplicity == 1) {
            out.push_back({BranchKind::ZeroSimple, z.location, 1});
        } else {
            for (int n = 1; n <= z.multiplicity; ++n) out.push_back({BranchKind::ZeroMinus, z.location, n});
        }
    }
    return out;
}

cplx leading_term(const CoefficientTable& t, const BranchLabel& l, double k) {
    switch (l.kind) {
        case BranchKind::PlusInf: return t.A1_inf / (2.0 * t.c * k);
        case BranchKind::MinusInf: return -t.A1_inf / (2.0 * t.c * k);
        case BranchKind::Pole: return pole_term(find_pole(t, l.center), l.n, k);
        case BranchKind::Zero0: return t.zeros.front().first_order[static_cast<size_t>(l.n - 1)] * k;
        case BranchKind::ZeroSimple:
        case BranchKind::ZeroMinus: {
            const auto& zc = find_zero(t, l.center);
            return zc.first_order[static_cast<size_t>(l.n - 1)] * std::pow(k, 2.0 / zc.zero.multiplicity);
        }
        case BranchKind::None: break;
    }
    throw UnclassifiableBranch("unlabelled branch");
}

cplx asymptotic_prediction(const CoefficientTable& t, const BranchLabel& l, double k, int order) {
    const cplx lead = leading_term(t, l, k);
    switch (l.kind) {
        case BranchKind::PlusInf:
        case BranchKind::MinusInf: {
            const double s = l.kind == BranchKind::PlusInf ? 1.0 : -1.0;
            cplx w = s * t.c * k + lead;
            if (order >= 2) w += -I * t.A2_inf / (2.0 * t.c * t.c * k * k);
            return w;
        }
        case BranchKind::Pole: {
            const auto& pc = find_pole(t, l.center);
            cplx w = l.center + lead;
            if (order >= 2) {
                if (pc.pole.multiplicity == 1) w += pc.A4 * std::pow(k, -4.0);
                else if (pc.pole.cls == PoleClass::Pd) w += pc.A2 * std::pow(k, -2.0);
            }
            return w;
        }
        case BranchKind::Zero0: {
            cplx w = lead;
            if (order >= 2) w += t.zero0_second * k * k;
            return w;
        }
        case BranchKind::ZeroSimple:
        case BranchKind::ZeroMinus: return l.center + lead;
        case BranchKind::None: break;
    }
    throw UnclassifiableBranch("unlabelled branch");
}

double omitted_order(const CoefficientTable& t, const BranchLabel& l) {
    switch (l.kind) {
        case BranchKind::PlusInf:
        case BranchKind::MinusInf: return -3.0;
        case BranchKind::Pole: {
            const auto& pc = find_pole(t, l.center);
            if (pc.pole.multiplicity == 1) return -6.0;
            if (pc.pole.cls == PoleClass::Pd) return -3.0;
            return -4.0 / pc.pole.multiplicity;
        }
        case BranchKind::Zero0: return 3.0;
        case BranchKind::ZeroSimple:
        case BranchKind::ZeroMinus: {
            const auto& zc = find_zero(t, l.center);
            return 4.0 / zc.zero.multiplicity;
        }
        case BranchKind::None: break;
    }
    throw UnclassifiableBranch("unlabelled branch");
}

cplx branch_root(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label, double k) {
    const cplx pred = asymptotic_prediction(t, label, k, 2);
    const auto roots = solve_dispersion(m, k);
    cplx best = roots.front();
    for (cplx r : roots)
        if (std::abs(r - pred) < std::abs(best - pred)) best = r;
    return best;
}

std::vector<double> log_grid(double kmin, double kmax, int per_decade) {
    const double decades = std::log10(kmax / kmin);
    const int n = std::max(1, static_cast<int>(std::lround(decades * per_decade)));
    std::vector<double> g(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<size_t>(i)] = kmin * std::pow(10.0, decades * i / n);
    g.back() = kmax;
    return g;
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    // Shortest augmenting path formulation with potentials, 1-based.
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> perm(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) perm[static_cast<size_t>(p[j] - 1)] = j - 1;
    return perm;
}

std::vector<BranchFamily> track_branches(const LorentzMedium& m, const std::vector<double>& k_grid,
                                         const TrackOptions& opt) {
    if (k_grid.empty()) return {};
    for (size_t i = 1; i < k_grid.size(); ++i)
        if (!(k_grid[i] > k_grid[i - 1])) throw std::invalid_argument("k grid must be strictly increasing");
    std::vector<cplx> cur = solve_dispersion(m, k_grid.front());
    const size_t n = cur.size();
    std::vector<BranchFamily> br(n);
    for (size_t i = 0; i < n; ++i) {
        br[i].k.push_back(k_grid.front());
        br[i].omega.push_back(cur[i]);
    }

    std::function<void(double, double, int)> step = [&](double ka, double kb, int depth) {
        const auto next = solve_dispersion(m, kb);
        const auto perm = match_roots(cur, next);
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            const double jump = std::abs(next[static_cast<size_t>(perm[i])] - cur[i]);
            if (jump > opt.jump_fraction * min_pairwise(cur, i)) ok = false;
        }
        if (!ok) {
            if (depth >= opt.max_refinements) {
                std::ostringstream os;
                os << "branches indistinguishable near k = " << kb;
                throw BranchCollision(os.str());
            }
            const double mid = 0.5 * (ka + kb);
            step(ka, mid, depth + 1);
            step(mid, kb, depth + 1);
            return;
        }
        std::vector<cplx> reordered(n);
        for (size_t i = 0; i < n; ++i) {
            reordered[i] = next[static_cast<size_t>(perm[i])];
            br[i].k.push_back(kb);
            br[i].omega.push_back(reordered[i]);
        }
        cur = reordered;
    };
    for (size_t s = 1; s < k_grid.size(); ++s) step(k_grid[s - 1], k_grid[s], 0);
    return br;
}

void classify_branches(std::vector<BranchFamily>& branches, const CoefficientTable& t) {
    if (branches.empty()) return;
    auto label_end = [&](bool high) {
        const auto labels = high ? hf_labels(t) : lf_labels(t);
        if (labels.size() != branches.size()) throw UnclassifiableBranch("label count does not match branch count");
        const double k = high ? branches.front().k.back() : branches.front().k.front();
        std::vector<cplx> roots, preds;
        for (const auto& b : branches) roots.push_back(high ? b.omega.back() : b.omega.front());
        for (const auto& l : labels) preds.push_back(asymptotic_prediction(t, l, k, 2));
        const auto perm = assign_to_predictions(roots, preds);
        for (size_t i = 0; i < roots.size(); ++i) {
            const size_t j = static_cast<size_t>(perm[i]);
            double sep = std::numeric_limits<double>::infinity();
            for (size_t q = 0; q < preds.size(); ++q)
                if (q != j) sep = std::min(sep, std::abs(preds[q] - preds[j]));
            if (!(std::abs(roots[i] - preds[j]) < 0.5 * sep)) {
                std::ostringstream os;
                os << "root " << roots[i] << " at k = " << k << " not resolved by " << labels[j].str();
                throw UnclassifiableBranch(os.str());
            }
            (high ? branches[i].hf_label : branches[i].lf_label) = labels[j];
        }
    };
    label_end(true);
    label_end(false);
}

namespace {

bool asymptotic_ok(const LorentzMedium& m, const CoefficientTable& t, const std::vector<BranchLabel>& labels,
                   double k) {
    const auto roots = solve_dispersion(m, k);
    if (roots.size() != labels.size()) return false;
    for (size_t i = 0; i < roots.size(); ++i)
        if (min_pairwise(roots, i) <= 10.0 * 1e-7 * (1.0 + std::abs(roots[i]))) return false;
    std::vector<cplx> p1;
    for (const auto& l : labels) p1.push_back(asymptotic_prediction(t, l, k, 1));
    const auto perm = assign_to_predictions(roots, p1);
    for (size_t i = 0; i < roots.size(); ++i) {
        const size_t j = static_cast<size_t>(perm[i]);
        if (std::abs(roots[i] - p1[j]) > 0.25 * std::abs(leading_term(t, labels[j], k))) return false;
    }
    return true;
}

}  // namespace

double diagnose_k_plus(const LorentzMedium& m, const CoefficientTable& t, const std::vector<double>& grid) {
    const auto labels = hf_labels(t);
    double kp = -1.0;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        if (!asymptotic_ok(m, t, labels, *it)) break;
        kp = *it;
    }
    if (kp < 0.0) throw UnclassifiableBranch("high-frequency regime not reached on grid");
    return kp;
}

double diagnose_k_minus(const LorentzMedium& m, const CoefficientTable& t, const std::vector<double>& grid) {
    const auto labels = lf_labels(t);
    double km = -1.0;
    for (double k : grid) {
        if (!asymptotic_ok(m, t, labels, k)) break;
        km = k;
    }
    if (km < 0.0) throw UnclassifiableBranch("low-frequency regime not reached on grid");
    return km;
}

BandDiagnosis diagnose_bands(const LorentzMedium& m, const CoefficientTable& t) {
    BandDiagnosis d;
    d.k_plus = diagnose_k_plus(m, t, log_grid(1e-2, 1e4, 200));
    d.k_minus = diagnose_k_minus(m, t, log_grid(1e-4, 1e2, 200));
    return d;
}

std::vector<double> default_probes(const BranchLabel& label, const BandDiagnosis& bands) {
    switch (label.kind) {
        case BranchKind::PlusInf:
        case BranchKind::MinusInf: return {10 * bands.k_plus, 100 * bands.k_plus, 1000 * bands.k_plus};
        case BranchKind::Pole: return {2 * bands.k_plus, 4 * bands.k_plus, 8 * bands.k_plus};
        case BranchKind::None: break;
        default: return {0.125 * bands.k_minus, 0.25 * bands.k_minus, 0.5 * bands.k_minus};
    }
    throw UnclassifiableBranch("unlabelled branch");
}

ConvergenceReport verify_asymptotics(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label,
                                     const std::vector<double>& k_probe, bool throw_on_mismatch) {
    ConvergenceReport rep;
    rep.label = label;
    rep.expected_order = omitted_order(t, label);
    const bool high = label.kind == BranchKind::PlusInf || label.kind == BranchKind::MinusInf ||
                      label.kind == BranchKind::Pole;
    std::vector<double> ks = k_probe;
    std::sort(ks.begin(), ks.end());
    for (double k : ks) {
        const cplx w = branch_root(m, t, label, k);
        rep.k.push_back(k);
        rep.residual.push_back(std::abs(w - asymptotic_prediction(t, label, k, 2)));
    }
    if (ks.size() < 3) throw AsymptoticMismatch("need at least three probes");
    const size_t n = ks.size();
    const size_t first = high ? n - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = first; i < first + 3; ++i) {
        const double x = std::log(rep.k[i]), y = std::log(rep.residual[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    rep.ok = std::abs(rep.fitted_order - rep.expected_order) <= 0.2 * std::abs(rep.expected_order);
    if (!rep.ok && throw_on_mismatch) {
        std::ostringstream os;
        os << label.str() << ": fitted order " << rep.fitted_order << ", expected " << rep.expected_order;
        throw AsymptoticMismatch(os.str());
    }
    return rep;
}

PuiseuxResult puiseux_expand(const std::function<cplx(cplx)>& G, cplx z, int m, double radius) {
    // Cauchy means of g = G / (w - z)^m over circles of radius r and r/2;
    // the trapezoid error scales like r^M and is removed by Richardson.
    constexpr int M = 16;
    auto means = [&](double r, cplx& g0, cplx& g1, double& gmax) {
        g0 = g1 = 0.0;
        gmax = 0.0;
        for (int j = 0; j < M; ++j) {
            const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / M);
            const cplx d = r * u;
            cplx dm = 1.0;
            for (int i = 0; i < m; ++i) dm *= d;
            const cplx g = G(z + d) / dm;
            gmax = std::max(gmax, std::abs(g));
            g0 += g;
            g1 += g / u;
        }
        g0 /= static_cast<double>(M);
        g1 /= static_cast<double>(M) * r;
    };
    cplx a0, a1, b0, b1;
    double amax, bmax;
    means(radius, a0, a1, amax);
    means(0.5 * radius, b0, b1, bmax);
    const double f0 = std::pow(2.0, M), f1 = std::pow(2.0, M - 1);
    PuiseuxResult res;
    res.z = z;
    res.m = m;
    res.g0 = (f0 * b0 - a0) / (f0 - 1.0);
    res.dg0 = (f1 * b1 - a1) / (f1 - 1.0);
    if (!(std::abs(res.g0) > 1e-8 * std::max(amax, bmax)))
        throw DegenerateLeadingCoefficient("g(z) vanishes; multiplicity too small");
    res.a = principal_roots(res.g0, m);
    for (cplx a : res.a) {
        res.first_order.push_back(1.0 / a);
        res.second_order.push_back(-res.dg0 / (a * a * static_cast<double>(m) * res.g0));
    }
    return res;
}

}  // namespace lorentz
