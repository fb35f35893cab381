#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lorentz/dispersion.hpp"
#include "lorentz/medium.hpp"

namespace lorentz {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Index map of a state (E, H, P_j, Pdot_j, M_l, Mdot_l) whose blocks carry
// `comps` components each (2 for the transverse reduction, 3 for full).
struct StateLayout {
    int Ne = 0, Nm = 0, comps = 2;
    int E(int c) const { return c; }
    int H(int c) const { return comps + c; }
    int P(int j, int c) const { return comps * (2 + j) + c; }
    int Pd(int j, int c) const { return comps * (2 + Ne + j) + c; }
    int M(int l, int c) const { return comps * (2 + 2 * Ne + l) + c; }
    int Md(int l, int c) const { return comps * (2 + 2 * Ne + Nm + l) + c; }
    int blocks() const { return 2 + 2 * Ne + 2 * Nm; }
    int dim() const { return comps * blocks(); }
};

StateLayout layout_of(const LorentzMedium& m, int comps = 2);

struct PerpOperator {
    Mat matrix;             // 2N x 2N
    Eigen::VectorXd gram;   // diagonal weights of the energy inner product
    double k = 0.0;
    StateLayout layout;
};

Eigen::VectorXd gram_weights(const LorentzMedium& m, int comps = 2);

PerpOperator build_perp_operator(const LorentzMedium& m, double k);
// 3N x 3N operator at wave vector k.
Mat build_full_operator(const LorentzMedium& m, const Eigen::Vector3d& k);

struct RotationMap {
    Eigen::Vector3d k_vector;
    Eigen::Matrix3d R;  // R k_hat = e3
    // Block-diagonal action on a state with `blocks` 3-vector blocks.
    Eigen::MatrixXd lifted(int blocks) const;
};

RotationMap build_rotation(const Eigen::Vector3d& k);

cplx weighted_inner(const Eigen::VectorXd& gram, const Vec& u, const Vec& v);
cplx weighted_inner(const LorentzMedium& m, const Vec& u, const Vec& v);
double gram_norm(const Eigen::VectorXd& gram, const Vec& u);
// Operator norm induced by the weighted inner product.
double gram_operator_norm(const Eigen::VectorXd& gram, const Mat& A);
// Adjoint with respect to the weighted inner product.
Mat gram_adjoint(const Eigen::VectorXd& gram, const Mat& A);

// Points where the closed-form resolvent cannot be evaluated: the
// spectrum at k, the poles, the zeros of mu and the origin.
std::vector<cplx> resolvent_singular_set(const LorentzMedium& m, double k);

Mat resolvent_formula(const LorentzMedium& m, double k, cplx w);
Mat resolvent_dense(const PerpOperator& A, cplx w);

// Eigenvector V_k(w) X of the closed-form resolvent, X in C^2.
Vec v_map(const LorentzMedium& m, double k, cplx w, const Eigen::Vector2cd& X);

struct SpectralDecomposition {
    std::vector<cplx> eigenvalues;  // N values, each of multiplicity two
    std::vector<Mat> projectors;    // rank-two spectral projectors
    double completeness_residual = 0.0;     // |sum P - I|
    double reconstruction_residual = 0.0;   // |A - sum w P| / |A|
};

SpectralDecomposition spectral_decomposition(const PerpOperator& A);
// Polishes every eigenvalue by Newton on the rational dispersion relation.
// Imaginary parts far below the matrix norm stay accurate this way.
void refine_eigenvalues(const LorentzMedium& m, double k, SpectralDecomposition& sd);

struct ContourOptions {
    int initial_nodes = 32;
    int max_nodes = 4096;
    double tol = 1e-9;
};

Mat projector_contour(const LorentzMedium& m, double k, cplx w0, const ContourOptions& opt = {});

struct SweepPoint {
    double k;
    cplx omega;
    double norm;
};

struct SweepReport {
    BranchLabel label;
    std::vector<SweepPoint> points;
    double slope = 0.0;       // log-log least squares slope of the norm
    double variation = 0.0;   // max / min norm
    bool growth_warning = false;
};

SweepReport projector_norm_sweep(const LorentzMedium& m, const CoefficientTable& t, const BranchLabel& label,
                                 const std::vector<double>& k_grid);

// Unit-norm eigenvector V_k(w) e1 / |V_k(w) e1| for an eigenvalue w at k.
Vec optimal_initial_data(const LorentzMedium& m, double k, cplx w);

}  // namespace lorentz
