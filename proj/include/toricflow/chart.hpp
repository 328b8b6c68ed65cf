#pragma once

// Floating-point geometry on the dense torus orbit in log coordinates
// z = x + i y (w = e^z). With G = Hess F(x):
//   ω = Σ G_ij dx^i ∧ dy^j,  g = diag(G, G),  J(u_x, u_y) = (−u_y, u_x),
//   g(U, V) = ω(U, J V),  μ = 2π ∇F,  exp(v)·p = e^{2πi v} p.
// Tangent vectors of the orbit are stacked as (u_x, u_y) ∈ R^{2m}.

#include "toricflow/potential.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>

namespace toricflow {

class DegeneratePotential : public std::runtime_error {
public:
    explicit DegeneratePotential(const std::string& what) : std::runtime_error(what) {}
};

class EmptyLevelSet : public std::runtime_error {
public:
    explicit EmptyLevelSet(const std::string& what) : std::runtime_error(what) {}
};

class StepSizeFailure : public std::runtime_error {
public:
    explicit StepSizeFailure(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateFrame : public std::runtime_error {
public:
    explicit DegenerateFrame(const std::string& what) : std::runtime_error(what) {}
};

class MeshTooCoarse : public std::runtime_error {
public:
    explicit MeshTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

struct TorusChart {
    std::shared_ptr<const Potential> potential;
    Vec gamma;  // Calabi–Yau vector, Ω_γ = e^{<γ, z>} dz^1 ∧ … ∧ dz^m

    Eigen::Index dim() const { return potential->dim(); }
};

/// Hess F at x; throws DegeneratePotential unless positive definite.
Mat kahler_block(const TorusChart& chart, const Vec& x);
Vec moment_map(const TorusChart& chart, const Vec& x);

double omega(const TorusChart& chart, const Vec& x, const Vec& u, const Vec& v);
double metric(const TorusChart& chart, const Vec& x, const Vec& u, const Vec& v);
Vec complex_structure(const Vec& u);

/// Gram matrix g(e_a, e_b) of the columns of frame.
Mat induced_metric(const TorusChart& chart, const Vec& x, const Mat& frame);

/// ψ with e^{2mψ} ω^m/m! = (−1)^{m(m−1)/2} (i/2)^m Ω_γ ∧ Ω̄_γ, i.e. (2<γ,x> − log det G)/(2m).
double psi(const TorusChart& chart, const Vec& x);
/// Riemannian gradient of ψ in R^{2m}.
Vec grad_psi(const TorusChart& chart, const Vec& x);

/// Ω_γ evaluated on the m columns of frame at the orbit point (x, y).
std::complex<double> omega_gamma(const TorusChart& chart, const Vec& point, const Mat& frame);

/// Levi-Civita symbols of g in the 2m real coordinates: result[k](i, j) = Γ^k_ij.
std::vector<Mat> christoffel(const TorusChart& chart, const Vec& x);

/// Smooth map u ↦ (x, y) from an open set of R^d into the orbit.
class Immersion {
public:
    virtual ~Immersion() = default;
    virtual Eigen::Index dim() const = 0;
    virtual Vec point(const Vec& u) const = 0;
    /// 2m x dim; the default is a fourth-order central difference of point().
    virtual Mat tangents(const Vec& u) const;

    double fd_step = 1e-3;
};

/**
 * Local chart of L = {<μ, ζ_r> = c_r} × V_ζ around (x0, y0):
 *   u = (s, a),  x(s) = x0 + T s + N λ(s),  y(a) = y0 + 2π Σ a_r ζ_r,
 * with T an orthonormal basis of ker(ζ G(x0)), N = G(x0) ζ^T and λ(s) by Newton.
 */
class LevelSetChart final : public Immersion {
public:
    LevelSetChart(TorusChart chart, Mat zeta, Vec c, Vec x0, Vec y0);

    Eigen::Index dim() const override { return chart_.dim(); }
    Vec point(const Vec& u) const override;
    Mat tangents(const Vec& u) const override;  // implicit-function derivative
    Vec level_point(const Vec& s) const;
    /// Projects x0 + T s onto shifted levels c' along N.
    Vec project(const Vec& s, const Vec& levels) const;

    const Mat& zeta() const { return zeta_; }
    const Vec& levels() const { return c_; }
    Eigen::Index level_dims() const { return zeta_.cols() - zeta_.rows(); }

private:
    TorusChart chart_;
    Mat zeta_;
    Vec c_, x0_, y0_;
    Mat t_, n_;
};

/// u ↦ log(u + i ε ∇φ(u)) in C^m: the graph of a small exact 1-form, a Lagrangian for the flat metric.
class GraphImmersion final : public Immersion {
public:
    GraphImmersion(std::function<Vec(const Vec&)> grad_phi, double epsilon, Eigen::Index m);
    Eigen::Index dim() const override { return m_; }
    Vec point(const Vec& u) const override;

private:
    std::function<Vec(const Vec&)> grad_phi_;
    double eps_;
    Eigen::Index m_;
};

struct ChartSample {
    Vec x;
    Vec y;
    Vec v;                  // torus parameter in V_ζ
    std::vector<int> signs; // real-form chart label ε
    Mat frame;              // 2m x m: level-set tangents first, then the ζ directions
    Eigen::Index level_dims = 0;
    Vec point() const;      // (x, y)
};

struct SamplingOptions {
    double box_lo = -1.5;
    double box_hi = 0.5;
    double tolerance = 1e-12;  // relative Newton tolerance on ⟨μ, ζ⟩
    int max_failures = 200;
};

/**
 * Seeded samples of L: x drawn from the box and projected onto the levels by
 * damped minimum-norm Gauss–Newton, random v ∈ V_ζ and random signs.
 * Throws EmptyLevelSet when max_failures projections fail in a row.
 */
std::vector<ChartSample> sample_level_set(const TorusChart& chart, const Mat& zeta, const Vec& c, int count,
                                          std::uint64_t seed, const SamplingOptions& options = {});

/// max_r |<μ(x), ζ_r> − c_r|
double constraint_residual(const TorusChart& chart, const Mat& zeta, const Vec& c, const ChartSample& s);

/// max |ω(e_a, e_b)| over a g-orthonormalized frame.
double lagrangian_residual(const TorusChart& chart, const ChartSample& s);
/// max |g(X, Y)| / (|X| |Y|) for level-set X and torus-direction Y.
double splitting_residual(const TorusChart& chart, const ChartSample& s);
/// x shifted by `shift` along the first coordinate axis (off the level set) while the stored frame is kept.
ChartSample perturbed(const TorusChart& chart, const Mat& zeta, const ChartSample& s, double shift = 0.1);

/// 2π<γ, v> + πn/2 reduced to [0, π).
double angle_closed(const TorusChart& chart, const ChartSample& s, Eigen::Index n);
/// arg Ω_γ(frame) reduced to [0, π); throws DegenerateFrame.
double angle_pullback(const TorusChart& chart, const ChartSample& s);
/// Distance of a − b to πZ.
double angle_distance(double a, double b);

struct CurvatureReport {
    double psi = 0.0;
    Vec grad_psi;
    Vec H;            // mean curvature vector
    Vec K;            // H − m (∇ψ)^⊥
    Vec J_grad_theta;
    double residual = 0.0;           // |K − J∇θ|_g
    double step_disagreement = 0.0;  // |K_h − K_{h/2}|_g
    double step = 0.0;
};

/**
 * Second derivatives by central differences of the tangents at steps h and
 * h/2, combined by Richardson extrapolation. Throws StepSizeFailure when the
 * two steps disagree by more than 10 tol.
 */
CurvatureReport curvature(const TorusChart& chart, const Immersion& imm, const Vec& u, double h = 1e-4,
                          double tol = 1e-3);

using ScalarField = std::function<double(const Vec& u)>;

/**
 * Δ_f φ = δ_f dφ = −(e^{f}/√h) ∂_a(e^{−f} √h h^{ab} ∂_b φ) with f = −m ψ,
 * by nested central differences of step `step`. Throws MeshTooCoarse for step > 0.05.
 */
double weighted_laplacian(const TorusChart& chart, const Immersion& imm, const Vec& u, const ScalarField& field,
                          double step = 2e-3);
/// Δ_f θ using Lagrangian-angle differences relative to the stencil centre.
double weighted_laplacian_theta(const TorusChart& chart, const Immersion& imm, const Vec& u, double step = 2e-3);

struct FlowResidual {
    double residual_X = 0.0;
    double residual_Y = 0.0;            // relative to max(1, 2π|<γ, ζ_r>|)
    std::vector<double> omega_values;   // ω(∂F/∂t, F_* ζ_r)
    double normal_velocity_gap = 0.0;   // |(∂F/∂t)^⊥ − K|_g
};

/// At the sample of a level-set chart moving by dc/dt = −2π <γ, ζ>.
FlowResidual flow_residual(const TorusChart& chart, const LevelSetChart& imm, double dt = 1e-4);

struct FirstVariation {
    double lhs = 0.0;
    double rhs = 0.0;
    double h0_norm = 0.0;  // sup norm of the bump
    int mesh = 0;
};

/**
 * Bump Hamiltonian h0 supported in the cube |u − centre|_∞ < radius; the
 * variation field is J ∇h0. lhs is the central difference of Vol_ψ, rhs is
 * −∫ (Δ_f θ) h0 e^{−f} dV, both by the midpoint rule on mesh^dim cells.
 * Throws MeshTooCoarse for mesh < 8.
 */
FirstVariation first_variation(const TorusChart& chart, const Immersion& imm, const Vec& centre, double radius,
                               int mesh, double amplitude = 1.0, double delta = 1e-4);

struct IdentityResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int samples = 0;
    int fd_order = 0;  // 0 for closed-form evaluations
    std::vector<double> steps;
    std::string note;
};

struct IdentityReport {
    std::vector<IdentityResult> identities;
    bool pass() const;
};

struct VerifyOptions {
    int samples = 200;
    std::uint64_t seed = 42;
    double tol = 1e-3;            // finite-difference identities
    int heavy_samples = 20;       // curvature, Laplacian and flow checks run on the first ones
    int mesh = 16;
    double patch_radius = 0.2;
    bool negative_control = false;
    SamplingOptions sampling;
};

IdentityReport verify_identities(const TorusChart& chart, const Mat& zeta, const Vec& c, const VerifyOptions& options);

}  // namespace toricflow
