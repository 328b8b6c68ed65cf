#include "fixtures.hpp"
#include "oracles.hpp"

#include "toricflow/chart.hpp"
#include "toricflow/flow.hpp"
#include "toricflow/realform.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace toricflow;
using namespace fixtures;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kAngleTol = 1e-6;
constexpr double kFrameTol = 1e-8;
constexpr double kControlFloor = 1e-4;
constexpr double kCurvatureTol = 1e-3;
constexpr double kStepAgreement = 10 * kCurvatureTol;
constexpr double kLaplacianTol = 1e-3;
constexpr double kStationaryTol = 1e-8;
constexpr double kFlowTol = 1e-3;
constexpr double kVariationTol = 1e-3;
constexpr double kControlAgreement = 0.05;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;  // 0 for no time limit
    std::function<void(Outcome&)> body;
};

Mat zeta_row(std::initializer_list<double> v) {
    Mat out(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(0, i++) = x;
    return out;
}

struct LeeWang {
    TorusChart chart;
    Mat zeta;
    Vec c;
};

// Flat C^m with γ = (1, ..., 1) at τ = −1, where c = −τ Σ ζ_j = Σ ζ_j.
LeeWang lee_wang(std::initializer_list<double> zeta) {
    const Mat z = zeta_row(zeta);
    const Eigen::Index m = z.cols();
    return {{make_potential("flat", m), Vec::Ones(m)}, z, Vec::Constant(1, z.sum())};
}

std::vector<LeeWang> lee_wang_family() {
    return {lee_wang({1, 1}), lee_wang({2, 1}), lee_wang({1, 1, 1}), lee_wang({1, 2, 3})};
}

std::vector<LeeWang> stationary_family() {
    std::vector<LeeWang> out;
    for (const Mat& z : {zeta_row({1, -1}), zeta_row({1, -1, 0})}) {
        const Eigen::Index m = z.cols();
        out.push_back({{make_potential("flat", m), Vec::Ones(m)}, z, Vec::Constant(1, 0.5)});
    }
    return out;
}

std::vector<ChartSample> samples(const LeeWang& lw, int count, std::uint64_t seed) {
    return sample_level_set(lw.chart, lw.zeta, lw.c, count, seed);
}

LevelSetChart local_chart(const LeeWang& lw, const ChartSample& s) {
    return LevelSetChart(lw.chart, lw.zeta, lw.c, s.x, s.y);
}

// Grid offsets {−r, 0, r}^m of a mesh patch.
std::vector<Vec> patch(Eigen::Index m, double r) {
    std::vector<Vec> out;
    const int total = static_cast<int>(std::pow(3, m));
    for (int k = 0; k < total; ++k) {
        Vec u(m);
        int code = k;
        for (Eigen::Index j = 0; j < m; ++j, code /= 3) u(j) = (code % 3 - 1) * r;
        out.push_back(u);
    }
    return out;
}

void cy_vectors(Outcome& o) {
    for (int m : {2, 3, 4}) {
        const auto cy = cy_vector(flat(m));
        o.require(cy && cy->gamma == IntVector::Ones(m), "gamma of C^" + std::to_string(m));
    }
    const auto cy = cy_vector(kp2());
    o.require(cy && cy->gamma == ivec({0, 0, 1}), "gamma of K_P2");
    o.detail << "C^2, C^3, C^4 -> (1,...,1); K_P2 -> (0,0,1)";
}

FlowProblem kp2_problem() { return make_flow_problem(kp2(), kp2_zeta(), rvec({5})); }

void event_times(Outcome& o) {
    const FlowProblem p = kp2_problem();
    const FlowTimeline tl = timeline(p);
    const std::vector<Rational> tau = {Rational(2, 5), Rational(4, 5), Rational(1)};
    const std::vector<std::string> t = {"1/(5*pi)", "2/(5*pi)", "1/(2*pi)"};
    const std::vector<EventKind> kind = {EventKind::SingularCrossing, EventKind::SingularCrossing,
                                         EventKind::Extinction};
    const std::vector<RatVector> point = {rvec({1, 0, 0}), rvec({0, 1, 0}), rvec({0, 0, 0})};
    o.require(tl.events.size() == 3, "three events");
    for (std::size_t i = 0; i < std::min<std::size_t>(3, tl.events.size()); ++i) {
        const FlowEvent& e = tl.events[i];
        o.require(e.tau == tau[i], "tau[" + std::to_string(i) + "]");
        o.require(tau_to_t_string(e.tau) == t[i], "t[" + std::to_string(i) + "]");
        o.require(e.kind == kind[i], "kind[" + std::to_string(i) + "]");
        o.require(e.point == point[i], "point[" + std::to_string(i) + "]");
        o.detail << to_string(e.kind) << " at tau = " << to_string(e.tau) << " (t = " << tau_to_t_string(e.tau)
                 << "); ";
    }
}

void topology_sequence(Outcome& o) {
    const FlowProblem p = kp2_problem();
    const FlowTimeline tl = timeline(p);
    const auto intervals = event_intervals(tl);
    const std::vector<std::string> surface = {"S2", "T2", "S2"};
    const std::vector<long> euler = {2, 0, 2};
    // (2-cells, 1-cells, 0-cells)
    const std::vector<std::vector<std::size_t>> cells = {{8, 12, 6}, {8, 16, 8}, {8, 12, 6}};
    o.require(intervals.size() == 3, "three intervals");
    for (std::size_t i = 0; i < std::min<std::size_t>(3, intervals.size()); ++i) {
        const Snapshot s = snapshot(p, tl, intervals[i].representative());
        const GluedComplex g = glue(s.slice);
        const TopologyReport r = topology(g);
        std::vector<std::size_t> counts;
        for (Eigen::Index k = g.dim; k >= 0; --k) counts.push_back(g.count(k));
        auto oracle = oracles::glued_cell_counts(s.slice);
        std::reverse(oracle.begin(), oracle.end());
        const std::string tag = intervals[i].to_string();
        o.require(r.components == 1, tag + " connected");
        o.require(r.orientable == std::optional<bool>(true), tag + " orientable");
        o.require(r.surface == surface[i], tag + " surface");
        o.require(r.euler == euler[i], tag + " euler");
        o.require(counts == cells[i], tag + " cell counts");
        o.require(oracle == cells[i], tag + " union-find oracle");
        o.detail << tag << ": " << r.surface << " chi=" << r.euler << " cells=(" << counts[0] << "," << counts[1]
                 << "," << counts[2] << "); ";
    }
}

void angle_identity(Outcome& o) {
    double worst = 0.0;
    int count = 0;
    std::uint64_t seed = 101;
    for (const auto& lw : lee_wang_family())
        for (const auto& s : samples(lw, 100, seed++)) {
            worst = std::max(worst, angle_distance(angle_pullback(lw.chart, s), angle_closed(lw.chart, s, 1)));
            ++count;
        }
    o.require(worst < kAngleTol, "angle residual");
    o.detail << count << " samples in C^2 and C^3, max |theta_pullback - theta_closed| mod pi = " << worst;
}

void lagrangian_splitting(Outcome& o) {
    double lag = 0.0, split = 0.0, control = std::numeric_limits<double>::infinity();
    int count = 0;
    std::uint64_t seed = 101;
    for (const auto& lw : lee_wang_family())
        for (const auto& s : samples(lw, 100, seed++)) {
            lag = std::max(lag, lagrangian_residual(lw.chart, s));
            split = std::max(split, splitting_residual(lw.chart, s));
            control = std::min(control, lagrangian_residual(lw.chart, perturbed(lw.chart, lw.zeta, s)));
            ++count;
        }
    o.require(lag < kFrameTol, "lagrangian residual");
    o.require(split < kFrameTol, "splitting residual");
    o.require(control > kControlFloor, "negative control");
    o.detail << count << " samples, lagrangian " << lag << ", splitting " << split << ", perturbed control min "
             << control;
}

void mean_curvature(Outcome& o) {
    double worst = 0.0, steps = 0.0, psi_gap = 0.0;
    std::uint64_t seed = 201;
    for (const auto& lw : lee_wang_family())
        for (const auto& s : samples(lw, 20, seed++)) {
            const LevelSetChart L = local_chart(lw, s);
            const CurvatureReport cr = curvature(lw.chart, L, Vec::Zero(lw.chart.dim()), 1e-4, kCurvatureTol);
            worst = std::max(worst, cr.residual);
            steps = std::max(steps, cr.step_disagreement);
            psi_gap = std::max(psi_gap, (cr.K - cr.H).norm());
        }
    o.require(worst < kCurvatureTol, "|K - J grad theta|");
    o.require(steps < kStepAgreement, "step halving");
    o.require(psi_gap < 1e-10, "K = H for psi = 0");
    o.detail << "max |K - J grad theta| = " << worst << ", max |K_h - K_h/2| = " << steps;
}

void weighted_stationarity(Outcome& o) {
    double moving = 0.0, still = 0.0;
    int points = 0;
    std::uint64_t seed = 301;
    for (const auto& lw : lee_wang_family())
        for (const auto& s : samples(lw, 3, seed++)) {
            const LevelSetChart L = local_chart(lw, s);
            for (const Vec& u : patch(lw.chart.dim(), 0.1)) {
                moving = std::max(moving, std::abs(weighted_laplacian_theta(lw.chart, L, u)));
                ++points;
            }
        }
    for (const auto& lw : stationary_family())
        for (const auto& s : samples(lw, 3, seed++)) {
            const LevelSetChart L = local_chart(lw, s);
            for (const Vec& u : patch(lw.chart.dim(), 0.1)) still = std::max(still, std::abs(weighted_laplacian_theta(lw.chart, L, u)));
        }
    o.require(moving < kLaplacianTol, "Lee-Wang patches");
    o.require(still < kStationaryTol, "<gamma, zeta> = 0");
    o.detail << points << " patch points, max |Delta_f theta| = " << moving << "; stationary max = " << still;
}

void flow_law(Outcome& o) {
    double rel = 0.0, tangential = 0.0, normal = 0.0;
    std::uint64_t seed = 401;
    for (const auto& lw : lee_wang_family()) {
        const double expected = -2 * kPi * lw.chart.gamma.dot(lw.zeta.row(0).transpose());
        for (const auto& s : samples(lw, 20, seed++)) {
            const FlowResidual f = flow_residual(lw.chart, local_chart(lw, s));
            rel = std::max(rel, std::abs(f.omega_values.at(0) - expected) / std::abs(expected));
            tangential = std::max(tangential, f.residual_X);
            normal = std::max(normal, f.normal_velocity_gap);
        }
    }
    o.require(rel < kFlowTol, "omega(dF/dt, F_* zeta)");
    o.require(tangential < kFlowTol, "tangential residual");
    o.detail << "max relative error " << rel << ", tangential " << tangential << ", |(dF/dt)^perp - K| " << normal;
}

Vec graph_gradient(const Vec& u) {
    Vec g(2);
    g << u(0) * u(1), u(0) * u(0) / 2 + u(1) * u(1);
    return g;
}

void first_variation_check(Outcome& o) {
    double worst = 0.0;
    const LeeWang lw = lee_wang({1, 1});
    for (const auto& s : samples(lw, 3, 501)) {
        const LevelSetChart L = local_chart(lw, s);
        for (double amplitude : {1.0, 0.3}) {
            const FirstVariation fv = first_variation(lw.chart, L, Vec::Zero(2), 0.2, 16, amplitude);
            worst = std::max(worst, std::max(std::abs(fv.lhs), std::abs(fv.rhs)) / fv.h0_norm);
        }
    }
    o.require(worst < kVariationTol, "stationary patch");

    const TorusChart flat2{make_potential("flat", 2), Vec::Ones(2)};
    const GraphImmersion g(graph_gradient, 0.2, 2);
    Vec centre(2);
    centre << 1.0, 1.0;
    const FirstVariation fv = first_variation(flat2, g, centre, 0.45, 32);
    const double gap = std::abs(fv.lhs - fv.rhs) / std::abs(fv.rhs);
    o.require(gap < kControlAgreement, "non-stationary control");
    o.require(std::abs(fv.rhs) > kVariationTol * fv.h0_norm, "control is non-stationary");
    o.detail << "stationary max(|lhs|,|rhs|)/|h0| = " << worst << "; graph control lhs " << fv.lhs << " rhs "
             << fv.rhs << " (relative gap " << gap << ")";
}

IntMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
    std::uniform_int_distribution<int> d(-3, 3);
    IntMatrix a(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = d(rng);
    return a;
}

void lattice_suite(Outcome& o) {
    std::mt19937_64 rng(1001);
    int checked = 0, special = 0;
    while (checked < 50) {
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 4);
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(std::min<Eigen::Index>(3, m)));
        const IntMatrix zeta = random_matrix(rng, n, m);
        if (rank(to_rational(zeta)) != n) continue;
        ++checked;
        o.require(oracles::saturation_matches_box(zeta, saturation_basis(zeta).vectors, 3),
                  "saturation #" + std::to_string(checked));
        RatMatrix scaled = to_rational(zeta);
        scaled.row(0) /= Rational(2);
        for (const RatMatrix& z : {to_rational(zeta), scaled}) {
            const SpecialConditionReport r = special_condition(z);
            if (!r.is_special) continue;
            ++special;
            o.require(r.k_zeta_order == std::uint64_t{1} << n, "|K_zeta| #" + std::to_string(checked));
        }
    }
    o.require(special == 100, "every rational input is special");
    o.detail << checked << " random matrices (n <= 3, m <= 5) against the box oracle; |K_zeta| = 2^n on " << special
             << " special inputs";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "cy_vectors", 1.0, cy_vectors},
        {2, "event_times", 1.0, event_times},
        {3, "topology_sequence", 5.0, topology_sequence},
        {4, "angle_identity", 0.0, angle_identity},
        {5, "lagrangian_splitting", 0.0, lagrangian_splitting},
        {6, "generalized_mean_curvature", 0.0, mean_curvature},
        {7, "weighted_hamiltonian_stationary", 0.0, weighted_stationarity},
        {8, "flow_law", 0.0, flow_law},
        {9, "first_variation", 0.0, first_variation_check},
        {10, "lattice_suite", 10.0, lattice_suite},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0 && elapsed > c.budget_s) {
            o.pass = false;
            o.detail << " [over the " << c.budget_s << " s budget]";
        }
        if (!o.pass) ++failures;
        std::printf("%s %2d %-32s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), elapsed,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
