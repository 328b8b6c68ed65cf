#include "toricflow/chart.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace toricflow {

namespace {

constexpr double kPi = std::numbers::pi;
using CMat = Eigen::MatrixXcd;

std::string describe_point(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << ")";
    return os.str();
}

Vec stack(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

double g_norm(const TorusChart& chart, const Vec& x, const Vec& u) { return std::sqrt(std::max(0.0, metric(chart, x, u, u))); }

// Tangential projector P = E (E^T g E)^{-1} E^T g.
Vec normal_part(const TorusChart& chart, const Vec& x, const Mat& frame, const Vec& u) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    Mat g = Mat::Zero(2 * m, 2 * m);
    g.topLeftCorner(m, m) = G;
    g.bottomRightCorner(m, m) = G;
    const Mat h = frame.transpose() * g * frame;
    const Vec coeff = h.ldlt().solve(frame.transpose() * (g * u));
    return u - frame * coeff;
}

double wrap_pi(double a) {
    double r = std::fmod(a, kPi);
    if (r < 0) r += kPi;
    if (r >= kPi) r -= kPi;
    return r;
}

Vec unit(Eigen::Index n, Eigen::Index k) { return Vec::Unit(n, k); }

}  // namespace

Mat kahler_block(const TorusChart& chart, const Vec& x) {
    Mat G = chart.potential->hess(x);
    if (!G.allFinite()) throw DegeneratePotential("Hess F is not finite at x = " + describe_point(x));
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success) throw DegeneratePotential("Hess F is not positive definite at x = " + describe_point(x));
    return G;
}

Vec moment_map(const TorusChart& chart, const Vec& x) {
    kahler_block(chart, x);
    return 2.0 * kPi * chart.potential->grad(x);
}

double omega(const TorusChart& chart, const Vec& x, const Vec& u, const Vec& v) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    return u.head(m).dot(G * v.tail(m)) - u.tail(m).dot(G * v.head(m));
}

double metric(const TorusChart& chart, const Vec& x, const Vec& u, const Vec& v) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    return u.head(m).dot(G * v.head(m)) + u.tail(m).dot(G * v.tail(m));
}

Vec complex_structure(const Vec& u) {
    const Eigen::Index m = u.size() / 2;
    Vec out(u.size());
    out << -u.tail(m), u.head(m);
    return out;
}

Mat induced_metric(const TorusChart& chart, const Vec& x, const Mat& frame) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    return frame.topRows(m).transpose() * G * frame.topRows(m) + frame.bottomRows(m).transpose() * G * frame.bottomRows(m);
}

double psi(const TorusChart& chart, const Vec& x) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    return (2.0 * chart.gamma.dot(x) - std::log(G.determinant())) / (2.0 * static_cast<double>(m));
}

Vec grad_psi(const TorusChart& chart, const Vec& x) {
    const Eigen::Index m = chart.dim();
    const Mat G = kahler_block(chart, x);
    const Mat Ginv = G.inverse();
    const auto F3 = chart.potential->third(x);
    Vec dpsi(m);
    for (Eigen::Index k = 0; k < m; ++k)
        dpsi(k) = (2.0 * chart.gamma(k) - (Ginv.array() * F3[static_cast<std::size_t>(k)].array()).sum()) /
                  (2.0 * static_cast<double>(m));
    return stack(Ginv * dpsi, Vec::Zero(m));
}

std::complex<double> omega_gamma(const TorusChart& chart, const Vec& point, const Mat& frame) {
    const Eigen::Index m = chart.dim();
    CMat dz(m, frame.cols());
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index a = 0; a < frame.cols(); ++a) dz(j, a) = {frame(j, a), frame(m + j, a)};
    const std::complex<double> phase = std::exp(std::complex<double>(chart.gamma.dot(point.head(m)), chart.gamma.dot(point.tail(m))));
    return phase * dz.determinant();
}

std::vector<Mat> christoffel(const TorusChart& chart, const Vec& x) {
    const Eigen::Index m = chart.dim();
    const Eigen::Index d = 2 * m;
    const Mat G = kahler_block(chart, x);
    const Mat Ginv = G.inverse();
    const auto F3 = chart.potential->third(x);
    Mat ginv = Mat::Zero(d, d);
    ginv.topLeftCorner(m, m) = Ginv;
    ginv.bottomRightCorner(m, m) = Ginv;
    std::vector<Mat> dg(static_cast<std::size_t>(d), Mat::Zero(d, d));
    for (Eigen::Index k = 0; k < m; ++k) {
        dg[static_cast<std::size_t>(k)].topLeftCorner(m, m) = F3[static_cast<std::size_t>(k)];
        dg[static_cast<std::size_t>(k)].bottomRightCorner(m, m) = F3[static_cast<std::size_t>(k)];
    }
    std::vector<Mat> gamma(static_cast<std::size_t>(d), Mat::Zero(d, d));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            Vec lower(d);
            for (Eigen::Index l = 0; l < d; ++l)
                lower(l) = 0.5 * (dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                                  dg[static_cast<std::size_t>(l)](i, j));
            const Vec upper = ginv * lower;
            for (Eigen::Index k = 0; k < d; ++k) gamma[static_cast<std::size_t>(k)](i, j) = upper(k);
        }
    return gamma;
}

Mat Immersion::tangents(const Vec& u) const {
    const double h = fd_step;
    const Vec p = point(u);
    Mat out(p.size(), dim());
    for (Eigen::Index a = 0; a < dim(); ++a) {
        const Vec e = unit(dim(), a);
        out.col(a) = (8.0 * (point(u + h * e) - point(u - h * e)) - (point(u + 2 * h * e) - point(u - 2 * h * e))) / (12.0 * h);
    }
    return out;
}

LevelSetChart::LevelSetChart(TorusChart chart, Mat zeta, Vec c, Vec x0, Vec y0)
    : chart_(std::move(chart)), zeta_(std::move(zeta)), c_(std::move(c)), x0_(std::move(x0)), y0_(std::move(y0)) {
    const Eigen::Index m = chart_.dim();
    const Eigen::Index n = zeta_.rows();
    const Mat G0 = kahler_block(chart_, x0_);
    if (n == 0) {
        t_ = Mat::Identity(m, m);
        n_ = Mat(m, 0);
        return;
    }
    const Mat A = zeta_ * G0;
    Eigen::HouseholderQR<Mat> qr(A.transpose());
    const Mat Q = qr.householderQ() * Mat::Identity(m, m);
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.rank() != n) throw std::invalid_argument("zeta rows are linearly dependent");
    t_ = Q.rightCols(m - n);
    n_ = G0 * zeta_.transpose();
}

Vec LevelSetChart::project(const Vec& s, const Vec& levels) const {
    const Eigen::Index n = zeta_.rows();
    const Vec base = x0_ + t_ * s;
    if (n == 0) return base;
    Vec lambda = Vec::Zero(n);
    const double scale = std::max(1.0, levels.cwiseAbs().maxCoeff());
    for (int it = 0; it < 60; ++it) {
        const Vec x = base + n_ * lambda;
        const Vec r = zeta_ * moment_map(chart_, x) - levels;
        if (r.cwiseAbs().maxCoeff() <= 1e-14 * scale) return x;
        const Mat J = 2.0 * kPi * zeta_ * kahler_block(chart_, x) * n_;
        const Vec step = J.partialPivLu().solve(r);
        double damp = 1.0;
        while (damp > 1e-6) {
            const Vec trial = base + n_ * (lambda - damp * step);
            bool ok = true;
            Vec rt;
            try {
                rt = zeta_ * moment_map(chart_, trial) - levels;
            } catch (const DegeneratePotential&) {
                ok = false;
            }
            if (ok && rt.allFinite() && rt.norm() < r.norm()) break;
            damp *= 0.5;
        }
        lambda -= damp * step;
        if (damp <= 1e-6) break;
    }
    const Vec x = base + n_ * lambda;
    const Vec r = zeta_ * moment_map(chart_, x) - levels;
    if (r.cwiseAbs().maxCoeff() <= 1e-12 * scale) return x;
    throw EmptyLevelSet("level-set chart projection failed near x = " + describe_point(x));
}

Vec LevelSetChart::level_point(const Vec& s) const { return project(s, c_); }

Vec LevelSetChart::point(const Vec& u) const {
    const Eigen::Index k = level_dims();
    const Vec x = level_point(u.head(k));
    const Vec y = y0_ + 2.0 * kPi * zeta_.transpose() * u.tail(zeta_.rows());
    return stack(x, y);
}

Mat LevelSetChart::tangents(const Vec& u) const {
    const Eigen::Index m = chart_.dim();
    const Eigen::Index n = zeta_.rows();
    const Eigen::Index k = level_dims();
    Mat out = Mat::Zero(2 * m, m);
    const Vec x = level_point(u.head(k));
    if (n == 0) {
        out.topRows(m) = t_;
        return out;
    }
    const Mat J = 2.0 * kPi * zeta_ * kahler_block(chart_, x);
    const Mat dlambda = -(J * n_).partialPivLu().solve(J * t_);
    out.topLeftCorner(m, k) = t_ + n_ * dlambda;
    out.bottomRightCorner(m, n) = 2.0 * kPi * zeta_.transpose();
    return out;
}

GraphImmersion::GraphImmersion(std::function<Vec(const Vec&)> grad_phi, double epsilon, Eigen::Index m)
    : grad_phi_(std::move(grad_phi)), eps_(epsilon), m_(m) {}

Vec GraphImmersion::point(const Vec& u) const {
    const Vec dphi = grad_phi_(u);
    Vec out(2 * m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
        const std::complex<double> w(u(i), eps_ * dphi(i));
        out(i) = std::log(std::abs(w));
        out(m_ + i) = std::arg(w);
    }
    return out;
}

Vec ChartSample::point() const { return stack(x, y); }

std::vector<ChartSample> sample_level_set(const TorusChart& chart, const Mat& zeta, const Vec& c, int count,
                                          std::uint64_t seed, const SamplingOptions& options) {
    const Eigen::Index m = chart.dim();
    const Eigen::Index n = zeta.rows();
    if (zeta.cols() != m || c.size() != n) throw std::invalid_argument("zeta and c do not match the chart dimension");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(options.box_lo, options.box_hi);
    std::uniform_real_distribution<double> unit_interval(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const double scale = std::max(1.0, n ? c.cwiseAbs().maxCoeff() : 0.0);

    auto project = [&](Vec x) -> std::optional<Vec> {
        if (n == 0) return x;
        for (int it = 0; it < 100; ++it) {
            Vec r;
            Mat J;
            try {
                r = zeta * moment_map(chart, x) - c;
                J = 2.0 * kPi * zeta * kahler_block(chart, x);
            } catch (const DegeneratePotential&) {
                return std::nullopt;
            }
            if (!r.allFinite()) return std::nullopt;
            if (r.cwiseAbs().maxCoeff() <= options.tolerance * scale) return x;
            const Vec dx = J.transpose() * (J * J.transpose()).ldlt().solve(r);
            double damp = 1.0;
            bool moved = false;
            while (damp > 1e-8) {
                const Vec trial = x - damp * dx;
                try {
                    const Vec rt = zeta * moment_map(chart, trial) - c;
                    if (rt.allFinite() && rt.norm() < r.norm()) {
                        x = trial;
                        moved = true;
                        break;
                    }
                } catch (const DegeneratePotential&) {
                }
                damp *= 0.5;
            }
            if (!moved) return std::nullopt;
        }
        return std::nullopt;
    };

    std::vector<ChartSample> out;
    int failures = 0;
    while (static_cast<int>(out.size()) < count) {
        Vec x0(m);
        for (Eigen::Index i = 0; i < m; ++i) x0(i) = box(rng);
        auto x = project(x0);
        if (!x) {
            if (++failures >= options.max_failures)
                throw EmptyLevelSet("no point of the level set found after " + std::to_string(failures) + " projections");
            continue;
        }
        failures = 0;
        ChartSample s;
        s.x = *x;
        Vec a(n);
        for (Eigen::Index r = 0; r < n; ++r) a(r) = unit_interval(rng);
        s.v = n ? Vec(zeta.transpose() * a) : Vec::Zero(m);
        s.signs.resize(static_cast<std::size_t>(m));
        Vec shift(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            s.signs[static_cast<std::size_t>(i)] = coin(rng) ? -1 : 1;
            shift(i) = s.signs[static_cast<std::size_t>(i)] < 0 ? kPi : 0.0;
        }
        s.y = 2.0 * kPi * s.v + shift;
        s.level_dims = m - n;
        s.frame = LevelSetChart(chart, zeta, c, s.x, s.y).tangents(Vec::Zero(m));
        out.push_back(std::move(s));
    }
    return out;
}

double constraint_residual(const TorusChart& chart, const Mat& zeta, const Vec& c, const ChartSample& s) {
    if (zeta.rows() == 0) return 0.0;
    return (zeta * moment_map(chart, s.x) - c).cwiseAbs().maxCoeff();
}

double lagrangian_residual(const TorusChart& chart, const ChartSample& s) {
    const Mat h = induced_metric(chart, s.x, s.frame);
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success) throw DegenerateFrame("tangent frame is degenerate");
    const Mat L = llt.matrixL();
    const Mat E = L.triangularView<Eigen::Lower>().solve(s.frame.transpose()).transpose();
    double worst = 0.0;
    for (Eigen::Index a = 0; a < E.cols(); ++a)
        for (Eigen::Index b = a + 1; b < E.cols(); ++b) worst = std::max(worst, std::abs(omega(chart, s.x, E.col(a), E.col(b))));
    return worst;
}

double splitting_residual(const TorusChart& chart, const ChartSample& s) {
    double worst = 0.0;
    for (Eigen::Index a = 0; a < s.level_dims; ++a)
        for (Eigen::Index b = s.level_dims; b < s.frame.cols(); ++b) {
            const Vec X = s.frame.col(a), Y = s.frame.col(b);
            worst = std::max(worst, std::abs(metric(chart, s.x, X, Y)) / (g_norm(chart, s.x, X) * g_norm(chart, s.x, Y)));
        }
    return worst;
}

ChartSample perturbed(const TorusChart& chart, const Mat&, const ChartSample& s, double shift) {
    ChartSample out = s;
    out.x(0) += shift;
    kahler_block(chart, out.x);
    return out;
}

double angle_closed(const TorusChart& chart, const ChartSample& s, Eigen::Index n) {
    return wrap_pi(2.0 * kPi * chart.gamma.dot(s.v) + kPi * static_cast<double>(n) / 2.0);
}

double angle_pullback(const TorusChart& chart, const ChartSample& s) {
    const std::complex<double> w = omega_gamma(chart, s.point(), s.frame);
    if (!(std::abs(w) > 1e-300) || !std::isfinite(std::abs(w))) throw DegenerateFrame("Omega_gamma of the tangent frame underflows");
    return wrap_pi(std::arg(w));
}

double angle_distance(double a, double b) {
    const double r = wrap_pi(a - b);
    return std::min(r, kPi - r);
}

namespace {

// Phase of Ω_γ(F_* ∂_1, …, F_* ∂_m) at u.
std::complex<double> omega_at(const TorusChart& chart, const Immersion& imm, const Vec& u) {
    return omega_gamma(chart, imm.point(u), imm.tangents(u));
}

Vec theta_gradient(const TorusChart& chart, const Immersion& imm, const Vec& u, double h) {
    const std::complex<double> w0 = omega_at(chart, imm, u);
    auto rel = [&](const Vec& p) { return std::arg(omega_at(chart, imm, p) / w0); };
    Vec d(imm.dim());
    for (Eigen::Index b = 0; b < imm.dim(); ++b) {
        const Vec e = unit(imm.dim(), b);
        d(b) = (8.0 * (rel(u + h * e) - rel(u - h * e)) - (rel(u + 2 * h * e) - rel(u - 2 * h * e))) / (12.0 * h);
    }
    return d;
}

Vec mean_curvature(const TorusChart& chart, const Immersion& imm, const Vec& u, const Vec& p, const Mat& E, double h) {
    const Eigen::Index d = imm.dim();
    const Vec x = p.head(chart.dim());
    const Mat hinv = induced_metric(chart, x, E).inverse();
    const auto Gam = christoffel(chart, x);
    std::vector<Mat> dE;
    for (Eigen::Index a = 0; a < d; ++a) {
        const Vec e = unit(d, a);
        dE.push_back((imm.tangents(u + h * e) - imm.tangents(u - h * e)) / (2.0 * h));
    }
    Vec H = Vec::Zero(p.size());
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            Vec acc = dE[static_cast<std::size_t>(a)].col(b);
            for (Eigen::Index k = 0; k < p.size(); ++k) acc(k) += E.col(a).dot(Gam[static_cast<std::size_t>(k)] * E.col(b));
            H += hinv(a, b) * acc;
        }
    return normal_part(chart, x, E, H);
}

}  // namespace

CurvatureReport curvature(const TorusChart& chart, const Immersion& imm, const Vec& u, double h, double tol) {
    CurvatureReport rep;
    const Eigen::Index m = chart.dim();
    const Vec p = imm.point(u);
    const Vec x = p.head(m);
    const Mat E = imm.tangents(u);
    rep.step = h;
    rep.psi = psi(chart, x);
    rep.grad_psi = grad_psi(chart, x);
    const Vec grad_perp = normal_part(chart, x, E, rep.grad_psi);
    const Vec H1 = mean_curvature(chart, imm, u, p, E, h);
    const Vec H2 = mean_curvature(chart, imm, u, p, E, h / 2);
    rep.H = (4.0 * H2 - H1) / 3.0;
    rep.step_disagreement = g_norm(chart, x, H1 - H2);
    if (rep.step_disagreement > 10.0 * tol)
        throw StepSizeFailure("mean curvature differs by " + std::to_string(rep.step_disagreement) + " between steps h and h/2");
    rep.K = rep.H - static_cast<double>(m) * grad_perp;
    const Mat hinv = induced_metric(chart, x, E).inverse();
    const Vec dtheta = theta_gradient(chart, imm, u, h);
    rep.J_grad_theta = complex_structure(E * (hinv * dtheta));
    rep.residual = g_norm(chart, x, rep.K - rep.J_grad_theta);
    return rep;
}

double weighted_laplacian(const TorusChart& chart, const Immersion& imm, const Vec& u, const ScalarField& field, double step) {
    if (step > 0.05) throw MeshTooCoarse("Laplacian stencil step exceeds 0.05");
    const Eigen::Index d = imm.dim();
    const double mm = static_cast<double>(chart.dim());
    auto flux = [&](const Vec& q, Eigen::Index a) {
        const Vec x = imm.point(q).head(chart.dim());
        const Mat h = induced_metric(chart, x, imm.tangents(q));
        Vec grad(d);
        for (Eigen::Index b = 0; b < d; ++b) {
            const Vec e = unit(d, b);
            grad(b) = (field(q + step * e) - field(q - step * e)) / (2.0 * step);
        }
        return std::exp(mm * psi(chart, x)) * std::sqrt(h.determinant()) * h.inverse().row(a).dot(grad);
    };
    double div = 0.0;
    for (Eigen::Index a = 0; a < d; ++a) {
        const Vec e = unit(d, a);
        div += (flux(u + step * e, a) - flux(u - step * e, a)) / (2.0 * step);
    }
    const Vec x = imm.point(u).head(chart.dim());
    const Mat h = induced_metric(chart, x, imm.tangents(u));
    return -std::exp(-mm * psi(chart, x)) / std::sqrt(h.determinant()) * div;
}

double weighted_laplacian_theta(const TorusChart& chart, const Immersion& imm, const Vec& u, double step) {
    const std::complex<double> w0 = omega_at(chart, imm, u);
    return weighted_laplacian(chart, imm, u, [&](const Vec& q) { return std::arg(omega_at(chart, imm, q) / w0); }, step);
}

FlowResidual flow_residual(const TorusChart& chart, const LevelSetChart& imm, double dt) {
    FlowResidual out;
    const Eigen::Index m = chart.dim();
    const Eigen::Index n = imm.zeta().rows();
    const Eigen::Index k = imm.level_dims();
    const Vec speed = imm.zeta() * chart.gamma;
    auto x_at = [&](double t) { return imm.project(Vec::Zero(k), imm.levels() - 2.0 * kPi * t * speed); };
    const Vec xdot = (8.0 * (x_at(dt) - x_at(-dt)) - (x_at(2 * dt) - x_at(-2 * dt))) / (12.0 * dt);
    const Vec Fdot = stack(xdot, Vec::Zero(m));
    const Vec u0 = Vec::Zero(m);
    const Vec p = imm.point(u0);
    const Vec x = p.head(m);
    const Mat E = imm.tangents(u0);
    for (Eigen::Index a = 0; a < k; ++a) out.residual_X = std::max(out.residual_X, std::abs(omega(chart, x, Fdot, E.col(a))));
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vec Y = stack(Vec::Zero(m), 2.0 * kPi * imm.zeta().row(r).transpose());
        const double w = omega(chart, x, Fdot, Y);
        const double expected = -2.0 * kPi * speed(r);
        out.omega_values.push_back(w);
        out.residual_Y = std::max(out.residual_Y, std::abs(w - expected) / std::max(1.0, std::abs(expected)));
    }
    const CurvatureReport cr = curvature(chart, imm, u0);
    out.normal_velocity_gap = g_norm(chart, x, normal_part(chart, x, E, Fdot) - cr.K);
    return out;
}

namespace {

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }
double bump_derivative(double s) { return std::abs(s) < 1.0 ? bump(s) * (-2.0 * s / ((1.0 - s * s) * (1.0 - s * s))) : 0.0; }

}  // namespace

FirstVariation first_variation(const TorusChart& chart, const Immersion& imm, const Vec& centre, double radius, int mesh,
                               double amplitude, double delta) {
    if (mesh < 8) throw MeshTooCoarse("first-variation mesh needs at least 8 points per dimension");
    const Eigen::Index d = imm.dim();
    const Eigen::Index m = chart.dim();
    const double mm = static_cast<double>(m);
    FirstVariation out;
    out.mesh = mesh;
    out.h0_norm = std::abs(amplitude);
    if (amplitude == 0.0) return out;

    auto h0 = [&](const Vec& u) {
        double v = amplitude;
        for (Eigen::Index a = 0; a < d; ++a) v *= bump((u(a) - centre(a)) / radius);
        return v;
    };
    auto dh0 = [&](const Vec& u) {
        Vec g(d);
        for (Eigen::Index a = 0; a < d; ++a) {
            double v = amplitude / radius;
            for (Eigen::Index b = 0; b < d; ++b) {
                const double s = (u(b) - centre(b)) / radius;
                v *= a == b ? bump_derivative(s) : bump(s);
            }
            g(a) = v;
        }
        return g;
    };
    auto field = [&](const Vec& u) {
        const Vec x = imm.point(u).head(m);
        const Mat E = imm.tangents(u);
        return Vec(complex_structure(E * induced_metric(chart, x, E).inverse() * dh0(u)));
    };
    auto density = [&](const Vec& p, const Mat& E) {
        const Vec x = p.head(m);
        return std::exp(mm * psi(chart, x)) * std::sqrt(induced_metric(chart, x, E).determinant());
    };

    const double cell_side = 2.0 * radius / mesh;
    const double cell = std::pow(cell_side, static_cast<double>(d));
    const double eta = 1e-5;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        Vec u(d);
        for (Eigen::Index a = 0; a < d; ++a) u(a) = centre(a) - radius + (idx[static_cast<std::size_t>(a)] + 0.5) * cell_side;
        const double h0u = h0(u);
        if (h0u != 0.0) {
            const Vec p = imm.point(u);
            const Mat E = imm.tangents(u);
            const Vec V = field(u);
            Mat dV(p.size(), d);
            for (Eigen::Index a = 0; a < d; ++a) {
                const Vec e = unit(d, a);
                dV.col(a) = (field(u + eta * e) - field(u - eta * e)) / (2.0 * eta);
            }
            out.lhs += (density(p + delta * V, E + delta * dV) - density(p - delta * V, E - delta * dV)) / (2.0 * delta) * cell;
            out.rhs -= weighted_laplacian_theta(chart, imm, u) * h0u * density(p, E) * cell;
        }
        Eigen::Index a = 0;
        while (a < d && ++idx[static_cast<std::size_t>(a)] == mesh) idx[static_cast<std::size_t>(a++)] = 0;
        if (a == d) break;
    }
    return out;
}

bool IdentityReport::pass() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityResult& r) { return r.pass; });
}

IdentityReport verify_identities(const TorusChart& chart, const Mat& zeta, const Vec& c, const VerifyOptions& opt) {
    IdentityReport rep;
    const Eigen::Index m = chart.dim();
    const Eigen::Index n = zeta.rows();
    const auto samples = sample_level_set(chart, zeta, c, opt.samples, opt.seed, opt.sampling);
    const int heavy = std::min<int>(opt.heavy_samples, static_cast<int>(samples.size()));
    auto add = [&](IdentityResult r) {
        r.pass = r.max_residual < r.tolerance;
        rep.identities.push_back(std::move(r));
    };
    auto named = [](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const StepSizeFailure& e) {
            throw StepSizeFailure(name + ": " + e.what());
        }
    };

    {
        // d<μ, ζ_r>(U) = −ω(ζ_r, U) for random U, by central differences of the moment map
        IdentityResult r{"hamiltonian_condition", 0.0, 1e-6, false, 0, 2, {1e-6}, "relative error"};
        std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> normal;
        const Mat basis = n ? zeta : Mat(Mat::Identity(m, m));
        for (int i = 0; i < std::min<int>(20, static_cast<int>(samples.size())); ++i) {
            const auto& s = samples[static_cast<std::size_t>(i)];
            Vec U(2 * m);
            for (Eigen::Index k = 0; k < 2 * m; ++k) U(k) = normal(rng);
            for (Eigen::Index row = 0; row < basis.rows(); ++row) {
                const Vec zr = basis.row(row).transpose();
                const double hstep = 1e-6;
                const double fd = (moment_map(chart, s.x + hstep * U.head(m)).dot(zr) - moment_map(chart, s.x - hstep * U.head(m)).dot(zr)) /
                                  (2.0 * hstep);
                const double exact = -omega(chart, s.x, stack(Vec::Zero(m), 2.0 * kPi * zr), U);
                r.max_residual = std::max(r.max_residual, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
            }
            ++r.samples;
        }
        add(r);
    }
    {
        IdentityResult r{"level_set_constraint", 0.0, 1e-10, false, static_cast<int>(samples.size()), 0, {}, "relative to max(1, |c|)"};
        const double scale = std::max(1.0, n ? c.cwiseAbs().maxCoeff() : 0.0);
        for (const auto& s : samples) r.max_residual = std::max(r.max_residual, constraint_residual(chart, zeta, c, s) / scale);
        add(r);
    }
    {
        IdentityResult r{"lagrangian", 0.0, 1e-8, false, static_cast<int>(samples.size()), 0, {}, ""};
        if (opt.negative_control) r.note = "negative control: x shifted by 0.1 with the frame kept";
        for (const auto& s : samples)
            r.max_residual = std::max(r.max_residual, lagrangian_residual(chart, opt.negative_control ? perturbed(chart, zeta, s) : s));
        add(r);
    }
    {
        IdentityResult r{"orthogonal_splitting", 0.0, 1e-8, false, static_cast<int>(samples.size()), 0, {}, ""};
        for (const auto& s : samples) r.max_residual = std::max(r.max_residual, splitting_residual(chart, s));
        add(r);
    }
    {
        IdentityResult r{"lagrangian_angle", 0.0, 1e-6, false, static_cast<int>(samples.size()), 0, {}, "closed form vs pullback, mod pi"};
        for (const auto& s : samples)
            r.max_residual = std::max(r.max_residual, angle_distance(angle_closed(chart, s, n), angle_pullback(chart, s)));
        add(r);
    }
    {
        IdentityResult r{"generalized_mean_curvature", 0.0, opt.tol, false, heavy, 2, {1e-4, 5e-5}, "Richardson over h, h/2"};
        named(r.name, [&] {
            for (int i = 0; i < heavy; ++i) {
                const auto& s = samples[static_cast<std::size_t>(i)];
                const LevelSetChart L(chart, zeta, c, s.x, s.y);
                r.max_residual = std::max(r.max_residual, curvature(chart, L, Vec::Zero(m), 1e-4, opt.tol).residual);
            }
        });
        add(r);
    }
    {
        IdentityResult r{"weighted_hamiltonian_stationary", 0.0, opt.tol, false, heavy, 2, {2e-3}, ""};
        for (int i = 0; i < heavy; ++i) {
            const auto& s = samples[static_cast<std::size_t>(i)];
            const LevelSetChart L(chart, zeta, c, s.x, s.y);
            r.max_residual = std::max(r.max_residual, std::abs(weighted_laplacian_theta(chart, L, Vec::Zero(m))));
        }
        add(r);
    }
    if (n > 0) {
        IdentityResult ry{"flow_law", 0.0, opt.tol, false, heavy, 4, {1e-4}, "relative to max(1, 2 pi |<gamma, zeta_r>|)"};
        IdentityResult rx{"flow_tangential", 0.0, opt.tol, false, heavy, 4, {1e-4}, ""};
        IdentityResult rk{"flow_normal_velocity", 0.0, opt.tol, false, heavy, 4, {1e-4}, "|(dF/dt)^perp - K|"};
        named("flow_law", [&] {
            for (int i = 0; i < heavy; ++i) {
                const auto& s = samples[static_cast<std::size_t>(i)];
                const FlowResidual f = flow_residual(chart, LevelSetChart(chart, zeta, c, s.x, s.y));
                ry.max_residual = std::max(ry.max_residual, f.residual_Y);
                rx.max_residual = std::max(rx.max_residual, f.residual_X);
                rk.max_residual = std::max(rk.max_residual, f.normal_velocity_gap);
            }
        });
        add(ry);
        add(rx);
        add(rk);
    }
    if (!samples.empty()) {
        IdentityResult r{"first_variation", 0.0, opt.tol, false, 1, 2, {1e-4, 2e-3}, "max(|lhs|, |rhs|) / |h0|"};
        const auto& s = samples.front();
        const LevelSetChart L(chart, zeta, c, s.x, s.y);
        const FirstVariation fv = first_variation(chart, L, Vec::Zero(m), opt.patch_radius, opt.mesh);
        r.max_residual = std::max(std::abs(fv.lhs), std::abs(fv.rhs)) / fv.h0_norm;
        add(r);
    }
    return rep;
}

}  // namespace toricflow
