#pragma once

// Torus-invariant Kähler potentials F(x) on the dense orbit, x = Re log w.

#include "toricflow/scalar.hpp"

#include <memory>

namespace toricflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Potential {
public:
    virtual ~Potential() = default;

    virtual Eigen::Index dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec grad(const Vec& x) const = 0;
    virtual Mat hess(const Vec& x) const = 0;
    /// third(x)[k](i, j) = ∂_i ∂_j ∂_k F
    virtual std::vector<Mat> third(const Vec& x) const = 0;
    virtual double fourth(const Vec& x, int i, int j, int k, int l) const = 0;
    virtual std::string describe() const = 0;
};

/// F = ¼ Σ e^{2 x_i}: the flat metric on C^m, ω = (i/2) Σ dw ∧ dw̄.
class FlatPotential final : public Potential {
public:
    explicit FlatPotential(Eigen::Index m) : m_(m) {}

    Eigen::Index dim() const override { return m_; }
    double value(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Mat hess(const Vec& x) const override;
    std::vector<Mat> third(const Vec& x) const override;
    double fourth(const Vec& x, int i, int j, int k, int l) const override;
    std::string describe() const override { return "flat"; }

private:
    Eigen::Index m_;
};

struct ExprNode;

/**
 * Single-line arithmetic expression in x1..xm with + - * / ^ exp log and
 * rational literals; derivatives through nested dual numbers.
 * Throws ParseError with the offending column.
 */
class ExpressionPotential final : public Potential {
public:
    ExpressionPotential(std::string text, Eigen::Index m);
    ~ExpressionPotential() override;

    Eigen::Index dim() const override { return m_; }
    double value(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Mat hess(const Vec& x) const override;
    std::vector<Mat> third(const Vec& x) const override;
    double fourth(const Vec& x, int i, int j, int k, int l) const override;
    std::string describe() const override { return text_; }

private:
    std::string text_;
    Eigen::Index m_;
    std::shared_ptr<const ExprNode> root_;
};

/// "flat" or an expression.
std::shared_ptr<const Potential> make_potential(const std::string& spec, Eigen::Index m);

}  // namespace toricflow
