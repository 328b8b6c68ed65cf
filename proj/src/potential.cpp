#include "toricflow/potential.hpp"

#include "toricflow/dual.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>

namespace toricflow {

double FlatPotential::value(const Vec& x) const { return 0.25 * (2.0 * x.array()).exp().sum(); }

Vec FlatPotential::grad(const Vec& x) const { return 0.5 * (2.0 * x.array()).exp().matrix(); }

Mat FlatPotential::hess(const Vec& x) const { return (2.0 * x.array()).exp().matrix().asDiagonal(); }

std::vector<Mat> FlatPotential::third(const Vec& x) const {
    std::vector<Mat> t(static_cast<std::size_t>(m_), Mat::Zero(m_, m_));
    for (Eigen::Index k = 0; k < m_; ++k) t[static_cast<std::size_t>(k)](k, k) = 2.0 * std::exp(2.0 * x(k));
    return t;
}

double FlatPotential::fourth(const Vec& x, int i, int j, int k, int l) const {
    return (i == j && j == k && k == l) ? 4.0 * std::exp(2.0 * x(i)) : 0.0;
}

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, IntPow, Pow, Exp, Log };

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;
    long exponent = 0;
    int var = 0;
    std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

std::optional<double> constant_value(const NodePtr& n) {
    switch (n->op) {
        case Op::Const: return n->value;
        case Op::Neg: {
            auto v = constant_value(n->a);
            if (v) return -*v;
            return std::nullopt;
        }
        case Op::Div: case Op::Mul: case Op::Add: case Op::Sub: {
            auto l = constant_value(n->a), r = constant_value(n->b);
            if (!l || !r) return std::nullopt;
            if (n->op == Op::Div) return *l / *r;
            if (n->op == Op::Mul) return *l * *r;
            if (n->op == Op::Add) return *l + *r;
            return *l - *r;
        }
        default: return std::nullopt;
    }
}

class Parser {
public:
    Parser(std::string_view text, Eigen::Index m) : text_(text), m_(m) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("potential expression, column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr n = term();
        while (true) {
            if (eat('+')) n = make(Op::Add, n, term());
            else if (eat('-')) n = make(Op::Sub, n, term());
            else return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        while (true) {
            if (eat('*')) n = make(Op::Mul, n, unary());
            else if (eat('/')) n = make(Op::Div, n, unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (!eat('^')) return base;
        NodePtr ex = unary();
        auto c = constant_value(ex);
        if (c && std::floor(*c) == *c && std::abs(*c) <= 64) {
            auto n = std::make_shared<ExprNode>();
            n->op = Op::IntPow;
            n->exponent = static_cast<long>(*c);
            n->a = base;
            return n;
        }
        return make(Op::Pow, base, ex);
    }

    NodePtr primary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (eat('(')) {
            NodePtr n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string word(text_.substr(start, pos_ - start));
            if (word == "exp" || word == "log") {
                if (!eat('(')) fail("expected '(' after " + word);
                NodePtr arg = expr();
                if (!eat(')')) fail("expected ')'");
                return make(word == "exp" ? Op::Exp : Op::Log, arg);
            }
            if (word.size() > 1 && word[0] == 'x' &&
                std::all_of(word.begin() + 1, word.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
                const long idx = std::stol(word.substr(1));
                if (idx < 1 || idx > m_) {
                    pos_ = start;
                    fail("variable " + word + " outside x1..x" + std::to_string(m_));
                }
                auto n = std::make_shared<ExprNode>();
                n->op = Op::Var;
                n->var = static_cast<int>(idx - 1);
                return n;
            }
            pos_ = start;
            fail("unknown identifier '" + word + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        auto n = std::make_shared<ExprNode>();
        try {
            n->value = to_double(parse_rational(text_.substr(start, pos_ - start)));
        } catch (const ParseError&) {
            pos_ = start;
            fail("malformed number");
        }
        return n;
    }

    std::string_view text_;
    Eigen::Index m_;
    std::size_t pos_ = 0;
};

template <typename T>
T eval(const ExprNode& n, const std::vector<T>& x) {
    using std::exp;
    using std::log;
    switch (n.op) {
        case Op::Const: return T(n.value);
        case Op::Var: return x[static_cast<std::size_t>(n.var)];
        case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
        case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
        case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
        case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
        case Op::Neg: return -eval(*n.a, x);
        case Op::IntPow: {
            const T base = eval(*n.a, x);
            T r(1.0);
            for (long k = 0; k < std::abs(n.exponent); ++k) r = r * base;
            return n.exponent < 0 ? T(1.0) / r : r;
        }
        case Op::Pow: return exp(eval(*n.b, x) * log(eval(*n.a, x)));
        case Op::Exp: return exp(eval(*n.a, x));
        case Op::Log: return log(eval(*n.a, x));
    }
    return T(0.0);
}

// Variable i lifted to nested duals; level L (outermost = dirs.back()) is seeded along dirs[L-1].
template <typename T>
struct Lift;

template <>
struct Lift<double> {
    static double var(const Vec& x, int i, const int*) { return x(i); }
};

template <typename U>
struct Lift<Dual<U>> {
    static Dual<U> var(const Vec& x, int i, const int* dirs) {
        return {Lift<U>::var(x, i, dirs + 1), dirs[0] == i ? U(1.0) : U(0.0)};
    }
};

template <typename T>
double partial(const ExprNode& root, const Vec& x, const int* dirs) {
    std::vector<T> xs;
    for (Eigen::Index i = 0; i < x.size(); ++i) xs.push_back(Lift<T>::var(x, static_cast<int>(i), dirs));
    return top_derivative(eval(root, xs));
}

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

}  // namespace

ExpressionPotential::ExpressionPotential(std::string text, Eigen::Index m) : text_(std::move(text)), m_(m) {
    root_ = Parser(text_, m_).parse();
}

ExpressionPotential::~ExpressionPotential() = default;

double ExpressionPotential::value(const Vec& x) const {
    std::vector<double> xs(x.data(), x.data() + x.size());
    return eval(*root_, xs);
}

Vec ExpressionPotential::grad(const Vec& x) const {
    Vec g(m_);
    for (int i = 0; i < m_; ++i) {
        const int dirs[] = {i};
        g(i) = partial<D1>(*root_, x, dirs);
    }
    return g;
}

Mat ExpressionPotential::hess(const Vec& x) const {
    Mat h(m_, m_);
    for (int i = 0; i < m_; ++i)
        for (int j = i; j < m_; ++j) {
            const int dirs[] = {i, j};
            h(i, j) = h(j, i) = partial<D2>(*root_, x, dirs);
        }
    return h;
}

std::vector<Mat> ExpressionPotential::third(const Vec& x) const {
    std::vector<Mat> t(static_cast<std::size_t>(m_), Mat(m_, m_));
    for (int i = 0; i < m_; ++i)
        for (int j = i; j < m_; ++j)
            for (int k = j; k < m_; ++k) {
                const int dirs[] = {i, j, k};
                const double v = partial<D3>(*root_, x, dirs);
                const int p[3] = {i, j, k};
                const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
                for (const auto& q : perms) t[static_cast<std::size_t>(p[q[2]])](p[q[0]], p[q[1]]) = v;
            }
    return t;
}

double ExpressionPotential::fourth(const Vec& x, int i, int j, int k, int l) const {
    const int dirs[] = {i, j, k, l};
    return partial<D4>(*root_, x, dirs);
}

std::shared_ptr<const Potential> make_potential(const std::string& spec, Eigen::Index m) {
    if (spec.empty() || spec == "flat") return std::make_shared<FlatPotential>(m);
    return std::make_shared<ExpressionPotential>(spec, m);
}

}  // namespace toricflow
