#pragma once

#include "toricflow/polytope.hpp"

namespace fixtures {

using namespace toricflow;

inline IntVector ivec(std::initializer_list<long> v) {
    IntVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (long x : v) out(i++) = x;
    return out;
}

inline RatVector rvec(std::initializer_list<Rational> v) {
    RatVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& x : v) out(i++) = x;
    return out;
}

inline RatMatrix rrow(std::initializer_list<Rational> v) {
    RatMatrix out(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& x : v) out(0, i++) = x;
    return out;
}

/// Moment polytope of the canonical bundle of the projective plane.
inline Polytope kp2() {
    return Polytope({{ivec({0, 0, 1}), 0}, {ivec({1, 0, 1}), 0}, {ivec({0, 1, 1}), 0}, {ivec({-1, -1, 1}), -1}});
}

inline RatMatrix kp2_zeta() { return rrow({3, 1, 5}); }

/// Positive orthant of C^m.
inline Polytope flat(int m) {
    std::vector<Facet> f;
    for (int i = 0; i < m; ++i) {
        IntVector e = IntVector::Zero(m);
        e(i) = 1;
        f.push_back({e, 0});
    }
    return Polytope(std::move(f));
}

}  // namespace fixtures
