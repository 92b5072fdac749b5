#pragma once

#include <optional>
#include <vector>

#include "mpexpr/rational.hpp"

namespace mpexpr {

/// Convex set in V-representation: the hull of finitely many rational points.
struct Polytope {
    std::vector<Vec> points;

    int dimension() const;
    void validate() const;  // nonempty, uniform dimension
};

/// Exact membership test; on success returns convex coefficients over the
/// generating points that reconstruct p.
std::optional<Vec> member(const Vec& p, const Polytope& poly);

bool contained(const Polytope& inner, const Polytope& outer);

/// Exact intersection test; on success returns a common point.
std::optional<Vec> intersects(const Polytope& a, const Polytope& b);

}  // namespace mpexpr
