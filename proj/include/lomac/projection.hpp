#pragma once

#include "lomac/grid.hpp"
#include "lomac/lowrank.hpp"

namespace lomac {

// Mass, current and kinetic-energy densities on the spatial grid.
struct Moments1D {
  Vector rho;
  Vector j;
  Vector kappa;
};

// Weighted-orthogonal velocity basis {1, v, v^2 - c} and the scaled vectors
// w(v) * basis that carry a moment-matching distribution.
struct ProjectionBasis {
  VelocityGrid grid;
  double c = 0.0;
  // Squared weighted norms of 1, v and v^2 - c.
  double norm2_one = 0.0;
  double norm2_v = 0.0;
  double norm2_q = 0.0;
  // Point-weight-scaled basis vectors w(v_j) * {1, v_j, v_j^2 - c}.
  Vector scaled_one;
  Vector scaled_v;
  Vector scaled_q;
};

ProjectionBasis make_projection_basis(const VelocityGrid& grid);

// Plain-quadrature moments computed factor-wise: O(r N).
Moments1D moments(const LowRankMatrix& f, const VelocityGrid& grid);

// Rank-3 distribution whose moments are exactly m. Always three terms.
LowRankMatrix build_f1(const Moments1D& m, const ProjectionBasis& basis);

struct Decomposition {
  LowRankMatrix f1;
  LowRankMatrix f2;
};

// f = f1 + f2 with f1 = build_f1(moments(f)); f2 carries zero moments.
Decomposition conservative_decompose(const LowRankMatrix& f, const ProjectionBasis& basis);

// f1 + weighted truncation of f2. Moments of f are preserved.
LowRankMatrix conservative_truncate(const LowRankMatrix& f, const ProjectionBasis& basis,
                                    double eps,
                                    TruncationMode mode = TruncationMode::absolute);

// build_f1(target) + weighted truncation of the zero-moment part of f. The
// result has moments equal to `target`.
LowRankMatrix lomac_truncate(const LowRankMatrix& f, const Moments1D& target,
                             const ProjectionBasis& basis, double eps,
                             TruncationMode mode = TruncationMode::absolute);

}  // namespace lomac
