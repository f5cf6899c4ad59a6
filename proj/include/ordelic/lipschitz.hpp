#pragma once

#include <span>
#include <vector>

#include "ordelic/piecewise.hpp"
#include "ordelic/simplex.hpp"

namespace ordelic {

/// One piece of a piecewise ratio of expectations:
///   Gamma(p) = <num, p> / <den, p> + offset   on   {p : <h, p> >= 0 for h in halfspaces}.
struct RatioPiece {
  std::vector<double> num;
  std::vector<double> den;
  double offset = 0.0;
  std::vector<std::vector<double>> halfspaces;

  double value(const SimplexPoint& p) const;
  /// Euclidean gradient of the extension of the piece to R^n.
  std::vector<double> gradient(const SimplexPoint& p) const;
};

/// Pieces of the property elicited by an identification function whose
/// outcome components share breakpoints t_0 < ... < t_m. Piece j covers roots
/// in [t_{j-1}, t_j], i.e. E V(t_{j-1}) <= 0 <= E V(t_j).
std::vector<RatioPiece> ratio_pieces(std::span<const PiecewiseAffine> v_per_outcome);

/// Vertices of the simplex intersected with at most two homogeneous halfspaces.
std::vector<SimplexPoint> region_vertices(std::size_t n,
                                          const std::vector<std::vector<double>>& halfspaces);

/// Sup over the simplex of the tangent dual norm of the gradient, taken over
/// all pieces. The supremum of a linear-fractional gradient norm on a polytope
/// is attained on its edges, so the search covers every segment between
/// region vertices.
double piecewise_lipschitz_bound(const std::vector<RatioPiece>& pieces, std::size_t n,
                                 NormKind norm);

}  // namespace ordelic
