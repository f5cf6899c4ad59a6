#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ordelic {

enum class ErrorCode {
  kInvalidInput,
  kDimensionMismatch,
  kRankDeficient,
  kOrientation,
  kOrderability,
  kNoRoot,
  kEmptyIntersection,
  kDegenerate,
  kSearchFailed,
};

/// Library-wide exception; `code()` lets callers map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kSimplexTol = 1e-12;

/// Probability vector over n outcomes. Construction validates membership in
/// the simplex; inputs within kSimplexTol are renormalized, others rejected.
class SimplexPoint {
 public:
  SimplexPoint() = default;
  explicit SimplexPoint(std::vector<double> probs);

  static SimplexPoint vertex(std::size_t n, std::size_t index);
  static SimplexPoint centroid(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  bool operator==(const SimplexPoint&) const = default;

 private:
  std::vector<double> probs_;
};

/// True if `v` passes the simplex check at tolerance `tol`.
bool in_simplex(std::span<const double> v, double tol = kSimplexTol);

enum class NormKind { kL1, kL2, kLinf };

std::string_view norm_name(NormKind k);
NormKind parse_norm(std::string_view s);
/// Diameter of the simplex under `k` (2, sqrt(2), 1).
double simplex_diameter(NormKind k);

double norm(std::span<const double> v, NormKind k);
double norm_distance(const SimplexPoint& a, const SimplexPoint& b, NormKind k);

/// Dual norm of a gradient restricted to the tangent space {v : sum v = 0}.
/// This is the Lipschitz constant of p -> <g, p> on the simplex under `k`.
double tangent_dual_norm(std::span<const double> g, NormKind k);

double dot(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Random numbers. The uniform and exponential draws are computed from raw
// engine bits so that outputs are identical across standard libraries.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                          // [0, 1)
  double uniform_open();                     // (0, 1)
  double uniform(double lo, double hi);
  double exponential();
  double normal();
  std::size_t index(std::size_t n);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed for a named subsystem from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Uniform point on the simplex via normalized exponential spacings.
SimplexPoint sample_simplex_point(std::size_t n, Rng& rng);
std::vector<SimplexPoint> sample_simplex(std::size_t n, std::size_t count,
                                         std::uint64_t seed);

/// Symmetric Dirichlet(alpha) draw via Marsaglia-Tsang gamma variates.
SimplexPoint sample_dirichlet(std::size_t n, double alpha, Rng& rng);

// ---------------------------------------------------------------------------
// Labeled data.

struct LabeledRow {
  std::string x_id;
  int y = 1;  // 1-based outcome index
};

class LabeledDataset {
 public:
  LabeledDataset(std::size_t n, std::vector<LabeledRow> rows);

  std::size_t outcomes() const { return n_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<LabeledRow>& rows() const { return rows_; }

 private:
  std::size_t n_;
  std::vector<LabeledRow> rows_;
};

template <typename Key>
struct ConditionalEstimate {
  std::map<Key, SimplexPoint> conditionals;
  std::map<Key, std::size_t> counts;
  std::vector<Key> empty_bins;
};

/// Empirical label frequencies per bin. `bin_of` maps each x_id to a key;
/// keys in `declared_bins` that receive no rows are reported as empty.
template <typename Key, typename BinFn>
ConditionalEstimate<Key> empirical_conditional(
    const LabeledDataset& data, BinFn&& bin_of,
    const std::vector<Key>& declared_bins = {}) {
  const std::size_t n = data.outcomes();
  std::map<Key, std::vector<double>> tallies;
  std::map<Key, std::size_t> counts;
  for (const auto& row : data.rows()) {
    Key key = bin_of(row.x_id);
    auto& t = tallies[key];
    if (t.empty()) t.assign(n, 0.0);
    t[static_cast<std::size_t>(row.y - 1)] += 1.0;
    ++counts[key];
  }
  ConditionalEstimate<Key> out;
  for (auto& [key, t] : tallies) {
    const double total = static_cast<double>(counts[key]);
    for (double& v : t) v /= total;
    out.conditionals.emplace(key, SimplexPoint(std::move(t)));
  }
  out.counts = std::move(counts);
  for (const auto& key : declared_bins)
    if (!out.conditionals.contains(key)) out.empty_bins.push_back(key);
  return out;
}

/// Ternary plot coordinates for n = 3: vertex 1 at (0,0), vertex 3 at (1,0),
/// vertex 2 at (1/2, sqrt(3)/2).
std::pair<double, double> ternary_plot_coords(const SimplexPoint& p);
SimplexPoint from_ternary_plot_coords(double x, double y);

}  // namespace ordelic
