#pragma once

#include <cstddef>
#include <string_view>
#include <variant>

#include "gdpa/vec.hpp"

namespace gdpa {

/// The feasible set X that the primal iterate is projected onto.
class ProjectionSpec {
 public:
  struct Identity {};
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Ball {
    Vector center;
    double radius;
  };
  struct NonnegativeOrthant {};
  /// Consecutive blocks of `block_size` coordinates each lie on a probability simplex.
  struct SimplexBlocks {
    std::size_t block_size;
  };

  enum class Kind { Identity, Box, Ball, NonnegativeOrthant, SimplexBlocks };

  ProjectionSpec() = default;

  static ProjectionSpec identity();
  /// Throws std::invalid_argument unless lower <= upper componentwise.
  static ProjectionSpec box(Vector lower, Vector upper);
  static ProjectionSpec ball(Vector center, double radius);
  static ProjectionSpec nonnegative_orthant();
  static ProjectionSpec simplex_blocks(std::size_t block_size);

  Kind kind() const { return static_cast<Kind>(set_.index()); }
  std::string_view kind_name() const;

  /// Whether a vector of length `dim` is a valid argument for project().
  bool accepts_dimension(std::size_t dim) const;

  /// Euclidean projection. Throws std::invalid_argument on a dimension mismatch.
  Vector project(ConstSpan v) const;

  const Box* as_box() const { return std::get_if<Box>(&set_); }
  const Ball* as_ball() const { return std::get_if<Ball>(&set_); }
  const SimplexBlocks* as_simplex() const { return std::get_if<SimplexBlocks>(&set_); }

 private:
  using Set = std::variant<Identity, Box, Ball, NonnegativeOrthant, SimplexBlocks>;
  explicit ProjectionSpec(Set set) : set_{std::move(set)} {}

  Set set_{Identity{}};
};

inline Vector project(const ProjectionSpec& spec, ConstSpan v) { return spec.project(v); }

/// Projects v onto the probability simplex {u >= 0, sum u = 1}.
Vector project_simplex(ConstSpan v);

}  // namespace gdpa
