#pragma once

// Exact sup-norm ball geometry in R^k. A ball B(x, r) is the closed cube
// prod [x_i - r, x_i + r]; every predicate here is decided over the
// rationals.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mtp/dimension_function.hpp"
#include "mtp/exact.hpp"
#include "mtp/magnitude.hpp"

namespace mtp {

class Ball {
 public:
  Ball(std::vector<Rational> center, Rational radius);
  static Ball interval(const Rational& center, const Rational& radius) { return Ball({center}, radius); }

  std::size_t dim() const { return center_.size(); }
  const std::vector<Rational>& center() const { return center_; }
  const Rational& radius() const { return radius_; }
  Rational lo(std::size_t axis) const { return center_[axis] - radius_; }
  Rational hi(std::size_t axis) const { return center_[axis] + radius_; }

  friend bool operator==(const Ball& a, const Ball& b) {
    return a.radius_ == b.radius_ && a.center_ == b.center_;
  }

 private:
  std::vector<Rational> center_;
  Rational radius_;
};

// Axis-aligned box; intersections of cubes are boxes, not cubes.
struct Box {
  std::vector<Rational> lo;
  std::vector<Rational> hi;

  static Box of(const Ball& b);
  std::size_t dim() const { return lo.size(); }
  Rational volume() const;
};

std::optional<Box> intersection(const Box& a, const Box& b);

bool intersects(const Ball& a, const Ball& b);
// outer ⊇ inner
bool contains(const Ball& outer, const Ball& inner);
bool contains_point(const Ball& b, std::span<const Rational> point);
bool pairwise_disjoint(std::span<const Ball> balls);

// λB: same center, radius λr.
Ball scale_ball(const Ball& b, const Rational& lambda);

// Lebesgue measure (2r)^k, the stand-in for k-dimensional Hausdorff measure.
Rational lebesgue_measure(const Ball& b);
// V^k(B) = r^k.
Rational k_volume(const Ball& b);
// V^f(B) = f(r).
Magnitude f_volume(const Ball& b, const DimensionFunction& f);

// A ball whose radius is an exact but possibly irrational magnitude.
class TransformedBall {
 public:
  TransformedBall(std::vector<Rational> center, Magnitude radius);

  const std::vector<Rational>& center() const { return center_; }
  const Magnitude& radius() const { return radius_; }
  std::size_t dim() const { return center_.size(); }

  // The ball itself when the radius is rational.
  std::optional<Ball> exact() const;
  // Rational balls sandwiching this one: inner() ⊆ this ⊆ outer().
  Ball inner(unsigned bits = 128) const;
  Ball outer(unsigned bits = 128) const;

 private:
  std::vector<Rational> center_;
  Magnitude radius_;
};

bool operator==(const TransformedBall& a, const Ball& b);

// B^f = B(x, g^-1(f(r))) for ambient g = Power(a); with g = Power(k) this is
// B(x, f(r)^(1/k)). Throws ConfigurationError for a power-log ambient.
TransformedBall transform_ball(const Ball& b, const DimensionFunction& f, const DimensionFunction& g);

// Exact Lebesgue measure of a finite union (k <= 2).
Rational union_measure(std::span<const Ball> balls);
Rational union_measure(std::span<const Box> boxes);
// Measure of B minus the union of `balls`.
Rational diff_measure(const Ball& b, std::span<const Ball> balls);
// ∪covered ⊆ ∪cover, decided by measure for closed cubes (k <= 2).
bool union_covers(std::span<const Ball> covered, std::span<const Ball> cover);

// Greedy Vitali selection: radius descending, ties by lexicographic center;
// a ball is kept if disjoint from every ball kept so far. Returns indices
// into `family` in selection order.
std::vector<std::size_t> five_r_select(std::span<const Ball> family);
std::vector<Ball> five_r_cover(std::span<const Ball> family);

struct ContainmentConclusions {
  bool radius_bound = false;   // r_M <= r_A
  bool scaled_inside = false;  // cM ⊆ 5A
};

// For balls with A ∩ M ≠ ∅ and A \ cM ≠ ∅ (c >= 3) evaluates both
// conclusions exactly. Throws PreconditionViolated if either hypothesis fails.
ContainmentConclusions geometric_containment_check(const Ball& a, const Ball& m, const Rational& c);

}  // namespace mtp
