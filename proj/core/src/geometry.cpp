#include "mtp/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mtp/error.hpp"

namespace mtp {

Ball::Ball(std::vector<Rational> center, Rational radius)
    : center_(std::move(center)), radius_(std::move(radius)) {
  if (center_.empty()) throw InvalidArgument("ball needs dimension >= 1");
  if (radius_ <= 0) throw InvalidArgument("ball radius must be positive, got " + to_string(radius_));
  for (auto& c : center_) c.canonicalize();
  radius_.canonicalize();
}

Box Box::of(const Ball& b) {
  Box box;
  box.lo.reserve(b.dim());
  box.hi.reserve(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    box.lo.push_back(b.lo(i));
    box.hi.push_back(b.hi(i));
  }
  return box;
}

Rational Box::volume() const {
  Rational v(1);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] <= lo[i]) return Rational(0);
    v *= hi[i] - lo[i];
  }
  return v;
}

std::optional<Box> intersection(const Box& a, const Box& b) {
  Box out;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.lo.push_back(max(a.lo[i], b.lo[i]));
    out.hi.push_back(min(a.hi[i], b.hi[i]));
    if (out.hi[i] < out.lo[i]) return std::nullopt;
  }
  return out;
}

namespace {

void require_same_dim(const Ball& a, const Ball& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("balls of different dimension");
}

}  // namespace

bool intersects(const Ball& a, const Ball& b) {
  require_same_dim(a, b);
  Rational reach = a.radius() + b.radius();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (abs(a.center()[i] - b.center()[i]) > reach) return false;
  }
  return true;
}

bool contains(const Ball& outer, const Ball& inner) {
  require_same_dim(outer, inner);
  if (inner.radius() > outer.radius()) return false;
  Rational slack = outer.radius() - inner.radius();
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    if (abs(outer.center()[i] - inner.center()[i]) > slack) return false;
  }
  return true;
}

bool contains_point(const Ball& b, std::span<const Rational> point) {
  if (point.size() != b.dim()) throw InvalidArgument("point of wrong dimension");
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (abs(b.center()[i] - point[i]) > b.radius()) return false;
  }
  return true;
}

bool pairwise_disjoint(std::span<const Ball> balls) {
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Rational> lo0;
  lo0.reserve(balls.size());
  for (const auto& b : balls) lo0.push_back(b.lo(0));
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lo0[x] < lo0[y]; });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Ball& p = balls[order[a]];
    Rational hi0 = p.hi(0);
    for (std::size_t b = a + 1; b < order.size() && lo0[order[b]] <= hi0; ++b) {
      if (intersects(p, balls[order[b]])) return false;
    }
  }
  return true;
}

Ball scale_ball(const Ball& b, const Rational& lambda) {
  if (lambda <= 0) throw InvalidArgument("scale factor must be positive, got " + to_string(lambda));
  return Ball(b.center(), b.radius() * lambda);
}

Rational lebesgue_measure(const Ball& b) {
  return pow(2 * b.radius(), static_cast<long>(b.dim()));
}

Rational k_volume(const Ball& b) { return pow(b.radius(), static_cast<long>(b.dim())); }

Magnitude f_volume(const Ball& b, const DimensionFunction& f) { return f(b.radius()); }

TransformedBall::TransformedBall(std::vector<Rational> center, Magnitude radius)
    : center_(std::move(center)), radius_(std::move(radius)) {
  if (radius_.is_zero()) throw InvalidArgument("transformed ball with zero radius");
}

std::optional<Ball> TransformedBall::exact() const {
  if (auto r = radius_.rational()) return Ball(center_, *r);
  return std::nullopt;
}

Ball TransformedBall::inner(unsigned bits) const {
  Enclosure e = radius_.enclose(bits);
  return Ball(center_, e.lo);
}

Ball TransformedBall::outer(unsigned bits) const {
  Enclosure e = radius_.enclose(bits);
  return Ball(center_, e.hi);
}

bool operator==(const TransformedBall& a, const Ball& b) {
  return a.center() == b.center() && compare(a.radius(), Magnitude(b.radius())) == 0;
}

TransformedBall transform_ball(const Ball& b, const DimensionFunction& f, const DimensionFunction& g) {
  if (!g.is_power()) throw ConfigurationError("ambient function must be a power to be inverted");
  Magnitude volume = f(b.radius());
  return TransformedBall(b.center(), volume.pow(1 / g.exponent()));
}

namespace {

Rational union_length(std::vector<std::pair<Rational, Rational>>& intervals) {
  std::sort(intervals.begin(), intervals.end());
  Rational total(0);
  bool open = false;
  Rational cur_lo, cur_hi;
  for (auto& [lo, hi] : intervals) {
    if (!open || lo > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
      open = true;
    } else if (hi > cur_hi) {
      cur_hi = hi;
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

}  // namespace

Rational union_measure(std::span<const Box> boxes) {
  if (boxes.empty()) return Rational(0);
  std::size_t k = boxes.front().dim();
  for (const auto& b : boxes) {
    if (b.dim() != k) throw InvalidArgument("boxes of different dimension");
  }
  if (k == 1) {
    std::vector<std::pair<Rational, Rational>> iv;
    iv.reserve(boxes.size());
    for (const auto& b : boxes) {
      if (b.hi[0] > b.lo[0]) iv.emplace_back(b.lo[0], b.hi[0]);
    }
    return union_length(iv);
  }
  if (k == 2) {
    std::vector<Rational> xs;
    xs.reserve(2 * boxes.size());
    for (const auto& b : boxes) {
      xs.push_back(b.lo[0]);
      xs.push_back(b.hi[0]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    Rational total(0);
    std::vector<std::pair<Rational, Rational>> iv;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
      iv.clear();
      for (const auto& b : boxes) {
        if (b.lo[0] <= xs[s] && b.hi[0] >= xs[s + 1] && b.hi[1] > b.lo[1]) iv.emplace_back(b.lo[1], b.hi[1]);
      }
      if (!iv.empty()) total += (xs[s + 1] - xs[s]) * union_length(iv);
    }
    return total;
  }
  throw ConfigurationError("exact union measure supports k <= 2, got k = " + std::to_string(k));
}

Rational union_measure(std::span<const Ball> balls) {
  std::vector<Box> boxes;
  boxes.reserve(balls.size());
  for (const auto& b : balls) boxes.push_back(Box::of(b));
  return union_measure(boxes);
}

Rational diff_measure(const Ball& b, std::span<const Ball> balls) {
  Box outer = Box::of(b);
  std::vector<Box> clipped;
  for (const auto& x : balls) {
    if (x.dim() != b.dim()) throw InvalidArgument("balls of different dimension");
    if (auto c = intersection(outer, Box::of(x))) clipped.push_back(std::move(*c));
  }
  if (b.dim() > 2) throw ConfigurationError("exact union measure supports k <= 2");
  return lebesgue_measure(b) - union_measure(clipped);
}

bool union_covers(std::span<const Ball> covered, std::span<const Ball> cover) {
  std::vector<Ball> both(cover.begin(), cover.end());
  both.insert(both.end(), covered.begin(), covered.end());
  return union_measure(both) == union_measure(cover);
}

std::vector<std::size_t> five_r_select(std::span<const Ball> family) {
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Ball& x = family[a];
    const Ball& y = family[b];
    if (x.radius() != y.radius()) return x.radius() > y.radius();
    return x.center() < y.center();
  });
  std::vector<std::size_t> chosen;
  if (!family.empty() && family.front().dim() == 1) {
    // Chosen intervals are disjoint, so only the neighbours by left end can
    // meet a candidate.
    std::map<Rational, std::size_t> by_lo;
    for (std::size_t idx : order) {
      const Ball& b = family[idx];
      Rational lo = b.lo(0), hi = b.hi(0);
      auto next = by_lo.lower_bound(lo);
      bool clash = false;
      if (next != by_lo.end() && next->first <= hi) clash = true;
      if (!clash && next != by_lo.begin()) {
        auto prev = std::prev(next);
        if (family[prev->second].hi(0) >= lo) clash = true;
      }
      if (!clash) {
        by_lo.emplace(lo, idx);
        chosen.push_back(idx);
      }
    }
    return chosen;
  }
  for (std::size_t idx : order) {
    bool clash = false;
    for (std::size_t c : chosen) {
      if (intersects(family[idx], family[c])) {
        clash = true;
        break;
      }
    }
    if (!clash) chosen.push_back(idx);
  }
  return chosen;
}

std::vector<Ball> five_r_cover(std::span<const Ball> family) {
  std::vector<Ball> out;
  for (std::size_t idx : five_r_select(family)) out.push_back(family[idx]);
  return out;
}

ContainmentConclusions geometric_containment_check(const Ball& a, const Ball& m, const Rational& c) {
  if (c < 3) throw PreconditionViolated("scaling constant must be >= 3, got " + to_string(c));
  if (!intersects(a, m)) throw PreconditionViolated("A and M are disjoint");
  Ball cm = scale_ball(m, c);
  if (contains(cm, a)) throw PreconditionViolated("A is contained in cM");
  ContainmentConclusions out;
  out.radius_bound = m.radius() <= a.radius();
  out.scaled_inside = contains(scale_ball(a, 5), cm);
  return out;
}

}  // namespace mtp
