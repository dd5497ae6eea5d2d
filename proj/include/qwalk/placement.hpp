#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace qwalk {

// Absorber distance: a positive site index, or the infinite-boundary limit.
class Placement {
 public:
  constexpr Placement() = default;

  static constexpr Placement finite(int m) {
    if (m < 1) throw std::domain_error("Placement: boundary must be >= 1");
    return Placement(m);
  }
  static constexpr Placement infinite() { return Placement(kInfinite); }

  // Accepts "3", "inf", "infinity" (case-insensitive).
  static Placement parse(const std::string& text);

  constexpr bool is_infinite() const { return m_ == kInfinite; }
  constexpr int distance() const {
    if (is_infinite()) throw std::domain_error("Placement: infinite boundary has no distance");
    return m_;
  }

  std::string str() const { return is_infinite() ? "inf" : std::to_string(m_); }

  friend constexpr bool operator==(Placement a, Placement b) = default;
  // Finite ascending, infinite last.
  friend constexpr bool operator<(Placement a, Placement b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return a.m_ < b.m_;
  }

 private:
  static constexpr int kInfinite = -1;
  constexpr explicit Placement(int m) : m_(m) {}
  int m_ = 1;
};

}  // namespace qwalk
