#pragma once

#include <compare>
#include <iosfwd>

namespace nmpg {

/// A value in R ∪ {+∞}.
///
/// +∞ is an explicit tag, distinct from the IEEE infinity. -∞ and NaN are not
/// representable; constructing an ExtReal from a non-finite double throws
/// std::domain_error.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  explicit ExtReal(double value);

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// The finite value; throws std::logic_error on +∞.
  double value() const;

  /// The finite value, or IEEE +inf. Only for output and plotting.
  double to_double() const;

  friend ExtReal operator+(ExtReal a, ExtReal b);
  friend ExtReal operator+(ExtReal a, double b) { return a + ExtReal(b); }
  friend ExtReal operator+(double a, ExtReal b) { return ExtReal(a) + b; }

  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b);
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  bool infinite_ = false;
  double value_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

}  // namespace nmpg
