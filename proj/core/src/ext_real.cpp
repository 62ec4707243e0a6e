#include "nmpg/ext_real.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nmpg {

ExtReal::ExtReal(double value) : value_(value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("ExtReal: value must be finite, use ExtReal::infinity() for +inf");
  }
}

double ExtReal::value() const {
  if (infinite_) throw std::logic_error("ExtReal::value() called on +inf");
  return value_;
}

double ExtReal::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

ExtReal operator+(ExtReal a, ExtReal b) {
  if (a.infinite_ || b.infinite_) return ExtReal::infinity();
  // Overflow is rejected by the constructor.
  return ExtReal(a.value_ + b.value_);
}

std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
  if (a.infinite_) return std::strong_ordering::greater;
  if (b.infinite_) return std::strong_ordering::less;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (a.value_ > b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
  if (x.is_infinite()) return os << "+inf";
  return os << x.value();
}

}  // namespace nmpg
