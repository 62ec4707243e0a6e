#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nmpg/types.hpp"

namespace nmpg::harness {

/// Hooks for replacing suite components, used to confirm that a check can fail.
struct CheckSuiteOptions {
  /// Used in place of the library's ℓ0 term (λ = 0.5) by the prox oracle check.
  std::shared_ptr<const SeparableTerm> l0_term;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct NamedCheck {
  std::string name;
  std::string description;
  std::function<CheckOutcome(const CheckSuiteOptions&)> run;
};

std::vector<NamedCheck> default_checks();

/// Oracle comparison for one separable term on `cases` random (v, γ) pairs
/// plus the given tie probes. Each probe is a (v, γ) pair at which the prox
/// objective has two minimizers; the declared selection is 0.
CheckOutcome check_separable_prox(const SeparableTerm& term, std::size_t cases,
                                  const std::vector<std::pair<double, double>>& tie_probes,
                                  std::uint64_t seed);

/// Smallest l with (1 - sqrt(1 - p)) sqrt(l) >= 1 + sqrt(1 - p), by exhaustive
/// evaluation of l = 1..limit.
std::size_t scan_m(double p_min, std::size_t limit = 100000);

}  // namespace nmpg::harness
