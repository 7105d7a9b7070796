#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace rssd {

// First-order section (a*s + b) / (c*s + d).
//
// A section with `is_static` set is a pure gain b/d and carries no state; the
// flag is the only way to express c == 0, so a degenerate (0s+1)/(0s+1) read
// from a genome is rejected rather than silently treated as a gain.
struct Section {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;
  bool is_static = true;

  static Section gain(double k) { return Section{0.0, k, 0.0, 1.0, true}; }
  static Section first_order(double a, double b, double c, double d) {
    return Section{a, b, c, d, false};
  }

  double dc_gain() const { return b / d; }
  // Limit as s -> infinity; equals dc_gain() for static sections.
  double hf_gain() const { return is_static ? b / d : a / c; }
  std::complex<double> evaluate(std::complex<double> s) const {
    if (is_static) return {b / d, 0.0};
    return (a * s + b) / (c * s + d);
  }
  std::optional<double> pole() const {
    if (is_static) return std::nullopt;
    return -d / c;
  }
  std::optional<double> zero() const {
    if (is_static || a == 0.0) return std::nullopt;
    return -b / a;
  }
};

enum class BankSide { kInput, kOutput };

// Diagonal bank of sections, one per channel.
struct CompensatorBank {
  std::vector<Section> sections;
  BankSide side = BankSide::kInput;

  static CompensatorBank identity(int channels, BankSide side) {
    return CompensatorBank{std::vector<Section>(channels, Section::gain(1.0)),
                           side};
  }

  int channels() const { return static_cast<int>(sections.size()); }
  int states() const {
    int count = 0;
    for (const auto& s : sections) count += s.is_static ? 0 : 1;
    return count;
  }
};

}  // namespace rssd
