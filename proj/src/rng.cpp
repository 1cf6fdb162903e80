#include "it2pf/rng.hpp"

#include <cmath>
#include <numbers>

#include "it2pf/errors.hpp"

namespace it2pf {

const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::InputDomain: return "input-domain";
    case ErrorCategory::Shape: return "shape";
    case ErrorCategory::Parameter: return "parameter";
    case ErrorCategory::Structural: return "structural";
    case ErrorCategory::Training: return "training";
    case ErrorCategory::EmptyInput: return "empty-input";
    case ErrorCategory::Format: return "format";
    case ErrorCategory::Version: return "version";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Demonstration: return "demonstration-invalid";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t id) {
  return Rng(splitmix64(seed ^ splitmix64(id + 1)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace it2pf
