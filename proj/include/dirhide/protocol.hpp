#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dirhide/errors.hpp"

namespace dirhide {

/// N spins split into a first (axis-estimation) stage of N0 spins and a
/// second (tag-reading) stage of N1 = N - N0 spins.
struct SplitSpec {
  int n_spins = 4;
  int first_stage = 2;

  int second_stage() const { return n_spins - first_stage; }

  void validate() const {
    if (n_spins < 4 || n_spins % 2 != 0) throw DomainError("split needs an even number of spins >= 4");
    if (first_stage < 2 || first_stage > n_spins - 1) {
      throw DomainError("split needs 2 <= N0 <= N-1 (N=" + std::to_string(n_spins) +
                        ", N0=" + std::to_string(first_stage) + ")");
    }
  }

  /// The even split N0 = N1 = N/2.
  static SplitSpec half(int n_spins) { return SplitSpec{n_spins, n_spins / 2}; }
};

/// f: {0..N1} -> {0,1}. Bit 0 keeps the estimated axis as the guess, bit 1
/// reverses it. x counts second-stage spins found anti-aligned with the axis.
class GuessFunction {
 public:
  GuessFunction() = default;
  explicit GuessFunction(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
      if (b > 1) throw DomainError("guess function entries must be 0 or 1");
    }
  }

  static GuessFunction constant(int second_stage, std::uint8_t bit) {
    return GuessFunction(std::vector<std::uint8_t>(second_stage + 1, bit));
  }

  /// 0 at x = 0 and x = N1, 1 elsewhere.
  static GuessFunction edges_forward(int second_stage) {
    std::vector<std::uint8_t> b(second_stage + 1, 1);
    b.front() = 0;
    b.back() = 0;
    return GuessFunction(std::move(b));
  }

  /// Bits read from the low end of an integer: bit x of code is f(x).
  static GuessFunction from_code(int second_stage, std::uint64_t code) {
    std::vector<std::uint8_t> b(second_stage + 1);
    for (int x = 0; x <= second_stage; ++x) b[x] = static_cast<std::uint8_t>((code >> x) & 1U);
    return GuessFunction(std::move(b));
  }

  int second_stage() const { return static_cast<int>(bits_.size()) - 1; }
  std::uint8_t operator()(int x) const { return bits_.at(x); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  GuessFunction complement() const {
    auto b = bits_;
    for (auto& v : b) v ^= 1U;
    return GuessFunction(std::move(b));
  }

  GuessFunction with_flipped(int x) const {
    auto b = bits_;
    b.at(x) ^= 1U;
    return GuessFunction(std::move(b));
  }

  std::string str() const {
    std::string s;
    for (auto v : bits_) s.push_back(v ? '1' : '0');
    return s;
  }

  void check_matches(const SplitSpec& split) const {
    if (second_stage() != split.second_stage()) {
      throw DomainError("guess function length does not match N1+1");
    }
  }

  friend bool operator==(const GuessFunction&, const GuessFunction&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace dirhide
