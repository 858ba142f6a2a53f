#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cavity {

/// Exact accumulator for doubles: the running sum is kept as a pair of wide
/// fixed-point integers (positive and negative magnitudes), so the result is
/// independent of addition order and of how terms are split across ranks.
/// Rounding to double happens once, in value().
///
/// Every finite double is an integer multiple of 2^-1074; the accumulator
/// stores sum * 2^1140 in 35 x 64-bit limbs (2240 bits), which covers the
/// full double range with >60 bits of headroom for counts up to 2^60 terms.
class ReproSum {
 public:
  static constexpr int kLimbs = 35;
  static constexpr std::size_t kSerializedWords = 2 * kLimbs;

  void add(double x) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("repro_sum: non-finite term");
    }
    if (x == 0.0) return;
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    const int exp_field = static_cast<int>((bits >> 52) & 0x7FF);
    std::uint64_t mant = bits & ((1ULL << 52) - 1);
    int off;
    if (exp_field == 0) {  // subnormal: value = mant * 2^-1074
      off = 66;
    } else {  // normal: value = (mant|2^52) * 2^(exp_field-1075)
      mant |= 1ULL << 52;
      off = exp_field + 65;
    }
    accumulate(bits >> 63 ? neg_ : pos_, mant, off);
  }

  void merge(const ReproSum& o) {
    add_limbs(pos_, o.pos_);
    add_limbs(neg_, o.neg_);
  }

  /// Rounds the exact sum to the nearest double (ties to even).
  double value() const {
    std::array<std::uint64_t, kLimbs> mag;
    int sign = compare(pos_, neg_);
    if (sign == 0) return 0.0;
    if (sign > 0) {
      sub_limbs(mag, pos_, neg_);
    } else {
      sub_limbs(mag, neg_, pos_);
    }
    int h = top_bit(mag);  // >= 0 since magnitude is nonzero
    std::uint64_t mantissa;
    int exp2;  // result = mantissa * 2^exp2
    if (h <= 52) {
      mantissa = extract_bits(mag, 0, h + 1);
      exp2 = -1140;
    } else {
      mantissa = extract_bits(mag, h - 52, 53);
      const bool guard = get_bit(mag, h - 53);
      const bool sticky = any_bits_below(mag, h - 53);
      if (guard && (sticky || (mantissa & 1))) {
        if (++mantissa == (1ULL << 53)) {
          mantissa >>= 1;
          ++h;
        }
      }
      exp2 = h - 52 - 1140;
    }
    double r = std::ldexp(static_cast<double>(mantissa), exp2);
    return sign > 0 ? r : -r;
  }

  void serialize(std::uint64_t* out) const {
    for (int i = 0; i < kLimbs; ++i) out[i] = pos_[i];
    for (int i = 0; i < kLimbs; ++i) out[kLimbs + i] = neg_[i];
  }
  static ReproSum deserialize(const std::uint64_t* in) {
    ReproSum s;
    for (int i = 0; i < kLimbs; ++i) s.pos_[i] = in[i];
    for (int i = 0; i < kLimbs; ++i) s.neg_[i] = in[kLimbs + i];
    return s;
  }

  friend bool operator==(const ReproSum&, const ReproSum&) = default;

 private:
  using Limbs = std::array<std::uint64_t, kLimbs>;

  static void accumulate(Limbs& limbs, std::uint64_t mant, int off) {
    const int l = off >> 6;
    const int s = off & 63;
    const unsigned __int128 wide = static_cast<unsigned __int128>(mant) << s;
    std::uint64_t carry = 0;
    std::uint64_t w0 = static_cast<std::uint64_t>(wide);
    std::uint64_t w1 = static_cast<std::uint64_t>(wide >> 64);
    std::uint64_t t = limbs[l] + w0;
    carry = t < w0 ? 1 : 0;
    limbs[l] = t;
    for (int i = l + 1; i < kLimbs && (w1 || carry); ++i) {
      unsigned __int128 u = static_cast<unsigned __int128>(limbs[i]) + w1 + carry;
      limbs[i] = static_cast<std::uint64_t>(u);
      carry = static_cast<std::uint64_t>(u >> 64);
      w1 = 0;
    }
  }

  static void add_limbs(Limbs& a, const Limbs& b) {
    std::uint64_t carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
      unsigned __int128 u = static_cast<unsigned __int128>(a[i]) + b[i] + carry;
      a[i] = static_cast<std::uint64_t>(u);
      carry = static_cast<std::uint64_t>(u >> 64);
    }
  }

  // lexicographic compare from the most significant limb
  static int compare(const Limbs& a, const Limbs& b) {
    for (int i = kLimbs - 1; i >= 0; --i) {
      if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
    }
    return 0;
  }

  // out = a - b, requires a >= b
  static void sub_limbs(Limbs& out, const Limbs& a, const Limbs& b) {
    std::uint64_t borrow = 0;
    for (int i = 0; i < kLimbs; ++i) {
      std::uint64_t bi = b[i] + borrow;
      borrow = (bi < b[i]) || (a[i] < bi) ? 1 : 0;
      out[i] = a[i] - bi;
    }
  }

  static int top_bit(const Limbs& m) {
    for (int i = kLimbs - 1; i >= 0; --i) {
      if (m[i]) return i * 64 + 63 - std::countl_zero(m[i]);
    }
    return -1;
  }

  static bool get_bit(const Limbs& m, int bit) {
    return (m[bit >> 6] >> (bit & 63)) & 1;
  }

  // `count` <= 53 bits starting at `lo`
  static std::uint64_t extract_bits(const Limbs& m, int lo, int count) {
    const int w = lo >> 6;
    const int s = lo & 63;
    std::uint64_t r = m[w] >> s;
    if (s != 0 && w + 1 < kLimbs) r |= m[w + 1] << (64 - s);
    if (count < 64) r &= (1ULL << count) - 1;
    return r;
  }

  static bool any_bits_below(const Limbs& m, int bit) {
    const int w = bit >> 6;
    const int s = bit & 63;
    if (s != 0 && (m[w] & ((1ULL << s) - 1))) return true;
    for (int i = w - 1; i >= 0; --i) {
      if (m[i]) return true;
    }
    return false;
  }

  Limbs pos_{};
  Limbs neg_{};
};

}  // namespace cavity
