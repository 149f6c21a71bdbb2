#pragma once

#include <cstdint>
#include <optional>

namespace ulmc {

// Fixed-width bit vector, 1..64 bits, kept zero-extended in a u64.
// Signedness is an interpretation chosen per operation, never stored.
struct BitVec {
  uint8_t width = 8;
  uint64_t bits = 0;

  static constexpr uint64_t mask(unsigned w) {
    return w >= 64 ? ~0ull : ((1ull << w) - 1ull);
  }
  static constexpr BitVec of(unsigned w, uint64_t raw) {
    return BitVec{static_cast<uint8_t>(w), raw & mask(w)};
  }

  uint64_t uval() const { return bits; }

  // 2s-complement interpretation.
  int64_t sval() const {
    if (width == 64) return static_cast<int64_t>(bits);
    const uint64_t sign = 1ull << (width - 1);
    return (bits & sign) ? static_cast<int64_t>(bits | ~mask(width))
                         : static_cast<int64_t>(bits);
  }

  bool sign_bit() const { return ((bits >> (width - 1)) & 1ull) != 0; }

  bool operator==(const BitVec&) const = default;
};

inline BitVec bv_add(BitVec a, BitVec b) { return BitVec::of(a.width, a.bits + b.bits); }
inline BitVec bv_sub(BitVec a, BitVec b) { return BitVec::of(a.width, a.bits - b.bits); }
inline BitVec bv_mult(BitVec a, BitVec b) { return BitVec::of(a.width, a.bits * b.bits); }

// Unsigned quotient; nullopt on division by zero.
inline std::optional<BitVec> bv_div(BitVec a, BitVec b) {
  if (b.bits == 0) return std::nullopt;
  return BitVec::of(a.width, a.bits / b.bits);
}

// 2s-complement quotient truncated toward zero; nullopt on division by zero
// and on MIN/-1 (no representable result).
inline std::optional<BitVec> bv_sdiv(BitVec a, BitVec b) {
  if (b.bits == 0) return std::nullopt;
  const int64_t sa = a.sval(), sb = b.sval();
  const int64_t min_val = (a.width == 64) ? INT64_MIN : -(int64_t(1) << (a.width - 1));
  if (sa == min_val && sb == -1) return std::nullopt;
  return BitVec::of(a.width, static_cast<uint64_t>(sa / sb));
}

// Shift amounts are read unsigned; amounts >= width saturate to the
// mathematical limit (0 for logical shifts, all-sign-bits for AShr).
inline BitVec bv_lshl(BitVec a, BitVec amt) {
  if (amt.bits >= a.width) return BitVec::of(a.width, 0);
  return BitVec::of(a.width, a.bits << amt.bits);
}
inline BitVec bv_lshr(BitVec a, BitVec amt) {
  if (amt.bits >= a.width) return BitVec::of(a.width, 0);
  return BitVec::of(a.width, a.bits >> amt.bits);
}
inline BitVec bv_ashr(BitVec a, BitVec amt) {
  const uint64_t fill = a.sign_bit() ? BitVec::mask(a.width) : 0;
  if (amt.bits >= a.width) return BitVec::of(a.width, fill);
  uint64_t r = a.bits >> amt.bits;
  if (a.sign_bit()) r |= fill & ~(BitVec::mask(a.width) >> amt.bits);
  return BitVec::of(a.width, r);
}

inline bool bv_leq(BitVec a, BitVec b) { return a.bits <= b.bits; }
inline bool bv_geq(BitVec a, BitVec b) { return a.bits >= b.bits; }
inline bool bv_sleq(BitVec a, BitVec b) { return a.sval() <= b.sval(); }
inline bool bv_sgeq(BitVec a, BitVec b) { return a.sval() >= b.sval(); }

inline BitVec bv_zext(BitVec a, unsigned w) { return BitVec::of(w, a.bits); }
inline BitVec bv_sext(BitVec a, unsigned w) {
  uint64_t r = a.bits;
  if (a.sign_bit()) r |= BitVec::mask(w) & ~BitVec::mask(a.width);
  return BitVec::of(w, r);
}
inline BitVec bv_trunc(BitVec a, unsigned w) { return BitVec::of(w, a.bits); }

}  // namespace ulmc
