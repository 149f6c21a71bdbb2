#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ulmc {

// Difference-bound matrix over clocks {x_1..x_n, G} plus the zero reference
// at index 0. Entry (i,j) bounds x_i - x_j. Bounds are encoded in an int64:
// 2*value+1 for <=value, 2*value for <value, with a large sentinel for
// infinity; comparison on the raw encoding orders bounds correctly.

struct DbmBound {
  static constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;
  static constexpr int64_t le(int64_t v) { return 2 * v + 1; }
  static constexpr int64_t lt(int64_t v) { return 2 * v; }
  static constexpr int64_t value(int64_t b) { return b >> 1; }
  static constexpr bool is_strict(int64_t b) { return (b & 1) == 0; }
};

// (v1,s1)+(v2,s2) = (v1+v2, strict iff either side is strict).
int64_t dbm_bound_add(int64_t a, int64_t b);

class Dbm {
 public:
  Dbm() = default;
  // dim = number of real clocks (excluding the zero reference).
  explicit Dbm(unsigned dim);

  static Dbm zero(unsigned dim);  // all clocks exactly 0

  unsigned dim() const { return dim_; }
  int64_t at(unsigned i, unsigned j) const { return m_[i * (dim_ + 1) + j]; }
  void set(unsigned i, unsigned j, int64_t b) { m_[i * (dim_ + 1) + j] = b; }

  bool empty() const;
  void close();  // Floyd-Warshall canonicalization
  // Intersect with x_i - x_j `bound`; returns false if the zone got empty.
  // Keeps the matrix canonical.
  bool constrain(unsigned i, unsigned j, int64_t bound);
  void up();               // open upper bounds (time elapse)
  void down();             // past closure: points that can delay into the zone
  void reset(unsigned i);  // x_i := 0
  void free(unsigned i);   // drop every constraint on x_i
  // Extrapolate with per-clock max constants (index 1..dim; entry -1 = no
  // extrapolation for that clock). Re-canonicalizes.
  void extrapolate(const std::vector<int64_t>& k);

  bool includes(const Dbm& other) const;  // this ⊇ other (both canonical)

  // Bounds of clock i within the zone: [lo, hi], hi may be kInf.
  int64_t clock_min(unsigned i) const { return -DbmBound::value(at(0, i)); }
  int64_t clock_max(unsigned i) const {
    return at(i, 0) >= DbmBound::kInf ? DbmBound::kInf : DbmBound::value(at(i, 0));
  }

  std::string key() const;  // byte key of the canonical matrix
  bool operator==(const Dbm&) const = default;

 private:
  unsigned dim_ = 0;
  std::vector<int64_t> m_;
};

}  // namespace ulmc
