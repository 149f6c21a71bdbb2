#include "ulmc/dbm.hpp"

#include <algorithm>

namespace ulmc {

int64_t dbm_bound_add(int64_t a, int64_t b) {
  if (a >= DbmBound::kInf || b >= DbmBound::kInf) return DbmBound::kInf;
  // raw = 2v + nonstrict; sum keeps nonstrict only if both sides are.
  return 2 * (DbmBound::value(a) + DbmBound::value(b)) + ((a & 1) & (b & 1));
}

Dbm::Dbm(unsigned dim) : dim_(dim) {
  const unsigned n = dim_ + 1;
  m_.assign(n * n, DbmBound::kInf);
  for (unsigned i = 0; i < n; ++i) set(i, i, DbmBound::le(0));
  for (unsigned j = 0; j < n; ++j) set(0, j, DbmBound::le(0));  // clocks >= 0
}

Dbm Dbm::zero(unsigned dim) {
  Dbm d(dim);
  const unsigned n = dim + 1;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) d.set(i, j, DbmBound::le(0));
  return d;
}

bool Dbm::empty() const {
  for (unsigned i = 0; i <= dim_; ++i)
    if (at(i, i) < DbmBound::le(0)) return true;
  return false;
}

void Dbm::close() {
  const unsigned n = dim_ + 1;
  for (unsigned k = 0; k < n; ++k)
    for (unsigned i = 0; i < n; ++i) {
      const int64_t ik = at(i, k);
      if (ik >= DbmBound::kInf) continue;
      for (unsigned j = 0; j < n; ++j) {
        const int64_t cand = dbm_bound_add(ik, at(k, j));
        if (cand < at(i, j)) set(i, j, cand);
      }
    }
}

bool Dbm::constrain(unsigned i, unsigned j, int64_t bound) {
  if (bound >= at(i, j)) return !empty();
  set(i, j, bound);
  // Incremental re-closure through the tightened entry.
  const unsigned n = dim_ + 1;
  for (unsigned a = 0; a < n; ++a) {
    const int64_t ai = at(a, i);
    if (ai >= DbmBound::kInf) continue;
    for (unsigned b = 0; b < n; ++b) {
      const int64_t cand = dbm_bound_add(dbm_bound_add(ai, bound), at(j, b));
      if (cand < at(a, b)) set(a, b, cand);
    }
  }
  return !empty();
}

void Dbm::up() {
  for (unsigned i = 1; i <= dim_; ++i) set(i, 0, DbmBound::kInf);
}

void Dbm::down() {
  // New lower bound of x_i: relaxed to 0 but kept above the difference-implied
  // floors (canonical input assumed).
  for (unsigned i = 1; i <= dim_; ++i) {
    int64_t b = DbmBound::le(0);
    for (unsigned j = 1; j <= dim_; ++j)
      if (j != i && at(j, i) < b) b = at(j, i);
    set(0, i, b);
  }
  close();
}

void Dbm::free(unsigned i) {
  const unsigned n = dim_ + 1;
  for (unsigned j = 0; j < n; ++j) {
    if (j == i) continue;
    set(i, j, DbmBound::kInf);
    set(j, i, j == 0 ? DbmBound::le(0) : DbmBound::kInf);
  }
  close();
}

void Dbm::reset(unsigned i) {
  const unsigned n = dim_ + 1;
  for (unsigned j = 0; j < n; ++j) {
    set(i, j, at(0, j));
    set(j, i, at(j, 0));
  }
  set(i, i, DbmBound::le(0));
}

void Dbm::extrapolate(const std::vector<int64_t>& k) {
  // Classic maximum-constant extrapolation; entry -1 disables a clock.
  bool changed = false;
  const unsigned n = dim_ + 1;
  auto max_of = [&](unsigned idx) -> int64_t {
    return idx == 0 ? 0 : k[idx - 1];
  };
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      if (i == j) continue;
      const int64_t b = at(i, j);
      if (b >= DbmBound::kInf) continue;
      const int64_t ki = max_of(i), kj = max_of(j);
      if (ki >= 0 && DbmBound::value(b) > ki) {
        set(i, j, DbmBound::kInf);
        changed = true;
      } else if (kj >= 0 && DbmBound::value(b) < -kj) {
        set(i, j, DbmBound::lt(-kj));
        changed = true;
      }
    }
  if (changed) close();
}

bool Dbm::includes(const Dbm& other) const {
  for (size_t i = 0; i < m_.size(); ++i)
    if (m_[i] < other.m_[i]) return false;
  return true;
}

std::string Dbm::key() const {
  return std::string(reinterpret_cast<const char*>(m_.data()),
                     m_.size() * sizeof(int64_t));
}

}  // namespace ulmc
