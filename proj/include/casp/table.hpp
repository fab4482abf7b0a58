#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "casp/csp.hpp"
#include "casp/error.hpp"

namespace casp {

inline constexpr std::size_t kTableCap = 1'000'000;

/// Dense view of a table constraint over the index space of its scope's
/// domains: cell (i1..ik) is allowed iff the tuple of i-th values satisfies it.
/// Indices here are 0-based.
class TableGrid {
 public:
  TableGrid(const CspInstance& inst, const Constraint& c, std::size_t cap = kTableCap) {
    if (c.kind != ConstraintKind::Table) throw Error("table grid needs a table constraint");
    std::size_t cells = 1;
    for (VarIndex v : c.scope) {
      const auto& dom = inst.variable(v).domain;
      if (cells > cap / dom.size())
        throw CapExceeded("table over " + std::to_string(c.scope.size()) + " variables exceeds " +
                          std::to_string(cap) + " combinations");
      cells *= dom.size();
      dims_.push_back(dom.size());
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t j = dims_.size(); j-- > 1;) strides_[j - 1] = strides_[j] * dims_[j];
    const bool listed_allowed = c.polarity == TablePolarity::Allowed;
    allowed_.assign(cells, !listed_allowed);
    for (const auto& t : c.tuples) {
      std::size_t cell = 0;
      bool inside = true;
      for (std::size_t j = 0; j < t.size() && inside; ++j) {
        auto idx = inst.variable(c.scope[j]).index_of(t[j]);
        if (!idx) inside = false;
        else cell += *idx * strides_[j];
      }
      if (inside) allowed_[cell] = listed_allowed;
    }
  }

  std::size_t arity() const { return dims_.size(); }
  std::size_t dim(std::size_t j) const { return dims_[j]; }
  std::size_t cells() const { return allowed_.size(); }
  bool allowed(std::size_t cell) const { return allowed_[cell]; }

  std::size_t cell_of(const std::vector<std::size_t>& idx) const {
    std::size_t cell = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) cell += idx[j] * strides_[j];
    return cell;
  }
  std::vector<std::size_t> index_of(std::size_t cell) const {
    std::vector<std::size_t> idx(dims_.size());
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      idx[j] = cell / strides_[j];
      cell %= strides_[j];
    }
    return idx;
  }

  /// Forbidden cells as index tuples, in lexicographic order.
  std::vector<std::vector<std::size_t>> forbidden() const {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t cell = 0; cell < allowed_.size(); ++cell)
      if (!allowed_[cell]) out.push_back(index_of(cell));
    return out;
  }

  /// Inclusive index box: lo[j] <= i_j <= hi[j].
  struct Box {
    std::vector<std::size_t> lo, hi;
  };

  /// Boxes containing no allowed cell that cannot be widened by one step in
  /// any direction without taking one in, ordered by (lo1, hi1, lo2, hi2, ...).
  /// Nullopt when more than `budget` candidate boxes would have to be examined.
  std::optional<std::vector<Box>> maximal_forbidden_boxes(std::size_t budget) const {
    const std::size_t k = dims_.size();
    std::size_t candidates = 1;
    for (std::size_t d : dims_) {
      std::size_t per = d * (d + 1) / 2;
      if (candidates > budget / per) return std::nullopt;
      candidates *= per;
    }
    // Prefix sums of allowed cells over a grid padded by one in every dimension.
    std::vector<std::size_t> pdims(k), pstrides(k, 1);
    for (std::size_t j = 0; j < k; ++j) pdims[j] = dims_[j] + 1;
    for (std::size_t j = k; j-- > 1;) pstrides[j - 1] = pstrides[j] * pdims[j];
    std::vector<std::size_t> prefix(pstrides[0] * pdims[0], 0);
    for (std::size_t cell = 0; cell < allowed_.size(); ++cell) {
      if (!allowed_[cell]) continue;
      auto idx = index_of(cell);
      std::size_t p = 0;
      for (std::size_t j = 0; j < k; ++j) p += (idx[j] + 1) * pstrides[j];
      prefix[p] = 1;
    }
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t p = 0; p < prefix.size(); ++p)
        if ((p / pstrides[j]) % pdims[j] != 0) prefix[p] += prefix[p - pstrides[j]];

    // Allowed cells in the box whose bounds are lo[j]..hi[j] (0-based, inclusive).
    auto count = [&](const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
      long long total = 0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::size_t p = 0;
        int sign = 1;
        for (std::size_t j = 0; j < k; ++j) {
          if (mask >> j & 1) {
            p += lo[j] * pstrides[j];
            sign = -sign;
          } else {
            p += (hi[j] + 1) * pstrides[j];
          }
        }
        total += sign * static_cast<long long>(prefix[p]);
      }
      return total;
    };

    std::vector<Box> out;
    std::vector<std::size_t> lo(k), hi(k);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
      if (j == k) {
        if (count(lo, hi) != 0) return;
        for (std::size_t m = 0; m < k; ++m) {
          if (lo[m] > 0) {
            --lo[m];
            bool blocked = count(lo, hi) != 0;
            ++lo[m];
            if (!blocked) return;
          }
          if (hi[m] + 1 < dims_[m]) {
            ++hi[m];
            bool blocked = count(lo, hi) != 0;
            --hi[m];
            if (!blocked) return;
          }
        }
        out.push_back({lo, hi});
        return;
      }
      for (lo[j] = 0; lo[j] < dims_[j]; ++lo[j])
        for (hi[j] = lo[j]; hi[j] < dims_[j]; ++hi[j]) rec(j + 1);
    };
    rec(0);
    return out;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::vector<bool> allowed_;
};

}  // namespace casp
