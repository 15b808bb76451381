#pragma once

#include <iosfwd>
#include <vector>

#include "ekcg/core.hpp"

namespace ekcg {

/// Disjoint covering of {0..n-1} by t nonempty subdomains.
///
/// Subdomain ids are 0-based in memory and 1-based in the text format.
class Partition {
 public:
  Partition() = default;

  /// owner[i] is the subdomain of index i; ids must cover 0..t-1.
  Partition(std::vector<int> owner, int t);

  Index size() const { return static_cast<Index>(owner_.size()); }
  int count() const { return count_; }
  int owner(Index i) const { return owner_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& owners() const { return owner_; }
  const std::vector<Index>& members(int subdomain) const {
    return members_[static_cast<std::size_t>(subdomain)];
  }

  /// True when every subdomain is a consecutive index range and the ranges
  /// appear in subdomain order.
  bool contiguous() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.count_ == b.count_ && a.owner_ == b.owner_;
  }

 private:
  std::vector<int> owner_;
  int count_ = 0;
  std::vector<std::vector<Index>> members_;
};

/// Consecutive ranges; the first n mod t subdomains get one extra index.
Partition contiguous_partition(Index n, int t);

/// Merges each run of `group` consecutive subdomains into one.
Partition merge_consecutive(const Partition& p, int group);

/// The t/2-way partition whose subdomain i is the union of 2i and 2i+1.
Partition halve(const Partition& p);

/// True when each subdomain of `fine` lies entirely inside one subdomain of
/// `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

Partition read_partition(std::istream& in);
void write_partition(const Partition& p, std::ostream& out);

/// The splitting operator: column j holds v restricted to subdomain j.
template <typename Derived>
auto project_t(const Eigen::MatrixBase<Derived>& v, const Partition& p) {
  using Scalar = typename Derived::Scalar;
  if (v.cols() != 1 || v.rows() != p.size()) throw DimensionMismatch("project_t: vector length does not match partition");
  Block<Scalar> out = Block<Scalar>::Zero(p.size(), p.count());
  for (Index i = 0; i < p.size(); ++i) out(i, p.owner(i)) = v(i, 0);
  return out;
}

}  // namespace ekcg
