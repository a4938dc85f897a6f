#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace boolsearch {

using Pmid = std::uint64_t;

/// Sorted, deduplicated set of PMIDs backed by a vector.
class PmidSet {
 public:
  using const_iterator = std::vector<Pmid>::const_iterator;

  PmidSet() = default;
  PmidSet(std::initializer_list<Pmid> ids) : PmidSet(std::vector<Pmid>(ids)) {}
  explicit PmidSet(std::vector<Pmid> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  /// Adopts an already sorted, unique vector without re-sorting.
  static PmidSet from_sorted(std::vector<Pmid> ids) {
    PmidSet set;
    set.ids_ = std::move(ids);
    return set;
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const_iterator begin() const noexcept { return ids_.begin(); }
  const_iterator end() const noexcept { return ids_.end(); }
  const std::vector<Pmid>& ids() const noexcept { return ids_; }

  bool contains(Pmid id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

  bool operator==(const PmidSet&) const = default;

  friend PmidSet set_union(const PmidSet& a, const PmidSet& b) {
    std::vector<Pmid> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return from_sorted(std::move(out));
  }

  friend PmidSet set_intersection(const PmidSet& a, const PmidSet& b) {
    std::vector<Pmid> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return from_sorted(std::move(out));
  }

  friend PmidSet set_difference(const PmidSet& a, const PmidSet& b) {
    std::vector<Pmid> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return from_sorted(std::move(out));
  }

  friend bool includes(const PmidSet& super, const PmidSet& sub) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
  }

  friend std::size_t intersection_size(const PmidSet& a, const PmidSet& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++n;
        ++i;
        ++j;
      }
    }
    return n;
  }

 private:
  std::vector<Pmid> ids_;
};

PmidSet set_union(const PmidSet& a, const PmidSet& b);
PmidSet set_intersection(const PmidSet& a, const PmidSet& b);
PmidSet set_difference(const PmidSet& a, const PmidSet& b);
bool includes(const PmidSet& super, const PmidSet& sub);
std::size_t intersection_size(const PmidSet& a, const PmidSet& b);

}  // namespace boolsearch
