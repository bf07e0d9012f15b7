#pragma once

#include "qvertex/rational.hpp"

#include <map>
#include <vector>

namespace qv {

// Zero-range configuration: one reduced occupation vector (n entries,
// holes implicit/unbounded) per lattice site.
using ZRConfig = std::vector<std::vector<int>>;

// All configurations on L sites with fixed per-species totals. Finite:
// occupancy is bounded by the totals.
class ZRBasis {
  public:
    ZRBasis(int n, int L, std::vector<int> totals);

    int species() const { return n_; }
    int sites() const { return L_; }
    const std::vector<int>& totals() const { return totals_; }
    std::size_t dim() const { return configs_.size(); }
    const ZRConfig& config(std::size_t i) const { return configs_[i]; }
    std::size_t index(const ZRConfig& c) const;

  private:
    int n_, L_;
    std::vector<int> totals_;
    std::vector<ZRConfig> configs_;
    std::map<ZRConfig, std::size_t> index_;
};

}  // namespace qv
