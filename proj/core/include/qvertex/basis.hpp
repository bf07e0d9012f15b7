#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace qv {

// Occupation vector (alpha_1,...,alpha_{n+1}); species n+1 are holes.
using Composition = std::vector<int>;

// All compositions of m into n+1 parts, descending lexicographic:
// index 0 is A = (m,0,...,0), the last index is Omega = (0,...,0,m).
std::vector<Composition> enumerate_compositions(int n, int m);

Composition charge_reverse(const Composition& a);
Composition comp_A(int n, int m);
Composition comp_Omega(int n, int m);

// alpha_[i,j] = alpha_i + ... + alpha_j with 1-based inclusive bounds; 0 if i > j.
int range_sum(const Composition& a, int i, int j);

// Basis of one tensor factor V_m over n species.
struct SiteSpace {
    int n = 1;
    int m = 0;
    std::vector<Composition> states;
    std::map<Composition, int> index;

    SiteSpace() = default;
    SiteSpace(int n_, int m_);
    int dim() const { return static_cast<int>(states.size()); }
};

// Tensor product basis V_{m_1} x ... x V_{m_L}. Flat index is row-major
// with the leftmost factor most significant.
class TensorBasis {
  public:
    TensorBasis(int n, std::vector<int> site_levels);

    int species() const { return n_; }
    int sites() const { return static_cast<int>(levels_.size()); }
    int level(int x) const { return levels_[x]; }
    const std::vector<int>& levels() const { return levels_; }
    const SiteSpace& site(int x) const { return *spaces_[x]; }
    std::size_t dim() const { return dim_; }

    std::size_t flatten(const std::vector<Composition>& comps) const;
    std::vector<Composition> unflatten(std::size_t f) const;
    // Site-state index path for a flat index (avoids building Compositions).
    std::vector<int> digits(std::size_t f) const;
    std::size_t from_digits(const std::vector<int>& d) const;

    // Per-species totals (t_1,...,t_{n+1}) across all sites.
    std::vector<int> sector_of(std::size_t f) const;

    bool operator==(const TensorBasis& o) const {
        return n_ == o.n_ && levels_ == o.levels_;
    }

  private:
    int n_;
    std::vector<int> levels_;
    std::vector<std::shared_ptr<const SiteSpace>> spaces_;
    std::size_t dim_;
};

using BasisPtr = std::shared_ptr<const TensorBasis>;

BasisPtr make_basis(int n, std::vector<int> site_levels);

}  // namespace qv
