#include "qvertex/basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace qv {

std::vector<Composition> enumerate_compositions(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("enumerate_compositions: need n >= 1, m >= 0");
    std::vector<Composition> out;
    Composition cur(n + 1, 0);
    // descending lex comes out of this recursion order directly
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == n) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (int v = rem; v >= 0; --v) {
            cur[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, m);
    return out;
}

Composition charge_reverse(const Composition& a) {
    return Composition(a.rbegin(), a.rend());
}

Composition comp_A(int n, int m) {
    Composition c(n + 1, 0);
    c[0] = m;
    return c;
}

Composition comp_Omega(int n, int m) {
    Composition c(n + 1, 0);
    c[n] = m;
    return c;
}

int range_sum(const Composition& a, int i, int j) {
    int s = 0;
    for (int k = i; k <= j; ++k) s += a[k - 1];
    return s;
}

SiteSpace::SiteSpace(int n_in, int m_in) : n(n_in), m(m_in), states(enumerate_compositions(n_in, m_in)) {
    for (int i = 0; i < static_cast<int>(states.size()); ++i) index[states[i]] = i;
}

TensorBasis::TensorBasis(int n, std::vector<int> site_levels)
    : n_(n), levels_(std::move(site_levels)) {
    if (levels_.empty()) throw std::invalid_argument("TensorBasis: no sites");
    // share site spaces between equal levels
    std::map<int, std::shared_ptr<const SiteSpace>> cache;
    dim_ = 1;
    for (int m : levels_) {
        auto it = cache.find(m);
        if (it == cache.end()) it = cache.emplace(m, std::make_shared<SiteSpace>(n_, m)).first;
        spaces_.push_back(it->second);
        dim_ *= it->second->dim();
    }
}

std::size_t TensorBasis::flatten(const std::vector<Composition>& comps) const {
    std::size_t f = 0;
    for (int x = 0; x < sites(); ++x) {
        auto it = spaces_[x]->index.find(comps[x]);
        if (it == spaces_[x]->index.end()) throw std::out_of_range("flatten: composition not in site basis");
        f = f * spaces_[x]->dim() + it->second;
    }
    return f;
}

std::vector<Composition> TensorBasis::unflatten(std::size_t f) const {
    std::vector<Composition> out(sites());
    for (int x = sites() - 1; x >= 0; --x) {
        out[x] = spaces_[x]->states[f % spaces_[x]->dim()];
        f /= spaces_[x]->dim();
    }
    return out;
}

std::vector<int> TensorBasis::digits(std::size_t f) const {
    std::vector<int> out(sites());
    for (int x = sites() - 1; x >= 0; --x) {
        out[x] = static_cast<int>(f % spaces_[x]->dim());
        f /= spaces_[x]->dim();
    }
    return out;
}

std::size_t TensorBasis::from_digits(const std::vector<int>& d) const {
    std::size_t f = 0;
    for (int x = 0; x < sites(); ++x) f = f * spaces_[x]->dim() + d[x];
    return f;
}

std::vector<int> TensorBasis::sector_of(std::size_t f) const {
    std::vector<int> tot(n_ + 1, 0);
    auto comps = unflatten(f);
    for (const auto& c : comps)
        for (int i = 0; i <= n_; ++i) tot[i] += c[i];
    return tot;
}

BasisPtr make_basis(int n, std::vector<int> site_levels) {
    return std::make_shared<const TensorBasis>(n, std::move(site_levels));
}

}  // namespace qv
