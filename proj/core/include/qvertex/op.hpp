#pragma once

#include "qvertex/basis.hpp"
#include "qvertex/sparse.hpp"

#include <functional>
#include <optional>
#include <string>

namespace qv {

// Linear map between tensor-product bases. Entry convention throughout:
// mat(row, col) = <row|M|col>, so "stochastic" means every column sums to 1.
struct LocalOperator {
    BasisPtr domain;
    BasisPtr codomain;
    SparseMat mat;

    LocalOperator() = default;
    LocalOperator(BasisPtr dom, BasisPtr cod)
        : domain(std::move(dom)), codomain(std::move(cod)), mat(codomain->dim(), domain->dim()) {}
    LocalOperator(BasisPtr dom, BasisPtr cod, SparseMat m)
        : domain(std::move(dom)), codomain(std::move(cod)), mat(std::move(m)) {}

    LocalOperator operator*(const LocalOperator& rhs) const;
    LocalOperator operator+(const LocalOperator& rhs) const;
    LocalOperator operator-(const LocalOperator& rhs) const;
    LocalOperator scaled(const Rat& s) const;
    LocalOperator transpose() const;
    bool same_shape(const LocalOperator& o) const;
    bool operator==(const LocalOperator& o) const;
    bool is_zero() const { return mat.is_zero(); }
};

LocalOperator identity_op(const BasisPtr& b);

// Diagonal B^{(x)L}: product over sites and species of (q^2;q^2)_{gamma_i}.
std::vector<Rat> b_diagonal(const TensorBasis& b, const Rat& q);
LocalOperator b_matrix(const BasisPtr& b, const Rat& q);

// Gauge Ga^{(L)}: diagonal q^{-sum_{y<x} sum_i xi_[1,i]^y xi_{i+1}^x}.
std::vector<Rat> gauge_diagonal(const TensorBasis& b, const Rat& q);
LocalOperator gauge_matrix(const BasisPtr& b, const Rat& q);
// Space-reversed partner: tilde(Ga) = P^rev Ga P^rev.
std::vector<Rat> gauge_tilde_diagonal(const TensorBasis& b, const Rat& q);

// Charge reversal Pi^{(x)L} (an involution).
LocalOperator charge_reversal(const BasisPtr& b);

// P^sigma : V_{m_1} x...x V_{m_L} -> V_{m_sigma(1)} x ... ; perm[i] = sigma(i+1)-1.
LocalOperator permutation_op(const BasisPtr& b, const std::vector<int>& perm);
// Swap of two adjacent slots, P_{x,x+1}.
LocalOperator swap_adjacent(const BasisPtr& b, int x);

// Embeds a two-site operator acting on slots (a, b) of `bas` (a != b).
// `two` must act on site bases matching (level(a), level(b)).
LocalOperator embed_two_site(const BasisPtr& bas, const LocalOperator& two, int slot_a, int slot_b);

// Tensor product A x B on the concatenated site lists.
LocalOperator embed_tensor_pair(const LocalOperator& a, const LocalOperator& b);

// Per-species-totals sector decomposition. Returns the sector key of each
// basis vector of the domain/codomain, and reports any entry that crosses
// sectors (nullopt when the operator is conservation-respecting).
struct SectorReport {
    std::map<std::vector<int>, std::vector<std::size_t>> sectors_domain;
    std::map<std::vector<int>, std::vector<std::size_t>> sectors_codomain;
    std::optional<std::pair<std::size_t, std::size_t>> violation;  // (row, col)
};
SectorReport sector_decompose(const LocalOperator& op);

// Column-stochasticity: exact sum-to-one and entrywise nonnegativity.
struct StochasticityReport {
    bool sums_to_one = false;
    bool nonnegative = false;
    std::optional<std::size_t> bad_column;
    std::optional<std::pair<std::size_t, std::size_t>> negative_entry;
};
StochasticityReport check_stochastic(const LocalOperator& op);

}  // namespace qv
