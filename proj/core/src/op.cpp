#include "qvertex/op.hpp"

#include "qvertex/qarith.hpp"

#include <stdexcept>

namespace qv {

LocalOperator LocalOperator::operator*(const LocalOperator& rhs) const {
    if (!(*domain == *rhs.codomain)) throw std::invalid_argument("LocalOperator: basis mismatch in composition");
    return LocalOperator(rhs.domain, codomain, mat * rhs.mat);
}

LocalOperator LocalOperator::operator+(const LocalOperator& rhs) const {
    if (!same_shape(rhs)) throw std::invalid_argument("LocalOperator: shape mismatch in sum");
    return LocalOperator(domain, codomain, mat + rhs.mat);
}

LocalOperator LocalOperator::operator-(const LocalOperator& rhs) const {
    if (!same_shape(rhs)) throw std::invalid_argument("LocalOperator: shape mismatch in difference");
    return LocalOperator(domain, codomain, mat - rhs.mat);
}

LocalOperator LocalOperator::scaled(const Rat& s) const { return LocalOperator(domain, codomain, mat.scaled(s)); }

LocalOperator LocalOperator::transpose() const { return LocalOperator(codomain, domain, mat.transpose()); }

bool LocalOperator::same_shape(const LocalOperator& o) const {
    return *domain == *o.domain && *codomain == *o.codomain;
}

bool LocalOperator::operator==(const LocalOperator& o) const { return same_shape(o) && mat == o.mat; }

LocalOperator identity_op(const BasisPtr& b) {
    return LocalOperator(b, b, SparseMat::identity(b->dim()));
}

std::vector<Rat> b_diagonal(const TensorBasis& b, const Rat& q) {
    const Rat q2 = q * q;
    std::vector<Rat> d(b.dim());
    for (std::size_t f = 0; f < b.dim(); ++f) {
        Rat v(1);
        for (const auto& c : b.unflatten(f))
            for (int part : c) v *= q_pochhammer(q2, q2, part);
        d[f] = v;
    }
    return d;
}

LocalOperator b_matrix(const BasisPtr& b, const Rat& q) {
    auto d = b_diagonal(*b, q);
    for (const auto& v : d)
        if (v == 0) throw std::domain_error("b_matrix: zero diagonal entry (q a root of unity in range)");
    return LocalOperator(b, b, SparseMat::diagonal(d));
}

std::vector<Rat> gauge_diagonal(const TensorBasis& b, const Rat& q) {
    const int n = b.species();
    const int L = b.sites();
    std::vector<Rat> d(b.dim());
    for (std::size_t f = 0; f < b.dim(); ++f) {
        auto comps = b.unflatten(f);
        long e = 0;
        for (int y = 0; y < L; ++y)
            for (int x = y + 1; x < L; ++x)
                for (int i = 1; i <= n; ++i) e += range_sum(comps[y], 1, i) * comps[x][i];
        d[f] = rat_pow(q, -e);
    }
    return d;
}

LocalOperator gauge_matrix(const BasisPtr& b, const Rat& q) {
    return LocalOperator(b, b, SparseMat::diagonal(gauge_diagonal(*b, q)));
}

std::vector<Rat> gauge_tilde_diagonal(const TensorBasis& b, const Rat& q) {
    const int n = b.species();
    const int L = b.sites();
    std::vector<Rat> d(b.dim());
    for (std::size_t f = 0; f < b.dim(); ++f) {
        auto comps = b.unflatten(f);
        long e = 0;
        // reversed site order: pairs y<x become x<y
        for (int y = 0; y < L; ++y)
            for (int x = y + 1; x < L; ++x)
                for (int i = 1; i <= n; ++i) e += range_sum(comps[x], 1, i) * comps[y][i];
        d[f] = rat_pow(q, -e);
    }
    return d;
}

LocalOperator charge_reversal(const BasisPtr& b) {
    LocalOperator op(b, b);
    for (std::size_t f = 0; f < b->dim(); ++f) {
        auto comps = b->unflatten(f);
        for (auto& c : comps) c = charge_reverse(c);
        op.mat.set(b->flatten(comps), f, Rat(1));
    }
    return op;
}

LocalOperator permutation_op(const BasisPtr& b, const std::vector<int>& perm) {
    const int L = b->sites();
    if (static_cast<int>(perm.size()) != L) throw std::invalid_argument("permutation_op: wrong length");
    std::vector<int> out_levels(L);
    for (int i = 0; i < L; ++i) out_levels[i] = b->level(perm[i]);
    auto cod = make_basis(b->species(), out_levels);
    LocalOperator op(b, cod);
    for (std::size_t f = 0; f < b->dim(); ++f) {
        auto comps = b->unflatten(f);
        std::vector<Composition> out(L);
        for (int i = 0; i < L; ++i) out[i] = comps[perm[i]];
        op.mat.set(cod->flatten(out), f, Rat(1));
    }
    return op;
}

LocalOperator swap_adjacent(const BasisPtr& b, int x) {
    std::vector<int> perm(b->sites());
    for (int i = 0; i < b->sites(); ++i) perm[i] = i;
    std::swap(perm[x], perm[x + 1]);
    return permutation_op(b, perm);
}

LocalOperator embed_two_site(const BasisPtr& bas, const LocalOperator& two, int slot_a, int slot_b) {
    if (two.domain->sites() != 2 || two.codomain->sites() != 2)
        throw std::invalid_argument("embed_two_site: operator is not two-site");
    if (two.domain->level(0) != bas->level(slot_a) || two.domain->level(1) != bas->level(slot_b))
        throw std::invalid_argument("embed_two_site: domain levels do not match slots");
    std::vector<int> out_levels = bas->levels();
    out_levels[slot_a] = two.codomain->level(0);
    out_levels[slot_b] = two.codomain->level(1);
    auto cod = (out_levels == bas->levels()) ? bas : make_basis(bas->species(), out_levels);

    const auto& da = bas->site(slot_a);
    const auto& db = bas->site(slot_b);
    LocalOperator op(bas, cod);
    for (std::size_t f = 0; f < bas->dim(); ++f) {
        auto digits = bas->digits(f);
        std::size_t two_col = static_cast<std::size_t>(digits[slot_a]) * db.dim() + digits[slot_b];
        for (const auto& [two_row, v] : two.mat.col(two_col)) {
            auto out_digits = digits;
            out_digits[slot_a] = static_cast<int>(two_row / two.codomain->site(1).dim());
            out_digits[slot_b] = static_cast<int>(two_row % two.codomain->site(1).dim());
            op.mat.add_to(cod->from_digits(out_digits), f, v);
        }
    }
    return op;
}

LocalOperator embed_tensor_pair(const LocalOperator& a, const LocalOperator& b) {
    if (a.domain->species() != b.domain->species())
        throw std::invalid_argument("embed_tensor_pair: species mismatch");
    auto cat = [](const std::vector<int>& u, const std::vector<int>& v) {
        std::vector<int> out = u;
        out.insert(out.end(), v.begin(), v.end());
        return out;
    };
    auto dom = make_basis(a.domain->species(), cat(a.domain->levels(), b.domain->levels()));
    auto cod = make_basis(a.codomain->species(), cat(a.codomain->levels(), b.codomain->levels()));
    LocalOperator out(dom, cod);
    const std::size_t bd = b.domain->dim(), bc = b.codomain->dim();
    for (std::size_t ca = 0; ca < a.mat.cols(); ++ca)
        for (const auto& [ra, va] : a.mat.col(ca))
            for (std::size_t cb = 0; cb < b.mat.cols(); ++cb)
                for (const auto& [rb, vb] : b.mat.col(cb))
                    out.mat.set(ra * bc + rb, ca * bd + cb, va * vb);
    return out;
}

SectorReport sector_decompose(const LocalOperator& op) {
    SectorReport rep;
    std::vector<std::vector<int>> dom_sec(op.domain->dim()), cod_sec(op.codomain->dim());
    for (std::size_t f = 0; f < op.domain->dim(); ++f) {
        dom_sec[f] = op.domain->sector_of(f);
        rep.sectors_domain[dom_sec[f]].push_back(f);
    }
    for (std::size_t f = 0; f < op.codomain->dim(); ++f) {
        cod_sec[f] = op.codomain->sector_of(f);
        rep.sectors_codomain[cod_sec[f]].push_back(f);
    }
    for (std::size_t c = 0; c < op.mat.cols() && !rep.violation; ++c)
        for (const auto& [r, v] : op.mat.col(c))
            if (cod_sec[r] != dom_sec[c]) {
                rep.violation = {r, c};
                break;
            }
    return rep;
}

StochasticityReport check_stochastic(const LocalOperator& op) {
    StochasticityReport rep;
    rep.sums_to_one = true;
    rep.nonnegative = true;
    auto sums = op.mat.column_sums();
    for (std::size_t c = 0; c < sums.size(); ++c)
        if (sums[c] != 1) {
            rep.sums_to_one = false;
            rep.bad_column = c;
            break;
        }
    for (std::size_t c = 0; c < op.mat.cols() && rep.nonnegative; ++c)
        for (const auto& [r, v] : op.mat.col(c))
            if (v < 0) {
                rep.nonnegative = false;
                rep.negative_entry = {r, c};
                break;
            }
    return rep;
}

}  // namespace qv
