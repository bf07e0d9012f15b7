#include "qvertex/repalg.hpp"

#include "qvertex/qarith.hpp"

#include <stdexcept>

namespace qv {

namespace {

// One-site action; returns (new state index, coefficient) pairs for a basis state.
struct SiteAction {
    int n;
    const SiteSpace* space;
    Rat q, z;

    // hat i has +1 at 1-based slot i, -1 at slot i+1, cyclically; i = 0 is slot n+1.
    int pos_plus(int i) const { return (i - 1 + (n + 1)) % (n + 1); }
    int pos_minus(int i) const { return i % (n + 1); }

    std::vector<std::pair<int, Rat>> act(Gen kind, int i, int state) const {
        const Composition& a = space->states[state];
        const int ip = pos_plus(i), im = pos_minus(i);
        switch (kind) {
            case Gen::K:
            case Gen::Kinv: {
                long e = a[im] - a[ip];
                if (kind == Gen::Kinv) e = -e;
                return {{state, rat_pow(q, e)}};
            }
            case Gen::E: {
                if (a[ip] == 0) return {};
                Rat c = bracket(a[ip], q);
                if (i == 0) c *= z;
                Composition b = a;
                b[ip] -= 1;
                b[im] += 1;
                return {{space->index.at(b), c}};
            }
            case Gen::F: {
                if (a[im] == 0) return {};
                Rat c = bracket(a[im], q);
                if (i == 0) c /= z;
                Composition b = a;
                b[ip] += 1;
                b[im] -= 1;
                return {{space->index.at(b), c}};
            }
        }
        return {};
    }
};

LocalOperator coproduct_impl(Gen kind, int i, const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs,
                             bool alt) {
    const int L = basis->sites();
    const int n = basis->species();
    if (static_cast<int>(zs.size()) != L) throw std::invalid_argument("coproduct_matrix: need one z per leg");
    LocalOperator op(basis, basis);
    std::vector<SiteAction> act(L);
    for (int x = 0; x < L; ++x) act[x] = SiteAction{n, &basis->site(x), q, zs[x]};

    for (std::size_t f = 0; f < basis->dim(); ++f) {
        auto digits = basis->digits(f);
        if (kind == Gen::K || kind == Gen::Kinv) {
            Rat c(1);
            for (int x = 0; x < L; ++x) c *= act[x].act(kind, i, digits[x])[0].second;
            op.mat.add_to(f, f, c);
            continue;
        }
        for (int x = 0; x < L; ++x) {
            Rat pre(1);
            if (!alt) {
                // Delta e: k-legs to the right of x; Delta f: k^{-1}-legs to the left.
                if (kind == Gen::E)
                    for (int y = x + 1; y < L; ++y) pre *= act[y].act(Gen::K, i, digits[y])[0].second;
                else
                    for (int y = 0; y < x; ++y) pre *= act[y].act(Gen::Kinv, i, digits[y])[0].second;
            } else {
                // Delta_0 e: k^{-1}-legs to the left; Delta_0 f: k-legs to the right.
                if (kind == Gen::E)
                    for (int y = 0; y < x; ++y) pre *= act[y].act(Gen::Kinv, i, digits[y])[0].second;
                else
                    for (int y = x + 1; y < L; ++y) pre *= act[y].act(Gen::K, i, digits[y])[0].second;
            }
            for (const auto& [ns, c] : act[x].act(kind, i, digits[x])) {
                auto out = digits;
                out[x] = ns;
                op.mat.add_to(basis->from_digits(out), f, pre * c);
            }
        }
    }
    return op;
}

// exp_{q^2}(N) for nilpotent N.
LocalOperator exp_q2(const LocalOperator& N, const Rat& q) {
    LocalOperator acc = identity_op(N.domain);
    LocalOperator pow = identity_op(N.domain);
    for (int k = 1;; ++k) {
        pow = pow * N;
        if (pow.is_zero()) break;
        acc = acc + pow.scaled(deformed_exp_coeff(k, q * q));
        if (k > 4096) throw std::runtime_error("exp_q2: operator is not nilpotent");
    }
    return acc;
}

}  // namespace

LocalOperator generator_matrix(Gen kind, int i, const BasisPtr& site_basis, const Rat& q, const Rat& z) {
    if (site_basis->sites() != 1) throw std::invalid_argument("generator_matrix: expected a one-site basis");
    return coproduct_impl(kind, i, site_basis, q, {z}, false);
}

LocalOperator coproduct_matrix(Gen kind, int i, const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs) {
    return coproduct_impl(kind, i, basis, q, zs, false);
}

LocalOperator coproduct0_matrix(Gen kind, int i, const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs) {
    return coproduct_impl(kind, i, basis, q, zs, true);
}

LocalOperator u0_matrix(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs) {
    LocalOperator out = identity_op(basis);
    for (int i = 1; i <= basis->species(); ++i)
        out = out * exp_q2(coproduct_matrix(Gen::F, i, basis, q, zs), q);
    return out;
}

LocalOperator u0_matrix_pseudo_factorized(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs) {
    const int L = basis->sites();
    LocalOperator out = identity_op(basis);
    for (int i = 1; i <= basis->species(); ++i) {
        // exp(Delta f) = exp(f x 1...) exp(k^{-1} x f x 1...) ... exp(k^{-1}...k^{-1} x f)
        LocalOperator factor = identity_op(basis);
        for (int x = 0; x < L; ++x) {
            LocalOperator leg(basis, basis);
            SiteAction ax{basis->species(), &basis->site(x), q, zs[x]};
            for (std::size_t f = 0; f < basis->dim(); ++f) {
                auto digits = basis->digits(f);
                Rat pre(1);
                for (int y = 0; y < x; ++y) {
                    SiteAction ay{basis->species(), &basis->site(y), q, zs[y]};
                    pre *= ay.act(Gen::Kinv, i, digits[y])[0].second;
                }
                for (const auto& [ns, c] : ax.act(Gen::F, i, digits[x])) {
                    auto outd = digits;
                    outd[x] = ns;
                    leg.mat.add_to(basis->from_digits(outd), f, pre * c);
                }
            }
            factor = factor * exp_q2(leg, q);
        }
        out = out * factor;
    }
    return out;
}

std::vector<Rat> ground_state_diagonal(const BasisPtr& basis, const Rat& q) {
    std::vector<Rat> zs(basis->sites(), Rat(1));
    auto u0 = u0_matrix(basis, q, zs);
    std::vector<Composition> omega;
    for (int x = 0; x < basis->sites(); ++x) omega.push_back(comp_Omega(basis->species(), basis->level(x)));
    std::size_t col = basis->flatten(omega);
    std::vector<Rat> d(basis->dim(), Rat(0));
    for (const auto& [r, v] : u0.mat.col(col)) d[r] = v;
    for (const auto& v : d)
        if (v == 0) throw std::domain_error("ground_state_transform: zero diagonal entry");
    return d;
}

LocalOperator ground_state_transform(const BasisPtr& basis, const Rat& q) {
    return LocalOperator(basis, basis, SparseMat::diagonal(ground_state_diagonal(basis, q)));
}

}  // namespace qv
