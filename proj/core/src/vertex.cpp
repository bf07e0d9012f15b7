#include "qvertex/vertex.hpp"

#include "qvertex/qarith.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qv {

namespace {

Composition eps_vec(int n, int k) {
    Composition c(n + 1, 0);
    c[k - 1] = 1;
    return c;
}

// species index of a V_1 state (1-based)
int eps_index(const Composition& c) {
    for (int i = 0; i < static_cast<int>(c.size()); ++i)
        if (c[i] == 1) return i + 1;
    throw std::logic_error("not a V_1 basis state");
}

// #{r<s : seq_r > seq_s} with the order eps_1 < eps_2 < ... < eps_{n+1}
int inversions(const std::vector<int>& sp) {
    int e = 0;
    for (std::size_t r = 0; r < sp.size(); ++r)
        for (std::size_t s = r + 1; s < sp.size(); ++s)
            if (sp[r] > sp[s]) ++e;
    return e;
}

int ascents(const std::vector<int>& sp) {
    int e = 0;
    for (std::size_t r = 0; r < sp.size(); ++r)
        for (std::size_t s = r + 1; s < sp.size(); ++s)
            if (sp[r] < sp[s]) ++e;
    return e;
}

Composition seq_sum(const TensorBasis& b1l, const std::vector<Composition>& comps, int l) {
    Composition tot(b1l.species() + 1, 0);
    for (int x = 0; x < l; ++x)
        for (int i = 0; i <= b1l.species(); ++i) tot[i] += comps[x][i];
    return tot;
}

}  // namespace

void VertexParams::validate() const {
    if (n < 1 || l < 0 || m < 0) throw std::invalid_argument("VertexParams: need n >= 1 and nonnegative spins");
    if (q == 0) throw std::invalid_argument("VertexParams: q = 0");
    if (!z.is_finite()) return;  // limits use dedicated formulas, no pole to hit
    for (int j = 1; j <= std::max(l, 1); ++j) {
        Rat zloc = z.value * rat_pow(q, l + 1 - 2 * j);
        if (zloc == rat_pow(q, m + 1)) {
            std::ostringstream os;
            os << "singular spectral point: z q^" << (l + 1 - 2 * j) << " = q^" << (m + 1);
            throw std::domain_error(os.str());
        }
    }
}

LocalOperator r_matrix_l1(int n, int m, const Rat& q, const Rat& z) {
    const Rat den = rat_pow(q, m + 1) - z;
    if (den == 0) throw std::domain_error("r_matrix_l1: z = q^{m+1} is singular");
    auto bas = make_basis(n, {1, m});
    const auto& vm = bas->site(1);
    LocalOperator op(bas, bas);
    for (int j = 1; j <= n + 1; ++j) {
        for (int bi = 0; bi < vm.dim(); ++bi) {
            const Composition& beta = vm.states[bi];
            std::size_t col = bas->flatten({eps_vec(n, j), beta});
            for (int k = 1; k <= n + 1; ++k) {
                Composition delta = beta;
                delta[j - 1] += 1;
                delta[k - 1] -= 1;
                if (delta[k - 1] < 0) continue;
                Rat val;
                if (k == j) {
                    val = rat_pow(q, beta[k - 1] + 1) * (1 - rat_pow(q, -2 * delta[k - 1] + m - 1) * z) / den;
                } else if (k > j) {
                    val = -rat_pow(q, range_sum(beta, j + 1, k - 1)) * (1 - rat_pow(q, 2 * beta[k - 1])) / den;
                } else {
                    val = -rat_pow(q, m - range_sum(beta, k, j)) * z * (1 - rat_pow(q, 2 * beta[k - 1])) / den;
                }
                if (val != 0) op.mat.add_to(bas->flatten({eps_vec(n, k), delta}), col, val);
            }
        }
    }
    return op;
}

LocalOperator r_matrix_m1(int n, int l, const Rat& q, const Rat& z) {
    const Rat den = rat_pow(q, l + 1) - z;
    if (den == 0) throw std::domain_error("r_matrix_m1: z = q^{l+1} is singular");
    auto bas = make_basis(n, {l, 1});
    const auto& vl = bas->site(0);
    LocalOperator op(bas, bas);
    for (int ai = 0; ai < vl.dim(); ++ai) {
        const Composition& alpha = vl.states[ai];
        for (int j = 1; j <= n + 1; ++j) {
            std::size_t col = bas->flatten({alpha, eps_vec(n, j)});
            for (int k = 1; k <= n + 1; ++k) {
                Composition gamma = alpha;
                gamma[j - 1] += 1;
                gamma[k - 1] -= 1;
                if (gamma[k - 1] < 0) continue;
                Rat val;
                if (k == j) {
                    val = rat_pow(q, alpha[k - 1] + 1) * (1 - rat_pow(q, -2 * alpha[k - 1] + l - 1) * z) / den;
                } else if (k > j) {
                    val = -rat_pow(q, l - range_sum(alpha, j, k)) * z * (1 - rat_pow(q, 2 * alpha[k - 1])) / den;
                } else {
                    val = -rat_pow(q, range_sum(alpha, k + 1, j - 1)) * (1 - rat_pow(q, 2 * alpha[k - 1])) / den;
                }
                if (val != 0) op.mat.add_to(bas->flatten({gamma, eps_vec(n, k)}), col, val);
            }
        }
    }
    return op;
}

LocalOperator s_from_r(const LocalOperator& r, const Rat& q) {
    auto ga = gauge_diagonal(*r.domain, q);
    auto gat = gauge_tilde_diagonal(*r.codomain, q);
    for (auto& v : gat) v = 1 / v;
    LocalOperator s(r.domain, r.codomain, r.mat.mul_diag_right(ga).mul_diag_left(gat));
    for (const auto& cs : s.mat.column_sums())
        if (cs != 1) throw std::logic_error("s_from_r: column sum != 1 (formula bug)");
    return s;
}

LocalOperator s_l1_limit(int n, int m, const Rat& q, const SpectralValue& z) {
    auto bas = make_basis(n, {1, m});
    const auto& vm = bas->site(1);
    LocalOperator op(bas, bas);
    for (int j = 1; j <= n + 1; ++j) {
        for (int bi = 0; bi < vm.dim(); ++bi) {
            const Composition& beta = vm.states[bi];
            std::size_t col = bas->flatten({eps_vec(n, j), beta});
            for (int k = 1; k <= n + 1; ++k) {
                Composition delta = beta;
                delta[j - 1] += 1;
                delta[k - 1] -= 1;
                if (delta[k - 1] < 0) continue;
                Rat val(0);
                if (z.is_infinity()) {
                    if (k == j)
                        val = rat_pow(q, 2 * range_sum(beta, 1, k - 1));
                    else if (k < j)
                        val = rat_pow(q, 2 * range_sum(beta, 1, k - 1)) * (1 - rat_pow(q, 2 * beta[k - 1]));
                } else if (z.is_zero()) {
                    if (k == j)
                        val = rat_pow(q, 2 * range_sum(beta, 1, k) - 2 * m);
                    else if (k > j)
                        val = -rat_pow(q, 2 * range_sum(beta, 1, k - 1) - 2 * m) * (1 - rat_pow(q, 2 * beta[k - 1]));
                } else {
                    throw std::invalid_argument("s_l1_limit: z must be the Zero or Infinity limit");
                }
                if (val != 0) op.mat.add_to(bas->flatten({eps_vec(n, k), delta}), col, val);
            }
        }
    }
    return op;
}

LocalOperator s_m1_limit(int n, int l, const Rat& q, const SpectralValue& z) {
    auto bas = make_basis(n, {l, 1});
    const auto& vl = bas->site(0);
    LocalOperator op(bas, bas);
    for (int ai = 0; ai < vl.dim(); ++ai) {
        const Composition& alpha = vl.states[ai];
        for (int j = 1; j <= n + 1; ++j) {
            std::size_t col = bas->flatten({alpha, eps_vec(n, j)});
            for (int k = 1; k <= n + 1; ++k) {
                Composition gamma = alpha;
                gamma[j - 1] += 1;
                gamma[k - 1] -= 1;
                if (gamma[k - 1] < 0) continue;
                Rat val(0);
                if (z.is_infinity()) {
                    if (k == j)
                        val = rat_pow(q, 2 * l - 2 * range_sum(alpha, 1, k));
                    else if (k > j)
                        val = rat_pow(q, 2 * l - 2 * range_sum(alpha, 1, k)) * (1 - rat_pow(q, 2 * alpha[k - 1]));
                } else if (z.is_zero()) {
                    if (k == j)
                        val = rat_pow(q, -2 * range_sum(alpha, 1, k - 1));
                    else if (k < j)
                        val = rat_pow(q, -2 * range_sum(alpha, 1, k - 1)) * (1 - rat_pow(q, -2 * alpha[k - 1]));
                } else {
                    throw std::invalid_argument("s_m1_limit: z must be the Zero or Infinity limit");
                }
                if (val != 0) op.mat.add_to(bas->flatten({gamma, eps_vec(n, k)}), col, val);
            }
        }
    }
    return op;
}

LocalOperator s_absorber(int n, int l, int m, const Rat& q) {
    if (q <= 1) throw std::domain_error("s_absorber: the m->infinity limit of S(0) is non-stochastic for q <= 1");
    auto bas = make_basis(n, {l, m});
    LocalOperator op(bas, bas);
    const Composition omega = comp_Omega(n, l);
    for (std::size_t f = 0; f < bas->dim(); ++f) {
        auto comps = bas->unflatten(f);
        Composition delta(n + 1, 0);
        int moved = 0;
        for (int i = 0; i < n; ++i) {
            delta[i] = comps[0][i] + comps[1][i];
            moved += comps[0][i];
        }
        delta[n] = comps[1][n] - (l - comps[0][n] - moved) - moved;  // conservation with gamma = Omega
        delta[n] = m - std::accumulate(delta.begin(), delta.end() - 1, 0);
        if (delta[n] < 0) throw std::domain_error("s_absorber: vertical spin too small to absorb this column");
        op.mat.set(bas->flatten({omega, delta}), f, Rat(1));
    }
    return op;
}

LocalOperator xi_map(int n, int l, const Rat& q) {
    auto dom = make_basis(n, {l});
    auto cod = make_basis(n, std::vector<int>(l, 1));
    LocalOperator op(dom, cod);
    const auto& vl = dom->site(0);
    // group sequences by their content
    std::vector<std::vector<std::pair<std::size_t, int>>> grouped(vl.dim());
    for (std::size_t f = 0; f < cod->dim(); ++f) {
        auto comps = cod->unflatten(f);
        std::vector<int> sp(l);
        for (int x = 0; x < l; ++x) sp[x] = eps_index(comps[x]);
        grouped[vl.index.at(seq_sum(*cod, comps, l))].push_back({f, inversions(sp)});
    }
    for (int a = 0; a < vl.dim(); ++a) {
        Rat norm(0);
        for (const auto& [f, e] : grouped[a]) norm += rat_pow(q, -2 * e);
        for (const auto& [f, e] : grouped[a]) op.mat.set(f, a, rat_pow(q, -2 * e) / norm);
    }
    return op;
}

LocalOperator lambda_map(int n, int l) {
    auto dom = make_basis(n, std::vector<int>(l, 1));
    auto cod = make_basis(n, {l});
    LocalOperator op(dom, cod);
    const auto& vl = cod->site(0);
    for (std::size_t f = 0; f < dom->dim(); ++f)
        op.mat.set(vl.index.at(seq_sum(*dom, dom->unflatten(f), l)), f, Rat(1));
    return op;
}

LocalOperator inv_weight_diag(int n, int l, const Rat& q) {
    auto bas = make_basis(n, std::vector<int>(l, 1));
    std::vector<Rat> d(bas->dim());
    for (std::size_t f = 0; f < bas->dim(); ++f) {
        auto comps = bas->unflatten(f);
        std::vector<int> sp(l);
        for (int x = 0; x < l; ++x) sp[x] = eps_index(comps[x]);
        d[f] = rat_pow(q, ascents(sp));
    }
    return LocalOperator(bas, bas, SparseMat::diagonal(d));
}

LocalOperator i_embedding(int n, int l, const Rat& q) {
    auto dom = make_basis(n, {l});
    auto cod = make_basis(n, std::vector<int>(l, 1));
    LocalOperator op(dom, cod);
    const auto& vl = dom->site(0);
    std::vector<std::vector<std::pair<std::size_t, std::pair<int, int>>>> grouped(vl.dim());
    for (std::size_t f = 0; f < cod->dim(); ++f) {
        auto comps = cod->unflatten(f);
        std::vector<int> sp(l);
        for (int x = 0; x < l; ++x) sp[x] = eps_index(comps[x]);
        grouped[vl.index.at(seq_sum(*cod, comps, l))].push_back({f, {inversions(sp), ascents(sp)}});
    }
    for (int a = 0; a < vl.dim(); ++a) {
        Rat norm(0);
        for (const auto& [f, es] : grouped[a]) norm += rat_pow(q, -2 * es.first);
        for (const auto& [f, es] : grouped[a])
            op.mat.set(f, a, rat_pow(q, -2 * es.first - es.second) / norm);
    }
    return op;
}

LocalOperator i_inverse(int n, int l, const Rat& q) {
    return lambda_map(n, l) * inv_weight_diag(n, l, q);
}

LocalOperator symmetric_projector(int n, int l, const Rat& q) {
    return i_embedding(n, l, q) * i_inverse(n, l, q);
}

namespace {

// staircase of two-site factors acting on slots (j, l) of V_1^{x l} x V_m,
// j = l-1 .. 0 applied first-to-last with local parameter z q^{l+1-2(j+1)}
LocalOperator staircase(int n, int l, int m, const Rat& q, const SpectralValue& z, bool stochastic) {
    std::vector<int> levels(l, 1);
    levels.push_back(m);
    auto bas = make_basis(n, levels);
    LocalOperator acc = identity_op(bas);
    for (int j = l; j >= 1; --j) {  // factor S_{j,l+1}(z q^{l+1-2j}), rightmost first
        LocalOperator two;
        if (z.is_finite()) {
            Rat zloc = z.value * rat_pow(q, l + 1 - 2 * j);
            two = r_matrix_l1(n, m, q, zloc);
            if (stochastic) two = s_from_r(two, q);
        } else {
            if (!stochastic) throw std::invalid_argument("staircase: R-form limits not supported");
            two = s_l1_limit(n, m, q, z);
        }
        acc = embed_two_site(bas, two, j - 1, l) * acc;
    }
    return acc;
}

}  // namespace

LocalOperator stochastic_fuse(int n, int l, int m, const Rat& q, const SpectralValue& z) {
    if (l == 1) {
        if (z.is_finite()) return s_from_r(r_matrix_l1(n, m, q, z.value), q);
        return s_l1_limit(n, m, q, z);
    }
    auto big = staircase(n, l, m, q, z, true);
    // (Lambda x id) big (Xi x id)
    auto xi = xi_map(n, l, q);
    auto lm = lambda_map(n, l);
    auto lmbas = make_basis(n, {l, m});
    LocalOperator out(lmbas, lmbas);
    const auto& vl = lmbas->site(0);
    const auto& vm = lmbas->site(1);
    // apply columnwise: column (alpha, beta) -> push Xi(alpha) x e_beta through big, then sum legs
    for (int a = 0; a < vl.dim(); ++a) {
        for (const auto& [seq_f, w] : xi.mat.col(a)) {
            for (int b = 0; b < vm.dim(); ++b) {
                std::size_t col_big = seq_f * vm.dim() + b;
                std::size_t col_out = static_cast<std::size_t>(a) * vm.dim() + b;
                for (const auto& [row_big, v] : big.mat.col(col_big)) {
                    std::size_t seq_row = row_big / vm.dim();
                    std::size_t bout = row_big % vm.dim();
                    const auto& lamcol = lm.mat.col(seq_row);
                    std::size_t gamma = lamcol.begin()->first;
                    out.mat.add_to(gamma * vm.dim() + bout, col_out, w * v);
                }
            }
        }
    }
    for (const auto& cs : out.mat.column_sums())
        if (cs != 1) throw std::logic_error("stochastic_fuse: column sum != 1");
    return out;
}

LocalOperator krl_fuse(int n, int l, int m, const Rat& q, const Rat& z) {
    if (l == 1) return r_matrix_l1(n, m, q, z);
    auto big = staircase(n, l, m, q, SpectralValue::finite(z), false);
    auto iemb = i_embedding(n, l, q);
    auto iinv = i_inverse(n, l, q);
    auto lmbas = make_basis(n, {l, m});
    const auto& vm = lmbas->site(1);
    LocalOperator out(lmbas, lmbas);
    // image-containment check: big (I_l x id) == (I_l x id) out
    for (int a = 0; a < lmbas->site(0).dim(); ++a) {
        for (int b = 0; b < vm.dim(); ++b) {
            // push (I_l x id)|a,b> through the staircase
            std::map<std::size_t, Rat> vec;
            for (const auto& [seq_f, w] : iemb.mat.col(a)) {
                std::size_t col_big = seq_f * vm.dim() + b;
                for (const auto& [row_big, v] : big.mat.col(col_big)) {
                    auto& cell = vec[row_big];
                    cell += w * v;
                }
            }
            // read back through Lambda d and simultaneously re-embed to verify containment
            std::map<std::size_t, Rat> readback;  // (gamma, bout) -> value
            for (const auto& [row_big, v] : vec) {
                if (v == 0) continue;
                std::size_t seq_row = row_big / vm.dim();
                std::size_t bout = row_big % vm.dim();
                for (const auto& [gamma, w] : iinv.mat.col(seq_row)) {
                    auto& cell = readback[gamma * vm.dim() + bout];
                    cell += w * v;
                }
            }
            std::size_t col_out = static_cast<std::size_t>(a) * vm.dim() + b;
            for (const auto& [rc, v] : readback)
                if (v != 0) out.mat.set(rc, col_out, v);
            // containment: re-embed readback and compare with vec
            std::map<std::size_t, Rat> again;
            for (const auto& [rc, v] : readback) {
                if (v == 0) continue;
                std::size_t gamma = rc / vm.dim(), bout = rc % vm.dim();
                for (const auto& [seq_f, w] : iemb.mat.col(gamma)) {
                    auto& cell = again[seq_f * vm.dim() + bout];
                    cell += w * v;
                }
            }
            for (const auto& [rb, v] : vec)
                if (v != (again.count(rb) ? again[rb] : Rat(0)))
                    throw std::logic_error("krl_fuse: staircase image leaves Im(I_l x id)");
            for (const auto& [rb, v] : again)
                if (v != (vec.count(rb) ? vec[rb] : Rat(0)))
                    throw std::logic_error("krl_fuse: staircase image leaves Im(I_l x id)");
        }
    }
    return out;
}

LocalOperator krl_fuse_full(int n, int l, int m, const Rat& q, const Rat& z) {
    // staircase of V_1 x V_1 factors on V_1^{x l} x V_1^{x m}; factor (r, s)
    // acts on slots (r-1, l+s-1) with z q^{m+l-2r-2(m-s)} ; r rows applied
    // bottom-up, within a row s descending applied first.
    std::vector<int> levels(l + m, 1);
    auto bas = make_basis(n, levels);
    LocalOperator acc = identity_op(bas);
    for (int r = l; r >= 1; --r) {
        for (int s = 1; s <= m; ++s) {
            Rat zloc = z * rat_pow(q, (m + l - 2) - 2 * (r - 1) - 2 * (m - s));
            auto two = r_matrix_l1(n, 1, q, zloc);
            acc = embed_two_site(bas, two, r - 1, l + s - 1) * acc;
        }
    }
    // conjugate by (I_l x I_m)
    auto il = i_embedding(n, l, q), im = i_embedding(n, m, q);
    auto il_inv = i_inverse(n, l, q), im_inv = i_inverse(n, m, q);
    auto lmbas = make_basis(n, {l, m});
    const auto& vl = lmbas->site(0);
    const auto& vm = lmbas->site(1);
    std::size_t dm = 1;
    for (int s = 0; s < m; ++s) dm *= (n + 1);
    LocalOperator out(lmbas, lmbas);
    for (int a = 0; a < vl.dim(); ++a) {
        for (int b = 0; b < vm.dim(); ++b) {
            std::map<std::size_t, Rat> vec;
            for (const auto& [fa, wa] : il.mat.col(a))
                for (const auto& [fb, wb] : im.mat.col(b)) {
                    std::size_t col_big = fa * dm + fb;
                    for (const auto& [row_big, v] : acc.mat.col(col_big)) {
                        auto& cell = vec[row_big];
                        cell += wa * wb * v;
                    }
                }
            std::size_t col_out = static_cast<std::size_t>(a) * vm.dim() + b;
            for (const auto& [row_big, v] : vec) {
                if (v == 0) continue;
                std::size_t fa = row_big / dm, fb = row_big % dm;
                for (const auto& [ga, wa] : il_inv.mat.col(fa))
                    for (const auto& [gb, wb] : im_inv.mat.col(fb))
                        out.mat.add_to(ga * vm.dim() + gb, col_out, wa * wb * v);
            }
        }
    }
    return out;
}

LocalOperator r_matrix(const VertexParams& p) {
    p.validate();
    if (!p.z.is_finite()) throw std::invalid_argument("r_matrix: limits are defined for S, not R");
    if (p.l == 1) return r_matrix_l1(p.n, p.m, p.q, p.z.value);
    if (p.m == 1) return r_matrix_m1(p.n, p.l, p.q, p.z.value);
    return krl_fuse(p.n, p.l, p.m, p.q, p.z.value);
}

LocalOperator s_matrix(const VertexParams& p) {
    p.validate();
    if (p.z.is_finite()) {
        if (p.l == 1) return s_from_r(r_matrix_l1(p.n, p.m, p.q, p.z.value), p.q);
        if (p.m == 1) return s_from_r(r_matrix_m1(p.n, p.l, p.q, p.z.value), p.q);
        return stochastic_fuse(p.n, p.l, p.m, p.q, p.z);
    }
    if (p.l == 1) return s_l1_limit(p.n, p.m, p.q, p.z);
    if (p.m == 1) return s_m1_limit(p.n, p.l, p.q, p.z);
    return stochastic_fuse(p.n, p.l, p.m, p.q, p.z);
}

Rat rogers_pitman_check(int n, int l, int m, const Rat& q, const SpectralValue& z) {
    auto big = staircase(n, l, m, q, z, true);
    auto xi = xi_map(n, l, q);
    auto lm = lambda_map(n, l);
    auto id_m = identity_op(make_basis(n, {m}));
    auto lam_big = embed_tensor_pair(lm, id_m);
    auto xi_big = embed_tensor_pair(xi, id_m);
    auto lhs = lam_big * big * xi_big * lam_big;
    auto rhs = lam_big * big;
    return (lhs - rhs).mat.max_abs();
}

std::vector<GridPoint> stochasticity_check(int n, int l, int m, const std::vector<std::pair<Rat, SpectralValue>>& pts) {
    std::vector<GridPoint> out;
    for (const auto& [q, z] : pts) {
        VertexParams p{n, l, m, q, z};
        auto s = s_matrix(p);
        auto rep = check_stochastic(s);
        out.push_back({q, z, rep.sums_to_one, rep.nonnegative});
    }
    return out;
}

Rat inversion_symmetry_check(int n, int m, const Rat& q, const Rat& z) {
    // LHS: (q^{m+1} - z) S(1/z)|_{q -> 1/q} at charge-reversed labels;
    // RHS: the displayed three-case expressions in the unreversed labels.
    const Rat qi = 1 / q;
    auto s_inv = s_from_r(r_matrix_l1(n, m, qi, 1 / z), qi);
    auto bas = make_basis(n, {1, m});
    const auto& vm = bas->site(1);
    const Rat pref = rat_pow(q, m + 1) - z;
    Rat worst(0);
    for (int j = 1; j <= n + 1; ++j) {
        for (int bi = 0; bi < vm.dim(); ++bi) {
            const Composition& beta = vm.states[bi];
            for (int k = 1; k <= n + 1; ++k) {
                Composition delta = beta;
                delta[j - 1] += 1;
                delta[k - 1] -= 1;
                if (delta[k - 1] < 0) continue;
                std::size_t col = bas->flatten({charge_reverse(eps_vec(n, j)), charge_reverse(beta)});
                std::size_t row = bas->flatten({charge_reverse(eps_vec(n, k)), charge_reverse(delta)});
                Rat lhs = pref * s_inv.mat.get(row, col);
                Rat rhs;
                int kk = n + 2 - k;  // the displayed expressions use beta_{n+2-k}
                if (k == j)
                    rhs = rat_pow(q, 2 * range_sum(beta, 1, kk) - m + 1) *
                          (1 - rat_pow(q, -2 * beta[kk - 1] + m - 1) * z);
                else if (k < j)
                    rhs = -rat_pow(q, 2 * range_sum(beta, 1, kk - 1)) * z * (1 - rat_pow(q, 2 * beta[kk - 1]));
                else
                    rhs = -rat_pow(q, 2 * range_sum(beta, 1, kk - 1) - m + 1) * (1 - rat_pow(q, 2 * beta[kk - 1]));
                Rat dev = rat_abs(lhs - rhs);
                if (dev > worst) worst = dev;
            }
        }
    }
    return worst;
}

namespace {

// merged composition under block boundaries r_1 < ... < r_p (1-based starts)
Composition merge_comp(const Composition& c, const std::vector<int>& bnd) {
    Composition out(bnd.size(), 0);
    int nn = static_cast<int>(c.size());
    for (std::size_t b = 0; b < bnd.size(); ++b) {
        int lo = bnd[b];
        int hi = (b + 1 < bnd.size()) ? bnd[b + 1] - 1 : nn;
        for (int i = lo; i <= hi; ++i) out[b] += c[i - 1];
    }
    return out;
}

}  // namespace

LocalOperator lump_species(const LocalOperator& op, const std::vector<int>& boundaries) {
    if (boundaries.empty() || boundaries.front() != 1)
        throw std::invalid_argument("lump_species: boundaries must start at 1");
    const int p = static_cast<int>(boundaries.size());
    const int np = p - 1;  // merged species count
    std::vector<int> levels = op.domain->levels();
    auto lbas = make_basis(std::max(np, 1), levels);

    // map each fine basis vector to its merged class index
    auto classify = [&](const TensorBasis& fine, std::size_t f) {
        auto comps = fine.unflatten(f);
        std::vector<Composition> merged(comps.size());
        for (std::size_t x = 0; x < comps.size(); ++x) merged[x] = merge_comp(comps[x], boundaries);
        return lbas->flatten(merged);
    };
    std::vector<std::size_t> dom_class(op.domain->dim()), cod_class(op.codomain->dim());
    for (std::size_t f = 0; f < op.domain->dim(); ++f) dom_class[f] = classify(*op.domain, f);
    for (std::size_t f = 0; f < op.codomain->dim(); ++f) cod_class[f] = classify(*op.codomain, f);

    // column sums over merged output classes, one vector per fine input
    LocalOperator lumped(lbas, lbas);
    std::vector<char> seen(lbas->dim(), 0);
    std::vector<std::map<std::size_t, Rat>> cls_cols(lbas->dim());
    for (std::size_t c = 0; c < op.domain->dim(); ++c) {
        std::map<std::size_t, Rat> colsum;
        for (const auto& [r, v] : op.mat.col(c)) {
            auto& cell = colsum[cod_class[r]];
            cell += v;
        }
        for (auto it = colsum.begin(); it != colsum.end();)
            it = (it->second == 0) ? colsum.erase(it) : std::next(it);
        std::size_t cls = dom_class[c];
        if (!seen[cls]) {
            seen[cls] = 1;
            cls_cols[cls] = colsum;
        } else if (cls_cols[cls] != colsum) {
            std::ostringstream os;
            os << "lump_species: lumpability violated at fine input column " << c;
            throw std::logic_error(os.str());
        }
    }
    for (std::size_t cls = 0; cls < lbas->dim(); ++cls)
        for (const auto& [r, v] : cls_cols[cls]) lumped.mat.set(r, cls, v);
    return lumped;
}

LocalOperator lump_adjacent_pair(const LocalOperator& op, int r) {
    const int n = op.domain->species();
    std::vector<int> bnd;
    for (int i = 1; i <= n + 1; ++i)
        if (i != r + 1) bnd.push_back(i);
    return lump_species(op, bnd);
}

Rat bp_cp_weight(int g, int h_in, int g_out, int h_out, const Rat& alpha, const Rat& mu, const Rat& q) {
    const Rat den = 1 + alpha;
    if (h_in == 0 && h_out == 0 && g_out == g) return (1 + alpha * rat_pow(q, 2 * g)) / den;
    if (h_in == 0 && h_out == 1 && g_out == g - 1) return alpha * (1 - rat_pow(q, 2 * g)) / den;
    if (h_in == 1 && h_out == 0 && g_out == g + 1) return (1 - mu * mu * rat_pow(q, 2 * g)) / den;
    if (h_in == 1 && h_out == 1 && g_out == g) return (alpha + mu * mu * rat_pow(q, 2 * g)) / den;
    return Rat(0);
}

LocalOperator fusion_cp(int l, int m, const Rat& alpha, const Rat& mu, const Rat& q) {
    const int n = 1;
    // staircase of ring-S factors with shifted alpha: [S_{q^{2(l-1)}a}]_{1,l+1} ... [S_a]_{l,l+1}
    std::vector<int> levels(l, 1);
    levels.push_back(m);
    auto bas = make_basis(n, levels);
    LocalOperator acc = identity_op(bas);
    for (int j = l; j >= 1; --j) {
        Rat aj = alpha * rat_pow(q, 2 * (l - j));
        auto two_bas = make_basis(n, {1, m});
        LocalOperator two(two_bas, two_bas);
        const auto& vm = two_bas->site(1);
        for (int h_in = 0; h_in <= 1; ++h_in)
            for (int bi = 0; bi < vm.dim(); ++bi) {
                int g = vm.states[bi][0];
                std::size_t col = two_bas->flatten({h_in ? eps_vec(n, 1) : eps_vec(n, 2), vm.states[bi]});
                for (int h_out = 0; h_out <= 1; ++h_out) {
                    int g_out = g + h_in - h_out;
                    if (g_out < 0 || g_out > m) continue;
                    Rat w = bp_cp_weight(g, h_in, g_out, h_out, aj, mu, q);
                    if (w == 0) continue;
                    Composition dv{g_out, m - g_out};
                    two.mat.add_to(two_bas->flatten({h_out ? eps_vec(n, 1) : eps_vec(n, 2), dv}), col, w);
                }
            }
        acc = embed_two_site(bas, two, j - 1, l) * acc;
    }
    auto xi = xi_map(n, l, q);
    auto lm_ = lambda_map(n, l);
    auto id_m = identity_op(make_basis(n, {m}));
    return embed_tensor_pair(lm_, id_m) * acc * embed_tensor_pair(xi, id_m);
}

LocalOperator continued_s_l1(int n, const Rat& q, const Rat& mu, const Rat& z, int cap) {
    const Rat den = rat_pow(q, 1) / mu - z;
    if (den == 0) throw std::domain_error("continued_s_l1: mu^{-1} q = z is singular");
    auto bas = make_basis(n, {1, cap});
    const auto& vc = bas->site(1);
    LocalOperator op(bas, bas);
    for (int j = 1; j <= n + 1; ++j) {
        for (int bi = 0; bi < vc.dim(); ++bi) {
            const Composition& beta = vc.states[bi];  // hole slot = slack, ignored by entries
            std::size_t col = bas->flatten({eps_vec(n, j), beta});
            const int babs = range_sum(beta, 1, n);
            for (int k = 1; k <= n + 1; ++k) {
                Composition delta = beta;
                delta[j - 1] += 1;
                delta[k - 1] -= 1;
                if (delta[k - 1] < 0) continue;
                if (range_sum(delta, 1, n) > cap) continue;  // truncation boundary
                Rat val;
                if (k == j && k < n + 1)
                    val = rat_pow(q, 2 * range_sum(beta, 1, k)) * (q * mu - rat_pow(q, -2 * beta[k - 1]) * z);
                else if (k == j)
                    val = q / mu - rat_pow(q, 2 * babs) * z;
                else if (k > j && k < n + 1)
                    val = -rat_pow(q, 2 * range_sum(beta, 1, k - 1)) * q * mu * (1 - rat_pow(q, 2 * beta[k - 1]));
                else if (k > j)
                    val = q * mu * (1 / (mu * mu) - rat_pow(q, 2 * babs));
                else
                    val = -rat_pow(q, 2 * range_sum(beta, 1, k - 1)) * z * (1 - rat_pow(q, 2 * beta[k - 1]));
                val /= den;
                if (val != 0) op.mat.add_to(bas->flatten({eps_vec(n, k), delta}), col, val);
            }
        }
    }
    return op;
}

std::optional<std::pair<std::size_t, std::size_t>> continued_s_negative_entry(int n, const Rat& q, const Rat& mu,
                                                                              const Rat& z, int cap) {
    auto s = continued_s_l1(n, q, mu, z, cap);
    for (std::size_t c = 0; c < s.mat.cols(); ++c)
        for (const auto& [r, v] : s.mat.col(c))
            if (v < 0) return std::make_pair(r, c);
    return std::nullopt;
}

}  // namespace qv
