#include "qvertex/duality.hpp"

#include "qvertex/qarith.hpp"
#include "qvertex/zr.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qv {

// ---------------- ZRBasis ----------------

ZRBasis::ZRBasis(int n, int L, std::vector<int> totals) : n_(n), L_(L), totals_(std::move(totals)) {
    if (static_cast<int>(totals_.size()) != n_) throw std::invalid_argument("ZRBasis: one total per species");
    // distribute species independently, species 1 outermost
    ZRConfig cur(L_, std::vector<int>(n_, 0));
    auto rec = [&](auto&& self, int species) -> void {
        if (species == n_) {
            configs_.push_back(cur);
            return;
        }
        auto place = [&](auto&& place_self, int site, int rem) -> void {
            if (site == L_ - 1) {
                cur[site][species] = rem;
                self(self, species + 1);
                return;
            }
            for (int v = rem; v >= 0; --v) {
                cur[site][species] = v;
                place_self(place_self, site + 1, rem - v);
            }
        };
        place(place, 0, totals_[species]);
    };
    rec(rec, 0);
    for (std::size_t i = 0; i < configs_.size(); ++i) index_[configs_[i]] = i;
}

std::size_t ZRBasis::index(const ZRConfig& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) throw std::out_of_range("ZRBasis::index: configuration outside the sector");
    return it->second;
}

// ---------------- closed-form duality functional ----------------

namespace {

int prefix(const std::vector<int>& v, int count) {  // v_1 + ... + v_count
    int s = 0;
    for (int i = 0; i < count; ++i) s += v[i];
    return s;
}

}  // namespace

Rat DualityFunctional::entry(const ZRConfig& a, const ZRConfig& b) const {
    const int L = static_cast<int>(spins.size());
    Rat val(1);
    for (int x = 0; x < L; ++x) {
        const auto& ax = a[x];
        const auto& bx = b[x];
        const int mx = spins[x];
        if (mx == kInfiniteSpin) {
            for (int i = 1; i <= n; ++i) val *= rat_pow(q, bx[i - 1] * prefix(ax, n + 1 - i));
        } else {
            const int hole = mx - prefix(ax, n);
            if (hole < 0) return Rat(0);
            val *= bracket_factorial(hole, q);
            for (int i = 0; i < n; ++i) val *= bracket_factorial(ax[i], q);
            for (int i = 1; i <= n; ++i) {
                Rat bb = bracket_binomial(mx - prefix(ax, n - i) - prefix(bx, i), ax[n - i], q);
                if (bb == 0) return Rat(0);
                val *= bb;
            }
        }
        for (int i = 1; i <= n; ++i) {
            long tail = 0;
            for (int y = x + 1; y < L; ++y) tail += prefix(a[y], n + 1 - i);
            val *= rat_pow(q, -bx[i - 1] * (2 * tail + prefix(ax, n + 1 - i)));
        }
    }
    return val;
}

Rat DualityFunctional::entry_ratio_form(const ZRConfig& a, const ZRConfig& b) const {
    const int L = static_cast<int>(spins.size());
    Rat val(1);
    for (int x = 0; x < L; ++x) {
        const auto& ax = a[x];
        const auto& bx = b[x];
        const int mx = spins[x];
        if (mx == kInfiniteSpin) {
            for (int i = 1; i <= n; ++i) val *= rat_pow(q, bx[i - 1] * prefix(ax, n + 1 - i));
        } else {
            if (mx - prefix(ax, n) < 0) return Rat(0);
            val *= bracket_factorial(mx - prefix(ax, n), q);
            for (int i = 1; i <= n; ++i) {
                if (mx - prefix(ax, n + 1 - i) < prefix(bx, i)) return Rat(0);
                val *= bracket_factorial(mx - prefix(ax, n - i) - prefix(bx, i), q) /
                       bracket_factorial(mx - prefix(ax, n + 1 - i) - prefix(bx, i), q);
            }
        }
        for (int i = 1; i <= n; ++i) {
            long tail = 0;
            for (int y = x + 1; y < L; ++y) tail += prefix(a[y], n + 1 - i);
            val *= rat_pow(q, -bx[i - 1] * (2 * tail + prefix(ax, n + 1 - i)));
        }
    }
    return val;
}

SparseMat DualityFunctional::matrix(const ZRBasis& rows, const ZRBasis& cols) const {
    SparseMat m(rows.dim(), cols.dim());
    for (std::size_t c = 0; c < cols.dim(); ++c)
        for (std::size_t r = 0; r < rows.dim(); ++r) m.set(r, c, entry(rows.config(r), cols.config(c)));
    return m;
}

namespace {

ZRConfig reduced(const TensorBasis& b, std::size_t f) {
    auto comps = b.unflatten(f);
    ZRConfig out(comps.size());
    for (std::size_t x = 0; x < comps.size(); ++x)
        out[x] = std::vector<int>(comps[x].begin(), comps[x].end() - 1);
    return out;
}

}  // namespace

SparseMat DualityFunctional::matrix(const TensorBasis& rows, const TensorBasis& cols) const {
    SparseMat m(rows.dim(), cols.dim());
    for (std::size_t c = 0; c < cols.dim(); ++c)
        for (std::size_t r = 0; r < rows.dim(); ++r) m.set(r, c, entry(reduced(rows, r), reduced(cols, c)));
    return m;
}

Rat d0_entry(const ZRConfig& a, const ZRConfig& b, int n, const Rat& q) {
    const int L = static_cast<int>(a.size());
    Rat val(1);
    for (int x = 0; x < L; ++x)
        for (int i = 1; i <= n; ++i) {
            long head = 0;
            for (int y = 0; y <= x; ++y) head += prefix(a[y], n + 1 - i);
            val *= rat_pow(q, 2 * b[x][i - 1] * head);
        }
    return val;
}

SparseMat d0_matrix(const ZRBasis& rows, const ZRBasis& cols, const Rat& q) {
    SparseMat m(rows.dim(), cols.dim());
    for (std::size_t c = 0; c < cols.dim(); ++c)
        for (std::size_t r = 0; r < rows.dim(); ++r)
            m.set(r, c, d0_entry(rows.config(r), cols.config(c), rows.species(), q));
    return m;
}

// ---------------- algebraic functional ----------------

LocalOperator duality_algebraic(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs,
                                const LocalOperator& delta_u) {
    auto ga = gauge_diagonal(*basis, q);
    auto bd = b_diagonal(*basis, q);
    (void)zs;
    SparseMat core = delta_u.mat.mul_diag_right(ga).mul_diag_left(ga);
    core = core.mul_diag_left(bd);
    // Pi on the left permutes rows
    LocalOperator out(basis, basis);
    for (std::size_t c = 0; c < core.cols(); ++c)
        for (const auto& [r, v] : core.col(c)) {
            auto comps = basis->unflatten(r);
            for (auto& cc : comps) cc = charge_reverse(cc);
            out.mat.add_to(basis->flatten(comps), c, v);
        }
    return out;
}

LocalOperator duality_algebraic_u0(const BasisPtr& basis, const Rat& q) {
    std::vector<Rat> zs(basis->sites(), Rat(1));
    return duality_algebraic(basis, q, zs, u0_matrix(basis, q, zs));
}

LocalOperator duality_gr_route_u0(const BasisPtr& basis, const Rat& q) {
    std::vector<Rat> zs(basis->sites(), Rat(1));
    auto u0 = u0_matrix(basis, q, zs);
    auto gr = ground_state_diagonal(basis, q);
    auto bd = b_diagonal(*basis, q);
    std::vector<Rat> gr_inv(gr.size()), grb_inv(gr.size());
    for (std::size_t i = 0; i < gr.size(); ++i) {
        gr_inv[i] = 1 / gr[i];
        grb_inv[i] = 1 / (gr[i] * bd[i]);
    }
    SparseMat core = u0.mat.mul_diag_right(grb_inv).mul_diag_left(gr_inv);
    LocalOperator out(basis, basis);
    for (std::size_t c = 0; c < core.cols(); ++c)
        for (const auto& [r, v] : core.col(c)) {
            auto comps = basis->unflatten(r);
            for (auto& cc : comps) cc = charge_reverse(cc);
            out.mat.add_to(basis->flatten(comps), c, v);
        }
    return out;
}

// ---------------- transfer matrices ----------------

namespace {

LocalOperator site_s_matrix(const TransferSpec& spec, int x) {
    VertexParams p{spec.n, spec.l, spec.spins[x], spec.q, spec.z_local[x]};
    return s_matrix(p);
}

}  // namespace

LocalOperator build_transfer(const TransferSpec& spec) {
    const int L = static_cast<int>(spec.spins.size());
    if (static_cast<int>(spec.z_local.size()) != L) throw std::invalid_argument("build_transfer: one z per site");
    std::vector<int> levels = spec.spins;
    levels.push_back(spec.l);
    auto dom = make_basis(spec.n, levels);
    LocalOperator acc = identity_op(dom);
    for (int j = L; j >= 1; --j) {
        auto s = site_s_matrix(spec, j - 1);  // on V_l x V_{m_j}
        auto p = swap_adjacent(make_basis(spec.n, {spec.spins[j - 1], spec.l}), 0);
        auto two = s * p;  // (S P): V_{m_j} x V_l -> V_l x V_{m_j}
        acc = embed_two_site(acc.codomain, two, j - 1, j) * acc;
    }
    return acc;
}

LocalOperator build_transfer_rev(const TransferSpec& spec) {
    const int L = static_cast<int>(spec.spins.size());
    if (static_cast<int>(spec.z_local.size()) != L) throw std::invalid_argument("build_transfer_rev: one z per site");
    std::vector<int> levels{spec.l};
    levels.insert(levels.end(), spec.spins.begin(), spec.spins.end());
    auto dom = make_basis(spec.n, levels);
    LocalOperator acc = identity_op(dom);
    for (int j = 1; j <= L; ++j) {
        auto s = site_s_matrix(spec, j - 1);  // on V_l x V_{m_j}
        auto p = swap_adjacent(make_basis(spec.n, {spec.l, spec.spins[j - 1]}), 0);
        auto two = p * s;  // (P S): V_l x V_{m_j} -> V_{m_j} x V_l
        acc = embed_two_site(acc.codomain, two, j - 1, j) * acc;
    }
    return acc;
}

Rat verify_major(const TransferSpec& spec, const std::vector<GeneratorRef>& gens, bool include_u0) {
    const int L = static_cast<int>(spec.spins.size());
    auto T = build_transfer(spec);
    auto Trev = build_transfer_rev(spec);
    auto Tt = T.transpose();

    // spectral legs: w_x = z / z_local(x); the overall z scale cancels in
    // Delta(u), only ratios matter, so use z = 1 on the auxiliary leg and
    // w_x = 1 / z_local(x). Limit sites are only valid in checks that do not
    // involve e_0/f_0 at those legs; verify_major requires finite z_local.
    std::vector<Rat> w(L);
    for (int x = 0; x < L; ++x) {
        if (!spec.z_local[x].is_finite() || spec.z_local[x].value == 0)
            throw std::invalid_argument("verify_major: finite nonzero z_local required");
        w[x] = 1 / spec.z_local[x].value;
    }
    std::vector<Rat> zs_left{Rat(1)};  // basis V_l x V^{(L)}
    zs_left.insert(zs_left.end(), w.begin(), w.end());
    std::vector<Rat> zs_right = w;  // basis V^{(L)} x V_l
    zs_right.push_back(Rat(1));

    auto left_basis = Trev.domain;    // V_l x V^{(L)}
    auto right_basis = Trev.codomain; // V^{(L)} x V_l

    Rat worst(0);
    auto run = [&](const LocalOperator& du_left, const LocalOperator& du_right) {
        auto dplus_left = duality_algebraic(left_basis, spec.q, zs_left, du_left);
        auto dplus_right = duality_algebraic(right_basis, spec.q, zs_right, du_right);
        Rat dev = (Tt * dplus_left - dplus_right * Trev).mat.max_abs();
        if (dev > worst) worst = dev;
    };
    for (const auto& g : gens)
        run(coproduct_matrix(g.kind, g.index, left_basis, spec.q, zs_left),
            coproduct_matrix(g.kind, g.index, right_basis, spec.q, zs_right));
    if (include_u0) run(u0_matrix(left_basis, spec.q, zs_left), u0_matrix(right_basis, spec.q, zs_right));
    return worst;
}

// ---------------- pinned operators ----------------

ZOperators z_operators(const TransferSpec& spec) {
    auto T = build_transfer(spec);
    auto Trev = build_transfer_rev(spec);
    auto sites = make_basis(spec.n, spec.spins);
    const auto& vl = T.codomain->site(0);
    const int a_idx = vl.index.at(comp_A(spec.n, spec.l));
    const int om_idx = vl.index.at(comp_Omega(spec.n, spec.l));
    const std::size_t ds = sites->dim();

    ZOperators out{LocalOperator(sites, sites), LocalOperator(sites, sites)};
    // Z[sigma][eta] = <Omega, sigma | T | eta, A>
    const std::size_t dl = vl.dim();
    for (std::size_t eta = 0; eta < ds; ++eta) {
        std::size_t col = eta * dl + a_idx;
        for (const auto& [row, v] : T.mat.col(col)) {
            if (row / ds == static_cast<std::size_t>(om_idx)) out.z.mat.set(row % ds, eta, v);
        }
    }
    // Z_rev[sigma][xi] = <sigma, Omega | T_rev | A, xi>
    for (std::size_t xi = 0; xi < ds; ++xi) {
        std::size_t col = static_cast<std::size_t>(a_idx) * ds + xi;
        for (const auto& [row, v] : Trev.mat.col(col)) {
            if (row % dl == static_cast<std::size_t>(om_idx)) out.z_rev.mat.set(row / dl, xi, v);
        }
    }
    return out;
}

namespace {

// pushes a single (aux, sites) basis vector through the transfer sweep
// without materializing the matrix.
struct SweepState {
    // key: (aux site-state index, flat site index)
    std::map<std::pair<int, std::size_t>, Rat> vec;
};

}  // namespace

ZColumn z_column(const TransferSpec& spec, const std::vector<Composition>& eta, const Composition& aux_in) {
    const int L = static_cast<int>(spec.spins.size());
    auto sites = make_basis(spec.n, spec.spins);
    auto vl_bas = make_basis(spec.n, {spec.l});
    const auto& vl = vl_bas->site(0);
    SweepState st;
    st.vec[{vl.index.at(aux_in), sites->flatten(eta)}] = Rat(1);
    // T: factors j = L .. 1, aux meets site j
    for (int j = L; j >= 1; --j) {
        auto s = site_s_matrix(spec, j - 1);  // V_l x V_{m_j}
        const auto& vm = s.domain->site(1);
        std::size_t stride = 1;
        for (int x = j; x < L; ++x) stride *= sites->site(x).dim();
        SweepState next;
        for (const auto& [key, c] : st.vec) {
            const auto& [aux, flat] = key;
            int sx = static_cast<int>(flat / stride % vm.dim());
            std::size_t scol = static_cast<std::size_t>(aux) * vm.dim() + sx;
            for (const auto& [srow, v] : s.mat.col(scol)) {
                int aux2 = static_cast<int>(srow / vm.dim());
                int sx2 = static_cast<int>(srow % vm.dim());
                std::size_t flat2 = flat - static_cast<std::size_t>(sx) * stride + static_cast<std::size_t>(sx2) * stride;
                auto& cell = next.vec[{aux2, flat2}];
                cell += c * v;
            }
        }
        st = std::move(next);
    }
    ZColumn out{{}, Rat(0)};
    const int om_idx = vl.index.at(comp_Omega(spec.n, spec.l));
    for (const auto& [key, c] : st.vec) {
        if (key.first == om_idx)
            out.entries[key.second] += c;
        else
            out.leak += c;
    }
    return out;
}

ZColumn z_rev_column(const TransferSpec& spec, const std::vector<Composition>& xi, const Composition& aux_in) {
    const int L = static_cast<int>(spec.spins.size());
    auto sites = make_basis(spec.n, spec.spins);
    auto vl_bas = make_basis(spec.n, {spec.l});
    const auto& vl = vl_bas->site(0);
    SweepState st;
    st.vec[{vl.index.at(aux_in), sites->flatten(xi)}] = Rat(1);
    for (int j = 1; j <= L; ++j) {
        auto s = site_s_matrix(spec, j - 1);
        const auto& vm = s.domain->site(1);
        std::size_t stride = 1;
        for (int x = j; x < L; ++x) stride *= sites->site(x).dim();
        SweepState next;
        for (const auto& [key, c] : st.vec) {
            const auto& [aux, flat] = key;
            int sx = static_cast<int>(flat / stride % vm.dim());
            std::size_t scol = static_cast<std::size_t>(aux) * vm.dim() + sx;
            for (const auto& [srow, v] : s.mat.col(scol)) {
                int aux2 = static_cast<int>(srow / vm.dim());
                int sx2 = static_cast<int>(srow % vm.dim());
                std::size_t flat2 = flat - static_cast<std::size_t>(sx) * stride + static_cast<std::size_t>(sx2) * stride;
                auto& cell = next.vec[{aux2, flat2}];
                cell += c * v;
            }
        }
        st = std::move(next);
    }
    ZColumn out{{}, Rat(0)};
    const int om_idx = vl.index.at(comp_Omega(spec.n, spec.l));
    for (const auto& [key, c] : st.vec) {
        if (key.first == om_idx)
            out.entries[key.second] += c;
        else
            out.leak += c;
    }
    return out;
}

// ---------------- padded infinite line ----------------

std::vector<PaddingStep> infinite_line_duality_check(int n, int l, int m, const Rat& q, const SpectralValue& z,
                                                     const ZRConfig& eta, const ZRConfig& xi,
                                                     const std::vector<int>& paddings) {
    const int core = static_cast<int>(std::max(eta.size(), xi.size()));
    std::vector<PaddingStep> out;
    for (int M : paddings) {
        const int L = core + 2 * M;
        TransferSpec spec{n, l, q, std::vector<int>(L, m), std::vector<SpectralValue>(L, z)};
        auto sites = make_basis(n, spec.spins);
        auto to_comps = [&](const ZRConfig& cfg) {
            std::vector<Composition> comps;
            for (int x = 0; x < L; ++x) {
                Composition c(n + 1, 0);
                if (x >= M && x < M + static_cast<int>(cfg.size()))
                    for (int i = 0; i < n; ++i) c[i] = cfg[x - M][i];
                int used = 0;
                for (int i = 0; i < n; ++i) used += c[i];
                c[n] = m - used;
                comps.push_back(c);
            }
            return comps;
        };
        auto eta_comps = to_comps(eta);
        auto xi_comps = to_comps(xi);
        auto zc = z_column(spec, eta_comps, comp_A(n, l));
        auto zrc = z_rev_column(spec, xi_comps, comp_A(n, l));
        DualityFunctional D{n, q, spec.spins};
        auto red = [&](std::size_t f) {
            auto comps = sites->unflatten(f);
            ZRConfig cfg(L);
            for (int x = 0; x < L; ++x) cfg[x] = std::vector<int>(comps[x].begin(), comps[x].end() - 1);
            return cfg;
        };
        ZRConfig eta_full = red(sites->flatten(eta_comps));
        ZRConfig xi_full = red(sites->flatten(xi_comps));
        Rat exact_lhs(0), exact_rhs(0), flip_lhs(0), flip_rhs(0);
        for (const auto& [f, v] : zc.entries) {
            auto sig = red(f);
            exact_lhs += v * D.entry(sig, xi_full);
            flip_lhs += v * D.entry(xi_full, sig);
        }
        for (const auto& [f, v] : zrc.entries) {
            auto sig = red(f);
            exact_rhs += D.entry(eta_full, sig) * v;
            flip_rhs += D.entry(sig, eta_full) * v;
        }
        Rat scale = std::max(rat_abs(flip_lhs), rat_abs(flip_rhs));
        Rat flipped = (scale == 0) ? Rat(0) : rat_abs(flip_lhs - flip_rhs) / scale;
        out.push_back({M, rat_abs(exact_lhs - exact_rhs), flipped, zc.leak});
    }
    return out;
}

// ---------------- closed boundary ----------------

std::vector<ClosedBoundaryStep> closed_boundary_check(int n, int l, const std::vector<int>& interior_spins,
                                                      int max_particles, const Rat& q, const Rat& z_int,
                                                      const std::vector<int>& endpoint_spins) {
    std::vector<ClosedBoundaryStep> out;
    const int Li = static_cast<int>(interior_spins.size());
    const int L = Li + 4;
    for (int m_end : endpoint_spins) {
        std::vector<int> spins(L);
        std::vector<SpectralValue> zl(L);
        spins[0] = spins[1] = spins[L - 2] = spins[L - 1] = m_end;
        zl[0] = zl[1] = zl[L - 2] = zl[L - 1] = SpectralValue::zero();
        for (int x = 0; x < Li; ++x) {
            spins[2 + x] = interior_spins[x];
            zl[2 + x] = SpectralValue::finite(z_int);
        }
        TransferSpec spec{n, l, q, spins, zl};
        auto sites = make_basis(n, spins);
        DualityFunctional D{n, q, spins};

        // sector: max_particles single-species... enumerate interior configs
        // with per-species totals summing to max_particles over species 1.
        std::vector<int> totals(n, 0);
        totals[0] = max_particles;
        ZRBasis interior(n, Li, totals);
        auto to_comps = [&](const ZRConfig& cfg) {
            std::vector<Composition> comps(L);
            for (int x = 0; x < L; ++x) {
                Composition c(n + 1, 0);
                if (x >= 2 && x < 2 + Li)
                    for (int i = 0; i < n; ++i) c[i] = cfg[x - 2][i];
                int used = 0;
                for (int i = 0; i < n; ++i) used += c[i];
                c[n] = spins[x] - used;
                comps[x] = c;
            }
            return comps;
        };
        auto red = [&](std::size_t f) {
            auto comps = sites->unflatten(f);
            ZRConfig cfg(L);
            for (int x = 0; x < L; ++x) cfg[x] = std::vector<int>(comps[x].begin(), comps[x].end() - 1);
            return cfg;
        };

        std::vector<ZColumn> zcols, zrcols;
        std::vector<ZRConfig> full_cfgs;
        for (std::size_t i = 0; i < interior.dim(); ++i) {
            auto comps = to_comps(interior.config(i));
            full_cfgs.push_back(red(sites->flatten(comps)));
            zcols.push_back(z_column(spec, comps, comp_A(n, l)));
            zrcols.push_back(z_rev_column(spec, comps, comp_A(n, l)));
        }
        Rat worst(0), defect(0);
        for (std::size_t ei = 0; ei < interior.dim(); ++ei) {
            Rat colsum(0);
            for (const auto& [f, v] : zcols[ei].entries) colsum += v;
            Rat d1 = rat_abs(1 - colsum);
            colsum = 0;
            for (const auto& [f, v] : zrcols[ei].entries) colsum += v;
            Rat d2 = rat_abs(1 - colsum);
            defect = std::max({defect, d1, d2});
            for (std::size_t xj = 0; xj < interior.dim(); ++xj) {
                Rat lhs(0), rhs(0);
                for (const auto& [f, v] : zcols[ei].entries) lhs += v * D.entry(red(f), full_cfgs[xj]);
                for (const auto& [f, v] : zrcols[xj].entries) rhs += D.entry(full_cfgs[ei], red(f)) * v;
                Rat dev = rat_abs(lhs - rhs);
                if (dev > worst) worst = dev;
            }
        }
        out.push_back({m_end, worst, defect});
    }
    return out;
}

// ---------------- continuous-time q-Boson generators ----------------

GeneratorPair qboson_generators(const ZRBasis& basis, const Rat& q) {
    const int n = basis.species();
    const int L = basis.sites();
    SparseMat gl(basis.dim(), basis.dim()), gr(basis.dim(), basis.dim());
    for (std::size_t c = 0; c < basis.dim(); ++c) {
        const auto& cfg = basis.config(c);
        Rat diag_l(0), diag_r(0);
        for (int x = 0; x < L; ++x) {
            for (int k = 1; k <= n; ++k) {
                if (cfg[x][k - 1] == 0) continue;
                Rat rate = rat_pow(q, 2 * prefix(cfg[x], k - 1)) * (1 - rat_pow(q, 2 * cfg[x][k - 1]));
                if (rate == 0) continue;
                if (x > 0) {  // left jump x -> x-1
                    ZRConfig to = cfg;
                    to[x][k - 1] -= 1;
                    to[x - 1][k - 1] += 1;
                    gl.add_to(basis.index(to), c, rate);
                    diag_l += rate;
                }
                if (x + 1 < L) {  // right jump x -> x+1
                    ZRConfig to = cfg;
                    to[x][k - 1] -= 1;
                    to[x + 1][k - 1] += 1;
                    gr.add_to(basis.index(to), c, rate);
                    diag_r += rate;
                }
            }
        }
        gl.add_to(c, c, -diag_l);
        gr.add_to(c, c, -diag_r);
    }
    return {std::move(gl), std::move(gr)};
}

}  // namespace qv
