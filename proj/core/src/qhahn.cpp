#include "qvertex/qhahn.hpp"

#include "qvertex/qarith.hpp"

#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qv {

namespace {

int vec_total(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

int prefix(const std::vector<int>& v, int count) {
    int s = 0;
    for (int i = 0; i < count; ++i) s += v[i];
    return s;
}

bool leq(const std::vector<int>& g, const std::vector<int>& b) {
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] > b[i]) return false;
    return true;
}

}  // namespace

void QHahnParams::validate_admissible() const {
    if (!(rat_abs(q) < 1)) throw std::domain_error("QHahnParams: need |q| < 1");
    if (!(mu >= 0 && mu < 1)) throw std::domain_error("QHahnParams: need 0 <= mu < 1");
    if (!(lambda >= 0 && lambda <= 1)) throw std::domain_error("QHahnParams: need 0 <= lambda <= 1");
}

long chi_stat(const std::vector<int>& beta, const std::vector<int>& gamma) {
    long s = 0;
    const int n = static_cast<int>(beta.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s += static_cast<long>(beta[i] - gamma[i]) * gamma[j];
    return s;
}

Rat phi_weight(const std::vector<int>& gamma, const std::vector<int>& beta, const Rat& lambda, const Rat& mu,
               const Rat& q) {
    if (!leq(gamma, beta)) return Rat(0);
    const int G = vec_total(gamma), B = vec_total(beta);
    Rat den = q_pochhammer(mu, q, B);
    if (den == 0) throw std::domain_error("phi_weight: (mu;q)_{|beta|} = 0");
    if (lambda == 0) throw std::domain_error("phi_weight: lambda = 0");
    Rat v = rat_pow(q, chi_stat(beta, gamma)) * rat_pow(mu / lambda, G) * q_pochhammer(lambda, q, G) *
            q_pochhammer(mu / lambda, q, B - G) / den;
    for (std::size_t i = 0; i < beta.size(); ++i) v *= gauss_binomial(beta[i], gamma[i], q);
    return v;
}

Rat phi_prime_rate(const std::vector<int>& gamma, const std::vector<int>& beta, const Rat& mu, const Rat& q) {
    if (!leq(gamma, beta)) return Rat(0);
    const int G = vec_total(gamma), B = vec_total(beta);
    if (G == 0) throw std::invalid_argument("phi_prime_rate: gamma = 0 has no rate (diagonal via column sum)");
    Rat den = q_pochhammer(mu * rat_pow(q, B - G), q, G);
    if (den == 0) throw std::domain_error("phi_prime_rate: vanishing Pochhammer denominator");
    Rat v = rat_pow(q, chi_stat(beta, gamma)) * rat_pow(mu, G - 1) * q_pochhammer(q, q, G - 1) / den;
    for (std::size_t i = 0; i < beta.size(); ++i) v *= gauss_binomial(beta[i], gamma[i], q);
    return v;
}

std::vector<std::vector<int>> sub_vectors(const std::vector<int>& beta) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(beta.size(), 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == beta.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= beta[i]; ++v) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

SparseMat qhahn_discrete_step_matrix(const ZRBasis& basis, const QHahnParams& p, bool right) {
    const int L = basis.sites();
    SparseMat P(basis.dim(), basis.dim());
    for (std::size_t c = 0; c < basis.dim(); ++c) {
        const auto& eta = basis.config(c);
        // emitting sites: right asymmetry emits from 1..L-1, left from 2..L
        std::vector<int> emit;
        for (int x = 0; x < L; ++x)
            if ((right && x < L - 1) || (!right && x > 0)) emit.push_back(x);
        // product over independent site draws
        std::function<void(std::size_t, ZRConfig, Rat)> rec = [&](std::size_t k, ZRConfig acc, Rat w) {
            if (w == 0) return;
            if (k == emit.size()) {
                P.add_to(basis.index(acc), c, w);
                return;
            }
            int x = emit[k];
            for (const auto& g : sub_vectors(eta[x])) {
                Rat pw = phi_weight(g, eta[x], p.lambda, p.mu, p.q);
                if (pw == 0) continue;
                ZRConfig nxt = acc;
                int dst = right ? x + 1 : x - 1;
                for (int i = 0; i < basis.species(); ++i) {
                    nxt[x][i] -= g[i];
                    nxt[dst][i] += g[i];
                }
                rec(k + 1, std::move(nxt), w * pw);
            }
        };
        rec(0, eta, Rat(1));
    }
    return P;
}

SparseMat qhahn_generator(const ZRBasis& basis, const std::vector<Rat>& mus, const Rat& q, bool right) {
    const int L = basis.sites();
    if (static_cast<int>(mus.size()) != L) throw std::invalid_argument("qhahn_generator: one mu per site");
    SparseMat G(basis.dim(), basis.dim());
    for (std::size_t c = 0; c < basis.dim(); ++c) {
        const auto& eta = basis.config(c);
        Rat diag(0);
        for (int x = 0; x < L; ++x) {
            int dst = right ? x + 1 : x - 1;
            if (dst < 0 || dst >= L) continue;
            for (const auto& g : sub_vectors(eta[x])) {
                if (vec_total(g) == 0) continue;
                Rat rate = phi_prime_rate(g, eta[x], mus[x], q);
                if (rate == 0) continue;
                ZRConfig to = eta;
                for (int i = 0; i < basis.species(); ++i) {
                    to[x][i] -= g[i];
                    to[dst][i] += g[i];
                }
                G.add_to(basis.index(to), c, rate);
                diag += rate;
            }
        }
        G.add_to(c, c, -diag);
    }
    return G;
}

SparseMat qhahn_generator(const ZRBasis& basis, const Rat& mu, const Rat& q, bool right) {
    return qhahn_generator(basis, std::vector<Rat>(basis.sites(), mu), q, right);
}

Rat qhahn_d0_entry(const ZRConfig& a, const ZRConfig& b, int n, const Rat& q) {
    Rat val(1);
    const int L = static_cast<int>(a.size());
    for (int x = 0; x < L; ++x)
        for (int i = 1; i <= n; ++i) {
            long head = 0;
            for (int y = 0; y <= x; ++y) head += prefix(a[y], n + 1 - i);
            val *= rat_pow(q, b[x][i - 1] * head);
        }
    return val;
}

SparseMat qhahn_d0_matrix(const ZRBasis& rows, const ZRBasis& cols, const Rat& q) {
    SparseMat m(rows.dim(), cols.dim());
    for (std::size_t c = 0; c < cols.dim(); ++c)
        for (std::size_t r = 0; r < rows.dim(); ++r)
            m.set(r, c, qhahn_d0_entry(rows.config(r), cols.config(c), rows.species(), q));
    return m;
}

DualityCheckResult direct_duality_check(const ZRBasis& rows, const ZRBasis& cols, const QHahnParams& p) {
    auto D = qhahn_d0_matrix(rows, cols, p.q);
    auto Pl = qhahn_discrete_step_matrix(rows, p, /*right=*/false);
    auto Pr = qhahn_discrete_step_matrix(cols, p, /*right=*/true);
    auto Ll = qhahn_generator(rows, p.mu, p.q, /*right=*/false);
    auto Lr = qhahn_generator(cols, p.mu, p.q, /*right=*/true);
    Rat d1 = (Pl.transpose() * D - D * Pr).max_abs();
    Rat d2 = (Ll.transpose() * D - D * Lr).max_abs();
    return {d1, d2};
}

namespace {

// one-step distribution of the windowed parallel update; emitting sites are
// the interior ones appropriate for the drift direction
std::map<ZRConfig, Rat> window_step(const ZRConfig& cfg, const Rat& lambda, const Rat& mu, const Rat& q, bool right) {
    const int L = static_cast<int>(cfg.size());
    const int n = static_cast<int>(cfg[0].size());
    std::map<ZRConfig, Rat> out;
    std::vector<int> emit;
    for (int x = 0; x < L; ++x)
        if ((right && x < L - 1) || (!right && x > 0)) emit.push_back(x);
    std::function<void(std::size_t, ZRConfig, Rat)> rec = [&](std::size_t k, ZRConfig acc, Rat w) {
        if (w == 0) return;
        if (k == emit.size()) {
            out[acc] += w;
            return;
        }
        int x = emit[k];
        for (const auto& g : sub_vectors(cfg[x])) {
            Rat pw = phi_weight(g, cfg[x], lambda, mu, q);
            if (pw == 0) continue;
            ZRConfig nxt = acc;
            int dst = right ? x + 1 : x - 1;
            for (int i = 0; i < n; ++i) {
                nxt[x][i] -= g[i];
                nxt[dst][i] += g[i];
            }
            rec(k + 1, std::move(nxt), w * pw);
        }
    };
    rec(0, cfg, Rat(1));
    return out;
}

Rat dmu_window(const ZRConfig& a, const ZRConfig& b, int n, int m, const Rat& q);

}  // namespace

Rat qhahn_mu_duality_residual(const ZRConfig& eta, const ZRConfig& xi, int l, int m, const Rat& q) {
    const int n = static_cast<int>(eta[0].size());
    const Rat q2 = q * q;
    const Rat lam2 = rat_pow(q2, -l), mu2 = rat_pow(q2, -m);
    auto stepped_eta = window_step(eta, lam2, mu2, q2, /*right=*/false);
    auto stepped_xi = window_step(xi, lam2, mu2, q2, /*right=*/true);
    Rat lhs(0), rhs(0);
    for (const auto& [sig, w] : stepped_eta) lhs += w * dmu_window(sig, xi, n, m, q);
    for (const auto& [sig, w] : stepped_xi) rhs += dmu_window(eta, sig, n, m, q) * w;
    return rat_abs(lhs - rhs);
}

Rat qhahn_mu_duality_residual_continuous(const ZRConfig& eta, const ZRConfig& xi, int m, const Rat& q) {
    const int n = static_cast<int>(eta[0].size());
    const int L = static_cast<int>(eta.size());
    const Rat q2 = q * q;
    const Rat mu2 = rat_pow(q2, -m);
    Rat lhs(0), rhs(0);
    // generator rows applied to the duality function, both drifts
    auto apply_gen = [&](const ZRConfig& cfg, bool right, auto&& f) {
        Rat total(0), diag(0);
        for (int x = 0; x < L; ++x) {
            int dst = right ? x + 1 : x - 1;
            if (dst < 0 || dst >= L) continue;
            for (const auto& g : sub_vectors(cfg[x])) {
                if (vec_total(g) == 0) continue;
                Rat rate = phi_prime_rate(g, cfg[x], mu2, q2);
                if (rate == 0) continue;
                ZRConfig to = cfg;
                for (int i = 0; i < n; ++i) {
                    to[x][i] -= g[i];
                    to[dst][i] += g[i];
                }
                total += rate * f(to);
                diag += rate;
            }
        }
        total -= diag * f(cfg);
        return total;
    };
    lhs = apply_gen(eta, /*right=*/false, [&](const ZRConfig& s) { return dmu_window(s, xi, n, m, q); });
    rhs = apply_gen(xi, /*right=*/true, [&](const ZRConfig& s) { return dmu_window(eta, s, n, m, q); });
    return rat_abs(lhs - rhs);
}

namespace {

Rat dmu_window(const ZRConfig& a, const ZRConfig& b, int n, int m, const Rat& q) {
    const int L = static_cast<int>(a.size());
    Rat val(1);
    for (int x = 0; x < L; ++x) {
        const auto& ax = a[x];
        const auto& bx = b[x];
        const int hole = m - prefix(ax, n);
        if (hole < 0) return Rat(0);
        val *= bracket_factorial(hole, q);
        for (int i = 0; i < n; ++i) val *= bracket_factorial(ax[i], q);
        for (int i = 1; i <= n; ++i) {
            Rat bb = bracket_binomial(m - prefix(ax, n - i) - prefix(bx, i), ax[n - i], q);
            if (bb == 0) return Rat(0);
            val *= bb;
            long tail = 0;
            for (int y = x + 1; y < L; ++y) tail += prefix(a[y], n + 1 - i);
            val *= rat_pow(q, -bx[i - 1] * (2 * tail + prefix(ax, n + 1 - i)));
        }
    }
    return val;
}

}  // namespace

std::vector<int> species_merge(const std::vector<int>& a, int k) {
    std::vector<int> out(a.begin(), a.begin() + k);
    for (std::size_t i = k; i < a.size(); ++i) out[k - 1] += a[i];
    return out;
}

ZRConfig species_merge(const ZRConfig& c, int k) {
    ZRConfig out(c.size());
    for (std::size_t x = 0; x < c.size(); ++x) out[x] = species_merge(c[x], k);
    return out;
}

SparseMat species_merge_matrix(const SparseMat& fine, const ZRBasis& basis, const ZRBasis& merged, int k) {
    std::vector<std::size_t> cls(basis.dim());
    for (std::size_t f = 0; f < basis.dim(); ++f) cls[f] = merged.index(species_merge(basis.config(f), k));
    SparseMat out(merged.dim(), merged.dim());
    std::vector<char> seen(merged.dim(), 0);
    std::vector<std::map<std::size_t, Rat>> ref(merged.dim());
    for (std::size_t c = 0; c < basis.dim(); ++c) {
        std::map<std::size_t, Rat> colsum;
        for (const auto& [r, v] : fine.col(c)) {
            auto& cell = colsum[cls[r]];
            cell += v;
        }
        for (auto it = colsum.begin(); it != colsum.end();)
            it = (it->second == 0) ? colsum.erase(it) : std::next(it);
        if (!seen[cls[c]]) {
            seen[cls[c]] = 1;
            ref[cls[c]] = colsum;
        } else if (ref[cls[c]] != colsum) {
            std::ostringstream os;
            os << "species_merge_matrix: lumpability violated at fine column " << c;
            throw std::logic_error(os.str());
        }
    }
    for (std::size_t cl = 0; cl < merged.dim(); ++cl)
        for (const auto& [r, v] : ref[cl]) out.set(r, cl, v);
    return out;
}

// ---------------- identity suite ----------------

namespace {

std::vector<std::vector<int>> boxed_vectors(int n, int bound) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= bound; ++v) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

std::vector<IdentityFailure> identity_suite(int bound, int n_max, const Rat& q, const Rat& lambda, const Rat& mu) {
    std::vector<IdentityFailure> fails;
    auto record = [&](const std::string& which, const std::string& wit) { fails.push_back({which, wit}); };

    // Pascal-type: binom(n,k-1) + q^k binom(n,k) = binom(n+1,k)
    for (int nn = 0; nn <= 2 * bound + 2; ++nn)
        for (int k = 0; k <= nn + 1; ++k) {
            Rat lhs = gauss_binomial(nn, k - 1, q) + rat_pow(q, k) * gauss_binomial(nn, k, q);
            if (lhs != gauss_binomial(nn + 1, k, q)) {
                std::ostringstream os;
                os << "n=" << nn << " k=" << k;
                record("pascal", os.str());
            }
        }

    // two-variable convolution identity
    for (int e1 = 0; e1 <= bound; ++e1)
        for (int e2 = 0; e2 <= bound; ++e2)
            for (int x1 = 0; x1 <= bound; ++x1)
                for (int x2 = 0; x2 <= bound; ++x2)
                    for (int l = 0; l <= e1 + e2; ++l) {
                        Rat lhs(0);
                        for (int g1 = 0; g1 <= l; ++g1) {
                            int g2 = l - g1;
                            if (g1 > e1 || g2 > e2) continue;
                            lhs += gauss_binomial(e1, g1, q) * gauss_binomial(e2, g2, q) *
                                   rat_pow(q, static_cast<long>(e1 - g1) * g2) * rat_pow(q, x1 * l + x2 * g1);
                        }
                        Rat rhs = gauss_binomial(e1 + e2, l, q) * rat_pow(q, static_cast<long>(l) * (x1 + x2));
                        if (lhs != rhs) {
                            std::ostringstream os;
                            os << "eta=(" << e1 << "," << e2 << ") xi=(" << x1 << "," << x2 << ") l=" << l;
                            record("convolution", os.str());
                        }
                    }

    // multi-species summation identity
    for (int n = 2; n <= n_max; ++n) {
        auto etas = boxed_vectors(n, bound > 2 ? 2 : bound);
        auto xis = boxed_vectors(n, 1);
        for (const auto& eta : etas)
            for (const auto& xi : xis)
                for (int m = 0; m <= vec_total(eta); ++m) {
                    Rat lhs(0);
                    for (const auto& g : sub_vectors(eta)) {
                        if (vec_total(g) != m) continue;
                        long e = 0;
                        for (int i = 1; i <= n; ++i) e += static_cast<long>(xi[i - 1]) * prefix(g, n + 1 - i);
                        Rat t = rat_pow(q, chi_stat(eta, g)) * rat_pow(q, e);
                        for (int i = 0; i < n; ++i) t *= gauss_binomial(eta[i], g[i], q);
                        lhs += t;
                    }
                    Rat rhs = gauss_binomial(vec_total(eta), m, q) * rat_pow(q, static_cast<long>(m) * vec_total(xi));
                    if (lhs != rhs) record("multispecies-sum", "n=" + std::to_string(n) + " m=" + std::to_string(m));
                }
    }

    // single-species symmetry: sum_j Phi(j|m) q^{jy} = sum_s Phi(s|y) q^{sm}
    for (int m = 0; m <= 2 * bound; ++m)
        for (int y = 0; y <= 2 * bound; ++y) {
            Rat lhs(0), rhs(0);
            for (int j = 0; j <= m; ++j) lhs += phi_weight({j}, {m}, lambda, mu, q) * rat_pow(q, j * y);
            for (int s = 0; s <= y; ++s) rhs += phi_weight({s}, {y}, lambda, mu, q) * rat_pow(q, s * m);
            if (lhs != rhs) record("bc-symmetry", "m=" + std::to_string(m) + " y=" + std::to_string(y));
            if (y == 0 && lhs != 1) record("bc-sum-to-one", "m=" + std::to_string(m));
        }

    // mu-derivative corollary via Phi'
    for (int m = 0; m <= 2 * bound; ++m)
        for (int y = 0; y <= 2 * bound; ++y) {
            Rat lhs(0), rhs(0);
            for (int j = 1; j <= m; ++j) lhs += phi_prime_rate({j}, {m}, mu, q) * (rat_pow(q, j * y) - 1);
            for (int s = 1; s <= y; ++s) rhs += phi_prime_rate({s}, {y}, mu, q) * (rat_pow(q, s * m) - 1);
            if (lhs != rhs) record("bc2-derivative", "m=" + std::to_string(m) + " y=" + std::to_string(y));
        }

    // multi-species identity, both parts
    for (int n = 1; n <= n_max; ++n) {
        auto etas = boxed_vectors(n, bound > 2 ? 2 : bound);
        auto xis = boxed_vectors(n, bound > 2 ? 2 : bound);
        for (const auto& eta : etas)
            for (const auto& xi : xis) {
                Rat lhs(0), rhs(0);
                for (const auto& g : sub_vectors(eta)) {
                    long e = 0;
                    for (int i = 1; i <= n; ++i) e += static_cast<long>(xi[i - 1]) * prefix(g, n + 1 - i);
                    lhs += phi_weight(g, eta, lambda, mu, q) * rat_pow(q, e);
                }
                for (const auto& g : sub_vectors(xi)) {
                    long e = 0;
                    for (int i = 1; i <= n; ++i) e += static_cast<long>(eta[i - 1]) * prefix(g, n + 1 - i);
                    rhs += phi_weight(g, xi, lambda, mu, q) * rat_pow(q, e);
                }
                if (lhs != rhs) record("prop-identity-1", "n=" + std::to_string(n));

                Rat lhs2(0), rhs2(0);
                for (const auto& g : sub_vectors(eta)) {
                    if (vec_total(g) == 0) continue;
                    long e = 0;
                    for (int i = 1; i <= n; ++i) e += static_cast<long>(xi[i - 1]) * prefix(g, n + 1 - i);
                    lhs2 += phi_prime_rate(g, eta, mu, q) * (rat_pow(q, e) - 1);
                }
                for (const auto& g : sub_vectors(xi)) {
                    if (vec_total(g) == 0) continue;
                    long e = 0;
                    for (int i = 1; i <= n; ++i) e += static_cast<long>(eta[i - 1]) * prefix(g, n + 1 - i);
                    rhs2 += phi_prime_rate(g, xi, mu, q) * (rat_pow(q, e) - 1);
                }
                if (lhs2 != rhs2) record("prop-identity-2", "n=" + std::to_string(n));
            }
    }
    return fails;
}

}  // namespace qv
