#include "qvertex/sim.hpp"

#include "qvertex/qarith.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qv {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t replication) {
    std::uint64_t x = master_seed;
    std::uint64_t a = splitmix64(x);
    // counter-based: mix the replication index through a second splitmix pass
    std::uint64_t y = a ^ (0xD1B54A32D192ED03ULL * (replication + 1));
    return Rng(splitmix64(y));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t Rng::pick(const std::vector<double>& probs) {
    double u = next_double();
    double acc = 0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
}

std::vector<double> to_probabilities(const std::vector<Rat>& column) {
    std::vector<double> out(column.size());
    double sum = 0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        double v = rat_double(column[i]);
        if (v < -1e-12) throw std::domain_error("to_probabilities: negative probability");
        out[i] = v < 0 ? 0.0 : v;
        sum += out[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("to_probabilities: column does not sum to 1");
    return out;
}

ZRConfig step_parallel_qhahn(const ZRConfig& cfg, const QHahnParams& p, bool right, Rng& rng) {
    const int L = static_cast<int>(cfg.size());
    const int n = static_cast<int>(cfg[0].size());
    ZRConfig out = cfg;
    // cache the per-occupation categorical tables
    static thread_local std::map<std::pair<std::vector<int>, std::pair<std::string, std::string>>,
                                 std::pair<std::vector<std::vector<int>>, std::vector<double>>>
        cache;
    auto key_of = [&](const std::vector<int>& occ) {
        return std::make_pair(occ, std::make_pair(rat_str(p.lambda) + "|" + rat_str(p.mu), rat_str(p.q)));
    };
    for (int x = 0; x < L; ++x) {
        if ((right && x == L - 1) || (!right && x == 0)) continue;  // closed boundary
        auto key = key_of(cfg[x]);
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto gammas = sub_vectors(cfg[x]);
            std::vector<Rat> w;
            w.reserve(gammas.size());
            for (const auto& g : gammas) w.push_back(phi_weight(g, cfg[x], p.lambda, p.mu, p.q));
            it = cache.emplace(key, std::make_pair(std::move(gammas), to_probabilities(w))).first;
        }
        const auto& [gammas, probs] = it->second;
        const auto& g = gammas[rng.pick(probs)];
        int dst = right ? x + 1 : x - 1;
        for (int i = 0; i < n; ++i) {
            out[x][i] -= g[i];
            out[dst][i] += g[i];
        }
    }
    return out;
}

SweepResult step_sequential(const std::vector<Composition>& cfg, const TransferSpec& spec, const Composition& aux_in,
                            bool left, Rng& rng, StepCounters* counters) {
    const int L = static_cast<int>(spec.spins.size());
    auto vl_bas = make_basis(spec.n, {spec.l});
    const auto& vl = vl_bas->site(0);
    SweepResult res{cfg, aux_in};
    int aux = vl.index.at(aux_in);

    for (int step = 0; step < L; ++step) {
        int x = left ? L - 1 - step : step;
        VertexParams vp{spec.n, spec.l, spec.spins[x], spec.q, spec.z_local[x]};
        auto s = s_matrix(vp);
        const auto& vm = s.domain->site(1);
        int sx = vm.index.at(res.config[x]);
        std::size_t col = static_cast<std::size_t>(aux) * vm.dim() + sx;
        std::vector<std::size_t> rows;
        std::vector<Rat> vals;
        for (const auto& [r, v] : s.mat.col(col)) {
            rows.push_back(r);
            vals.push_back(v);
        }
        auto probs = to_probabilities(vals);
        std::size_t r = rows[rng.pick(probs)];
        int aux2 = static_cast<int>(r / vm.dim());
        int sx2 = static_cast<int>(r % vm.dim());
        if (counters && spec.z_local[x].is_infinity()) {
            // strong blocking support check: delta_[1,k] <= beta_[1,k]
            const auto& beta = vm.states[sx];
            const auto& delta = vm.states[sx2];
            int sb = 0, sd = 0;
            for (int k = 0; k <= spec.n; ++k) {
                sb += beta[k];
                sd += delta[k];
                if (sd > sb) {
                    counters->forbidden_transitions++;
                    break;
                }
            }
        }
        aux = aux2;
        res.config[x] = vm.states[sx2];
    }
    res.aux_out = vl.states[aux];
    if (counters && res.aux_out != comp_Omega(spec.n, spec.l)) counters->aux_leaks++;
    return res;
}

ZRConfig run_continuous(const ZRConfig& cfg, const Rat& mu, const Rat& q, bool right, double t, Rng& rng) {
    const int L = static_cast<int>(cfg.size());
    const int n = static_cast<int>(cfg[0].size());
    ZRConfig cur = cfg;
    double clock = 0;
    while (true) {
        // enumerate moves and rates
        std::vector<std::pair<int, std::vector<int>>> moves;  // (site, gamma)
        std::vector<double> rates;
        double total = 0;
        for (int x = 0; x < L; ++x) {
            int dst = right ? x + 1 : x - 1;
            if (dst < 0 || dst >= L) continue;
            for (const auto& g : sub_vectors(cur[x])) {
                bool zero = true;
                for (int v : g)
                    if (v) zero = false;
                if (zero) continue;
                double r = rat_double(phi_prime_rate(g, cur[x], mu, q));
                if (r <= 0) continue;
                moves.push_back({x, g});
                rates.push_back(r);
                total += r;
            }
        }
        if (total <= 0) break;
        double u = rng.next_double();
        double dt = -std::log1p(-u) / total;
        clock += dt;
        if (clock > t) break;
        std::vector<double> probs(rates.size());
        for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = rates[i] / total;
        const auto& [x, g] = moves[rng.pick(probs)];
        int dst = right ? x + 1 : x - 1;
        for (int i = 0; i < n; ++i) {
            cur[x][i] -= g[i];
            cur[dst][i] += g[i];
        }
    }
    return cur;
}

namespace {

std::vector<int> totals_of(const ZRConfig& c) {
    std::vector<int> t(c[0].size(), 0);
    for (const auto& site : c)
        for (std::size_t i = 0; i < site.size(); ++i) t[i] += site[i];
    return t;
}

}  // namespace

std::pair<DualityEstimate, DualityEstimate> estimate_duality(const SimSpec& spec, std::size_t exact_dim_cap) {
    const int n = spec.n;
    QHahnParams qp{n, spec.q, spec.lambda, spec.mu, spec.sites};
    auto d_entry = [&](const ZRConfig& a, const ZRConfig& b) {
        return rat_double(qhahn_d0_entry(a, b, n, spec.q));
    };

    auto run_one = [&](bool forward, Rng& rng) {
        ZRConfig cur = forward ? spec.initial_left : spec.initial_right;
        auto t0 = totals_of(cur);
        if (spec.model == SimModel::QHahnParallel) {
            for (int s = 0; s < spec.steps; ++s) cur = step_parallel_qhahn(cur, qp, /*right=*/!forward, rng);
        } else {
            cur = run_continuous(cur, spec.mu, spec.q, /*right=*/!forward, spec.time, rng);
        }
        if (totals_of(cur) != t0) throw std::logic_error("estimate_duality: particle totals not conserved");
        return forward ? d_entry(cur, spec.initial_right) : d_entry(spec.initial_left, cur);
    };

    auto estimate = [&](bool forward) {
        DualityEstimate est;
        est.replications = spec.replications;
        double sum = 0, sumsq = 0;
        for (long r = 0; r < spec.replications; ++r) {
            Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(r) * 2 + (forward ? 0 : 1));
            double v = run_one(forward, rng);
            sum += v;
            sumsq += v * v;
        }
        est.mean = sum / spec.replications;
        double var = (sumsq - sum * sum / spec.replications) / (spec.replications - 1.0);
        est.std_error = std::sqrt(var > 0 ? var / spec.replications : 0.0);
        return est;
    };

    DualityEstimate fwd = estimate(true), rev = estimate(false);

    // exact references on the sector bases
    ZRBasis left_basis(n, spec.sites, totals_of(spec.initial_left));
    ZRBasis right_basis(n, spec.sites, totals_of(spec.initial_right));
    if (left_basis.dim() <= exact_dim_cap && right_basis.dim() <= exact_dim_cap) {
        auto expect = [&](bool forward) {
            const ZRBasis& bas = forward ? left_basis : right_basis;
            std::vector<Rat> p(bas.dim(), Rat(0));
            p[bas.index(forward ? spec.initial_left : spec.initial_right)] = Rat(1);
            if (spec.model == SimModel::QHahnParallel) {
                auto P = qhahn_discrete_step_matrix(bas, qp, /*right=*/!forward);
                for (int s = 0; s < spec.steps; ++s) p = P.apply(p);
            } else {
                // exp(tG) p by scaled Taylor in double precision
                auto G = qhahn_generator(bas, spec.mu, spec.q, /*right=*/!forward);
                std::vector<double> pd(bas.dim(), 0.0);
                pd[bas.index(forward ? spec.initial_left : spec.initial_right)] = 1.0;
                int K = 40;
                std::vector<double> term = pd;
                std::vector<double> acc = pd;
                for (int k = 1; k <= K; ++k) {
                    std::vector<double> nxt(bas.dim(), 0.0);
                    for (std::size_t c = 0; c < bas.dim(); ++c) {
                        if (term[c] == 0) continue;
                        for (const auto& [r, v] : G.col(c)) nxt[r] += rat_double(v) * term[c];
                    }
                    for (std::size_t i = 0; i < nxt.size(); ++i) {
                        term[i] = nxt[i] * spec.time / k;
                        acc[i] += term[i];
                    }
                }
                double e = 0;
                for (std::size_t i = 0; i < bas.dim(); ++i)
                    e += acc[i] * (forward ? d_entry(bas.config(i), spec.initial_right)
                                           : d_entry(spec.initial_left, bas.config(i)));
                return e;
            }
            double e = 0;
            for (std::size_t i = 0; i < bas.dim(); ++i)
                e += rat_double(p[i]) * (forward ? d_entry(bas.config(i), spec.initial_right)
                                                 : d_entry(spec.initial_left, bas.config(i)));
            return e;
        };
        fwd.exact = expect(true);
        rev.exact = expect(false);
    }
    return {fwd, rev};
}

}  // namespace qv
