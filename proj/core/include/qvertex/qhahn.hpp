#pragma once

#include "qvertex/op.hpp"
#include "qvertex/zr.hpp"

#include <optional>
#include <string>

namespace qv {

struct QHahnParams {
    int n = 1;
    Rat q, lambda, mu;
    int sites = 1;
    // closed boundary throughout: gamma^0 = gamma^L = 0

    void validate_admissible() const;  // |q|<1, 0<=mu<1, 0<=lambda<=1
};

// chi_{beta,gamma} = sum_{i<j} (beta_i - gamma_i) gamma_j over the n species.
long chi_stat(const std::vector<int>& beta, const std::vector<int>& gamma);

// Discrete jump weight Phi_q(gamma | beta; lambda, mu); zero unless
// gamma <= beta componentwise. Throws when (mu;q)_{|beta|} vanishes.
Rat phi_weight(const std::vector<int>& gamma, const std::vector<int>& beta, const Rat& lambda, const Rat& mu,
               const Rat& q);

// Continuous jump rate Phi'_q(gamma | beta; mu) for gamma != 0.
Rat phi_prime_rate(const std::vector<int>& gamma, const std::vector<int>& beta, const Rat& mu, const Rat& q);

// All gamma <= beta componentwise (including 0), deterministic order.
std::vector<std::vector<int>> sub_vectors(const std::vector<int>& beta);

// One parallel update of the discrete-time process on the sector basis;
// `right` selects total asymmetry to the right (else left). Columns sum to 1.
SparseMat qhahn_discrete_step_matrix(const ZRBasis& basis, const QHahnParams& p, bool right);

// Continuous-time generator (sum of local pieces) on the sector basis; the
// diagonal is the negative column sum. Site x uses mu_x when `mus` is given.
SparseMat qhahn_generator(const ZRBasis& basis, const Rat& mu, const Rat& q, bool right);
SparseMat qhahn_generator(const ZRBasis& basis, const std::vector<Rat>& mus, const Rat& q, bool right);

// D_0(a, b) = prod_x prod_i q^{b_i^x sum_{y<=x} a_[1,n+1-i]^y}; a evolves
// left, b right (base q, the convention of the direct-duality result).
Rat qhahn_d0_entry(const ZRConfig& a, const ZRConfig& b, int n, const Rat& q);
SparseMat qhahn_d0_matrix(const ZRBasis& rows, const ZRBasis& cols, const Rat& q);

struct DualityCheckResult {
    Rat discrete_residual;
    Rat continuous_residual;
};
// Exact check of P_left* D_0 = D_0 P_right and L_left* D_0 = D_0 L_right on
// the given sector bases (rows: left process, cols: right process).
DualityCheckResult direct_duality_check(const ZRBasis& rows, const ZRBasis& cols, const QHahnParams& p);

// Windowed one-step check of the D_mu duality at q-power points: the process
// steps with Phi_{q^2}(.; q^{-2l}, q^{-2m}) and D_mu is the bracket closed
// form with integer spins m. Configurations must leave one empty margin site
// on each side of the window. Returns |lhs - rhs| (exactly 0 on pass).
Rat qhahn_mu_duality_residual(const ZRConfig& eta, const ZRConfig& xi, int l, int m, const Rat& q);
// Continuous-time (lambda-derivative) version with Phi'_{q^2}(.; q^{-2m}).
Rat qhahn_mu_duality_residual_continuous(const ZRConfig& eta, const ZRConfig& xi, int m, const Rat& q);

// Species merge Pi^n_k: (a_1,...,a_n) -> (a_1,...,a_{k-1}, a_k+...+a_n).
std::vector<int> species_merge(const std::vector<int>& a, int k);
ZRConfig species_merge(const ZRConfig& c, int k);
// Lumps a sector matrix under Pi^n_k; throws with a witness when the merge
// is not lumpable. `basis` indexes the fine matrix.
SparseMat species_merge_matrix(const SparseMat& fine, const ZRBasis& basis, const ZRBasis& merged, int k);

// ---- identity suite ----

struct IdentityFailure {
    std::string which;
    std::string witness;
};
// Brute-force verification of the three q-binomial identities, the
// single-species symmetry sum, its mu-derivative corollary, and both parts
// of the multi-species summation identity, over all occupation vectors with
// entries <= bound. Returns all failures (empty on pass).
std::vector<IdentityFailure> identity_suite(int bound, int n_max, const Rat& q, const Rat& lambda, const Rat& mu);

}  // namespace qv
