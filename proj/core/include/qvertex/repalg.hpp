#pragma once

#include "qvertex/op.hpp"

namespace qv {

enum class Gen { E, F, K, Kinv };

// Matrix of the one-site action on V_l: e_i |a> = z^{d_{i,0}} [a_i]_q |a - hat i>,
// f_i |a> = z^{-d_{i,0}} [a_{i+1}]_q |a + hat i>, k_i |a> = q^{a_{i+1}-a_i} |a>,
// indices cyclic mod n+1.
LocalOperator generator_matrix(Gen kind, int i, const BasisPtr& site_basis, const Rat& q, const Rat& z);

// Delta^{(L)}(gen) with the coproduct Delta e = 1 x e + e x k,
// Delta f = f x 1 + k^{-1} x f, Delta k = k x k. zs holds the per-leg
// spectral parameters (only i = 0 sees them).
LocalOperator coproduct_matrix(Gen kind, int i, const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs);

// Same with the alternative coproduct Delta_0 e = e x 1 + k^{-1} x e,
// Delta_0 f = 1 x f + f x k (used by the inversion proposition).
LocalOperator coproduct0_matrix(Gen kind, int i, const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs);

// Delta^{(L)}(u_0) with u_0 = exp_{q^2}(f_1) ... exp_{q^2}(f_n); the series
// truncate by nilpotency on finite-dimensional legs.
LocalOperator u0_matrix(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs);

// Delta^{(L)}(u_0) computed through the pseudo-factorization of each
// exp_{q^2}(Delta^{(L)} f_i) into L one-leg exponentials.
LocalOperator u0_matrix_pseudo_factorized(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs);

// Ground state transformation: diagonal <xi|Delta^{(L)}(u_0)|Omega^{xL}>.
// Throws if some entry vanishes.
std::vector<Rat> ground_state_diagonal(const BasisPtr& basis, const Rat& q);
LocalOperator ground_state_transform(const BasisPtr& basis, const Rat& q);

}  // namespace qv
