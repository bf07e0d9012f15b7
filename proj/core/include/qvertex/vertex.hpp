#pragma once

#include "qvertex/op.hpp"

#include <optional>

namespace qv {

// Spectral parameter: a finite rational, or one of the two symbolic limits.
// The limits are only ever realized through dedicated closed forms.
struct SpectralValue {
    enum class Kind { Finite, Zero, Infinity } kind = Kind::Finite;
    Rat value;

    static SpectralValue finite(Rat v) { return {Kind::Finite, std::move(v)}; }
    static SpectralValue zero() { return {Kind::Zero, Rat(0)}; }
    static SpectralValue infinity() { return {Kind::Infinity, Rat(0)}; }
    bool is_finite() const { return kind == Kind::Finite; }
    bool is_zero() const { return kind == Kind::Zero || (kind == Kind::Finite && value == 0); }
    bool is_infinity() const { return kind == Kind::Infinity; }
};

struct VertexParams {
    int n = 1;
    int l = 1;
    int m = 1;
    Rat q;
    SpectralValue z;

    // Rejects singular loci: every staircase factor S(z q^{l+1-2j}) on
    // V_1 x V_m must avoid z_loc = q^{m+1}.
    void validate() const;
};

// Explicit R(z) on V_1 x V_m (three-case formula); z must avoid q^{m+1}.
LocalOperator r_matrix_l1(int n, int m, const Rat& q, const Rat& z);
// Explicit R(z) on V_l x V_1; z must avoid q^{l+1}.
LocalOperator r_matrix_m1(int n, int l, const Rat& q, const Rat& z);

// S = tilde(Ga)^{-1} R Ga with the two-site gauge. Column sums are checked
// to be exactly 1; a failure means a formula bug and throws.
LocalOperator s_from_r(const LocalOperator& r, const Rat& q);

// l=1 limits of S(z) (SpectralValue::zero / infinity), and m=1 partners.
LocalOperator s_l1_limit(int n, int m, const Rat& q, const SpectralValue& z);
LocalOperator s_m1_limit(int n, int l, const Rat& q, const SpectralValue& z);

// m -> infinity of S(z) at finite z (trivial for q > 1: all mass settles).
// Realized on V_l x V_m for a concrete m with enough headroom; throws when a
// column cannot absorb (|alpha|+|beta| exceeding m) or q <= 1.
LocalOperator s_absorber(int n, int l, int m, const Rat& q);

// Stochastic (Lambda/Xi) fusion operators.
LocalOperator xi_map(int n, int l, const Rat& q);       // V_l -> V_1^{x l}
LocalOperator lambda_map(int n, int l);                 // V_1^{x l} -> V_l
LocalOperator inv_weight_diag(int n, int l, const Rat& q);  // diagonal q^{#ascents}
LocalOperator i_embedding(int n, int l, const Rat& q);  // KRL isomorphism I_l
LocalOperator i_inverse(int n, int l, const Rat& q);    // Lambda o d, left inverse of I_l
LocalOperator symmetric_projector(int n, int l, const Rat& q);  // P+ = I_l o I_l^{-1}

// S(z) on V_l x V_m through the staircase of l=1 S-factors conjugated by
// Xi/Lambda. Handles the z = 0 / infinity limits by fusing limit factors.
LocalOperator stochastic_fuse(int n, int l, int m, const Rat& q, const SpectralValue& z);

// R(z) on V_l x V_m through KRL fusion of l=1 R-factors, read back through
// I_l. Throws if the staircase image leaves Im(I_l x id).
LocalOperator krl_fuse(int n, int l, int m, const Rat& q, const Rat& z);
// Both legs fused from V_1 x V_1 factors (used by the appendix checks).
LocalOperator krl_fuse_full(int n, int l, int m, const Rat& q, const Rat& z);

// General-purpose entry points dispatching on (l, m).
LocalOperator r_matrix(const VertexParams& p);
LocalOperator s_matrix(const VertexParams& p);

// Rogers-Pitman check: (Lambda x id) M (Xi Lambda x id) == (Lambda x id) M
// for the fused staircase M. Returns max |deviation| (0 on pass).
Rat rogers_pitman_check(int n, int l, int m, const Rat& q, const SpectralValue& z);

struct GridPoint {
    Rat q;
    SpectralValue z;
    bool sums_to_one;
    bool nonnegative;
};
// Evaluates (sum-to-one, nonnegativity) of S over a list of (q, z) points.
std::vector<GridPoint> stochasticity_check(int n, int l, int m, const std::vector<std::pair<Rat, SpectralValue>>& pts);

// l=1 inversion relation under z -> 1/z, q -> 1/q with charge reversal,
// checked entrywise; returns max |deviation|.
Rat inversion_symmetry_check(int n, int m, const Rat& q, const Rat& z);

// Lumps consecutive species blocks. `boundaries` is the increasing list
// r_1 < ... < r_p (1-based) of block starts as in the merge partition;
// block j is [r_j, r_{j+1}-1], last block ends at n+1. Requires the column
// sums over merged output classes to be constant across merged inputs and
// throws (with a witness in the message) otherwise.
LocalOperator lump_species(const LocalOperator& op, const std::vector<int>& boundaries);
// The merge of one adjacent pair {r, r+1}, yielding species count n-1.
LocalOperator lump_adjacent_pair(const LocalOperator& op, int r);

// BP/CP single-species weights (Eq. display with q -> q^2 substitution already
// applied): the four vertex weights of the alpha-deformed model.
Rat bp_cp_weight(int g, int h_in, int g_out, int h_out, const Rat& alpha, const Rat& mu, const Rat& q);
// The CP fusion composition (Lambda x id) S-ring-staircase (Xi x id) on V_l x V_m, n=1.
LocalOperator fusion_cp(int l, int m, const Rat& alpha, const Rat& mu, const Rat& q);

// Analytic continuation of the l=1 S-matrix in mu = q^{-m}, realized on
// V_1 x (occupancy-truncated V-bar) with cap `cap`. The basis is B_cap with
// the hole slot ignored by the entries.
LocalOperator continued_s_l1(int n, const Rat& q, const Rat& mu, const Rat& z, int cap);

// Scans continued_s_l1 columns for a negative entry with |beta| <= cap.
// Returns the offending (row, col) or nullopt when all entries are >= 0.
std::optional<std::pair<std::size_t, std::size_t>> continued_s_negative_entry(int n, const Rat& q, const Rat& mu,
                                                                              const Rat& z, int cap);

}  // namespace qv
