#pragma once

#include "qvertex/op.hpp"
#include "qvertex/repalg.hpp"
#include "qvertex/vertex.hpp"
#include "qvertex/zr.hpp"

#include <optional>

namespace qv {

// Closed-form duality functional. Entries are indexed as D(a, b) where a is
// the configuration of the left-evolving process and b the right-evolving
// one; every verified identity takes the form (left)* D = D (right).
//
// site x carries spin m_x; a site marked with m_x = kInfiniteSpin uses the
// m -> infinity per-site factor instead.
struct DualityFunctional {
    static constexpr int kInfiniteSpin = -1;

    int n = 1;
    Rat q;
    std::vector<int> spins;

    // a, b: reduced occupation vectors per site (n entries each).
    Rat entry(const ZRConfig& a, const ZRConfig& b) const;
    // Same value computed through the factorial-ratio form; the two routes
    // are asserted equal in tests.
    Rat entry_ratio_form(const ZRConfig& a, const ZRConfig& b) const;

    // Matrix with D(a, b) over basis rows a (left) and columns b (right).
    SparseMat matrix(const ZRBasis& rows, const ZRBasis& cols) const;
    // Matrix over tensor-product bases (compositions; the hole slot is dropped).
    SparseMat matrix(const TensorBasis& rows, const TensorBasis& cols) const;
};

// All-spins-infinite limit D_0 (vertex-model normalization, base q^2):
// D_0(a, b) = prod_x prod_i q^{2 b_i^x sum_{y<=x} a_[1,n+1-i]^y}.
Rat d0_entry(const ZRConfig& a, const ZRConfig& b, int n, const Rat& q);
SparseMat d0_matrix(const ZRBasis& rows, const ZRBasis& cols, const Rat& q);

// D+(u) = Pi^{(x)L} B^{(x)L} Ga Delta^{(L)}(u) Ga on the given basis. This
// is the exactly-normalized algebraic functional used by the transfer-matrix
// identities; the closed form above matches it up to per-sector constants.
LocalOperator duality_algebraic(const BasisPtr& basis, const Rat& q, const std::vector<Rat>& zs,
                                const LocalOperator& delta_u);
LocalOperator duality_algebraic_u0(const BasisPtr& basis, const Rat& q);
// The Gr-based route Pi Gr^{-1} Delta(u0) Gr^{-1} B^{-1} (equal up to
// per-sector constants; cross-checked in tests).
LocalOperator duality_gr_route_u0(const BasisPtr& basis, const Rat& q);

// ---- transfer matrices ----

struct TransferSpec {
    int n = 1;
    int l = 1;           // auxiliary spin
    Rat q;
    std::vector<int> spins;                // m_x
    std::vector<SpectralValue> z_local;    // local spectral value z/w_x per site
};

// T : V^{(L)} x V_l -> V_l x V^{(L)} (left jumps), built as
// (S(z/w_1)P)_{12} ... (S(z/w_L)P)_{L,L+1}.
LocalOperator build_transfer(const TransferSpec& spec);
// T_rev : V_l x V^{(L)} -> V^{(L)} x V_l (right jumps).
LocalOperator build_transfer_rev(const TransferSpec& spec);

// Exact check of T* D+(u) = D+(u) T_rev for the given generator monomials;
// returns the max |residual| over all requested u (0 on success).
struct GeneratorRef {
    Gen kind;
    int index;
};
Rat verify_major(const TransferSpec& spec, const std::vector<GeneratorRef>& gens, bool include_u0);

// ---- pinned particle-system operators ----

// Z[sigma][eta] = <Omega, sigma| T |eta, A>,  Z_rev[sigma][xi] = <sigma, Omega| T_rev |A, xi>.
struct ZOperators {
    LocalOperator z;      // on V^{(L)}
    LocalOperator z_rev;  // on V^{(L)}
};
ZOperators z_operators(const TransferSpec& spec);

// Column of Z from one input configuration, computed by sweeping a vector
// through the factors (no big matrix); also returns the auxiliary leak mass
// sum_{iota != Omega, sigma} <iota, sigma| T |eta, aux_in>.
struct ZColumn {
    std::map<std::size_t, Rat> entries;  // flat index in V^{(L)} -> value
    Rat leak;
};
ZColumn z_column(const TransferSpec& spec, const std::vector<Composition>& eta, const Composition& aux_in);
ZColumn z_rev_column(const TransferSpec& spec, const std::vector<Composition>& xi, const Composition& aux_in);

// ---- infinite line via padding ----

struct PaddingStep {
    int padding;
    Rat exact_residual;       // Z* D - D Z_rev at (eta, xi): identically 0
    Rat flipped_rel_residual; // Z_rev* D - D Z relative: decays geometrically
    Rat leak;                 // auxiliary leak mass of the T column
};
// eta, xi: reduced occupation vectors on a core window; m: homogeneous spin.
std::vector<PaddingStep> infinite_line_duality_check(int n, int l, int m, const Rat& q, const SpectralValue& z,
                                                     const ZRConfig& eta, const ZRConfig& xi,
                                                     const std::vector<int>& paddings);

// ---- closed boundary via endpoint-spin growth ----

struct ClosedBoundaryStep {
    int endpoint_spin;
    Rat residual_inf_norm;       // max |Z* D - D Z_rev| over the sector: identically 0
    Rat stochastic_defect;       // max over columns of |1 - colsum(Z)|, |1 - colsum(Z_rev)|
};
// Lattice: [absorber, sink, interior..., sink, absorber]; endpoint sites get
// spin m_end and local spectral Zero; interior sites spin m_int, local z.
std::vector<ClosedBoundaryStep> closed_boundary_check(int n, int l, const std::vector<int>& interior_spins,
                                                      int max_particles, const Rat& q, const Rat& z_int,
                                                      const std::vector<int>& endpoint_spins);

// ---- continuous-time q-Boson generators (l = 1 route) ----

// Y^x - Id summed over sites: species-k particles jump one site (left for
// the first operator, right for the second) with rate
// q^{2 a_[1,k-1]}(1 - q^{2 a_k}); rates are read off S(infinity) at l = 1.
struct GeneratorPair {
    SparseMat gen_left;
    SparseMat gen_right;
};
GeneratorPair qboson_generators(const ZRBasis& basis, const Rat& q);

}  // namespace qv
