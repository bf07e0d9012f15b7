#include <doctest.h>

#include "qvertex/op.hpp"
#include "qvertex/qarith.hpp"

using namespace qv;

TEST_CASE("composition enumeration order") {
    auto v11 = enumerate_compositions(1, 1);
    CHECK(v11 == std::vector<Composition>{{1, 0}, {0, 1}});
    auto v12 = enumerate_compositions(1, 2);
    CHECK(v12 == std::vector<Composition>{{2, 0}, {1, 1}, {0, 2}});
    auto v22 = enumerate_compositions(2, 2);
    CHECK(v22.size() == 6);  // stars and bars C(4,2)
    CHECK(v22.front() == comp_A(2, 2));
    CHECK(v22.back() == comp_Omega(2, 2));
    for (std::size_t i = 1; i < v22.size(); ++i) CHECK(v22[i - 1] > v22[i]);
}

TEST_CASE("flat index round trip") {
    auto b = make_basis(2, {2, 1, 2});
    CHECK(b->dim() == 6u * 3u * 6u);
    for (std::size_t f = 0; f < b->dim(); ++f) CHECK(b->flatten(b->unflatten(f)) == f);
}

TEST_CASE("charge reversal is an involution and commutes with B") {
    auto b = make_basis(2, {2});
    auto pi = charge_reversal(b);
    CHECK((pi * pi) == identity_op(b));
    Rat q = rat(2, 5);
    auto B = b_matrix(b, q);
    CHECK((B * pi) == (pi * B));
}

TEST_CASE("b_matrix entries and inverse") {
    Rat q = rat(1, 3);
    auto b = make_basis(1, {1});
    auto B = b_matrix(b, q);
    // alpha = (1,0): (q^2)_1 (q^2)_0 = 1 - q^2
    CHECK(B.mat.get(0, 0) == 1 - q * q);
    CHECK(B.mat.get(1, 1) == 1 - q * q);
    auto b0 = make_basis(1, {0});
    CHECK(b_matrix(b0, q).mat.get(0, 0) == 1);
    // B^{-1} B = Id via diagonal inversion
    std::vector<Rat> inv = b_diagonal(*b, q);
    for (auto& v : inv) v = 1 / v;
    CHECK((B.mat.mul_diag_left(inv) == SparseMat::identity(b->dim())));
}

TEST_CASE("gauge matrix") {
    Rat q = rat(3, 7);
    auto b = make_basis(1, {1, 2});
    auto ga = gauge_diagonal(*b, q);
    // coefficient on |alpha> x |beta> is q^{-alpha_1 beta_2}
    for (std::size_t f = 0; f < b->dim(); ++f) {
        auto c = b->unflatten(f);
        CHECK(ga[f] == rat_pow(q, -c[0][0] * c[1][1]));
    }
    // all particles at one site -> no cross-site pairs
    CHECK(ga[b->flatten({{0, 1}, {2, 0}})] == 1);

    // Pi^{x2} Ga Pi^{x2} = tilde(Ga) on V_1 x V_2
    auto pi = charge_reversal(b);
    auto Ga = gauge_matrix(b, q);
    auto lhs = pi * Ga * pi;
    CHECK(lhs.mat == SparseMat::diagonal(gauge_tilde_diagonal(*b, q)));
    // Ga and B commute (both diagonal)
    auto B = b_matrix(b, q);
    CHECK((Ga * B) == (B * Ga));
}

TEST_CASE("permutation operators") {
    auto b = make_basis(1, {1, 2});
    auto p = swap_adjacent(b, 0);
    CHECK(p.codomain->level(0) == 2);
    auto back = swap_adjacent(p.codomain, 0);
    CHECK((back * p) == identity_op(b));
    // P^sigma Pi^{xL} = Pi^{xL} P^sigma and B^{xL} P^sigma = P^sigma B^{xL}
    Rat q = rat(2, 3);
    auto pi_dom = charge_reversal(b);
    auto pi_cod = charge_reversal(p.codomain);
    CHECK((p * pi_dom) == (pi_cod * p));
    auto B_dom = b_matrix(b, q);
    auto B_cod = b_matrix(p.codomain, q);
    CHECK((p * B_dom) == (B_cod * p));
}

TEST_CASE("sector decomposition") {
    auto b = make_basis(1, {1, 1});
    // permutation operator is fully block-diagonal
    auto p = swap_adjacent(b, 0);
    auto rep = sector_decompose(p);
    CHECK(!rep.violation.has_value());
    CHECK(rep.sectors_domain.size() == 3);  // {2,0},{1,1},{0,2}
    CHECK(rep.sectors_domain.at({1, 1}).size() == 2);
    CHECK(rep.sectors_domain.at({2, 0}).size() == 1);

    // a deliberately corrupted operator reports the violating entry
    LocalOperator bad(b, b);
    bad.mat.set(0, 3, rat(1));  // (1,0)(1,0) <- (0,1)(0,1): crosses sectors
    auto rep2 = sector_decompose(bad);
    REQUIRE(rep2.violation.has_value());
    CHECK(rep2.violation->first == 0);
    CHECK(rep2.violation->second == 3);
}

TEST_CASE("tensor pair embedding") {
    auto a = identity_op(make_basis(1, {1}));
    auto b = identity_op(make_basis(1, {2}));
    auto ab = embed_tensor_pair(a, b);
    CHECK(ab.domain->sites() == 2);
    CHECK(ab == identity_op(make_basis(1, {1, 2})));
}
