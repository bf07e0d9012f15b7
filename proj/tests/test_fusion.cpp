#include <doctest.h>

#include "qvertex/qarith.hpp"
#include "qvertex/repalg.hpp"
#include "qvertex/vertex.hpp"

using namespace qv;

namespace {

// S built by gauge-conjugating the KRL-fused R
LocalOperator gauge_of_krl(int n, int l, int m, const Rat& q, const Rat& z) {
    return s_from_r(krl_fuse(n, l, m, q, z), q);
}

LocalOperator embed_s(const BasisPtr& bas, int n, int m_right, const Rat& q, const Rat& z, int a, int b) {
    return embed_two_site(bas, s_from_r(r_matrix_l1(n, m_right, q, z), q), a, b);
}

}  // namespace

TEST_CASE("fusion trivial cases") {
    Rat q = rat(2, 3), z = rat(5, 7);
    CHECK(krl_fuse(1, 1, 2, q, z).mat == r_matrix_l1(1, 2, q, z).mat);
    CHECK(stochastic_fuse(1, 1, 2, q, SpectralValue::finite(z)).mat == s_from_r(r_matrix_l1(1, 2, q, z), q).mat);
}

TEST_CASE("Lambda Xi = Id and Rogers-Pitman") {
    Rat q = rat(3, 5);
    for (auto [n, l] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {1, 3}}) {
        CHECK((lambda_map(n, l) * xi_map(n, l, q)) == identity_op(make_basis(n, {l})));
        CHECK((i_inverse(n, l, q) * i_embedding(n, l, q)) == identity_op(make_basis(n, {l})));
        auto p = symmetric_projector(n, l, q);
        CHECK((p * p) == p);
    }
    CHECK(rogers_pitman_check(1, 2, 1, rat(3, 5), SpectralValue::finite(rat(5, 7))) == 0);
    CHECK(rogers_pitman_check(1, 1, 2, rat(3, 5), SpectralValue::finite(rat(5, 7))) == 0);
    CHECK(rogers_pitman_check(2, 2, 2, rat(3, 5), SpectralValue::finite(rat(5, 7))) == 0);
}

TEST_CASE("I_l intertwines the coproduct") {
    // I_l pi_l(u) = Delta^{(l)}(u) I_l for u in {e_i, f_i, k_i}
    Rat q = rat(2, 7);
    for (auto [n, l] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}}) {
        auto iemb = i_embedding(n, l, q);
        auto vl = make_basis(n, {l});
        auto seq = make_basis(n, std::vector<int>(l, 1));
        std::vector<Rat> zs(l, rat(1));
        for (int i = 1; i <= n; ++i)
            for (auto kind : {Gen::E, Gen::F, Gen::K}) {
                auto one = generator_matrix(kind, i, vl, q, rat(1));
                auto many = coproduct_matrix(kind, i, seq, q, zs);
                CHECK((iemb * one) == (many * iemb));
            }
    }
}

TEST_CASE("appendix 8x8: fused l=1, m=2 block") {
    Rat q = rat(2, 3), z = rat(5, 7);
    // R on V_1 x V_2 via full fusion of V_1 x V_1 factors
    auto fused = krl_fuse_full(1, 1, 2, q, z);
    auto direct = r_matrix_l1(1, 2, q, z);
    CHECK(fused.mat == direct.mat);

    // spot entries of the printed 8x8: action on |10> x |11>
    auto bas = direct.domain;
    std::size_t col = bas->flatten({{1, 0}, {1, 1}});
    CHECK(direct.mat.get(bas->flatten({{1, 0}, {1, 1}}), col) == q * (q - z) / (rat_pow(q, 3) - z));
    CHECK(direct.mat.get(bas->flatten({{0, 1}, {2, 0}}), col) == (q * q - 1) / (rat_pow(q, 3) - z));
    // printed middle entry q^2 (q-z) / ((q^2+1)(q^3-z)) appears as the
    // Ih-weighted readback; check via the projector sandwich below instead.

    // projector property of R-check at z = q^{-2}
    auto rch = swap_adjacent(make_basis(1, {1, 1}), 0) * r_matrix_l1(1, 1, q, rat_pow(q, -2));
    CHECK((rch * rch) == rch);
    // and it equals the symmetric projector onto V_2
    CHECK(rch == symmetric_projector(1, 2, q));
}

TEST_CASE("Eq. Stronger: all four projector identities, l = 2") {
    Rat z = rat(5, 7);
    for (auto [n, m, q] : std::vector<std::tuple<int, int, Rat>>{{1, 1, rat(2, 3)}, {1, 2, rat(2, 3)}, {2, 2, rat(3, 4)}}) {
        const int l = 2;
        std::vector<int> levels{1, 1, m};
        auto bas = make_basis(n, levels);
        auto r13_lo = embed_two_site(bas, r_matrix_l1(n, m, q, z / q), 0, 2);
        auto r23_lo = embed_two_site(bas, r_matrix_l1(n, m, q, z * q), 1, 2);
        auto r13_hi = embed_two_site(bas, r_matrix_l1(n, m, q, z * q), 0, 2);
        auto r23_hi = embed_two_site(bas, r_matrix_l1(n, m, q, z / q), 1, 2);
        auto asc = r13_lo * r23_hi;   // R_{1,3}(z q^{1-l}) R_{2,3}(z q^{l-1})
        auto desc = r13_hi * r23_lo;  // R_{1,3}(z q^{l-1}) R_{2,3}(z q^{1-l})
        auto pp = embed_tensor_pair(symmetric_projector(n, l, q), identity_op(make_basis(n, {m})));
        auto a = pp * asc * pp;
        auto b = pp * asc;
        auto c = pp * desc * pp;
        auto d = desc * pp;
        CHECK(a == b);
        CHECK(b == c);
        CHECK(c == d);
    }
}

TEST_CASE("stochastic fusion reproduces the printed l = m = 2 action") {
    Rat q = rat(3, 5), alpha = rat(2, 7);
    Rat z = -alpha * rat_pow(q, 4);
    auto s = stochastic_fuse(1, 2, 2, q, SpectralValue::finite(z));
    auto bas = s.domain;
    auto idx = [&](int a1, int a2, int b1, int b2) {
        return bas->flatten({{a1, a2}, {b1, b2}});
    };
    const Rat den1 = 1 + alpha, den2 = (1 + alpha * q * q) * (1 + alpha);
    CHECK(s.mat.get(idx(0, 2, 0, 2), idx(0, 2, 0, 2)) == 1);
    CHECK(s.mat.get(idx(2, 0, 2, 0), idx(2, 0, 2, 0)) == 1);
    // |02> x |11>
    CHECK(s.mat.get(idx(0, 2, 1, 1), idx(0, 2, 1, 1)) == (1 + alpha * rat_pow(q, 4)) / den1);
    CHECK(s.mat.get(idx(1, 1, 0, 2), idx(0, 2, 1, 1)) == (1 - rat_pow(q, 4)) * alpha / den1);
    // |02> x |20>, including the editorially marked q^2 coefficient
    CHECK(s.mat.get(idx(0, 2, 2, 0), idx(0, 2, 2, 0)) ==
          (1 + alpha * rat_pow(q, 4)) * (1 + alpha * rat_pow(q, 6)) / den2);
    CHECK(s.mat.get(idx(1, 1, 1, 1), idx(0, 2, 2, 0)) ==
          (1 + q * q) * (1 - rat_pow(q, 4)) * (1 + alpha * rat_pow(q, 4)) * alpha / den2);
    CHECK(s.mat.get(idx(2, 0, 0, 2), idx(0, 2, 2, 0)) ==
          (q * q - rat_pow(q, 4)) * (1 - rat_pow(q, 4)) * alpha * alpha / den2);
    // |11> x |20>
    CHECK(s.mat.get(idx(2, 0, 1, 1), idx(1, 1, 2, 0)) == alpha * (1 - rat_pow(q, 4)) / den1);
    CHECK(s.mat.get(idx(1, 1, 2, 0), idx(1, 1, 2, 0)) == (1 + alpha * rat_pow(q, 4)) / den1);
    // |11> x |11>: the printed S-form middle denominator q^5 disagrees with the
    // R-form display and with column sums; fusion fixes it to q^6.
    CHECK(s.mat.get(idx(0, 2, 2, 0), idx(1, 1, 1, 1)) ==
          (1 - rat_pow(q, -2)) * (1 + alpha * rat_pow(q, 4)) / den2);
    Rat poly = rat_pow(q, 6) * z - 2 * rat_pow(q, 4) * z + rat_pow(q, 4) + q * q * z * z - 2 * q * q * z + z;
    CHECK(s.mat.get(idx(1, 1, 1, 1), idx(1, 1, 1, 1)) == poly / (rat_pow(q, 6) * den2));
    CHECK(s.mat.get(idx(2, 0, 0, 2), idx(1, 1, 1, 1)) ==
          (1 - q * q) * (rat_pow(q, -2) + alpha * q * q) * alpha / den2);
    // |11> x |02>
    CHECK(s.mat.get(idx(1, 1, 0, 2), idx(1, 1, 0, 2)) == (1 + alpha * rat_pow(q, 4)) / (rat_pow(q, 4) * den1));
    CHECK(s.mat.get(idx(0, 2, 1, 1), idx(1, 1, 0, 2)) == (1 - rat_pow(q, -4)) / den1);
    // |20> x |02>
    CHECK(s.mat.get(idx(2, 0, 0, 2), idx(2, 0, 0, 2)) ==
          (rat_pow(q, -4) + alpha) * (rat_pow(q, -4) + alpha * q * q) / den2);
    CHECK(s.mat.get(idx(1, 1, 1, 1), idx(2, 0, 0, 2)) ==
          (1 + q * q) * (1 - rat_pow(q, -4)) * (rat_pow(q, -4) + alpha) / den2);
    CHECK(s.mat.get(idx(0, 2, 2, 0), idx(2, 0, 0, 2)) == (1 - rat_pow(q, -2)) * (1 - rat_pow(q, -4)) / den2);
    // |20> x |11>
    CHECK(s.mat.get(idx(2, 0, 1, 1), idx(2, 0, 1, 1)) == (rat_pow(q, -4) + alpha) / den1);
    CHECK(s.mat.get(idx(1, 1, 2, 0), idx(2, 0, 1, 1)) == (1 - rat_pow(q, -4)) / den1);
}

TEST_CASE("fusion equivalence: KRL vs stochastic") {
    for (auto [l, m, n] : std::vector<std::array<int, 3>>{{2, 2, 1}, {2, 1, 2}, {2, 2, 2}}) {
        for (const auto& [q, z] : std::vector<std::pair<Rat, Rat>>{
                 {rat(2, 3), rat(5, 7)}, {rat(3, 2), rat(1, 5)}, {rat(2, 5), rat(9, 4)}}) {
            auto a = gauge_of_krl(n, l, m, q, z);
            auto b = stochastic_fuse(n, l, m, q, SpectralValue::finite(z));
            CHECK(a.mat == b.mat);
        }
    }
}

TEST_CASE("Yang-Baxter for S") {
    for (int n : {1, 2}) {
        for (const auto& zs : std::vector<std::array<Rat, 3>>{
                 {rat(2), rat(3), rat(5)}, {rat(1, 2), rat(7, 3), rat(9, 5)}, {rat(4, 3), rat(3, 7), rat(11, 6)}}) {
            Rat q = rat(2, 3);
            auto [z1, z2, z3] = zs;
            for (int m3 : {1, 2}) {
                auto bas = make_basis(n, {1, 1, m3});
                auto s12 = embed_two_site(bas, s_from_r(r_matrix_l1(n, 1, q, z1 / z2), q), 0, 1);
                auto s13 = embed_s(bas, n, m3, q, z1 / z3, 0, 2);
                auto s23 = embed_s(bas, n, m3, q, z2 / z3, 1, 2);
                CHECK((s12 * s13 * s23) == (s23 * s13 * s12));
            }
        }
    }
}

TEST_CASE("transpose relation") {
    Rat q = rat(2, 3), z = rat(5, 7);
    for (auto [l, m, n] : std::vector<std::array<int, 3>>{{1, 1, 1}, {1, 2, 2}, {2, 2, 1}}) {
        LocalOperator r = (l == 1) ? r_matrix_l1(n, m, q, z) : krl_fuse(n, l, m, q, z);
        auto bas = r.domain;
        auto pi = charge_reversal(bas);
        auto B = b_matrix(bas, q);
        CHECK((pi * B * r) == (r.transpose() * pi * B));
    }
}

TEST_CASE("unit normalization and conservation for fused operators") {
    Rat q = rat(2, 3), z = rat(5, 7);
    for (auto [l, m, n] : std::vector<std::array<int, 3>>{{1, 1, 1}, {1, 2, 1}, {2, 1, 2}, {2, 2, 2}}) {
        VertexParams p{n, l, m, q, SpectralValue::finite(z)};
        auto r = r_matrix(p);
        auto bas = r.domain;
        std::vector<Composition> om{comp_Omega(n, l), comp_Omega(n, m)};
        std::size_t c = bas->flatten(om);
        CHECK(r.mat.get(c, c) == 1);
        CHECK(r.mat.col(c).size() == 1);
        CHECK(!sector_decompose(r).violation.has_value());
        auto s = s_matrix(p);
        CHECK(!sector_decompose(s).violation.has_value());
        for (const auto& cs : s.mat.column_sums()) CHECK(cs == 1);
    }
}

TEST_CASE("Delta_0 inversion intertwining at (1,1)") {
    Rat q = rat(2, 3), z1 = rat(3), z2 = rat(7, 5);
    auto bas = make_basis(1, {1, 1});
    auto rch = swap_adjacent(bas, 0) * r_matrix_l1(1, 1, 1 / q, z2 / z1);
    std::vector<Rat> zs{z1, z2};
    auto pi = charge_reversal(bas);
    for (int i : {0, 1})
        for (auto kind : {Gen::E, Gen::F, Gen::K}) {
            auto du = coproduct0_matrix(kind, i, bas, q, zs);
            auto lhs = rch * (pi * du * pi);
            auto rhs = (pi * du * pi) * rch;
            CHECK(lhs == rhs);
        }
}
