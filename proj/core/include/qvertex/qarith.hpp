#pragma once

#include "qvertex/rational.hpp"

namespace qv {

// (z;q)_k = (1-z)(1-zq)...(1-zq^{k-1}); k=0 gives 1.
Rat q_pochhammer(const Rat& z, const Rat& q, int k);

// Gaussian binomial [n k]_q = (q)_n / ((q)_k (q)_{n-k}); 0 for k<0 or k>n.
// Throws std::domain_error when a denominator Pochhammer vanishes.
Rat gauss_binomial(int n, int k, const Rat& q);

// Symmetric q-integer [n]_q evaluated as q^{n-1}+q^{n-3}+...+q^{1-n},
// so it is defined at q = +-1 as well. [0]_q = 0.
Rat bracket(int n, const Rat& q);

// [n]_q^! = [1]_q [2]_q ... [n]_q.
Rat bracket_factorial(int n, const Rat& q);

// Bracket binomial [n k] = [n]!/([k]![n-k]!); 0 outside 0 <= k <= n
// (including negative n, which several duality formulas rely on).
Rat bracket_binomial(int n, int k, const Rat& q);

// {k}_r = (1-r^k)/(1-r) = 1+r+...+r^{k-1}.
Rat curly(int k, const Rat& r);

// 1/{k}_r^!, the coefficient of x^k in the deformed exponential exp_r(x).
// Throws std::domain_error when some {j}_r vanishes.
Rat deformed_exp_coeff(int k, const Rat& r);

}  // namespace qv
