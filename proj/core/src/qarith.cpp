#include "qvertex/qarith.hpp"

#include <stdexcept>

namespace qv {

Rat q_pochhammer(const Rat& z, const Rat& q, int k) {
    Rat out(1), zq(z);
    for (int i = 0; i < k; ++i) {
        out *= (1 - zq);
        zq *= q;
    }
    return out;
}

Rat gauss_binomial(int n, int k, const Rat& q) {
    if (k < 0 || k > n) return Rat(0);
    Rat den = q_pochhammer(q, q, k) * q_pochhammer(q, q, n - k);
    if (den == 0) throw std::domain_error("gauss_binomial: vanishing Pochhammer denominator");
    return q_pochhammer(q, q, n) / den;
}

Rat bracket(int n, const Rat& q) {
    Rat out(0);
    for (int i = 0; i < n; ++i) out += rat_pow(q, n - 1 - 2 * i);
    return out;
}

Rat bracket_factorial(int n, const Rat& q) {
    Rat out(1);
    for (int j = 1; j <= n; ++j) out *= bracket(j, q);
    return out;
}

Rat bracket_binomial(int n, int k, const Rat& q) {
    if (k < 0 || n < 0 || k > n) return Rat(0);
    Rat den = bracket_factorial(k, q) * bracket_factorial(n - k, q);
    if (den == 0) throw std::domain_error("bracket_binomial: vanishing factorial");
    return bracket_factorial(n, q) / den;
}

Rat curly(int k, const Rat& r) {
    Rat out(0);
    for (int i = 0; i < k; ++i) out += rat_pow(r, i);
    return out;
}

Rat deformed_exp_coeff(int k, const Rat& r) {
    Rat fact(1);
    for (int j = 1; j <= k; ++j) {
        Rat c = curly(j, r);
        if (c == 0) throw std::domain_error("deformed_exp_coeff: {j}_r = 0, r is a root of unity");
        fact *= c;
    }
    return Rat(1) / fact;
}

}  // namespace qv
