#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qv {

// Exact scalar. mpq_class keeps values canonicalized (lowest terms,
// positive denominator), which is exactly the invariant we need.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// q^e for e of either sign; q must be nonzero for negative e.
inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Rat out;
    if (e > 0) {
        mpz_pow_ui(mpq_numref(out.get_mpq_t()), mpq_numref(base.get_mpq_t()), static_cast<unsigned long>(e));
        mpz_pow_ui(mpq_denref(out.get_mpq_t()), mpq_denref(base.get_mpq_t()), static_cast<unsigned long>(e));
    } else {
        if (base == 0) throw std::domain_error("0 raised to a negative power");
        mpz_pow_ui(mpq_numref(out.get_mpq_t()), mpq_denref(base.get_mpq_t()), static_cast<unsigned long>(-e));
        mpz_pow_ui(mpq_denref(out.get_mpq_t()), mpq_numref(base.get_mpq_t()), static_cast<unsigned long>(-e));
    }
    out.canonicalize();
    return out;
}

// Parses "p", "-p", or "p/q".
inline Rat parse_rat(const std::string& text) {
    Rat r;
    if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("cannot parse rational: '" + text + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double rat_double(const Rat& r) { return r.get_d(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

}  // namespace qv
