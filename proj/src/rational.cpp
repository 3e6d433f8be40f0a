#include "aptsp/rational.hpp"

#include "aptsp/errors.hpp"

#include <mpfr.h>

#include <cctype>
#include <cmath>

namespace aptsp {

namespace {

constexpr mpfr_prec_t kPrecision = 256;

class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec = kPrecision) { mpfr_init2(v_, prec); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

// Exact conversion of a finite MPFR number to a rational.
Rational to_rational(mpfr_ptr f) {
    if (mpfr_zero_p(f)) return Rational(0);
    mpz_class m;
    const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), f);
    Rational q(m);
    if (e >= 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    return q;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text.empty()) throw InvalidInput("empty rational literal");
    auto fail = [&]() -> Rational { throw InvalidInput("malformed rational literal '" + raw + "'"); };
    if (auto slash = text.find('/'); slash != std::string::npos) {
        std::string num = text.substr(0, slash), den = text.substr(slash + 1);
        bool neg = false;
        if (!num.empty() && (num[0] == '-' || num[0] == '+')) {
            neg = num[0] == '-';
            num.erase(0, 1);
        }
        if (!all_digits(num) || !all_digits(den)) return fail();
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) throw InvalidInput("zero denominator in '" + raw + "'");
        Rational q(neg ? mpz_class(-n) : n, d);
        q.canonicalize();
        return q;
    }
    // decimal: [sign] digits [. digits] [e [sign] digits]
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-' || text[i] == '+') neg = text[i++] == '-';
    std::string intpart, frac;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) intpart += text[i++];
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) frac += text[i++];
    }
    if (intpart.empty() && frac.empty()) return fail();
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) eneg = text[i++] == '-';
        std::string ed;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ed += text[i++];
        if (ed.empty() || ed.size() > 4) return fail();
        exp10 = std::stol(ed) * (eneg ? -1 : 1);
    }
    if (i != text.size()) return fail();
    mpz_class digits(intpart + frac, 10);
    exp10 -= static_cast<long>(frac.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    Rational q = exp10 >= 0 ? Rational(digits * scale) : Rational(digits, scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

Rational exact_rational(double value) {
    if (!std::isfinite(value)) throw InvalidInput("non-finite value cannot be made rational");
    Rational q(value);  // mpq_set_d is exact
    return q;
}

std::string to_string(const Rational& value) {
    Rational q = value;
    q.canonicalize();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Interval exp_enclosure(const Rational& q) {
    Mpfr lo_arg, hi_arg, lo, hi;
    mpfr_set_q(lo_arg.get(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_arg.get(), q.get_mpq_t(), MPFR_RNDU);
    mpfr_exp(lo.get(), lo_arg.get(), MPFR_RNDD);
    mpfr_exp(hi.get(), hi_arg.get(), MPFR_RNDU);
    return {to_rational(lo.get()), to_rational(hi.get())};
}

double round_up(const Rational& q) {
    Mpfr f(53);
    mpfr_set_q(f.get(), q.get_mpq_t(), MPFR_RNDU);
    return mpfr_get_d(f.get(), MPFR_RNDU);
}

double round_down(const Rational& q) {
    Mpfr f(53);
    mpfr_set_q(f.get(), q.get_mpq_t(), MPFR_RNDD);
    return mpfr_get_d(f.get(), MPFR_RNDD);
}

}  // namespace aptsp
