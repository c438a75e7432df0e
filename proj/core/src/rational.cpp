#include "conewalk/rational.hpp"

#include <cctype>

#include "conewalk/error.hpp"

namespace conewalk {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

using BigInt = boost::multiprecision::cpp_int;

BigInt pow10(size_t k) {
    BigInt r = 1;
    for (size_t i = 0; i < k; ++i) r *= 10;
    return r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty()) fail("model", "BadRational", "empty rational literal");

    Rational value;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            fail("model", "BadRational", "expected digits around '/' in \"" + text + "\"");
        BigInt d(den);
        if (d == 0) fail("model", "BadRational", "zero denominator in \"" + text + "\"");
        value = Rational(BigInt(num), d);
    } else {
        auto dotp = s.find('.');
        if (dotp == std::string::npos) {
            if (!all_digits(s)) fail("model", "BadRational", "not a number: \"" + text + "\"");
            value = Rational(BigInt(s));
        } else {
            std::string ip = s.substr(0, dotp), fp = s.substr(dotp + 1);
            if (ip.empty()) ip = "0";
            if (!all_digits(ip) || (!fp.empty() && !all_digits(fp)))
                fail("model", "BadRational", "not a decimal: \"" + text + "\"");
            BigInt scale = pow10(fp.size());
            BigInt num = BigInt(ip) * scale + (fp.empty() ? BigInt(0) : BigInt(fp));
            value = Rational(num, scale);
        }
    }
    if (neg) value = -value;
    return value;
}

std::string rational_string(const Rational& r) {
    return r.str();
}

}  // namespace conewalk
