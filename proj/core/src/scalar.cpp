#include "momexp/scalar.hpp"

#include <cctype>
#include <sstream>

#include "momexp/errors.hpp"

namespace momexp {

GaussianRational& GaussianRational::operator*=(const GaussianRational& o)
{
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o)
{
    const mpq_class d = o.norm();
    if (sgn(d) == 0) {
        throw NumericError("exact division by zero");
    }
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / d;
    mpq_class im = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

mpq_class parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);

    // mpq_class accepts bases prefixes and "1/0"; restrict to plain decimal p/q.
    const auto slash = s.find('/');
    auto valid_int = [](std::string_view v, bool allow_sign) {
        if (v.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && (v[0] == '-' || v[0] == '+')) i = 1;
        if (i == v.size()) return false;
        for (; i < v.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
        }
        return true;
    };
    std::string_view sv(s);
    const bool ok = slash == std::string::npos
        ? valid_int(sv, true)
        : valid_int(sv.substr(0, slash), true) && valid_int(sv.substr(slash + 1), false);
    if (!ok) {
        throw InputError("not a rational literal: '" + std::string(text) + "'");
    }
    if (s[0] == '+') s.erase(0, 1);

    mpq_class q;
    if (q.set_str(s, 10) != 0) {
        throw InputError("not a rational literal: '" + std::string(text) + "'");
    }
    if (sgn(q.get_den()) == 0) {
        throw InputError("zero denominator in '" + std::string(text) + "'");
    }
    q.canonicalize();
    return q;
}

std::string format_rational(const mpq_class& q)
{
    mpq_class c(q);
    c.canonicalize();
    return c.get_str(10);
}

Float to_float(const Exact& z)
{
    return {z.real().get_d(), z.imag().get_d()};
}

std::string to_string(const Exact& z)
{
    return "(" + format_rational(z.real()) + "," + format_rational(z.imag()) + ")";
}

std::string to_string(const Float& z)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << "," << z.imag() << ")";
    return os.str();
}

} // namespace momexp
