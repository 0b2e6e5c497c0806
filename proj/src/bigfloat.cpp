#include "hypermatch/bigfloat.hpp"

#include <cstdio>
#include <cstdlib>

namespace hypermatch {

std::string BigFloat::str() const {
    char* out = nullptr;
    // 40 significant digits round-trips a 128-bit significand.
    if (mpfr_asprintf(&out, "%.40Rg", v_) < 0) return "nan";
    std::string s(out);
    mpfr_free_str(out);
    return s;
}

bool geq_with_relative_slack(const BigFloat& a, const BigFloat& b, int slack_log2) {
    if (a >= b) return true;
    BigFloat scale = BigFloat::abs(a);
    BigFloat mb = BigFloat::abs(b);
    if (mb > scale) scale = mb;
    BigFloat slack = scale * BigFloat::pow_si(BigFloat(2L), slack_log2);
    return a >= b - slack;
}

}  // namespace hypermatch
