#pragma once

#include <cmath>
#include <vector>

#include "qjac/errors.hpp"
#include "qjac/laurent.hpp"

namespace qjac {

// Monic trace polynomial t(z) = z^{g+1} + t_1 z^g + ... + t_{g+1}, with
// the center coefficient pinned: t_{g+1} = (-1)^{g+1} * 2.  Also used for
// the dual trace T(Z) with the Z variable tag.
struct trace_data {
    int g = 1;
    var_tag tag = var_tag::z_var;
    std::vector<cxd> t; // t[j-1] = t_j, j = 1..g+1

    trace_data() = default;

    // Interior coefficients t_1..t_g; t_{g+1} is set by the convention.
    trace_data(int genus, std::vector<cxd> interior, var_tag vt = var_tag::z_var)
        : g(genus), tag(vt), t(std::move(interior)) {
        if (g < 1) throw contract_violation("trace_data: genus must be >= 1");
        if (static_cast<int>(t.size()) != g)
            throw contract_violation("trace_data: expected g interior coefficients");
        t.push_back(pinned_constant(g));
    }

    static cxd pinned_constant(int genus) { return cxd((genus % 2 == 0) ? -2.0 : 2.0, 0.0); }

    cxd coeff(int j) const { // t_j, with t_0 = 1
        if (j == 0) return cxd(1.0, 0.0);
        return t.at(static_cast<std::size_t>(j - 1));
    }

    laurent_poly poly() const {
        laurent_poly p(tag);
        p.c[g + 1] = cxd(1.0, 0.0);
        for (int j = 1; j <= g + 1; ++j) {
            cxd a = coeff(j);
            if (a != cxd(0.0, 0.0)) p.c[g + 1 - j] = a;
        }
        return p;
    }

    cxd eval(cxd z) const { return poly().eval(z); }

    // (-1)^{g+1}
    double sign() const { return (g % 2 == 0) ? -1.0 : 1.0; }
};

} // namespace qjac
