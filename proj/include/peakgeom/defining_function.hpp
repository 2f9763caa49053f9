#pragma once

#include "peakgeom/report.hpp"
#include "peakgeom/types.hpp"

#include <vector>

namespace peakgeom {

// One term c * prod_i x_i^e_i over the 2n real coordinates.
struct Monomial {
    std::vector<int> exps;
    double coeff = 0.0;
};

// Sparse real polynomial in (x1,y1,...,xn,yn). Formal derivatives of any
// order are again polynomials, so all boundary geometry downstream is free
// of differencing error.
class DefiningFunction {
public:
    DefiningFunction() = default;
    DefiningFunction(int vars, std::vector<Monomial> terms);

    int vars() const { return vars_; }
    int total_degree() const;
    const std::vector<Monomial>& terms() const { return terms_; }

    double eval(const RealVec& p) const;
    DefiningFunction partial(int var) const;

    Json to_json() const;
    static DefiningFunction from_json(const nlohmann::json& j, int vars);

private:
    void normalize(); // merge duplicate exponent tuples, drop zero terms

    int vars_ = 0;
    std::vector<Monomial> terms_;
};

} // namespace peakgeom
