#include "peakgeom/defining_function.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace peakgeom {

DefiningFunction::DefiningFunction(int vars, std::vector<Monomial> terms)
    : vars_(vars), terms_(std::move(terms)) {
    if (vars_ < 2 || vars_ % 2 != 0)
        throw std::invalid_argument("defining function needs an even number (>= 4) of real variables");
    for (const Monomial& m : terms_) {
        if (int(m.exps.size()) != vars_)
            throw std::invalid_argument("monomial exponent count does not match variable count");
        for (int e : m.exps)
            if (e < 0) throw std::invalid_argument("negative exponent in monomial");
    }
    normalize();
}

void DefiningFunction::normalize() {
    std::map<std::vector<int>, double> acc;
    for (const Monomial& m : terms_) acc[m.exps] += m.coeff;
    terms_.clear();
    for (auto& [e, c] : acc)
        if (c != 0.0) terms_.push_back(Monomial{e, c});
}

int DefiningFunction::total_degree() const {
    int deg = 0;
    for (const Monomial& m : terms_)
        deg = std::max(deg, std::accumulate(m.exps.begin(), m.exps.end(), 0));
    return deg;
}

double DefiningFunction::eval(const RealVec& p) const {
    if (int(p.size()) != vars_)
        throw std::invalid_argument("point dimension does not match defining function");
    double sum = 0.0;
    for (const Monomial& m : terms_) {
        double t = m.coeff;
        for (int i = 0; i < vars_; ++i) {
            double x = p[i];
            for (int k = 0; k < m.exps[i]; ++k) t *= x;
        }
        sum += t;
    }
    return sum;
}

DefiningFunction DefiningFunction::partial(int var) const {
    if (var < 0 || var >= vars_) throw std::invalid_argument("partial: variable index out of range");
    std::vector<Monomial> out;
    for (const Monomial& m : terms_) {
        if (m.exps[var] == 0) continue;
        Monomial d = m;
        d.coeff *= d.exps[var];
        d.exps[var] -= 1;
        out.push_back(std::move(d));
    }
    return DefiningFunction(vars_, std::move(out));
}

Json DefiningFunction::to_json() const {
    Json arr = Json::array();
    for (const Monomial& m : terms_) {
        Json row = Json::array();
        for (int e : m.exps) row.push_back(e);
        row.push_back(m.coeff);
        arr.push_back(row);
    }
    return arr;
}

DefiningFunction DefiningFunction::from_json(const nlohmann::json& j, int vars) {
    std::vector<Monomial> terms;
    for (const auto& row : j) {
        if (!row.is_array() || int(row.size()) != vars + 1)
            throw std::invalid_argument("monomial row must hold exponents for each variable plus a coefficient");
        Monomial m;
        m.exps.resize(vars);
        for (int i = 0; i < vars; ++i) m.exps[i] = row[i].get<int>();
        m.coeff = row[vars].get<double>();
        terms.push_back(std::move(m));
    }
    return DefiningFunction(vars, std::move(terms));
}

} // namespace peakgeom
