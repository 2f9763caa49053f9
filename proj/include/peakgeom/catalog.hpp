#pragma once

#include "peakgeom/domain.hpp"
#include "peakgeom/patch.hpp"

#include <map>
#include <string>
#include <vector>

namespace peakgeom::catalog {

using Params = std::map<std::string, double>;

// ball(n):  sum |z_j|^2 - 1 in C^n
// egg(m):   |z_1|^2 + |z_2|^(2m) - 1 in C^2, weakly convex along z_2 = 0
DomainModel make_domain(const std::string& name, int param);

// Indefinite control surface x1^2 + y1^2 + x2^2 - y2^2 - 1; audits must
// fail on it with a curvature witness.
DomainModel make_control_surface();

// hopf:                  t  -> (e^{it}, e^{-it})/sqrt2            on ball(2)
// real_circle:           t  -> (cos t, sin t)                     on ball(2)
// egg_curve:             u  -> (sqrt(1-u^4), u), u = center + t   on egg(2)
// torus3:                st -> (e^{is}, e^{it}, e^{-i(s+t)})/sqrt3 on ball(3)
// nontangential_circle:  t  -> (e^{it}, 0)   (negative control)   on ball(2)
PatchModel make_patch(const std::string& name, const Params& params = {});

// the domain each catalog patch lives on
DomainModel default_domain_for(const std::string& patch_name);

struct Entry {
    std::string name;
    std::string kind; // "domain" | "patch" | "control"
    std::string description;
    Params defaults;
    Json reference; // closed-form reference quantities, for reports
};

const std::vector<Entry>& entries();

} // namespace peakgeom::catalog
