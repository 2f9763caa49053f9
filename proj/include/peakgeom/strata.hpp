#pragma once

#include "peakgeom/grid.hpp"
#include "peakgeom/patch.hpp"

#include <string>
#include <vector>

namespace peakgeom {

// One box of the classified grid. The witness is the cell sample point
// (corner or center) whose pullback form had the smallest eigenvalue;
// label = number of eigenvalues >= tol_rank there.
struct StrataCell {
    RealVec lo;
    RealVec hi;
    int label = 0;
    double min_eigenvalue = 0.0;
    RealVec witness;
    bool transition = false;

    RealVec center() const { return 0.5 * (lo + hi); }
};

struct StrataComponent {
    int label = 0;
    std::vector<long> cells;
};

struct StratificationReport {
    Grid grid;
    double tol_rank = 0.0;
    std::vector<StrataCell> cells;
    std::vector<StrataComponent> components;

    std::map<int, int> component_counts() const; // label -> number of components
    Json to_json() const;
    std::string to_csv(const std::string& header_comment) const;
};

// Rank-classifies the pullback form over the grid cells and groups equal
// labels into face-adjacent connected components. tol_rank <= 0 selects
// 1e-6 * (largest eigenvalue seen over the grid).
StratificationReport stratify(const PatchModel& patch, const DomainModel& domain,
                              const Grid& grid, double tol_rank);

// Subdivides cells adjacent to a label change `levels` times, relabeling
// the pieces; all other cells are untouched. Components are rebuilt.
StratificationReport refine_transitions(const PatchModel& patch, const DomainModel& domain,
                                        const StratificationReport& report, int levels);

} // namespace peakgeom
