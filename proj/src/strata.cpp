#include "peakgeom/strata.hpp"

#include "peakgeom/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace peakgeom {

namespace {

struct CellEval {
    double min_eig;
    int label;
    RealVec witness;
};

// corners + center of a box
std::vector<RealVec> cell_samples(const RealVec& lo, const RealVec& hi) {
    const int d = int(lo.size());
    std::vector<RealVec> pts;
    for (long mask = 0; mask < (1L << d); ++mask) {
        RealVec p(d);
        for (int a = 0; a < d; ++a) p[a] = (mask >> a) & 1 ? hi[a] : lo[a];
        pts.push_back(p);
    }
    pts.push_back(0.5 * (lo + hi));
    return pts;
}

CellEval classify_cell(const PatchModel& patch, const DomainModel& domain,
                       const RealVec& lo, const RealVec& hi, double tol_rank) {
    CellEval best;
    best.min_eig = std::numeric_limits<double>::infinity();
    best.label = patch.dim_d;
    for (const RealVec& p : cell_samples(lo, hi)) {
        PullbackForm f = pullback_form(patch, domain, p);
        Eigen::SelfAdjointEigenSolver<RealMat> es(f.H);
        double lmin = es.eigenvalues()[0];
        if (lmin < best.min_eig) {
            best.min_eig = lmin;
            best.witness = p;
            int rank = 0;
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                if (es.eigenvalues()[i] >= tol_rank) ++rank;
            best.label = rank;
        }
    }
    return best;
}

double grid_scale(const PatchModel& patch, const DomainModel& domain, const Grid& grid) {
    double lmax = 0.0;
    for (const RealVec& x : grid.nodes()) {
        PullbackForm f = pullback_form(patch, domain, x);
        Eigen::SelfAdjointEigenSolver<RealMat> es(f.H);
        lmax = std::max(lmax, es.eigenvalues().maxCoeff());
    }
    return lmax;
}

// face adjacency: boxes share a (d-1)-dimensional face
bool face_adjacent(const StrataCell& a, const StrataCell& b) {
    const int d = int(a.lo.size());
    const double eps = 1e-12;
    int touching_axis = -1;
    for (int ax = 0; ax < d; ++ax) {
        bool touch = std::abs(a.hi[ax] - b.lo[ax]) <= eps || std::abs(b.hi[ax] - a.lo[ax]) <= eps;
        bool overlap = a.lo[ax] < b.hi[ax] - eps && b.lo[ax] < a.hi[ax] - eps;
        if (overlap) continue;
        if (touch) {
            if (touching_axis >= 0) return false; // corner contact only
            touching_axis = ax;
            continue;
        }
        return false; // separated along this axis
    }
    return touching_axis >= 0;
}

struct UnionFind {
    std::vector<long> parent;
    explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    long find(long i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(long a, long b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

void rebuild_components(StratificationReport& rep) {
    const long n = long(rep.cells.size());
    UnionFind uf(n);
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            if (rep.cells[i].label == rep.cells[j].label &&
                face_adjacent(rep.cells[i], rep.cells[j]))
                uf.unite(i, j);

    for (auto& c : rep.cells) c.transition = false;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            if (rep.cells[i].label != rep.cells[j].label &&
                face_adjacent(rep.cells[i], rep.cells[j])) {
                rep.cells[i].transition = true;
                rep.cells[j].transition = true;
            }

    std::map<long, StrataComponent> comps;
    for (long i = 0; i < n; ++i) {
        long root = uf.find(i);
        comps[root].label = rep.cells[i].label;
        comps[root].cells.push_back(i);
    }
    rep.components.clear();
    for (auto& [root, comp] : comps) rep.components.push_back(std::move(comp));
}

} // namespace

StratificationReport stratify(const PatchModel& patch, const DomainModel& domain,
                              const Grid& grid, double tol_rank) {
    grid.validate();
    if (grid.dim() != patch.dim_d)
        throw std::invalid_argument("stratify: grid dimension does not match patch");
    StratificationReport rep;
    rep.grid = grid;
    rep.tol_rank = tol_rank > 0.0 ? tol_rank
                                  : 1e-6 * std::max(grid_scale(patch, domain, grid), 1e-300);

    const long n = grid.cell_count();
    rep.cells.reserve(n);
    for (long id = 0; id < n; ++id) {
        auto idx = grid.unflatten(id);
        StrataCell cell;
        cell.lo = grid.cell_lo(idx);
        cell.hi = grid.cell_hi(idx);
        CellEval e = classify_cell(patch, domain, cell.lo, cell.hi, rep.tol_rank);
        cell.label = e.label;
        cell.min_eigenvalue = e.min_eig;
        cell.witness = e.witness;
        rep.cells.push_back(std::move(cell));
    }
    rebuild_components(rep);
    return rep;
}

StratificationReport refine_transitions(const PatchModel& patch, const DomainModel& domain,
                                        const StratificationReport& report, int levels) {
    StratificationReport rep = report;
    for (int level = 0; level < levels; ++level) {
        std::vector<StrataCell> next;
        next.reserve(rep.cells.size());
        for (const StrataCell& cell : rep.cells) {
            if (!cell.transition) {
                next.push_back(cell);
                continue;
            }
            const int d = int(cell.lo.size());
            for (long mask = 0; mask < (1L << d); ++mask) {
                StrataCell child;
                child.lo = RealVec(d);
                child.hi = RealVec(d);
                for (int a = 0; a < d; ++a) {
                    double mid = 0.5 * (cell.lo[a] + cell.hi[a]);
                    child.lo[a] = (mask >> a) & 1 ? mid : cell.lo[a];
                    child.hi[a] = (mask >> a) & 1 ? cell.hi[a] : mid;
                }
                CellEval e = classify_cell(patch, domain, child.lo, child.hi, rep.tol_rank);
                child.label = e.label;
                child.min_eigenvalue = e.min_eig;
                child.witness = e.witness;
                next.push_back(std::move(child));
            }
        }
        rep.cells = std::move(next);
        rebuild_components(rep);
    }
    return rep;
}

std::map<int, int> StratificationReport::component_counts() const {
    std::map<int, int> counts;
    for (const auto& c : components) counts[c.label] += 1;
    return counts;
}

Json StratificationReport::to_json() const {
    auto vec_of = [](const RealVec& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    Json j;
    j["grid"] = grid.to_json();
    j["tol_rank"] = tol_rank;
    Json cells_json = Json::array();
    for (const StrataCell& c : cells) {
        Json row;
        row["lo"] = vec_of(c.lo);
        row["hi"] = vec_of(c.hi);
        row["label"] = c.label;
        row["min_eigenvalue"] = c.min_eigenvalue;
        row["witness"] = vec_of(c.witness);
        row["transition"] = c.transition;
        cells_json.push_back(row);
    }
    j["cells"] = cells_json;
    Json comps = Json::array();
    for (const StrataComponent& c : components) {
        Json row;
        row["label"] = c.label;
        row["cell_count"] = c.cells.size();
        row["cells"] = c.cells;
        comps.push_back(row);
    }
    j["components"] = comps;
    Json counts;
    for (auto& [label, count] : component_counts())
        counts["rank" + std::to_string(label)] = count;
    j["component_counts"] = counts;
    return j;
}

std::string StratificationReport::to_csv(const std::string& header_comment) const {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    const int d = grid.dim();
    for (int a = 0; a < d; ++a) out << "center" << a << ",";
    out << "label,min_eigenvalue,transition\n";
    for (const StrataCell& c : cells) {
        RealVec ctr = c.center();
        for (int a = 0; a < d; ++a) out << fmt_double(ctr[a]) << ",";
        out << c.label << "," << fmt_double(c.min_eigenvalue) << ","
            << (c.transition ? 1 : 0) << "\n";
    }
    return out.str();
}

} // namespace peakgeom
