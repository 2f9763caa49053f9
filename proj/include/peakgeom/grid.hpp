#pragma once

#include "peakgeom/types.hpp"

#include <json.hpp>

#include <stdexcept>
#include <vector>

namespace peakgeom {

// Axis-aligned lattice over a box, described as {lo, hi, steps per axis}.
// steps[a] counts cells along axis a; nodes are the cell corners.
struct Grid {
    RealVec lo;
    RealVec hi;
    std::vector<int> steps;

    int dim() const { return int(steps.size()); }

    long cell_count() const {
        long n = 1;
        for (int s : steps) n *= s;
        return n;
    }

    // node i on an axis; written so that rational lattices hit exact values
    // (e.g. the midpoint of a symmetric range evaluates to exactly 0)
    double node_coord(int axis, long i) const {
        return lo[axis] + (double(i) * (hi[axis] - lo[axis])) / double(steps[axis]);
    }

    double center_coord(int axis, long i) const {
        return lo[axis] + ((double(i) + 0.5) * (hi[axis] - lo[axis])) / double(steps[axis]);
    }

    // multi-index <-> flat cell id (row-major, axis 0 slowest)
    std::vector<long> unflatten(long id) const {
        std::vector<long> idx(dim());
        for (int a = dim() - 1; a >= 0; --a) {
            idx[a] = id % steps[a];
            id /= steps[a];
        }
        return idx;
    }

    RealVec cell_lo(const std::vector<long>& idx) const {
        RealVec v(dim());
        for (int a = 0; a < dim(); ++a) v[a] = node_coord(a, idx[a]);
        return v;
    }

    RealVec cell_hi(const std::vector<long>& idx) const {
        RealVec v(dim());
        for (int a = 0; a < dim(); ++a) v[a] = node_coord(a, idx[a] + 1);
        return v;
    }

    // all lattice nodes (corners), row-major
    std::vector<RealVec> nodes() const {
        std::vector<long> counts(dim());
        long total = 1;
        for (int a = 0; a < dim(); ++a) {
            counts[a] = steps[a] + 1;
            total *= counts[a];
        }
        std::vector<RealVec> out;
        out.reserve(total);
        std::vector<long> idx(dim(), 0);
        for (long k = 0; k < total; ++k) {
            RealVec p(dim());
            long rem = k;
            for (int a = dim() - 1; a >= 0; --a) {
                idx[a] = rem % counts[a];
                rem /= counts[a];
            }
            for (int a = 0; a < dim(); ++a) p[a] = node_coord(a, idx[a]);
            out.push_back(p);
        }
        return out;
    }

    void validate() const {
        if (lo.size() != hi.size() || size_t(lo.size()) != steps.size())
            throw std::invalid_argument("grid: lo/hi/steps sizes disagree");
        for (int a = 0; a < dim(); ++a) {
            if (!(lo[a] < hi[a])) throw std::invalid_argument("grid: lo must be < hi");
            if (steps[a] < 1) throw std::invalid_argument("grid: steps must be >= 1");
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["lo"] = std::vector<double>(lo.data(), lo.data() + lo.size());
        j["hi"] = std::vector<double>(hi.data(), hi.data() + hi.size());
        j["steps"] = steps;
        return j;
    }

    static Grid from_json(const nlohmann::json& j) {
        Grid g;
        auto lo = j.at("lo").get<std::vector<double>>();
        auto hi = j.at("hi").get<std::vector<double>>();
        g.steps = j.at("steps").get<std::vector<int>>();
        g.lo = Eigen::Map<const RealVec>(lo.data(), lo.size());
        g.hi = Eigen::Map<const RealVec>(hi.data(), hi.size());
        g.validate();
        return g;
    }
};

} // namespace peakgeom
