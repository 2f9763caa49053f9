#include "peakgeom/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace peakgeom::quad {

namespace {

// Gauss-Kronrod 7/15 on [-1,1]. Nodes 0,2,4,6 (and mirrors) carry Gauss
// weight as well; odd indices are Kronrod-only.
constexpr int kHalf = 8; // nodes 0..7, node 7 is the center
const double kNodes[kHalf] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
const double kWeightK[kHalf] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
const double kWeightG[kHalf] = {
    0.0, 0.1294849661688697, 0.0, 0.2797053914892767,
    0.0, 0.3818300505051189, 0.0, 0.4179591836734694};

struct Rule1d {
    std::vector<double> x;  // 15 abscissae on [-1,1]
    std::vector<double> wk; // Kronrod weights
    std::vector<double> wg; // Gauss weights (zero on Kronrod-only nodes)
};

const Rule1d& rule1d() {
    static const Rule1d r = [] {
        Rule1d r;
        for (int i = 0; i < kHalf - 1; ++i) {
            r.x.push_back(-kNodes[i]);
            r.wk.push_back(kWeightK[i]);
            r.wg.push_back(kWeightG[i]);
        }
        r.x.push_back(0.0);
        r.wk.push_back(kWeightK[kHalf - 1]);
        r.wg.push_back(kWeightG[kHalf - 1]);
        for (int i = kHalf - 2; i >= 0; --i) {
            r.x.push_back(kNodes[i]);
            r.wk.push_back(kWeightK[i]);
            r.wg.push_back(kWeightG[i]);
        }
        return r;
    }();
    return r;
}

struct CellEval {
    Complex fine;   // K15 tensor value
    double err;     // |K15 - G7| tensor estimate
    long evals;
};

CellEval eval_cell(const Integrand& f, const Box& cell) {
    const Rule1d& r = rule1d();
    const int d = cell.dim();
    const int n = int(r.x.size());

    RealVec mid(d), half(d);
    for (int a = 0; a < d; ++a) {
        mid[a] = 0.5 * (cell.lo[a] + cell.hi[a]);
        half[a] = 0.5 * (cell.hi[a] - cell.lo[a]);
    }
    double jac = 1.0;
    for (int a = 0; a < d; ++a) jac *= half[a];

    Complex sk(0.0, 0.0), sg(0.0, 0.0);
    std::vector<int> idx(d, 0);
    RealVec p(d);
    long total = 1;
    for (int a = 0; a < d; ++a) total *= n;
    for (long k = 0; k < total; ++k) {
        long rem = k;
        double wk = 1.0, wg = 1.0;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = int(rem % n);
            rem /= n;
        }
        for (int a = 0; a < d; ++a) {
            p[a] = mid[a] + half[a] * r.x[idx[a]];
            wk *= r.wk[idx[a]];
            wg *= r.wg[idx[a]];
        }
        Complex y = f(p);
        sk += wk * y;
        if (wg != 0.0) sg += wg * y;
    }
    CellEval e;
    e.fine = jac * sk;
    e.err = std::abs(jac * sk - jac * sg);
    e.evals = total;
    return e;
}

struct Cell {
    Box box;
    Complex value;
    double err;
    long id;
};

struct CellOrder {
    // max-heap on error; id breaks ties so the pop order is total
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.err != b.err) return a.err < b.err;
        return a.id > b.id;
    }
};

std::vector<double> axis_cuts(const std::vector<double>& req, double lo, double hi) {
    std::vector<double> cuts;
    for (double c : req)
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

} // namespace

Result integrate(const Integrand& f, const Box& box, const Options& opt) {
    const int d = box.dim();
    if (d < 1 || d > 3) throw std::invalid_argument("integrate: dimension must be 1..3");

    // initial partition from the requested cuts
    std::vector<std::vector<double>> edges(d);
    for (int a = 0; a < d; ++a) {
        edges[a].push_back(box.lo[a]);
        if (int(opt.initial_cuts.size()) > a)
            for (double c : axis_cuts(opt.initial_cuts[a], box.lo[a], box.hi[a]))
                edges[a].push_back(c);
        edges[a].push_back(box.hi[a]);
    }

    Result res;
    std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
    std::vector<Cell> done; // cells too small to split further
    long next_id = 0;
    double total_err = 0.0;

    auto push_cell = [&](const Box& b) {
        CellEval e = eval_cell(f, b);
        res.evaluations += e.evals;
        heap.push(Cell{b, e.fine, e.err, next_id++});
        total_err += e.err;
    };

    {
        std::vector<int> counts(d);
        long total = 1;
        for (int a = 0; a < d; ++a) {
            counts[a] = int(edges[a].size()) - 1;
            total *= counts[a];
        }
        for (long k = 0; k < total; ++k) {
            long rem = k;
            Box b;
            b.lo = RealVec(d);
            b.hi = RealVec(d);
            for (int a = d - 1; a >= 0; --a) {
                int i = int(rem % counts[a]);
                rem /= counts[a];
                b.lo[a] = edges[a][i];
                b.hi[a] = edges[a][i + 1];
            }
            push_cell(b);
        }
    }

    while (total_err > opt.abs_tol &&
           long(heap.size() + done.size()) < opt.max_cells && !heap.empty()) {
        Cell c = heap.top();
        heap.pop();
        total_err -= c.err;

        int axis = 0;
        double w = -1.0;
        for (int a = 0; a < d; ++a) {
            double wa = c.box.hi[a] - c.box.lo[a];
            if (wa > w) {
                w = wa;
                axis = a;
            }
        }
        double m = 0.5 * (c.box.lo[axis] + c.box.hi[axis]);
        if (!(m > c.box.lo[axis] && m < c.box.hi[axis])) {
            // cannot split at double precision
            done.push_back(c);
            total_err += c.err;
            if (done.size() > size_t(opt.max_cells)) break;
            continue;
        }
        Box left = c.box, right = c.box;
        left.hi[axis] = m;
        right.lo[axis] = m;
        push_cell(left);
        push_cell(right);
    }

    // deterministic compensated sum, ordered by insertion id
    std::vector<Cell> leaves = std::move(done);
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const Cell& a, const Cell& b) { return a.id < b.id; });

    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0, se = 0.0, ce = 0.0;
    auto kahan = [](double& sum, double& comp, double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    for (const Cell& c : leaves) {
        kahan(sr, cr, c.value.real());
        kahan(si, ci, c.value.imag());
        kahan(se, ce, c.err);
    }
    res.value = Complex(sr, si);
    res.error_estimate = se;
    res.cells = long(leaves.size());
    res.converged = se <= opt.abs_tol;
    return res;
}

RealResult integrate_real(const std::function<double(const RealVec&)>& f,
                          const Box& box, const Options& opt) {
    Result r = integrate([&](const RealVec& p) { return Complex(f(p), 0.0); }, box, opt);
    return RealResult{r.value.real(), r.error_estimate, r.cells, r.converged};
}

} // namespace peakgeom::quad
