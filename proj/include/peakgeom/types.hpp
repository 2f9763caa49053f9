#pragma once

#include <Eigen/Dense>
#include <complex>

namespace peakgeom {

using Complex = std::complex<double>;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;
using CplxVec = Eigen::VectorXcd;
using CplxMat = Eigen::MatrixXcd;

// (x1,y1,...,xn,yn) <-> (z1,...,zn), z_j = x_j + i y_j
inline CplxVec to_complex(const RealVec& p) {
    CplxVec z(p.size() / 2);
    for (int j = 0; j < z.size(); ++j)
        z[j] = Complex(p[2 * j], p[2 * j + 1]);
    return z;
}

inline RealVec to_real(const CplxVec& z) {
    RealVec p(2 * z.size());
    for (int j = 0; j < z.size(); ++j) {
        p[2 * j] = z[j].real();
        p[2 * j + 1] = z[j].imag();
    }
    return p;
}

} // namespace peakgeom
