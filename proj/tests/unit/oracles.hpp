#pragma once

// Reference computations for the tests. Written from the definitions with
// dense matrices and explicit loops, sharing no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using CV = Eigen::VectorXcd;
using CM = Eigen::MatrixXcd;

inline const double pi = std::acos(-1.0);

inline CM kron(const CM& a, const CM& b) {
    CM k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

inline CV kronv(const CV& a, const CV& b) {
    return kron(CM(a), CM(b)).col(0);
}

inline CV vec(const CM& a) {
    return Eigen::Map<const CV>(a.data(), a.size());
}

inline CV random_cvec(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CV v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cd(g(rng), g(rng));
    return v;
}

inline CM random_hermitian_psd(Eigen::Index n, std::mt19937_64& rng) {
    CM a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) a.col(j) = random_cvec(n, rng);
    return a * a.adjoint() / double(n);
}

inline CV phasors(const std::vector<int>& pos, double f) {
    CV v(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) v[i] = std::polar(1.0, 2 * pi * pos[i] * f);
    return v;
}

inline std::vector<int> range(int n) {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = i;
    return r;
}

// Brennan / BT rule for a filled array and uniform pulse train.
inline double brennan(int n, int m, double beta) { return n + (m - 1) * beta; }

// Extended BT: split the equivalent array d + beta t at gaps larger than one
// element spacing, sum the run lengths (bandwidth 1), add 1.
inline double ebt(const std::vector<int>& pos, int m, double beta) {
    std::vector<double> p;
    for (int d : pos)
        for (int t = 0; t < m; ++t) p.push_back(d + beta * t);
    std::sort(p.begin(), p.end());
    double total = 0.0, start = p[0], prev = p[0];
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] - prev > 1.0 + 1e-9) {
            total += prev - start;
            start = p[i];
        }
        prev = p[i];
    }
    total += prev - start;
    return total + 1.0;
}

// Largest principal angle (radians) between span(a) and span(b).
inline double max_principal_angle(const CM& a, const CM& b) {
    Eigen::HouseholderQR<CM> qa(a), qb(b);
    const CM ua = qa.householderQ() * CM::Identity(a.rows(), a.cols());
    const CM ub = qb.householderQ() * CM::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<CM> svd(ua.adjoint() * ub);
    const double smin = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
    return std::acos(smin);
}

}  // namespace oracle
