#include "cpstap/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "cpstap/errors.hpp"

namespace cpstap {

int Coarray::index_of(int lag) const {
    auto it = std::lower_bound(lags.begin(), lags.end(), lag);
    if (it == lags.end() || *it != lag) return -1;
    return static_cast<int>(it - lags.begin());
}

int Coarray::weight_of(int lag) const {
    const int k = index_of(lag);
    return k < 0 ? 0 : weights[k];
}

ArrayGeometry coprime_positions(int n1, int n2, double d0) {
    if (n1 < 2 || n2 <= n1 || std::gcd(n1, n2) != 1) {
        throw ConfigError("coprime pair requires 2 <= n1 < n2 and gcd(n1, n2) = 1, got (" +
                          std::to_string(n1) + ", " + std::to_string(n2) + ")");
    }
    std::set<int> s;
    for (int i = 0; i < 2 * n1; ++i) s.insert(i * n2);
    for (int j = 0; j < n2; ++j) s.insert(j * n1);
    ArrayGeometry g;
    g.n1 = n1;
    g.n2 = n2;
    g.d0 = d0;
    g.positions.assign(s.begin(), s.end());
    return g;
}

ArrayGeometry uniform_positions(int n, double d0) {
    if (n < 1) throw ConfigError("uniform array needs at least one sensor");
    ArrayGeometry g;
    g.d0 = d0;
    g.positions.resize(n);
    std::iota(g.positions.begin(), g.positions.end(), 0);
    return g;
}

Coarray difference_coarray(const std::vector<int>& positions) {
    std::map<int, int> counts;
    for (int di : positions)
        for (int dj : positions) ++counts[di - dj];
    Coarray c;
    for (const auto& [lag, w] : counts) {
        c.lags.push_back(lag);
        c.weights.push_back(w);
    }
    return c;
}

Coarray temporal_coarray(int m_pulses) {
    if (m_pulses < 1) throw ConfigError("pulse count must be >= 1");
    std::vector<int> t(m_pulses);
    std::iota(t.begin(), t.end(), 0);
    return difference_coarray(t);
}

RSparse build_selection_matrix(const std::vector<int>& positions, const Coarray& coarray) {
    const int n = static_cast<int>(positions.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * n);
    // vec is column-major: entry (i, j) of a a^H lands at l = i + j*n and
    // carries e^{j2pi (d_i - d_j) theta}.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int k = coarray.index_of(positions[i] - positions[j]);
            if (k < 0) throw ShapeError("coarray does not match sensor positions");
            trip.emplace_back(k, i + j * n, 1.0 / coarray.weights[k]);
        }
    }
    RSparse p(coarray.n_v(), static_cast<Eigen::Index>(n) * n);
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

RSparse build_selection_matrix_p(const ArrayGeometry& geom, const Coarray& coarray) {
    return build_selection_matrix(geom.positions, coarray);
}

RSparse build_temporal_matrix_t(int m_pulses) {
    std::vector<int> t(m_pulses);
    std::iota(t.begin(), t.end(), 0);
    return build_selection_matrix(t, temporal_coarray(m_pulses));
}

Permutation build_permutation_j(int n, int m_pulses) {
    if (n < 1 || m_pulses < 1) throw ConfigError("permutation sizes must be >= 1");
    const std::int64_t N = n, M = m_pulses;
    const std::int64_t total = N * N * M * M;
    Permutation perm(static_cast<std::size_t>(total));
    for (std::int64_t i = 1; i <= total; ++i) {
        const std::int64_t r = i - 1;
        const std::int64_t k4 = r / (N * N * M) + 1;
        const std::int64_t k3 = (r % (N * N * M)) / (N * N) + 1;
        const std::int64_t k2 = ((r % (N * N * M)) % (N * N)) / N + 1;
        const std::int64_t k1 = r % N + 1;
        const std::int64_t j = (k4 - 1) * N * N * M + (k2 - 1) * N * M + (k3 - 1) * N + k1;
        perm[static_cast<std::size_t>(r)] = j - 1;
    }
    return perm;
}

CVector apply_permutation(const Permutation& perm, const CVector& x) {
    if (static_cast<Eigen::Index>(perm.size()) != x.size())
        throw ShapeError("permutation length does not match vector");
    CVector y(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) y[static_cast<Eigen::Index>(i)] = x[perm[i]];
    return y;
}

CVector apply_permutation_transpose(const Permutation& perm, const CVector& x) {
    if (static_cast<Eigen::Index>(perm.size()) != x.size())
        throw ShapeError("permutation length does not match vector");
    CVector y(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) y[perm[i]] = x[static_cast<Eigen::Index>(i)];
    return y;
}

bool is_permutation(const Permutation& perm) {
    std::vector<char> seen(perm.size(), 0);
    for (auto j : perm) {
        if (j < 0 || j >= static_cast<std::int64_t>(perm.size()) || seen[j]) return false;
        seen[j] = 1;
    }
    return true;
}

RSparse build_f(const RSparse& t, const RSparse& p, const Permutation& j) {
    const Eigen::Index cols = t.cols() * p.cols();
    if (static_cast<Eigen::Index>(j.size()) != cols)
        throw ShapeError("J size " + std::to_string(j.size()) + " does not match (T kron P) width " +
                         std::to_string(cols));
    // Column-indexed view of the one-nonzero-per-column selectors.
    auto column_entries = [](const RSparse& s) {
        std::vector<std::pair<int, double>> out(s.cols(), {-1, 0.0});
        for (int r = 0; r < s.outerSize(); ++r)
            for (RSparse::InnerIterator it(s, r); it; ++it) out[it.col()] = {r, it.value()};
        return out;
    };
    const auto tc = column_entries(t);
    const auto pc = column_entries(p);
    const Eigen::Index p_rows = p.rows();
    const Eigen::Index p_cols = p.cols();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(cols));
    for (Eigen::Index i = 0; i < cols; ++i) {
        const auto& [tr, tv] = tc[i / p_cols];
        const auto& [pr, pv] = pc[i % p_cols];
        if (tr < 0 || pr < 0) continue;
        // (T kron P) J moves column i of T kron P to column J[i].
        trip.emplace_back(tr * p_rows + pr, j[static_cast<std::size_t>(i)], tv * pv);
    }
    RSparse f(t.rows() * p_rows, cols);
    f.setFromTriplets(trip.begin(), trip.end());
    return f;
}

VirtualMaps build_virtual_maps(const ArrayGeometry& geom, int m_pulses) {
    VirtualMaps vm;
    vm.geom = geom;
    vm.m_pulses = m_pulses;
    vm.spatial = difference_coarray(geom);
    vm.temporal = temporal_coarray(m_pulses);
    vm.p = build_selection_matrix_p(geom, vm.spatial);
    vm.t = build_temporal_matrix_t(m_pulses);
    vm.j = build_permutation_j(geom.size(), m_pulses);
    vm.f = build_f(vm.t, vm.p, vm.j);
    vm.e0_index = vm.temporal.index_of(0) * vm.n_v() + vm.spatial.index_of(0);
    return vm;
}

}  // namespace cpstap
