#pragma once

#include <cstdint>
#include <vector>

#include "cpstap/types.hpp"

namespace cpstap {

struct ArrayGeometry {
    int n1 = 0;
    int n2 = 0;
    std::vector<int> positions;  // units of d0, first entry 0
    double d0 = 0.0625;

    int size() const { return static_cast<int>(positions.size()); }
};

struct Coarray {
    std::vector<int> lags;     // sorted, symmetric about 0
    std::vector<int> weights;  // weights[k] = number of pairs with difference lags[k]
    int n_v() const { return static_cast<int>(lags.size()); }
    int index_of(int lag) const;  // -1 if the lag is a hole
    int weight_of(int lag) const;
};

// Coprime prototype: 2*n1 sensors at spacing n2 plus n2 sensors at spacing n1,
// sharing the sensor at 0.
ArrayGeometry coprime_positions(int n1, int n2, double d0 = 0.0625);

// Filled linear array 0..n-1. Used for Brennan-rule reductions and tests.
ArrayGeometry uniform_positions(int n, double d0 = 0.0625);

Coarray difference_coarray(const std::vector<int>& positions);
inline Coarray difference_coarray(const ArrayGeometry& g) { return difference_coarray(g.positions); }

// Uniform pulse train 0..m-1 viewed as a temporal "array".
Coarray temporal_coarray(int m_pulses);

// Averaging selector from vec(a a^H) (column-major, length n^2) onto coarray lags.
RSparse build_selection_matrix(const std::vector<int>& positions, const Coarray& coarray);
RSparse build_selection_matrix_p(const ArrayGeometry& geom, const Coarray& coarray);
RSparse build_temporal_matrix_t(int m_pulses);

// J as an index vector: (J x)[i] = x[perm[i]], 0-based.
using Permutation = std::vector<std::int64_t>;

// Literal index arithmetic of the reordering (1-based internally, 0-based result).
Permutation build_permutation_j(int n, int m_pulses);
CVector apply_permutation(const Permutation& perm, const CVector& x);
CVector apply_permutation_transpose(const Permutation& perm, const CVector& x);
bool is_permutation(const Permutation& perm);

// F = (T kron P) J, kept sparse. Row index is t_idx * N_v + s_idx.
RSparse build_f(const RSparse& t, const RSparse& p, const Permutation& j);

struct VirtualMaps {
    ArrayGeometry geom;
    int m_pulses = 0;
    Coarray spatial;
    Coarray temporal;
    RSparse p;
    RSparse t;
    Permutation j;
    RSparse f;
    int e0_index = 0;  // joint zero-lag row of F

    int n() const { return geom.size(); }
    int n_v() const { return spatial.n_v(); }
    int m_v() const { return temporal.n_v(); }
    int virtual_dim() const { return n_v() * m_v(); }
};

VirtualMaps build_virtual_maps(const ArrayGeometry& geom, int m_pulses);

}  // namespace cpstap
