#pragma once

#include <cstdint>

namespace cpstap {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for one (trial, sweep point) task; independent of scheduling order.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t sweep) {
    return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ (sweep * 0x632be59bd9b4e019ULL));
}

}  // namespace cpstap
