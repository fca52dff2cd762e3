#pragma once

#include <span>
#include <vector>

namespace pppcov::partitions {

// A partition of j in multiplicity encoding: counts[q-1] parts of size q,
// with sum(q * counts[q-1]) == j. Length j; empty for j == 0.
using PartitionVector = std::vector<int>;

// All partitions of j, lexicographically descending on the counts vector.
// j in [0, 30].
std::vector<PartitionVector> enumerate_tj(int j);

// 1 + sum of part multiplicities.
int b_coefficient(const PartitionVector& p);

// prod over part sizes q of (1/N_q!) * ((-1)^q * scale * factors[q-1] / q!)^N_q.
// factors[q-1] supplies the q-th expectation factor; scale is the shared
// (2/alpha) * (theta/(Omega*b))^(2/alpha) context. Empty partition gives 1.
double a_coefficient(const PartitionVector& p, std::span<const double> factors,
                     double scale);

} // namespace pppcov::partitions
