#include "pppcov/partitions.hpp"

#include <stdexcept>

#include "pppcov/mathkit.hpp"

namespace pppcov::partitions {

namespace {

void descend(int q, int remaining, PartitionVector& counts,
             std::vector<PartitionVector>& out) {
    const int j = static_cast<int>(counts.size());
    if (q > j) {
        if (remaining == 0) out.push_back(counts);
        return;
    }
    for (int n = remaining / q; n >= 0; --n) {
        counts[q - 1] = n;
        descend(q + 1, remaining - n * q, counts, out);
    }
    counts[q - 1] = 0;
}

} // namespace

std::vector<PartitionVector> enumerate_tj(int j) {
    if (j < 0 || j > 30)
        throw std::invalid_argument("enumerate_tj: j must be in [0, 30]");
    std::vector<PartitionVector> out;
    if (j == 0) {
        out.emplace_back();
        return out;
    }
    PartitionVector counts(j, 0);
    descend(1, j, counts, out);
    return out;
}

int b_coefficient(const PartitionVector& p) {
    int b = 1;
    for (int n : p) b += n;
    return b;
}

double a_coefficient(const PartitionVector& p, std::span<const double> factors,
                     double scale) {
    double prod = 1.0;
    for (std::size_t qi = 0; qi < p.size(); ++qi) {
        const int nq = p[qi];
        if (nq == 0) continue;
        const int q = static_cast<int>(qi) + 1;
        const double sign = (q % 2 == 0) ? 1.0 : -1.0;
        const double base = sign * scale * factors[qi] / mathkit::gamma_fn(q + 1.0);
        double powed = 1.0;
        for (int r = 0; r < nq; ++r) powed *= base;
        prod *= powed / mathkit::gamma_fn(nq + 1.0);
    }
    return prod;
}

} // namespace pppcov::partitions
