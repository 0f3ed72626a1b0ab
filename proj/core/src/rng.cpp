#include "relent/rng.hpp"

#include <cmath>

namespace relent {

Vec StateSampler::draw_shell(double r_lo, double r_hi, int max_tries) {
    for (int tries = 0; tries < max_tries; ++tries) {
        Vec dir(n_);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < n_; ++i) dir[i] = rng_.normal();
            norm2 = dir.squaredNorm();
        } while (norm2 == 0.0);
        dir /= std::sqrt(norm2);
        const Vec U = rng_.uniform(r_lo, r_hi) * dir;
        if (ok(U)) return U;
    }
    throw AuditError("state sampler: no admissible sample in shell [" + std::to_string(r_lo) +
                     ", " + std::to_string(r_hi) + ") after " + std::to_string(max_tries) +
                     " tries");
}

Vec StateSampler::draw_box(const std::vector<std::array<double, 2>>& box, int max_tries) {
    if (static_cast<int>(box.size()) != n_)
        throw AuditError("state sampler: box dimension mismatch");
    for (int tries = 0; tries < max_tries; ++tries) {
        Vec U(n_);
        for (int i = 0; i < n_; ++i) U[i] = rng_.uniform(box[i][0], box[i][1]);
        if (ok(U)) return U;
    }
    throw AuditError("state sampler: no admissible sample in box after " +
                     std::to_string(max_tries) + " tries");
}

}  // namespace relent
