// Critical value, isotropy subgroup and leading mode for each coupling sign
// pattern, on a few lattice sizes.

#include <cstdio>

#include "fhntorus/fhntorus.hpp"

using namespace fhntorus;

int main() {
    const double couplings[][2] = {{-1.0, -0.7}, {1.0, -0.7}, {-1.0, 0.7}, {1.0, 0.7}};
    std::printf("%3s %8s %8s %7s %12s %10s %8s\n", "N", "gamma", "delta", "pattern", "a*", "K", "mode");
    for (int n : {3, 5, 7}) {
        for (const auto& gd : couplings) {
            const LatticeParams lp({0.0, 1.0, 0.0}, {gd[0], gd[1]}, n);
            const auto cp = critical_a(lp);
            char mode[32];
            std::snprintf(mode, sizeof mode, "(%d,%d)", cp.leading.r, cp.leading.s);
            std::printf("%3d %8.3f %8.3f %7s %12.8f %10s %8s\n", n, gd[0], gd[1], to_string(cp.pattern), cp.a_star,
                        cp.K.to_string().c_str(), mode);
        }
    }
}
