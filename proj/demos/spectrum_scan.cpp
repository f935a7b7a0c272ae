// Largest real part of the linearisation at the origin as a sweeps through
// the critical value. With c > 0 the crossing moves below a*.

#include <cstdio>
#include <cstdlib>

#include "fhntorus/fhntorus.hpp"

using namespace fhntorus;

int main(int argc, char** argv) {
    const double c = argc > 1 ? std::atof(argv[1]) : 0.05;
    const LatticeParams lp({0.0, 1.0, c}, {1.0, 1.3}, 3);
    const double a_star = critical_a(lp.with_c(0.0)).a_star;
    const auto rep = hopf_crossing(lp);
    std::printf("# a* = %.10f  a_hat = %.10f  omega = %.8f  K = %s\n", a_star, rep.a_hat, rep.omega_hopf,
                rep.K.to_string().c_str());
    std::printf("# a  max Re lambda  leading (r,s)\n");
    for (int i = -10; i <= 10; ++i) {
        const double a = rep.a_hat + 0.002 * i;
        const auto le = leading_eigenvalue(lp.with_a(a));
        std::printf("%.4f % .6e  (%d,%d)\n", a, le.lambda.real(), le.r, le.s);
    }
}
