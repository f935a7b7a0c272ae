// Flow restricted to Fix(K) just past the (+,-) crossing on a 3x3 lattice.
// With c = 0 both eigenvalue pairs of the crossing block cross at a*. The
// amplitude first settles near the small travelling wave, a saddle here, then
// the orbit leaves for a large wave with the same symmetry. Pass c > 0 to
// split the pairs; the small wave is then stable.

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "fhntorus/fhntorus.hpp"

using namespace fhntorus;

int main(int argc, char** argv) {
    const double c = argc > 1 ? std::atof(argv[1]) : 0.0;
    const LatticeParams lp({0.0, 1.0, c}, {1.0, -1.0}, 3);
    const auto rep = c > 0 ? hopf_crossing(lp) : hopf_at_critical(lp);
    const auto at = lp.with_a(rep.a_hat - 0.005);
    Eigen::VectorXd dir = analytic_eigenvector(rep.mode.r, rep.mode.s, rep.mode.branch, at).real();
    dir *= 1e-3 / dir.lpNorm<Eigen::Infinity>();

    IntegrateOptions opt;
    opt.tol = {1e-10, 1e-12};
    const double t_end = 10000.0;
    const auto tr = reduced_integrate_fix(rep.K, project_fix(rep.K, StateVector(3, dir)), at, t_end, opt);

    std::printf("# a = %.4f, Fix(%s), amplitude per 500 time units\n", at.a(), rep.K.to_string().c_str());
    for (double t0 = 0; t0 < t_end; t0 += 500) {
        double amp = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            if (tr.times[i] >= t0 && tr.times[i] < t0 + 500) amp = std::max(amp, tr.states[i].lpNorm<Eigen::Infinity>());
        std::printf("%7.0f %.5f\n", t0, amp);
    }

    const auto orb = detect_periodic_orbit(tr, 3);
    if (!orb) {
        std::printf("no periodic orbit\n");
        return 1;
    }
    const auto sym = classify_spatiotemporal(orb);
    std::printf("period %.6f  amplitude %.4f  H = %s  K = %s  phases", orb->period, orb->amplitude,
                sym.H.to_string().c_str(), sym.K.to_string().c_str());
    for (const auto& p : sym.phases) std::printf(" (%d,%d)->%d/3", p.sigma.r, p.sigma.s, p.numerator);
    std::printf("\n");
}
