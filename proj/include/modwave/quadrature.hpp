#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "modwave/errors.hpp"

namespace modwave {

// Gauss-Kronrod 7/15 pair on [a,b]; err is the usual |G7-K15| based estimate.
template <class Func>
double quad_g7k15(const Func& f, double a, double b, double& err) {
    // node, G7 weight, K15 weight
    static const double nw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0,               0.204432940075298},
        {0.586087235467691, 0.0,               0.169004726639267},
        {0.864864423359769, 0.0,               0.104790010322250},
        {0.991455371120813, 0.0,               0.022935322010529},
    };

    const double x0 = 0.5 * (a + b);
    const double m = b - x0;

    double y0 = f(x0);
    double g7 = nw[0][1] * y0;
    double k15 = nw[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        const double dx = m * nw[i][0];
        const double yi = f(x0 + dx) + f(x0 - dx);
        g7 += nw[i][1] * yi;
        k15 += nw[i][2] * yi;
    }
    g7 *= m;
    k15 *= m;

    err = std::pow(200.0 * std::fabs(g7 - k15), 1.5);
    return k15;
}

// Adaptive bisection driver with an absolute tolerance and an evaluation budget.
template <class Func>
double quad_adaptive(const Func& f, double a, double b, double abs_tol = 1e-10,
                     std::size_t max_evals = 1000000) {
    if (!(b > a)) return 0.0;
    struct seg { double a, b, val, err; };
    double err0;
    double v0 = quad_g7k15(f, a, b, err0);
    std::vector<seg> work{{a, b, v0, err0}};
    std::size_t evals = 15;
    double total = v0, total_err = err0;

    while (total_err > abs_tol) {
        // split the worst segment
        std::size_t worst = 0;
        for (std::size_t i = 1; i < work.size(); ++i)
            if (work[i].err > work[worst].err) worst = i;
        seg s = work[worst];
        if (evals + 30 > max_evals || (s.b - s.a) < 1e-15 * (b - a))
            throw quadrature_failure("quad_adaptive: tolerance not met within budget");
        double el, er;
        const double mid = 0.5 * (s.a + s.b);
        seg l{s.a, mid, quad_g7k15(f, s.a, mid, el), el};
        seg r{mid, s.b, quad_g7k15(f, mid, s.b, er), er};
        evals += 30;
        total += l.val + r.val - s.val;
        total_err += l.err + r.err - s.err;
        work[worst] = l;
        work.push_back(r);
    }
    return total;
}

} // namespace modwave
