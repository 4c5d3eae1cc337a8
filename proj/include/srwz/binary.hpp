#pragma once

namespace srwz::prob {

// Binary entropy h(u) in bits, with h(0) = h(1) = 0 by continuity.
double binary_entropy(double u);

// Binary convolution u*v = u(1-v) + v(1-u), the crossover probability of two
// cascaded binary symmetric channels.
double binary_convolve(double u, double v);

// G(u) = h(p*u) - h(u), the binary Wyner-Ziv rate kernel. Strictly convex,
// symmetric about 0.5 with minimum value 0 there. Requires 0 <= p < 0.5.
double g_func(double p, double u);

// Analytic derivative of G at an interior point 0 < u < 1.
double g_deriv(double p, double u);

// Second derivative of G at an interior point.
double g_second_deriv(double p, double u);

// The critical distortion d_c in (0, p) solving G(d_c)/(d_c - p) = G'(d_c),
// i.e. the abscissa where the tangent of G passes through (p, 0).
// Requires 0 < p < 0.5; the certified residual of the returned root is
// at most 1e-10.
double critical_distortion(double p);

}  // namespace srwz::prob
