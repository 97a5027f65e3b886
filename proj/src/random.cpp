#include "bolab/random.hpp"

#include "bolab/spectral.hpp"

namespace bolab {

RealField band_limited_noise(const Grid& g, std::mt19937_64& rng, double xi_cut, double window_width) {
    const std::size_t n = g.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> c(n, cplx(0.0));
    for (std::size_t k = 1; k < n / 2; ++k) {
        const double a = normal(rng);
        const double b = normal(rng);
        const double xi = g.xi(k);
        const double env = std::exp(-(xi / xi_cut) * (xi / xi_cut));
        c[k] = cplx(a, b) * env;
        c[n - k] = std::conj(c[k]);
    }
    RealField u = real_from_spectrum(g, std::move(c));
    if (window_width > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.x(i);
            u[i] *= std::exp(-x * x / (2.0 * window_width * window_width));
        }
    }
    const double m = max_abs(u);
    if (m > 0.0) u *= 1.0 / m;
    return u;
}

RealField odd_part(const RealField& u) {
    RealField r = reflect(u);
    RealField out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 0.5 * (u[i] - r[i]);
    return out;
}

}  // namespace bolab
