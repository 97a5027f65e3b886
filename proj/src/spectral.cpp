#include "bolab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bolab {

namespace {

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per size under a lock and then shared read-only.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

std::mutex plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

const PlanPair& plans_for(std::size_t n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair pp;
    pp.forward = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, flags);
    pp.backward = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD, flags);
    return cache.emplace(n, pp).first->second;
}

template <class F>
F symbol_apply(const F& u, const Symbol& symbol) {
    ComplexField c = from_spectrum(u.grid(), [&] {
        auto s = spectrum(u);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] *= symbol(k);
        return s;
    }());
    if constexpr (std::is_same_v<F, RealField>) {
        return real_part(c);
    } else {
        return c;
    }
}

int sgn_at(std::size_t k, std::size_t n) {
    long m = signed_index(k, n);
    if (m == 0 || k == n / 2) return 0;
    return m > 0 ? 1 : -1;
}

cplx derivative_symbol(std::size_t k, const Grid& g, int order) {
    const std::size_t n = g.size();
    if (order % 2 == 1 && k == n / 2) return 0.0;
    cplx f(0.0, g.xi(k));
    cplx r = 1.0;
    for (int i = 0; i < order; ++i) r *= f;
    return r;
}

}  // namespace

void fft_forward(std::vector<cplx>& v) {
    const auto& p = plans_for(v.size());
    auto* a = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(p.forward, a, a);
}

void fft_backward(std::vector<cplx>& v) {
    const auto& p = plans_for(v.size());
    auto* a = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(p.backward, a, a);
}

long signed_index(std::size_t k, std::size_t n) {
    long kk = static_cast<long>(k);
    long nn = static_cast<long>(n);
    return kk < nn / 2 ? kk : kk - nn;
}

std::vector<cplx> spectrum(const RealField& u) {
    std::vector<cplx> v(u.begin(), u.end());
    fft_forward(v);
    return v;
}

std::vector<cplx> spectrum(const ComplexField& u) {
    std::vector<cplx> v = u.values();
    fft_forward(v);
    return v;
}

ComplexField from_spectrum(const Grid& g, std::vector<cplx> coeffs) {
    if (coeffs.size() != g.size()) throw std::invalid_argument("spectrum size does not match grid");
    fft_backward(coeffs);
    const double s = 1.0 / static_cast<double>(g.size());
    for (auto& c : coeffs) c *= s;
    return ComplexField(g, std::move(coeffs));
}

RealField real_from_spectrum(const Grid& g, std::vector<cplx> coeffs) {
    return real_part(from_spectrum(g, std::move(coeffs)));
}

RealField apply_symbol(const RealField& u, const Symbol& symbol) { return symbol_apply(u, symbol); }
ComplexField apply_symbol(const ComplexField& u, const Symbol& symbol) { return symbol_apply(u, symbol); }

RealField hilbert(const RealField& u) {
    const std::size_t n = u.size();
    return apply_symbol(u, [n](std::size_t k) { return cplx(0.0, sgn_at(k, n)); });
}

ComplexField hilbert(const ComplexField& u) {
    const std::size_t n = u.size();
    return apply_symbol(u, [n](std::size_t k) { return cplx(0.0, sgn_at(k, n)); });
}

// P+ = (1 - iH)/2 has symbol (1 + sgn)/2; P- = -(1 + iH)/2 has symbol -(1 - sgn)/2.
ComplexField project_plus(const ComplexField& u) {
    const std::size_t n = u.size();
    return apply_symbol(u, [n](std::size_t k) { return cplx(0.5 * (1 + sgn_at(k, n))); });
}

ComplexField project_minus(const ComplexField& u) {
    const std::size_t n = u.size();
    return apply_symbol(u, [n](std::size_t k) { return cplx(-0.5 * (1 - sgn_at(k, n))); });
}

ComplexField project_plus(const RealField& u) { return project_plus(to_complex(u)); }
ComplexField project_minus(const RealField& u) { return project_minus(to_complex(u)); }

RealField derivative(const RealField& u, int order) {
    if (order < 1) throw std::invalid_argument("derivative order must be at least 1");
    const Grid& g = u.grid();
    return apply_symbol(u, [&g, order](std::size_t k) { return derivative_symbol(k, g, order); });
}

ComplexField derivative(const ComplexField& u, int order) {
    if (order < 1) throw std::invalid_argument("derivative order must be at least 1");
    const Grid& g = u.grid();
    return apply_symbol(u, [&g, order](std::size_t k) { return derivative_symbol(k, g, order); });
}

double integrate(const RealField& u) {
    double s = 0.0;
    for (double v : u) s += v;
    return s * u.grid().spacing();
}

cplx integrate(const ComplexField& u) {
    cplx s = 0.0;
    for (const cplx& v : u) s += v;
    return s * u.grid().spacing();
}

double inner(const RealField& u, const RealField& v) {
    require_same_grid(u.grid(), v.grid());
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s * u.grid().spacing();
}

double l2_norm(const RealField& u) { return std::sqrt(inner(u, u)); }

double sobolev_norm(const RealField& u, double s) {
    if (s < 0.0) throw std::invalid_argument("Sobolev index must be non-negative");
    const Grid& g = u.grid();
    auto c = spectrum(u);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        double w = s == 0.0 ? 1.0 : std::pow(1.0 + g.xi(k) * g.xi(k), s);
        acc += w * std::norm(c[k]);
    }
    // Parseval: h * sum |u_i|^2 = (h / n) * sum |c_k|^2.
    return std::sqrt(acc * g.spacing() / static_cast<double>(g.size()));
}

RealField lowpass(const RealField& u, double fraction) {
    const std::size_t n = u.size();
    const double cut = fraction * static_cast<double>(n / 2);
    return apply_symbol(u, [n, cut](std::size_t k) {
        return std::abs(static_cast<double>(signed_index(k, n))) <= cut ? cplx(1.0) : cplx(0.0);
    });
}

RealField reflect(const RealField& u) {
    const std::size_t n = u.size();
    RealField out(u.grid());
    for (std::size_t i = 0; i < n; ++i) out[i] = u[(n - i) % n];
    return out;
}

}  // namespace bolab
