#pragma once

#include <string>
#include <vector>

#include "bolab/field.hpp"
#include "bolab/parallel.hpp"

namespace bolab {

struct SolitonParams {
    std::vector<double> speeds;  // strictly increasing, positive
    std::vector<double> phases;
    double time = 0.0;

    // Validates and returns; throws std::invalid_argument with a reason.
    static SolitonParams make(std::vector<double> speeds, std::vector<double> phases, double time = 0.0);
    void validate() const;
    std::size_t count() const { return speeds.size(); }
};

struct ScatteringData {
    std::vector<double> lambda;  // -c_j / 2
    std::vector<cplx> gamma;     // -x_j - c_j t - i / (2 lambda_j)
};

ScatteringData scattering_data(const SolitonParams& p);

// Q_c(s) = 2c / (c^2 s^2 + 1)
double soliton_profile(double c, double s);
RealField one_soliton(double c, double x0, double t, const Grid& g);

// The printed tau formula gives -Q_c for one soliton with this Hilbert
// convention. `positive` flips it so the profile is +Q_c; `as_printed` is kept
// for the diagnostic report.
enum class TauSign { positive, as_printed };

RealField nsoliton_tau(const SolitonParams& p, const Grid& g, TauSign sign = TauSign::positive,
                       Exec exec = Exec::parallel);

struct ScatteringFields {
    std::vector<ComplexField> phi;
    RealField u;         // -sum |phi_j|^2 / lambda_j
    RealField u_linear;  // i sum (phi_j - conj phi_j)
    double max_condition = 0.0;
    std::size_t refined_points = 0;  // points that needed extended-precision refinement
};

ScatteringFields nsoliton_scattering(const SolitonParams& p, const Grid& g, Exec exec = Exec::parallel);

// dU/dx_j for each phase, by differentiating the per-point linear system.
std::vector<RealField> phase_derivatives(const SolitonParams& p, const Grid& g, Exec exec = Exec::parallel);

RealField dQ_dc(double c, const Grid& g, double x0 = 0.0);

struct EigenCatalog {
    RealField eta0, eta_minus, eta_plus, eta_one;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double norm_minus = 0.0;
    double norm_plus = 0.0;
    Grid grid;

    // Generalized eigenfunction of L_1 with eigenvalue 1 + lambda.
    RealField generalized(double lambda) const;
};

EigenCatalog eigen_catalog(const Grid& g);

}  // namespace bolab
