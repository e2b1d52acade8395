// Mean-field dynamics of the two cavity modes and the particle

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ringcav/ode.hpp"
#include "ringcav/params.hpp"

namespace ringcav::classical {

using cplx = std::complex<double>;

enum class Geometry { Ring, StandingWave };

struct ClassicalState {
    cplx alpha_c{};  // cosine-mode amplitude
    cplx alpha_s{};  // sine-mode amplitude
    double x = 0;    // position, units of 1/k
    double p = 0;    // momentum, units of hbar k

    using Packed = Eigen::Matrix<double, 6, 1>;
    Packed pack() const;
    static ClassicalState unpack(const Eigen::Ref<const Eigen::VectorXd>& v);
};

// u_c = u0 cos^2 kx, u_s = u0 sin^2 kx, u_cs = u0 sin kx cos kx and d/d(kx).
struct PotentialTriple {
    double u_c, u_s, u_cs;
    double du_c, du_s, du_cs;
};

PotentialTriple potentials(double x, double u0, Geometry g = Geometry::Ring);

/// Light-shift potential energy seen by the particle,
/// |a_c|^2 u_c + |a_s|^2 u_s + 2 Re(a_c* a_s) u_cs. The particle Hamiltonian is
/// omega_rec p^2 - U, so the force is +dU/d(kx).
double light_shift(const ClassicalState& s, double u0, Geometry g = Geometry::Ring);

ClassicalState classical_rhs(const ClassicalState& s, const SystemParams<double>& p, Geometry g);

double kinetic_energy(const ClassicalState& s, const SystemParams<double>& p);

/// Total classical Hamiltonian including the field energy; conserved when
/// kappa = 0 and eta = 0.
double total_energy(const ClassicalState& s, const SystemParams<double>& p, Geometry g);

/// Stationary cosine amplitude for a particle frozen at x.
cplx steady_cosine_amplitude(const SystemParams<double>& p, double x);

struct ClassicalSeries {
    std::vector<double> times;
    std::vector<ClassicalState> states;
};

ClassicalSeries integrate_classical(const ClassicalState& s0, const SystemParams<double>& p,
                                    Geometry g, const std::vector<double>& times,
                                    double rtol = 1e-8);

struct GeometryRun {
    ClassicalSeries series;
    std::vector<double> e_kin;
    std::vector<double> envelope;   // trailing max of e_kin over one trap period
    double max_excursion = 0;       // max |x - x0|
    std::optional<double> half_energy_time;  // first t with envelope <= e_kin(0)/2
};

struct ComparisonSummary {
    GeometryRun ring;
    GeometryRun standing;
    double envelope_window = 0;
};

/// Runs both geometries from the same initial state on n_samples uniform
/// points in [0, t_max].
ComparisonSummary compare_geometries(const SystemParams<double>& p, const ClassicalState& s0,
                                     double t_max, int n_samples = 2001, double rtol = 1e-8);

GeometryRun analyse_run(ClassicalSeries series, const SystemParams<double>& p, double window);

/// Envelope window used by compare_geometries: one harmonic trap period when
/// a trap exists, t_max / 50 otherwise.
double envelope_window(const SystemParams<double>& p, double t_max);

std::vector<double> uniform_grid(double t0, double t1, int n);

}  // namespace ringcav::classical
