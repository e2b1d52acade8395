// Truncated particle (x) field model, quantum trajectories and the
// density-matrix oracle
//
// Motional basis: plane waves |n>, p = n hbar k. The light-shift operators only
// contain cos 2kx and sin 2kx, which shift n by +-2, so every operator is banded
// in the momentum index. The Even sector keeps n even (one lambda/2 cell with a
// single trap well); Full keeps every n in [-n_mom, n_mom] (one wavelength, two
// wells at kx = 0 and kx = pi).
//
// Product ordering: motion is the slowest index, then the cosine mode (if
// quantized), then the sine mode:  index = (m * N_cos + c) * N_sine + s.
//
//   <n+2| cos 2kx |n> = 1/2          <n-2| cos 2kx |n> = 1/2
//   <n+2| sin 2kx |n> = -i/2         <n-2| sin 2kx |n> = +i/2

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ringcav/params.hpp"
#include "ringcav/random.hpp"

namespace ringcav::quantum {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

enum class FieldTreatment { FullTwoMode, CoherentCosine };
enum class MomentumSector { Even, Full };

struct HilbertSpace {
    int n_mom = 16;       // momentum cutoff, |n| <= n_mom
    int n_fock_sine = 6;  // sine-mode Fock cutoff
    int n_fock_cos = 0;   // cosine-mode Fock cutoff (FullTwoMode only)
    MomentumSector sector = MomentumSector::Even;

    std::vector<int> momenta() const;
    int motional_dim() const;
    int field_dim(FieldTreatment t) const;
    int dim(FieldTreatment t) const { return motional_dim() * field_dim(t); }
};

// Collapse operator sqrt(rate) * op.
struct JumpOperator {
    std::string name;
    SparseMatrix op;
    double rate = 0;
};

// Vibrational levels of the linearized well(s), sampled on the momentum grid and
// orthonormalized. Population outside span(basis) is counted at cutoff_level.
struct OccupancyProjector {
    Eigen::MatrixXd basis;   // motional_dim x n_vectors
    Eigen::VectorXd levels;  // level index of each column
    int cutoff_level = 0;

    Eigen::MatrixXd motional_operator() const;
};

struct ModelOptions {
    double truncation_threshold = 1e-6;  // allowed Poisson tail of the cosine coherent state
    int max_occupancy_levels = 20;
};

struct QuantumModel {
    SystemParams<double> params;
    HilbertSpace space;
    FieldTreatment treatment = FieldTreatment::CoherentCosine;
    double alpha = 0;          // coherent cosine amplitude / linearization point
    double energy_offset = 0;  // constant part of H, dropped during propagation
    SparseMatrix hamiltonian;  // includes energy_offset
    SparseMatrix h_eff;        // hamiltonian - energy_offset - (i/2) sum rate op^dag op
    std::vector<JumpOperator> jumps;

    std::vector<int> momenta;
    int motional_dim = 0;
    int field_dim = 0;
    Eigen::VectorXd momentum_sq;  // n^2 per basis state
    Eigen::VectorXd n_sine;       // sine photon number per basis state
    Eigen::VectorXd n_cos;        // cosine photon number per basis state (zero if coherent)
    SparseMatrix cos2kx, sin2kx;
    std::optional<OccupancyProjector> occupancy;

    int dim() const { return motional_dim * field_dim; }
};

QuantumModel build_model(const SystemParams<double>& p, const HilbertSpace& h, FieldTreatment t,
                         const ModelOptions& opt = {});

// ---------------------------------------------------------------------------
// observables

inline constexpr std::array<std::string_view, 7> kObservableNames = {
    "e_kin", "n_sine", "n_cos", "cos2kx", "sin2kx", "dx", "n_at"};
inline constexpr int kNumObservables = int(kObservableNames.size());

int observable_index(std::string_view name);

struct ObservableSet {
    double e_kin = 0;   // omega_rec <n^2>
    double n_sine = 0;
    double n_cos = 0;   // alpha^2 in the coherent treatment
    double cos2kx = 0;
    double sin2kx = 0;
    double dx = 0;      // circular standard deviation of kx over the lambda/2 cell
    double n_at = 0;    // trap occupancy; NaN when no trap exists

    Eigen::Matrix<double, kNumObservables, 1> as_vector() const;
};

ObservableSet observables(const StateVector& psi, const QuantumModel& m);
ObservableSet observables(const DensityMatrix& rho, const QuantumModel& m);

/// sqrt(-2 ln R) / 2 with R = |<exp(2ikx)>|.
double position_uncertainty(double mean_cos2kx, double mean_sin2kx);

struct TruncationDiagnostics {
    double momentum_edge = 0;  // population at the outermost momenta
    double top_fock = 0;       // population in the highest Fock level of any mode
};

TruncationDiagnostics truncation_diagnostics(const StateVector& psi, const QuantumModel& m);

// ---------------------------------------------------------------------------
// states

/// Motional trap Hamiltonian omega_rec n^2 - alpha^2 u0 cos^2 kx (real symmetric).
Eigen::MatrixXd trap_hamiltonian(const QuantumModel& m);

/// Lowest eigenvector of trap_hamiltonian (motional space only).
Eigen::VectorXd motional_ground_state(const QuantumModel& m);

/// motional (x) cosine coherent state (FullTwoMode) (x) sine Fock |n_sine>.
StateVector product_state(const QuantumModel& m, const Eigen::VectorXcd& motional, int n_sine = 0);

StateVector momentum_state(const QuantumModel& m, int n, int n_sine = 0);

/// Allowed momentum index n >= 0 whose omega_rec n^2 is closest to e_kin;
/// throws TruncationError if that is the outermost grid momentum.
int momentum_for_kinetic_energy(const QuantumModel& m, double e_kin);

struct InitialCondition {
    enum class Kind { Pure, ThermalMomentum };
    Kind kind = Kind::Pure;
    StateVector pure;   // Kind::Pure
    double e_kin = 0;   // Kind::ThermalMomentum: target mean kinetic energy
    int n_sine = 0;

    static InitialCondition from_state(StateVector psi);
    static InitialCondition thermal_momentum(double e_kin, int n_sine = 0);

    /// Pure state for one trajectory (draws a momentum for the thermal mixture).
    StateVector sample(const QuantumModel& m, Rng& rng) const;
    DensityMatrix density_matrix(const QuantumModel& m) const;
};

/// Boltzmann weights over allowed momenta with mean omega_rec n^2 = e_kin.
Eigen::VectorXd thermal_momentum_weights(const QuantumModel& m, double e_kin);

// ---------------------------------------------------------------------------
// quantum trajectories

struct McwfOptions {
    double rtol = 1e-7;
    double atol = 1e-9;
    double jump_time_tol = 1e-10;    // bisection tolerance on the jump time
    double norm_growth_tol = 1e-8;   // relative norm increase that rejects a step
};

struct JumpEvent {
    double time;
    int channel;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<double> times;
    Eigen::MatrixXd values;  // samples x kNumObservables
    std::vector<JumpEvent> jumps;
    double max_norm_growth = 0;   // largest accepted relative norm increase between steps
    double final_norm_error = 0;  // | ||psi_final|| - 1 | after renormalization
    TruncationDiagnostics truncation;

    std::vector<double> column(std::string_view name) const;
};

TrajectoryRecord mcwf_trajectory(const QuantumModel& m, const StateVector& psi0, std::uint64_t seed,
                                 const std::vector<double>& sample_times, const McwfOptions& opt = {});

struct EnsembleOptions {
    int n_traj = 100;
    std::uint64_t master_seed = 1;
    std::optional<int> threads;  // unset: RINGCAV_THREADS, then hardware concurrency
    int keep_records = 0;        // number of leading trajectory records to return
    McwfOptions mcwf;
};

struct EnsembleStats {
    int n_traj = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> times;
    Eigen::MatrixXd mean;        // samples x kNumObservables
    Eigen::MatrixXd std_error;   // sample std / sqrt(n_traj)
    std::vector<std::uint64_t> seeds;
    std::vector<TrajectoryRecord> records;
    long total_jumps = 0;
    TruncationDiagnostics truncation;  // worst case over all trajectories

    std::vector<double> mean_of(std::string_view name) const;
    std::vector<double> std_error_of(std::string_view name) const;
};

/// Trajectory i uses split_seed(master_seed, i); its initial state (if random)
/// is drawn from split_seed(seed_i, kInitialStateStream).
inline constexpr std::uint64_t kInitialStateStream = 0x1a1715eed;

EnsembleStats run_ensemble(const QuantumModel& m, const InitialCondition& ic,
                           const std::vector<double>& sample_times, const EnsembleOptions& opt);

/// Worker count: explicit request, else RINGCAV_THREADS, else hardware concurrency (>= 1).
int resolve_worker_count(std::optional<int> requested);

// ---------------------------------------------------------------------------
// density-matrix oracle

struct LindbladOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    int max_dim = 400;
};

struct DensitySeries {
    std::vector<double> times;
    Eigen::MatrixXd values;  // samples x kNumObservables
    std::vector<double> trace;

    std::vector<double> column(std::string_view name) const;
};

DensitySeries lindblad_evolve(const QuantumModel& m, const DensityMatrix& rho0,
                              const std::vector<double>& sample_times, const LindbladOptions& opt = {});

/// Right-hand side of the master equation, exposed for tests.
DensityMatrix lindblad_rhs(const QuantumModel& m, const DensityMatrix& rho);

}  // namespace ringcav::quantum
