// Cooling-rate fits, parameter sweeps and quantum-jump statistics

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ringcav/params.hpp"
#include "ringcav/quantum.hpp"

namespace ringcav::analysis {

// ---------------------------------------------------------------------------
// exponential fit  y = A exp(-gamma t) + C

struct FitOptions {
    double skip_transient = 5.0;  // samples with t < t_0 + skip are dropped
    int max_iterations = 500;
    double tolerance = 1e-15;     // relative change in the residual sum of squares
};

struct FitResult {
    double rate = 0;       // gamma
    double amplitude = 0;  // A
    double offset = 0;     // C
    double residual_norm = 0;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // over (A, gamma, C)
    bool converged = false;  // false: the initializer estimate is returned
    int iterations = 0;
    int n_samples = 0;
};

FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y, const FitOptions& opt = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// sweeps

enum class SweepAxis { Eta, Delta, U0, OmegaRec, Kappa };
enum class Tier { Params, Classical, Linear, Moments, Quantum };

const char* axis_name(SweepAxis a);
SweepAxis parse_axis(const std::string& name);
const char* tier_name(Tier t);

/// Producing tier of a quantity name such as "linear.n_at"; throws for unknown names.
Tier quantity_tier(const std::string& quantity);

/// Every quantity name accepted by sweep().
const std::vector<std::string>& sweep_quantities();

struct QuantumSweepOptions {
    quantum::HilbertSpace space;
    quantum::FieldTreatment treatment = quantum::FieldTreatment::CoherentCosine;
    quantum::EnsembleOptions ensemble;
    double t_max = 300;
    int n_samples = 301;
    double initial_e_kin = 25;
    double average_window = 0.2;  // fraction of t_max averaged for long-time values
    FitOptions fit;
};

struct SweepSpec {
    SystemParams<double> base;
    SweepAxis axis = SweepAxis::Eta;
    std::vector<double> grid;
    bool optimal_detuning = false;  // enforce delta = -omega_m at every point
    std::vector<std::string> quantities;
    QuantumSweepOptions quantum;
};

struct SweepColumn {
    std::string name;
    Tier tier;
};

struct SweepTable {
    SweepAxis axis = SweepAxis::Eta;
    std::vector<double> grid;
    std::vector<SystemParams<double>> points;  // resolved parameters per row
    std::vector<SweepColumn> columns;
    Eigen::MatrixXd values;                        // rows x columns; NaN where a cell failed
    std::vector<std::vector<std::string>> errors;  // rows x columns; empty when the cell succeeded

    std::vector<double> column(const std::string& name) const;
    int failed_cells() const;
};

/// Point parameters for one grid value.
SystemParams<double> sweep_point(const SweepSpec& spec, double value);

SweepTable sweep(const SweepSpec& spec);

std::vector<double> linear_grid(double a, double b, int n);
std::vector<double> log_grid(double a, double b, int n);

// ---------------------------------------------------------------------------
// quantum jumps

struct JumpOptions {
    double threshold = 0.5;     // n_at >= threshold + k - 1 classifies as level k
    int min_dwell_samples = 1;  // a level must persist this many samples to count
    int min_transitions = 5;    // fewer transitions flag the result as low confidence
};

struct Transition {
    double time;  // midpoint between the last sample of the old level and the first of the new
    int from;
    int to;
};

struct JumpStats {
    std::vector<int> levels;                      // classification per sample
    std::vector<std::vector<double>> dwell_times; // per level, complete segments only
    std::vector<std::vector<int>> transition_counts;  // [from][to]
    std::vector<Transition> transitions;
    double correlation = 0;  // Pearson correlation of n_at and n_sine; NaN if undefined
    bool low_confidence = true;

    double mean_dwell(int level) const;
};

JumpStats jump_statistics(const std::vector<double>& times, const std::vector<double>& n_at,
                          const std::vector<double>& n_sine, const JumpOptions& opt = {});
JumpStats jump_statistics(const quantum::TrajectoryRecord& rec, const JumpOptions& opt = {});

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Mean of y over samples with t >= t.back() - window.
double tail_average(const std::vector<double>& t, const std::vector<double>& y, double window);

}  // namespace ringcav::analysis
