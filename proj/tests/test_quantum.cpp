#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ringcav/classical.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/moments.hpp"
#include "ringcav/quantum.hpp"

using namespace ringcav;
using namespace ringcav::quantum;

namespace {

SystemParams<double> trapped(double omega_rec = 0.5, double u0 = 0.01, double omega_m = 6, double delta = -6) {
    SystemParams<double> p{1, delta, u0, 0, omega_rec};
    p.eta = eta_for_trap(omega_m, p);
    return p;
}

HilbertSpace space(int n_mom, int fock, MomentumSector s = MomentumSector::Even, int fock_cos = 0) {
    HilbertSpace h;
    h.n_mom = n_mom;
    h.n_fock_sine = fock;
    h.n_fock_cos = fock_cos;
    h.sector = s;
    return h;
}

double max_abs(const SparseMatrix& a) {
    double m = 0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

bool identical(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!(a(i) == b(i) || (std::isnan(a(i)) && std::isnan(b(i))))) return false;
    return true;
}

int index_of(const QuantumModel& m, int n, int field) {
    for (int i = 0; i < m.motional_dim; ++i)
        if (m.momenta[i] == n) return i * m.field_dim + field;
    return -1;
}

}  // namespace

TEST_CASE("basis bookkeeping") {
    CHECK(space(8, 3).momenta() == std::vector<int>{-8, -6, -4, -2, 0, 2, 4, 6, 8});
    CHECK(space(7, 3).momenta() == std::vector<int>{-6, -4, -2, 0, 2, 4, 6});
    CHECK(space(4, 3, MomentumSector::Full).motional_dim() == 9);
    CHECK(space(8, 3).dim(FieldTreatment::CoherentCosine) == 36);
    CHECK(space(8, 3, MomentumSector::Even, 5).dim(FieldTreatment::FullTwoMode) == 9 * 4 * 6);
}

TEST_CASE("position operator matrix elements") {
    const auto m = build_model(trapped(), space(6, 2), FieldTreatment::CoherentCosine);
    for (int n = -6; n <= 4; n += 2)
        for (int f = 0; f < 3; ++f) {
            const int i = index_of(m, n + 2, f), j = index_of(m, n, f);
            CHECK(m.cos2kx.coeff(i, j) == cplx(0.5, 0));
            CHECK(m.cos2kx.coeff(j, i) == cplx(0.5, 0));
            CHECK(m.sin2kx.coeff(i, j) == cplx(0, -0.5));
            CHECK(m.sin2kx.coeff(j, i) == cplx(0, 0.5));
        }
    CHECK(m.cos2kx.nonZeros() == 2 * 6 * 3);
}

TEST_CASE("hamiltonian is hermitian and banded in momentum") {
    const auto p = trapped();
    for (auto sector : {MomentumSector::Even, MomentumSector::Full}) {
        for (auto t : {FieldTreatment::CoherentCosine, FieldTreatment::FullTwoMode}) {
            SystemParams<double> q = p;
            if (t == FieldTreatment::FullTwoMode) q.eta = 2.0;  // small coherent amplitude
            const auto m = build_model(q, space(6, 3, sector, 12), t);
            CHECK(max_abs(SparseMatrix(m.hamiltonian - SparseMatrix(m.hamiltonian.adjoint()))) < 1e-14);
            for (int k = 0; k < m.hamiltonian.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(m.hamiltonian, k); it; ++it) {
                    const int dn = m.momenta[it.row() / m.field_dim] - m.momenta[it.col() / m.field_dim];
                    CHECK((dn == 0 || std::abs(dn) == 2));
                }
        }
    }
}

TEST_CASE("kinetic diagonal without light shift") {
    SystemParams<double> p{1, -3, 0, 0, 0.25};
    const auto m = build_model(p, space(6, 2, MomentumSector::Full), FieldTreatment::CoherentCosine);
    for (int i = 0; i < m.motional_dim; ++i)
        for (int f = 0; f < m.field_dim; ++f) {
            const int k = i * m.field_dim + f;
            CHECK(m.hamiltonian.coeff(k, k).real() == doctest::Approx(0.25 * m.momenta[i] * m.momenta[i] + 3 * f));
        }
    // vacuum at zero momentum is an exact eigenstate of h_eff with eigenvalue 0
    const StateVector psi = momentum_state(m, 0, 0);
    CHECK((m.h_eff * psi).norm() < 1e-15);
}

TEST_CASE("parity: the full sector never mixes even and odd momenta") {
    const auto m = build_model(trapped(), space(5, 3, MomentumSector::Full), FieldTreatment::CoherentCosine);
    StateVector v = momentum_state(m, 1, 1);
    for (int k = 0; k < 10; ++k) {
        v = m.h_eff * v;
        for (int i = 0; i < m.motional_dim; ++i)
            if (m.momenta[i] % 2 == 0) CHECK(v.segment(i * m.field_dim, m.field_dim).norm() == 0.0);
    }
}

TEST_CASE("initial states") {
    const auto m = build_model(trapped(), space(8, 4), FieldTreatment::CoherentCosine);
    const auto o = observables(momentum_state(m, 4, 0), m);
    CHECK(o.e_kin == doctest::Approx(16 * 0.5));
    CHECK(o.cos2kx == 0.0);
    CHECK(o.sin2kx == 0.0);
    CHECK(std::isinf(o.dx));
    CHECK(o.n_sine == 0.0);
    CHECK(observables(momentum_state(m, 0, 2), m).n_sine == doctest::Approx(2.0));
    CHECK_THROWS_AS(momentum_state(m, 3), TruncationError);
    CHECK_THROWS_AS(momentum_state(m, 10), TruncationError);
    CHECK(momentum_for_kinetic_energy(m, 8.1) == 4);
    CHECK_THROWS_AS(momentum_for_kinetic_energy(m, 1e3), TruncationError);

    const auto g = observables(product_state(m, motional_ground_state(m).cast<cplx>()), m);
    CHECK(g.n_at < 0.01);
    CHECK(g.n_at >= -1e-12);
    CHECK(g.cos2kx > 0.5);
    CHECK(g.e_kin > 0.5 * 6 / 4);
    CHECK(g.e_kin < 1.2 * 6 / 4);

    const auto w = thermal_momentum_weights(m, 5.0);
    CHECK(w.sum() == doctest::Approx(1.0));
    double e = 0;
    for (int i = 0; i < m.motional_dim; ++i) e += w(i) * 0.5 * m.momenta[i] * m.momenta[i];
    CHECK(e == doctest::Approx(5.0).epsilon(1e-8));
    CHECK_THROWS_AS(thermal_momentum_weights(m, 1e3), TruncationError);
}

TEST_CASE("position uncertainty") {
    CHECK(position_uncertainty(1, 0) == 0.0);
    CHECK(std::isinf(position_uncertainty(0, 0)));
    // wrapped normal kx with standard deviation s has R = exp(-2 s^2)
    const double s = 0.1;
    CHECK(position_uncertainty(std::exp(-2 * s * s), 0) == doctest::Approx(s));
}

TEST_CASE("model guards") {
    SystemParams<double> p = trapped();
    CHECK_THROWS_AS(build_model(p, space(8, 4, MomentumSector::Even, 4), FieldTreatment::FullTwoMode),
                    TruncationError);
    CHECK_THROWS_AS(build_model(p, space(2, 4), FieldTreatment::CoherentCosine), std::invalid_argument);
    const auto big = build_model(p, space(40, 9), FieldTreatment::CoherentCosine);
    REQUIRE(big.dim() > 400);
    const DensityMatrix rho = Eigen::MatrixXcd::Identity(big.dim(), big.dim()) / double(big.dim());
    CHECK_THROWS_AS(lindblad_evolve(big, rho, {0, 1}), GuardError);
}

TEST_CASE("single photon decays with one jump at rate 2 kappa") {
    SystemParams<double> p{1, -2, 0, 0, 0.5};
    const auto m = build_model(p, space(4, 3), FieldTreatment::CoherentCosine);
    const StateVector psi = momentum_state(m, 0, 1);
    const auto times = classical::uniform_grid(0, 20, 5);
    const int n = 2000;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        const auto r = mcwf_trajectory(m, psi, split_seed(99, k), times);
        REQUIRE(r.jumps.size() == 1);
        sum += r.jumps[0].time;
        CHECK(r.values(4, observable_index("n_sine")) == 0.0);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("field vacuum stays dark without light shift") {
    SystemParams<double> p{1, -2, 0, 3, 0.5};
    const auto m = build_model(p, space(4, 3), FieldTreatment::CoherentCosine);
    const auto r = mcwf_trajectory(m, momentum_state(m, 2, 0), 5, classical::uniform_grid(0, 50, 11));
    CHECK(r.jumps.empty());
    CHECK(r.values(10, observable_index("e_kin")) == doctest::Approx(2.0));
}

TEST_CASE("master equation: photon decay and trace preservation") {
    SystemParams<double> p{1, -2, 0, 0, 0.5};
    const auto m = build_model(p, space(4, 3), FieldTreatment::CoherentCosine);
    const StateVector psi = momentum_state(m, 0, 2);
    const auto times = classical::uniform_grid(0, 3, 7);
    const auto s = lindblad_evolve(m, psi * psi.adjoint(), times);
    const auto ns = s.column("n_sine");
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(ns[k] == doctest::Approx(2 * std::exp(-2 * times[k])).epsilon(1e-7));

    const auto q = build_model(trapped(), space(4, 3), FieldTreatment::CoherentCosine);
    const StateVector phi = product_state(q, motional_ground_state(q).cast<cplx>(), 1);
    const DensityMatrix rho = phi * phi.adjoint();
    CHECK(std::abs(lindblad_rhs(q, rho).trace()) < 1e-12);
    const auto sq = lindblad_evolve(q, rho, classical::uniform_grid(0, 5, 6));
    for (double tr : sq.trace) CHECK(tr == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS(lindblad_evolve(q, DensityMatrix(2 * rho), {0, 1}));
}

TEST_CASE("ensembles are independent of the thread count") {
    const auto m = build_model(trapped(), space(4, 3), FieldTreatment::CoherentCosine);
    const auto ic = InitialCondition::thermal_momentum(3.0, 1);
    const auto times = classical::uniform_grid(0, 4, 9);
    EnsembleOptions o;
    o.n_traj = 24;
    o.master_seed = 11;
    o.keep_records = 3;
    o.threads = 1;
    const auto a = run_ensemble(m, ic, times, o);
    o.threads = 4;
    const auto b = run_ensemble(m, ic, times, o);
    CHECK(identical(a.mean, b.mean));
    CHECK(identical(a.std_error, b.std_error));
    CHECK(a.seeds == b.seeds);
    CHECK(a.total_jumps == b.total_jumps);
    REQUIRE(a.records.size() == 3);
    CHECK(a.records[2].seed == split_seed(11, 2));
    CHECK(identical(a.records[1].values, b.records[1].values));
    o.master_seed = 12;
    CHECK(!identical(run_ensemble(m, ic, times, o).mean, a.mean));
}

TEST_CASE("trajectory average converges to the master equation") {
    const auto m = build_model(trapped(), space(6, 3), FieldTreatment::CoherentCosine);
    const StateVector psi = momentum_state(m, 2, 1);
    const auto times = classical::uniform_grid(0, 4, 9);
    EnsembleOptions o;
    o.n_traj = 800;
    o.master_seed = 5;
    const auto ens = run_ensemble(m, InitialCondition::from_state(psi), times, o);
    const auto rho = lindblad_evolve(m, psi * psi.adjoint(), times);
    for (const char* name : {"e_kin", "n_sine", "cos2kx"}) {
        const auto mean = ens.mean_of(name), se = ens.std_error_of(name), ref = rho.column(name);
        for (std::size_t k = 0; k < times.size(); ++k) {
            INFO(name << " t=" << times[k]);
            CHECK(std::abs(mean[k] - ref[k]) <= 4 * se[k] + 1e-6);
        }
    }
}

TEST_CASE("quasi-steady sine photon number follows the linearized field") {
    const auto p = trapped();
    const auto m = build_model(p, space(8, 3), FieldTreatment::CoherentCosine);
    const StateVector psi = product_state(m, motional_ground_state(m).cast<cplx>(), 0);
    const auto s = lindblad_evolve(m, psi * psi.adjoint(), {0, 6});
    const double n_a = steady_state_moments(linearize(p)).n_a;
    CHECK(s.column("n_sine")[1] == doctest::Approx(n_a).epsilon(0.3));
}
