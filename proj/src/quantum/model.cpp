#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

SparseMatrix identity(int n) {
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

SparseMatrix diagonal(const Eigen::VectorXd& d) {
    Triplets t;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) != 0) t.emplace_back(int(i), int(i), d(i));
    SparseMatrix D(d.size(), d.size());
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

SparseMatrix annihilation(int n_max) {
    Triplets t;
    for (int k = 1; k <= n_max; ++k) t.emplace_back(k - 1, k, std::sqrt(double(k)));
    SparseMatrix a(n_max + 1, n_max + 1);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

// |n> -> |n+2| on the motional grid
SparseMatrix momentum_raise2(const std::vector<int>& momenta) {
    Triplets t;
    const int step = momenta.size() > 1 ? momenta[1] - momenta[0] : 2;
    const int shift = 2 / step;
    for (int i = 0; i + shift < int(momenta.size()); ++i) t.emplace_back(i + shift, i, 1.0);
    SparseMatrix T(momenta.size(), momenta.size());
    T.setFromTriplets(t.begin(), t.end());
    return T;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out = Eigen::kroneckerProduct(a, b).eval();
    out.makeCompressed();
    return out;
}

// Tail probability P(N > n_max) of a Poisson distribution with mean mu.
double poisson_tail(double mu, int n_max) {
    if (mu <= 0) return 0;
    double log_p = -mu;  // log P(0)
    double cdf = std::exp(log_p);
    for (int k = 1; k <= n_max; ++k) {
        log_p += std::log(mu) - std::log(double(k));
        cdf += std::exp(log_p);
    }
    return std::max(0.0, 1.0 - cdf);
}

// Orthonormal Hermite functions psi_0..psi_{count-1} at u.
Eigen::VectorXd hermite_functions(double u, int count) {
    Eigen::VectorXd h(count);
    h(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * u * u);
    if (count > 1) h(1) = std::sqrt(2.0) * u * h(0);
    for (int j = 1; j + 1 < count; ++j)
        h(j + 1) = std::sqrt(2.0 / (j + 1)) * u * h(j) - std::sqrt(double(j) / (j + 1)) * h(j - 1);
    return h;
}

OccupancyProjector make_occupancy_projector(const SystemParams<double>& p, const std::vector<int>& momenta,
                                            MomentumSector sector, int n_mom, int max_levels) {
    const auto d = derive_params(p);
    const double depth = d.alpha * d.alpha * p.u0;
    const double p_zpm = 1.0 / d.lamb_dicke;  // in units of hbar k
    const int bound = std::max(1, int(std::floor(depth / d.omega_m - 0.5)) + 1);
    // classical turning momentum of level j must stay inside 80% of the grid
    const double reach = 0.8 * n_mom / p_zpm;
    const int resolved = std::max(0, int(std::floor((reach * reach - 1) / 2)) + 1);
    const int wells = sector == MomentumSector::Full ? 2 : 1;
    const int m_dim = int(momenta.size());
    int K = std::min({bound, resolved, max_levels});
    K = std::max(K, 2);
    K = std::min(K, m_dim / wells);

    Eigen::MatrixXd phi(m_dim, wells * K);
    Eigen::VectorXd levels(wells * K);
    for (int i = 0; i < m_dim; ++i) {
        const Eigen::VectorXd h = hermite_functions(momenta[i] * d.lamb_dicke, K);
        for (int w = 0; w < wells; ++w) {
            // well at kx = pi: multiply plane-wave amplitudes by exp(-i n pi)
            const double sign = (w == 1 && (momenta[i] % 2 != 0)) ? -1.0 : 1.0;
            for (int j = 0; j < K; ++j) phi(i, w * K + j) = sign * h(j);
        }
    }
    for (int w = 0; w < wells; ++w)
        for (int j = 0; j < K; ++j) levels(w * K + j) = j;
    for (Eigen::Index c = 0; c < phi.cols(); ++c) phi.col(c).normalize();

    // symmetric (Loewdin) orthonormalization
    const Eigen::MatrixXd S = phi.transpose() * phi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd S_inv_half = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();

    OccupancyProjector proj;
    proj.basis = phi * S_inv_half;
    proj.levels = levels;
    proj.cutoff_level = K;
    return proj;
}

}  // namespace

Eigen::MatrixXd OccupancyProjector::motional_operator() const {
    const Eigen::Index n = basis.rows();
    Eigen::MatrixXd N = double(cutoff_level) * Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
        N -= (cutoff_level - levels(c)) * basis.col(c) * basis.col(c).transpose();
    return N;
}

QuantumModel build_model(const SystemParams<double>& p, const HilbertSpace& h, FieldTreatment t,
                         const ModelOptions& opt) {
    validate(p);
    if (h.n_mom < 4) throw std::invalid_argument("build_model: n_mom must be >= 4");
    if (h.n_fock_sine < 2) throw std::invalid_argument("build_model: n_fock_sine must be >= 2");
    if (t == FieldTreatment::FullTwoMode && h.n_fock_cos < 2)
        throw std::invalid_argument("build_model: n_fock_cos must be >= 2 for the two-mode treatment");

    QuantumModel m;
    m.params = p;
    m.space = h;
    m.treatment = t;
    m.alpha = cavity_amplitude(p);
    m.momenta = h.momenta();
    m.motional_dim = int(m.momenta.size());
    m.field_dim = h.field_dim(t);

    if (t == FieldTreatment::FullTwoMode) {
        const double tail = poisson_tail(m.alpha * m.alpha, h.n_fock_cos);
        if (tail > opt.truncation_threshold)
            throw TruncationError("build_model: cosine-mode cutoff " + std::to_string(h.n_fock_cos) +
                                  " truncates the coherent state (tail " + std::to_string(tail) + ")");
    }

    // motional building blocks
    Eigen::VectorXd nsq(m.motional_dim);
    for (int i = 0; i < m.motional_dim; ++i) nsq(i) = double(m.momenta[i]) * m.momenta[i];
    const SparseMatrix Tp = momentum_raise2(m.momenta);
    const SparseMatrix Tm = SparseMatrix(Tp.adjoint());
    const SparseMatrix C = 0.5 * (Tp + Tm);
    const SparseMatrix S = cplx(0, -0.5) * (Tp - Tm);
    const SparseMatrix Im = identity(m.motional_dim);
    const SparseMatrix Nsq = diagonal(nsq);

    const double u0 = p.u0, delta = p.delta;
    const SparseMatrix Uc = 0.5 * u0 * (Im + C);   // u0 cos^2 kx
    const SparseMatrix Us = 0.5 * u0 * (Im - C);   // u0 sin^2 kx
    const SparseMatrix Ucs = 0.5 * u0 * S;         // u0 sin kx cos kx

    const SparseMatrix as = annihilation(h.n_fock_sine);
    const SparseMatrix Is = identity(h.n_fock_sine + 1);
    const SparseMatrix ns = SparseMatrix(as.adjoint()) * as;

    SparseMatrix H;
    if (t == FieldTreatment::CoherentCosine) {
        const double a = m.alpha;
        m.energy_offset = -delta * a * a - 0.5 * u0 * a * a;
        const SparseMatrix If = Is;
        H = p.omega_rec * kron(Nsq, If) - delta * kron(Im, ns) -
            (a * a * kron(Uc, If) + kron(Us, ns) + a * kron(Ucs, SparseMatrix(as + SparseMatrix(as.adjoint()))));
        H -= delta * a * a * identity(m.dim());

        m.jumps.push_back({"sine", kron(Im, as), 2 * p.kappa});
        m.cos2kx = kron(C, If);
        m.sin2kx = kron(S, If);
        m.momentum_sq = kron(Nsq, If).diagonal().real();
        m.n_sine = kron(Im, ns).diagonal().real();
        m.n_cos = Eigen::VectorXd::Zero(m.dim());
    } else {
        const SparseMatrix ac = annihilation(h.n_fock_cos);
        const SparseMatrix Ic = identity(h.n_fock_cos + 1);
        const SparseMatrix nc = SparseMatrix(ac.adjoint()) * ac;
        const SparseMatrix If = kron(Ic, Is);
        const SparseMatrix Nc = kron(nc, Is), Ns = kron(Ic, ns);
        const SparseMatrix Ac = kron(ac, Is), As = kron(Ic, as);
        const SparseMatrix AcdAs = SparseMatrix(Ac.adjoint()) * As;
        const SparseMatrix mix = AcdAs + SparseMatrix(AcdAs.adjoint());  // a_c^dag a_s + a_c a_s^dag
        m.energy_offset = 0;
        H = p.omega_rec * kron(Nsq, If) - delta * kron(Im, SparseMatrix(Nc + Ns)) -
            (kron(Uc, Nc) + kron(Us, Ns) + kron(Ucs, mix)) +
            cplx(0, p.eta) * kron(Im, SparseMatrix(SparseMatrix(Ac.adjoint()) - Ac));

        m.jumps.push_back({"sine", kron(Im, As), 2 * p.kappa});
        m.jumps.push_back({"cosine", kron(Im, Ac), 2 * p.kappa});
        m.cos2kx = kron(C, If);
        m.sin2kx = kron(S, If);
        m.momentum_sq = kron(Nsq, If).diagonal().real();
        m.n_sine = kron(Im, Ns).diagonal().real();
        m.n_cos = kron(Im, Nc).diagonal().real();
    }
    H.prune(cplx(0));
    H.makeCompressed();
    m.hamiltonian = H;

    SparseMatrix Heff = H - m.energy_offset * identity(m.dim());
    for (const auto& j : m.jumps)
        Heff -= cplx(0, 0.5 * j.rate) * SparseMatrix(SparseMatrix(j.op.adjoint()) * j.op);
    Heff.prune(cplx(0));
    Heff.makeCompressed();
    m.h_eff = Heff;

    if (p.u0 > 0 && p.eta > 0)
        m.occupancy = make_occupancy_projector(p, m.momenta, h.sector, h.n_mom, opt.max_occupancy_levels);
    return m;
}

}  // namespace ringcav::quantum
