#include "cavfgr/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

#include "cavfgr/error.hpp"
#include "cavfgr/summation.hpp"

namespace cavfgr {

void GOASpec::validate() const {
    if (!(Omega > 0.0) || !std::isfinite(Omega)) throw ConfigError("GOA: Omega must be positive");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConfigError("GOA: omega_c must be positive");
    if (n_secondary < 1) throw ConfigError("GOA: n_secondary must be >= 1");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("GOA: eta must be non-negative");
    if (!std::isfinite(y0) || !std::isfinite(s) || !std::isfinite(omega_DA) || !std::isfinite(gamma) ||
        !std::isfinite(e_ground)) {
        throw ConfigError("GOA: parameters must be finite");
    }
    if (!(hbar > 0.0)) throw ConfigError("GOA: hbar must be positive");
}

GOASpec GOASpec::reference(double eta, double s, double omega_DA) {
    GOASpec spec;
    spec.eta = eta;
    spec.s = s;
    spec.omega_DA = omega_DA;
    return spec;
}

double DiscreteBath::sum_rule() const {
    NeumaierSum sum;
    for (std::size_t a = 0; a < freqs.size(); ++a) sum += couplings[a] * couplings[a] / (2.0 * freqs[a] * freqs[a]);
    return sum.value();
}

double DiscreteBath::curvature_shift() const { return 2.0 * sum_rule(); }

DiscreteBath discretize_ohmic(double eta, double omega_c, int n_secondary) {
    if (n_secondary < 1) throw ConfigError("discretize_ohmic: n_secondary must be >= 1");
    if (!(omega_c > 0.0)) throw ConfigError("discretize_ohmic: omega_c must be positive");
    if (!(eta >= 0.0)) throw ConfigError("discretize_ohmic: eta must be non-negative");

    const auto n = static_cast<double>(n_secondary);
    const double weight = 2.0 * eta * omega_c / (std::numbers::pi * n);
    DiscreteBath bath;
    bath.freqs.resize(n_secondary);
    bath.couplings.resize(n_secondary);
    for (int a = 1; a <= n_secondary; ++a) {
        const double w = -omega_c * std::log1p(-(a - 0.5) / n);
        bath.freqs[a - 1] = w;
        bath.couplings[a - 1] = std::sqrt(weight) * w;
    }
    return bath;
}

NormalModeAnalysis analyze_goa(const GOASpec& spec) {
    spec.validate();
    DiscreteBath bath = discretize_ohmic(spec.eta, spec.omega_c, spec.n_secondary);
    const std::size_t nb = bath.freqs.size();
    const std::size_t dim = nb + 1;

    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    hessian(0, 0) = spec.Omega * spec.Omega + bath.curvature_shift();
    for (std::size_t a = 0; a < nb; ++a) {
        const auto i = static_cast<Eigen::Index>(a + 1);
        hessian(0, i) = bath.couplings[a];
        hessian(i, 0) = bath.couplings[a];
        hessian(i, i) = bath.freqs[a] * bath.freqs[a];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
    if (solver.info() != Eigen::Success) throw NumericalError("GOA: Hessian eigendecomposition failed");
    const Eigen::VectorXd& eig = solver.eigenvalues();
    Eigen::MatrixXd q = solver.eigenvectors();

    const double largest = eig.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < eig.size(); ++j) {
        if (!(eig(j) > 1e-12 * largest)) {
            std::ostringstream msg;
            msg << "GOA: non-positive Hessian eigenvalue " << eig(j) << " (mode " << j << ")";
            throw NumericalError(msg.str());
        }
    }

    // Deterministic sign: the largest-magnitude component of each eigenvector is positive.
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        Eigen::Index imax = 0;
        q.col(j).cwiseAbs().maxCoeff(&imax);
        if (q(imax, j) < 0.0) q.col(j) *= -1.0;
    }

    // Minima in (y, x) coordinates.
    Eigen::VectorXd donor(static_cast<Eigen::Index>(dim)), acceptor(donor.size()), ground(donor.size());
    donor(0) = -spec.y0;
    acceptor(0) = spec.y0;
    ground(0) = -spec.y0 - spec.s;
    for (std::size_t a = 0; a < nb; ++a) {
        const auto i = static_cast<Eigen::Index>(a + 1);
        const double k = bath.couplings[a] / (bath.freqs[a] * bath.freqs[a]);
        donor(i) = k * spec.y0;
        acceptor(i) = -k * spec.y0;
        ground(i) = k * (spec.y0 + spec.s);
    }
    const Eigen::VectorXd da = q.transpose() * (acceptor - donor);
    const Eigen::VectorXd dg = q.transpose() * (ground - donor);

    std::vector<double> freqs(dim), r_eq(dim), s_shift(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        freqs[j] = std::sqrt(eig(jj));
        r_eq[j] = da(jj);
        s_shift[j] = -dg(jj);  // ground minimum at R = -S in donor-frame coordinates
    }

    const Eigen::MatrixXd gram = q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols());

    NormalModeAnalysis out{
        std::move(bath),
        DisplacedHarmonicModel(std::move(freqs), std::move(r_eq), std::move(s_shift), spec.omega_DA, spec.gamma,
                               spec.e_ground, spec.hbar, spec.hbar == 1.0 ? "reduced" : "custom"),
        std::vector<double>(q.data(), q.data() + q.size()),
        dim,
        gram.cwiseAbs().maxCoeff(),
    };
    return out;
}

DisplacedHarmonicModel goa_to_normal_modes(const GOASpec& spec) { return analyze_goa(spec).model; }

std::string dump_bath(const DiscreteBath& bath) {
    nlohmann::json doc;
    doc["freqs"] = bath.freqs;
    doc["couplings"] = bath.couplings;
    return doc.dump(2) + "\n";
}

}  // namespace cavfgr
