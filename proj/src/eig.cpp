#include "hvar/eig.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Deterministic sign convention: the entry of largest magnitude is positive;
/// the first such entry wins ties.
void fix_sign(VecX& v) {
    int best = 0;
    double mag = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > mag) {
            mag = m;
            best = i;
        }
    }
    if (v[best] < 0.0) v = -v;
}

double residual_of(const SpMat& K, const SpMat& M, double lambda, const VecX& v) {
    VecX kv = K * v;
    // ||Mv|| keeps the scale healthy for a zero eigenvalue (Kv ~ 0 there)
    double denom = std::max(kv.norm(), (M * v).norm());
    if (denom == 0.0) denom = 1.0;
    return (kv - lambda * (M * v)).norm() / denom;
}

/// All eigenpairs of the dense pencil via Cholesky reduction to standard form.
std::vector<EigenPair> solve_dense(const SpMat& K, const SpMat& M, int k) {
    MatX Kd = MatX(K);
    MatX Md = MatX(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(Kd, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw NoConvergence("dense generalized eigensolver failed (mass matrix not SPD?)");

    std::vector<EigenPair> pairs;
    for (int i = 0; i < k; ++i) {
        EigenPair p;
        p.lambda = es.eigenvalues()[i];
        p.vector = es.eigenvectors().col(i);
        // GeneralizedSelfAdjointEigenSolver already B-normalizes; re-normalize
        // to tighten v^T M v = 1 to rounding.
        double nrm = std::sqrt(p.vector.dot(M * p.vector));
        p.vector /= nrm;
        p.index = i + 1;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

/// Shift-invert subspace iteration with Rayleigh-Ritz extraction. K must be
/// SPD (guaranteed by coercivity or the K + M shift), so the shift is 0 and
/// one sparse Cholesky factorization drives every iteration.
std::vector<EigenPair> solve_iterative(const SpMat& K, const SpMat& M, const SolveOptions& opts) {
    const int n = static_cast<int>(K.rows());
    const int k = opts.modes;
    const int p = std::min(n, std::max(2 * k, k + 8));

    Eigen::SimplicialLLT<SpMat> llt(K);
    if (llt.info() != Eigen::Success)
        throw NoConvergence("sparse Cholesky factorization of the stiffness failed");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatX V(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) V(i, j) = gauss(rng);

    std::vector<EigenPair> pairs;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // One block step of inverse iteration, then orthonormalize for
        // conditioning before the Ritz projection.
        MatX W = llt.solve(M * V);
        Eigen::HouseholderQR<MatX> qr(W);
        W = qr.householderQ() * MatX::Identity(n, p);

        MatX Kp = W.transpose() * (K * W);
        MatX Mp = W.transpose() * (M * W);
        Eigen::GeneralizedSelfAdjointEigenSolver<MatX> small(Kp, Mp);
        if (small.info() != Eigen::Success)
            throw NoConvergence("Rayleigh-Ritz projection failed");
        V = W * small.eigenvectors();

        bool converged = true;
        for (int i = 0; i < k; ++i) {
            VecX v = V.col(i);
            if (residual_of(K, M, small.eigenvalues()[i], v) > opts.residual_tol) {
                converged = false;
                break;
            }
        }
        if (converged) {
            for (int i = 0; i < k; ++i) {
                EigenPair pr;
                pr.lambda = small.eigenvalues()[i];
                pr.vector = V.col(i);
                double nrm = std::sqrt(pr.vector.dot(M * pr.vector));
                pr.vector /= nrm;
                pr.index = i + 1;
                pairs.push_back(std::move(pr));
            }
            return pairs;
        }
    }
    throw NoConvergence("subspace iteration did not reach tol " +
                        std::to_string(opts.residual_tol) + " in " +
                        std::to_string(opts.max_iterations) + " iterations");
}

} // namespace

double Spectrum::gap() const {
    if (pairs.size() < 2)
        throw ConfigError("spectral gap undefined: fewer than two modes computed");
    return pairs[1].lambda - pairs[0].lambda;
}

Spectrum solve_lowest(const AssembledForms& forms, const SolveOptions& opts) {
    if (opts.modes < 1) throw ConfigError("mode count must be >= 1");
    if (forms.n_free() < opts.modes)
        throw ConfigError("requested more modes than free dofs");

    std::vector<EigenPair> pairs = forms.n_free() <= opts.dense_threshold
                                       ? solve_dense(forms.K, forms.M, opts.modes)
                                       : solve_iterative(forms.K, forms.M, opts);

    Spectrum s;
    s.shift_applied = forms.shift_applied;
    for (auto& p : pairs) {
        fix_sign(p.vector);
        p.residual = residual_of(forms.K, forms.M, p.lambda, p.vector);
        if (p.residual > std::max(opts.residual_tol, 1e-8))
            throw NoConvergence("eigenpair " + std::to_string(p.index) +
                                " residual " + std::to_string(p.residual) +
                                " above tolerance");
        if (forms.shift_applied) p.lambda -= 1.0;
        s.pairs.push_back(std::move(p));
    }
    return s;
}

GapReport simplicity_gap(const Spectrum& s, double rel_threshold) {
    GapReport r;
    r.gap = s.gap(); // rejects single-mode spectra
    r.lambda1 = s.pairs[0].lambda;
    r.lambda2 = s.pairs[1].lambda;
    r.threshold = rel_threshold * std::abs(r.lambda1);
    r.pass = r.gap > r.threshold;
    return r;
}

Eigen::VectorXd corrector_solve(const AssembledForms& forms, const VariationScalars& scalars,
                                double lambda, double lambda_dot, const Eigen::VectorXd& phi) {
    const int n = forms.n_free();
    VecX mphi = forms.M * phi;
    VecX rhs_top = -(scalars.Adot_mat * phi - lambda * (scalars.Bdot_mat * phi) -
                     lambda_dot * mphi);

    // Bordered system [C  m; m^T 0] [w; mu] = [rhs; 0] with C = K - lambda M.
    // Under the K + M shift the stored stiffness is K + M and the pencil
    // eigenvalue is lambda + 1, which leaves C itself unchanged.
    double lambda_pencil = forms.shift_applied ? lambda + 1.0 : lambda;
    SpMat C = forms.K - lambda_pencil * forms.M;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(C.nonZeros() + 2 * n);
    for (int kcol = 0; kcol < C.outerSize(); ++kcol)
        for (SpMat::InnerIterator it(C, kcol); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, n, mphi[i]);
        trips.emplace_back(n, i, mphi[i]);
    }
    SpMat bordered(n + 1, n + 1);
    bordered.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<SpMat> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("bordered corrector matrix is numerically singular");

    VecX rhs(n + 1);
    rhs.head(n) = rhs_top;
    rhs[n] = 0.0;
    VecX sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("bordered corrector solve failed");

    VecX w = sol.head(n);
    double mu = sol[n];

    double scale = rhs_top.norm() + phi.norm();
    double res = (C * w + mu * mphi - rhs_top).norm();
    if (res > 1e-7 * scale)
        throw SingularSystem("corrector residual " + std::to_string(res) +
                             " too large (spectral gap too small?)");
    double orth = std::abs(w.dot(mphi));
    if (orth > 1e-9 * std::max(1.0, w.norm()))
        throw SingularSystem("corrector lost M-orthogonality to the eigenfunction");
    return w;
}

} // namespace hvar
