#pragma once

// Canonical operators T, N, t, omega in the adapted frame, the T^2 spectrum,
// the distribution split D_perp / D_theta / mu, and classification.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slantlab/ambient.hpp"
#include "slantlab/immersion.hpp"

namespace slantlab {

struct SplitOperators {
    Mat T;      // d x d, T_ij = g(F E_j, E_i)
    Mat N;      // (m-d) x d
    Mat tmat;   // d x (m-d)
    Mat omega;  // (m-d) x (m-d)
};

inline SplitOperators split_operators(const AdaptedFrame& fr, const AmbientManifold& M) {
    const int d = fr.d(), codim = fr.m() - d;
    Mat F = M.structure_at(fr.ambient_point);
    SplitOperators ops;
    ops.T = Mat(d, d);
    ops.N = Mat(codim, d);
    ops.tmat = Mat(d, codim);
    ops.omega = Mat(codim, codim);
    for (int j = 0; j < d; ++j) {
        Vec FE = F * fr.E.col(j);
        for (int i = 0; i < d; ++i) ops.T(i, j) = fr.inner(FE, fr.E.col(i));
        for (int a = 0; a < codim; ++a) ops.N(a, j) = fr.inner(FE, fr.Xi.col(a));
    }
    for (int a = 0; a < codim; ++a) {
        Vec FXi = F * fr.Xi.col(a);
        for (int j = 0; j < d; ++j) ops.tmat(j, a) = fr.inner(FXi, fr.E.col(j));
        for (int b = 0; b < codim; ++b) ops.omega(b, a) = fr.inner(FXi, fr.Xi.col(b));
    }
    return ops;
}

// Residuals of the algebraic identities (3.3a-d) plus adjointness t = N^T.
struct OperatorIdentityResiduals {
    double id_a, id_b, id_c, id_d, adjoint;
    double max() const { return std::max({id_a, id_b, id_c, id_d, adjoint}); }
};

inline OperatorIdentityResiduals operator_identities(const SplitOperators& ops) {
    const int d = static_cast<int>(ops.T.rows());
    const int codim = static_cast<int>(ops.omega.rows());
    OperatorIdentityResiduals r;
    r.id_a = (ops.T * ops.T + ops.tmat * ops.N - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    r.id_b = (ops.omega * ops.omega + ops.N * ops.tmat - Mat::Identity(codim, codim))
                 .cwiseAbs()
                 .maxCoeff();
    r.id_c = (ops.N * ops.T + ops.omega * ops.N).cwiseAbs().maxCoeff();
    r.id_d = (ops.T * ops.tmat + ops.tmat * ops.omega).cwiseAbs().maxCoeff();
    r.adjoint = (ops.tmat - ops.N.transpose()).cwiseAbs().maxCoeff();
    return r;
}

struct SpectrumCluster {
    double lambda;  // mean eigenvalue of the cluster
    int multiplicity;
    double theta() const { return std::acos(std::sqrt(std::max(0.0, std::min(1.0, lambda)))); }
};

struct SlantSpectrum {
    std::vector<double> eigenvalues;        // ascending, snapped to [0,1]
    std::vector<SpectrumCluster> clusters;  // ascending by lambda
    Mat eigenvectors;                        // frame coordinates, columns match eigenvalues

    bool has_zero_cluster(double tol = 1e-8) const {
        return !clusters.empty() && clusters.front().lambda <= tol;
    }
};

inline SlantSpectrum slant_spectrum(const SplitOperators& ops, double cluster_tol = 1e-6) {
    const int d = static_cast<int>(ops.T.rows());
    Mat T2 = ops.T * ops.T;
    T2 = 0.5 * (T2 + T2.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(T2);
    SlantSpectrum sp;
    sp.eigenvalues.resize(d);
    sp.eigenvectors = es.eigenvectors();
    for (int i = 0; i < d; ++i) {
        double l = es.eigenvalues()(i);
        if (std::fabs(l) <= 1e-10) l = 0.0;             // snap exact anti-invariant
        if (std::fabs(l - 1.0) <= 1e-10) l = 1.0;       // snap exact invariant
        sp.eigenvalues[i] = l;
    }
    // gap clustering on the sorted eigenvalues
    int start = 0;
    for (int i = 1; i <= d; ++i) {
        if (i == d || sp.eigenvalues[i] - sp.eigenvalues[i - 1] > cluster_tol) {
            SpectrumCluster c;
            c.multiplicity = i - start;
            double sum = 0.0;
            for (int k = start; k < i; ++k) sum += sp.eigenvalues[k];
            c.lambda = sum / c.multiplicity;
            if (sp.eigenvalues[i - 1] - sp.eigenvalues[start] > cluster_tol)
                throw ClusterAmbiguity("eigenvalue cluster of T^2 wider than cluster_tol");
            sp.clusters.push_back(c);
            start = i;
        }
    }
    return sp;
}

enum class ClassLabel {
    Invariant,
    AntiInvariant,
    ProperSlant,
    SemiInvariant,
    HemiSlant,
    SemiSlant,
    Generic
};

inline std::string to_string(ClassLabel c) {
    switch (c) {
        case ClassLabel::Invariant: return "Invariant";
        case ClassLabel::AntiInvariant: return "AntiInvariant";
        case ClassLabel::ProperSlant: return "ProperSlant";
        case ClassLabel::SemiInvariant: return "SemiInvariant";
        case ClassLabel::HemiSlant: return "HemiSlant";
        case ClassLabel::SemiSlant: return "SemiSlant";
        case ClassLabel::Generic: return "Generic";
    }
    return "?";
}

struct Classification {
    ClassLabel label = ClassLabel::Generic;
    double theta = 0.0;           // slant angle of the positive cluster, if any
    double theta_max_dev = 0.0;   // max deviation across samples
    int p = 0;                    // dim D_perp
    int q = 0;                    // dim D_theta
    std::vector<SpectrumCluster> clusters;  // representative cluster structure
    std::string note;             // e.g. non-constant angle explanation

    bool hemi_slant_family() const {
        // classifications with a well-defined D_perp(+) / D_theta split per Def. 3.1
        return label == ClassLabel::HemiSlant || label == ClassLabel::SemiInvariant;
    }
    bool proper_hemi_slant() const {
        return label == ClassLabel::HemiSlant && p > 0 && theta > 1e-9 &&
               theta < M_PI / 2 - 1e-9;
    }
};

// Rule table over the cluster structure of one sample.
inline ClassLabel label_of_clusters(const std::vector<SpectrumCluster>& cl) {
    auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-9; };
    if (cl.size() == 1) {
        if (near(cl[0].lambda, 1.0)) return ClassLabel::Invariant;
        if (near(cl[0].lambda, 0.0)) return ClassLabel::AntiInvariant;
        return ClassLabel::ProperSlant;
    }
    if (cl.size() == 2) {
        bool zero = near(cl[0].lambda, 0.0);
        bool one = near(cl[1].lambda, 1.0);
        if (zero && one) return ClassLabel::SemiInvariant;
        if (zero) return ClassLabel::HemiSlant;
        if (one) return ClassLabel::SemiSlant;
    }
    return ClassLabel::Generic;
}

inline Classification classify(const std::vector<SlantSpectrum>& spectra,
                               double angle_tol = 1e-6) {
    if (spectra.empty()) throw NotWellDefined("no samples to classify");
    const auto& first = spectra.front().clusters;
    for (const auto& sp : spectra) {
        if (sp.clusters.size() != first.size())
            throw NotWellDefined("cluster structure varies across samples");
        for (std::size_t i = 0; i < first.size(); ++i)
            if (sp.clusters[i].multiplicity != first[i].multiplicity)
                throw NotWellDefined("distribution dimensions vary across samples");
    }
    Classification out;
    out.clusters = first;
    ClassLabel lbl = label_of_clusters(first);
    for (const auto& sp : spectra)
        if (label_of_clusters(sp.clusters) != lbl)
            throw NotWellDefined("classification label varies across samples");
    out.label = lbl;

    // theta statistics over the positive slant cluster (if present)
    int slant_idx = -1;
    for (std::size_t i = 0; i < first.size(); ++i)
        if (first[i].lambda > 1e-9 && first[i].lambda < 1.0 - 1e-9)
            slant_idx = static_cast<int>(i);
    if (lbl == ClassLabel::Invariant) out.theta = 0.0;
    if (lbl == ClassLabel::AntiInvariant) out.theta = M_PI / 2;
    if (slant_idx >= 0) {
        double mean = 0.0;
        for (const auto& sp : spectra) mean += sp.clusters[slant_idx].theta();
        mean /= spectra.size();
        double dev = 0.0;
        for (const auto& sp : spectra)
            dev = std::max(dev, std::fabs(sp.clusters[slant_idx].theta() - mean));
        out.theta = mean;
        out.theta_max_dev = dev;
        if (dev > angle_tol) {
            out.label = ClassLabel::Generic;
            out.note = "slant angle varies across samples by " + std::to_string(dev) +
                       " rad; pointwise-slant geometry is reported as Generic";
        }
    }
    // dims
    for (const auto& c : first) {
        if (c.lambda <= 1e-9)
            out.p = c.multiplicity;
        else
            out.q += c.multiplicity;
    }
    if (lbl == ClassLabel::SemiInvariant) out.theta = 0.0;
    return out;
}

// Orthonormal bases (ambient coordinates) of D_perp, D_theta and mu at a point.
struct DistributionSplit {
    Mat Dperp;   // m x p
    Mat Dtheta;  // m x q
    Mat mu;      // m x dim_mu (normal-frame-coordinate basis mapped to ambient)
    Mat mu_coeffs;      // (m-d) x dim_mu in the normal frame
    Mat Dperp_coeffs;   // frame coordinates (d x p) on E
    Mat Dtheta_coeffs;  // d x q
};

inline DistributionSplit distribution_split(const SplitOperators& ops, const SlantSpectrum& sp,
                                            const AdaptedFrame& fr, double tol = 1e-8) {
    const int d = fr.d(), codim = fr.m() - d;
    if (sp.clusters.empty()) throw ClusterAmbiguity("empty spectrum");
    DistributionSplit out;
    std::vector<int> perp_cols, theta_cols;
    for (int i = 0; i < d; ++i) {
        if (sp.eigenvalues[i] <= tol)
            perp_cols.push_back(i);
        else
            theta_cols.push_back(i);
    }
    const int p = static_cast<int>(perp_cols.size());
    const int q = static_cast<int>(theta_cols.size());
    out.Dperp_coeffs = Mat(d, p);
    out.Dtheta_coeffs = Mat(d, q);
    for (int i = 0; i < p; ++i) out.Dperp_coeffs.col(i) = sp.eigenvectors.col(perp_cols[i]);
    for (int i = 0; i < q; ++i) out.Dtheta_coeffs.col(i) = sp.eigenvectors.col(theta_cols[i]);
    out.Dperp = fr.E * out.Dperp_coeffs;
    out.Dtheta = fr.E * out.Dtheta_coeffs;

    // mu = orthogonal complement of F(Dperp) + N(Dtheta) inside the normal space,
    // computed in normal-frame coordinates where g is the identity.
    Mat span(codim, p + q);
    for (int i = 0; i < p; ++i) span.col(i) = ops.N * out.Dperp_coeffs.col(i);
    for (int i = 0; i < q; ++i) span.col(p + i) = ops.N * out.Dtheta_coeffs.col(i);
    Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeFullU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    out.mu_coeffs = svd.matrixU().rightCols(codim - rank);
    out.mu = fr.Xi * out.mu_coeffs;
    return out;
}

// Residuals of Lemma 3.2 and Eq. (3.7): F(Dperp) perp N(Dtheta), T|Dperp = 0,
// T(Dtheta) = Dtheta.
struct SplitResiduals {
    double lemma32;       // max |g(F X, N Z)|
    double t_kills_perp;  // max |T x|
    double t_preserves;   // max component of T z outside Dtheta
};

inline SplitResiduals split_residuals(const SplitOperators& ops, const DistributionSplit& ds) {
    SplitResiduals r{0, 0, 0};
    const int p = static_cast<int>(ds.Dperp_coeffs.cols());
    const int q = static_cast<int>(ds.Dtheta_coeffs.cols());
    for (int i = 0; i < p; ++i) {
        Vec nx = ops.N * ds.Dperp_coeffs.col(i);
        for (int j = 0; j < q; ++j)
            r.lemma32 = std::max(r.lemma32,
                                 std::fabs(nx.dot(ops.N * ds.Dtheta_coeffs.col(j))));
        r.t_kills_perp =
            std::max(r.t_kills_perp, (ops.T * ds.Dperp_coeffs.col(i)).cwiseAbs().maxCoeff());
    }
    for (int j = 0; j < q; ++j) {
        Vec tz = ops.T * ds.Dtheta_coeffs.col(j);
        // subtract the Dtheta-component
        for (int k = 0; k < q; ++k) tz -= tz.dot(ds.Dtheta_coeffs.col(k)) * ds.Dtheta_coeffs.col(k);
        r.t_preserves = std::max(r.t_preserves, tz.cwiseAbs().maxCoeff());
    }
    return r;
}

// Residuals of Eqs. (3.4)-(3.6) over D_theta basis pairs for a given theta.
struct SlantIdentityResiduals {
    double eq34, eq35, eq36;
    double max() const { return std::max({eq34, eq35, eq36}); }
};

inline SlantIdentityResiduals check_slant_identities(const SplitOperators& ops,
                                                     const DistributionSplit& ds, double theta) {
    SlantIdentityResiduals r{0, 0, 0};
    const int q = static_cast<int>(ds.Dtheta_coeffs.cols());
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    for (int j = 0; j < q; ++j) {
        Vec z = ds.Dtheta_coeffs.col(j);
        r.eq34 = std::max(r.eq34, (ops.T * (ops.T * z) - c2 * z).cwiseAbs().maxCoeff());
        for (int k = 0; k < q; ++k) {
            Vec w = ds.Dtheta_coeffs.col(k);
            double gzw = z.dot(w);
            r.eq35 = std::max(r.eq35,
                              std::fabs((ops.T * z).dot(ops.T * w) - c2 * gzw));
            r.eq36 = std::max(r.eq36,
                              std::fabs((ops.N * z).dot(ops.N * w) - s2 * gzw));
        }
    }
    return r;
}

}  // namespace slantlab
