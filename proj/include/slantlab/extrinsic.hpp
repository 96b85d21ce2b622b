#pragma once

// Second fundamental form, shape operators, mean curvature, umbilicity,
// the covariant derivative of h, and the Codazzi residual.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "slantlab/immersion.hpp"
#include "slantlab/slant.hpp"

namespace slantlab {

struct SecondFundamentalData {
    AdaptedFrame frame;
    std::vector<Mat> h;   // h[a](i,j) = g(h(E_i,E_j), Xi_a), d x d symmetric per a
    std::vector<Mat> A;   // A[a] = shape operator matrix on the tangent frame (= h[a])
    Vec H;                // mean curvature in the normal frame, H^a = tr(h[a]) / d

    int d() const { return frame.d(); }
    int codim() const { return frame.m() - frame.d(); }

    // h(U,V) as an ambient vector for tangent vectors given in frame coordinates.
    Vec h_of(const Vec& u_frame, const Vec& v_frame) const {
        Vec out = Vec::Zero(frame.m());
        for (int a = 0; a < codim(); ++a)
            out += (u_frame.dot(h[a] * v_frame)) * frame.Xi.col(a);
        return out;
    }
    Vec h_normal_coeffs(const Vec& u_frame, const Vec& v_frame) const {
        Vec c(codim());
        for (int a = 0; a < codim(); ++a) c(a) = u_frame.dot(h[a] * v_frame);
        return c;
    }
    // A_xi U in frame coordinates, xi given in normal-frame coordinates.
    Vec shape_apply(const Vec& xi_coeffs, const Vec& u_frame) const {
        Vec out = Vec::Zero(d());
        for (int a = 0; a < codim(); ++a) out += xi_coeffs(a) * (A[a] * u_frame);
        return out;
    }
    Vec mean_curvature_ambient() const { return frame.Xi * H; }
    double mean_curvature_norm() const { return H.norm(); }
};

// h on coordinate fields from the Hessian stack plus the ambient Christoffel
// correction, re-expressed on the orthonormal frames.
inline SecondFundamentalData second_fundamental_form(const ImmersionChart& chart, const Vec& p) {
    ImmersionJet J = chart.jet(p);
    SecondFundamentalData out;
    out.frame = chart.adapted_frame(p);
    const int m = chart.ambient_dim(), d = chart.param_dim();
    const int codim = m - d;
    auto G = chart.ambient().christoffel_at(J.value);

    // ambient h(d_i, d_j) vectors on coordinate fields
    std::vector<std::vector<Vec>> hcoord(d, std::vector<Vec>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Vec v(m);
            for (int k = 0; k < m; ++k) {
                v(k) = J.hessian[k](i, j);
                v(k) += J.jacobian.col(i).dot(G[k] * J.jacobian.col(j));
            }
            hcoord[i][j] = out.frame.project_normal(v);
        }

    out.h.assign(codim, Mat::Zero(d, d));
    for (int a = 0; a < codim; ++a) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                // bilinear change to the orthonormal tangent frame
                double s = 0.0;
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        s += out.frame.paramE(r, i) * out.frame.paramE(c, j) *
                             out.frame.inner(hcoord[r][c], out.frame.Xi.col(a));
                out.h[a](i, j) = s;
            }
        out.h[a] = 0.5 * (out.h[a] + out.h[a].transpose());
    }
    out.A = out.h;  // duality (2.6) in orthonormal frames
    out.H = Vec(codim);
    for (int a = 0; a < codim; ++a) out.H(a) = out.h[a].trace() / d;
    return out;
}

// Independent Weingarten route for A: differentiate the normal frame field
// from adapted_frame along a coordinate direction (ambient-component
// differencing with Christoffel correction) and take minus the tangent part.
// Richardson extrapolation on the central difference removes the O(step^2)
// term. Used as a cross-check of the h-based shape operators.
inline Mat shape_operator_fd(const ImmersionChart& chart, const Vec& p, int normal_index,
                             double step = 1e-4) {
    AdaptedFrame fr = chart.adapted_frame(p);
    ImmersionJet J = chart.jet(p);
    const int d = chart.param_dim();
    auto G = chart.ambient().christoffel_at(J.value);

    auto xi_at = [&](const Vec& q) -> Vec {
        AdaptedFrame f2 = chart.adapted_frame(q);
        // project the base normal vector onto the normal space at q and
        // renormalize, so the field is smooth near p regardless of pivoting
        Vec v = f2.project_normal(fr.Xi.col(normal_index));
        double n = std::sqrt(f2.inner(v, v));
        return v / n;
    };
    auto dfield = [&](double h) {
        Mat out(chart.ambient_dim(), d);
        for (int i = 0; i < d; ++i) {
            Vec qp = p, qm = p;
            qp(i) += h;
            qm(i) -= h;
            out.col(i) = (xi_at(qp) - xi_at(qm)) / (2.0 * h);
        }
        return out;
    };
    Mat D1 = dfield(step), D2 = dfield(step / 2);
    Mat D = (4.0 * D2 - D1) / 3.0;  // O(step^4)
    Mat A(d, d);
    for (int i = 0; i < d; ++i) {
        Vec nabla = D.col(i);
        Vec JX = J.jacobian.col(i);
        for (int k = 0; k < chart.ambient_dim(); ++k)
            nabla(k) += JX.dot(G[k] * fr.Xi.col(normal_index));
        Vec tang = fr.tangent_coeffs(-nabla);  // A_xi X = -(nabla_X xi)^T
        // convert: column i is A applied to coordinate field d_i; express on E
        A.col(i) = tang;
    }
    // change of basis: columns currently indexed by coordinate fields; we want
    // the operator on the orthonormal frame: A_E = C^T ... with E = J * paramE,
    // coordinate field d_i = sum_k (paramE^{-1})... easier: A(E_j) = A(J * paramE_j)
    Mat Aframe(d, d);
    for (int j = 0; j < d; ++j) {
        Vec acc = Vec::Zero(d);
        for (int i = 0; i < d; ++i) acc += fr.paramE(i, j) * A.col(i);
        Aframe.col(j) = acc;
    }
    return 0.5 * (Aframe + Aframe.transpose());
}

struct UmbilicityReport {
    double max_residual = 0.0;   // max |h(E_i,E_j) - delta_ij H|
    double mean_h_norm = 0.0;    // max over samples of |H|
    bool totally_umbilical = false;
    bool totally_geodesic = false;
};

inline UmbilicityReport umbilicity_residual(const std::vector<SecondFundamentalData>& data,
                                            double tol = 1e-8) {
    UmbilicityReport rep;
    for (const auto& sfd : data) {
        const int d = sfd.d(), codim = sfd.codim();
        for (int a = 0; a < codim; ++a) {
            Mat resid = sfd.h[a] - sfd.H(a) * Mat::Identity(d, d);
            rep.max_residual = std::max(rep.max_residual, resid.cwiseAbs().maxCoeff());
        }
        rep.mean_h_norm = std::max(rep.mean_h_norm, sfd.mean_curvature_norm());
    }
    rep.totally_umbilical = rep.max_residual <= tol;
    rep.totally_geodesic = rep.totally_umbilical && rep.mean_h_norm <= tol;
    return rep;
}

// max |h(X,Z)| over X in D_perp, Z in D_theta (frame-coordinate bases).
inline double mixed_totally_geodesic(const SecondFundamentalData& sfd,
                                     const DistributionSplit& ds) {
    double worst = 0.0;
    for (int i = 0; i < ds.Dperp_coeffs.cols(); ++i)
        for (int j = 0; j < ds.Dtheta_coeffs.cols(); ++j)
            worst = std::max(
                worst, sfd.h_normal_coeffs(ds.Dperp_coeffs.col(i), ds.Dtheta_coeffs.col(j)).norm());
    return worst;
}

// --- covariant-derivative machinery -----------------------------------------

// A normal-bundle-valued field evaluated in ambient coordinates near a point.
using AmbientField = std::function<Vec(const Vec&)>;

// nabla^perp of a normal field along a parameter direction: central difference
// of the ambient components plus the ambient Christoffel correction, projected
// back onto the normal space at the base point.
inline Vec normal_connection_fd(const ImmersionChart& chart, const AdaptedFrame& fr,
                                const AmbientField& xi, const Vec& p, const Vec& dir_param,
                                double step) {
    Vec qp = p + step * dir_param, qm = p - step * dir_param;
    Vec d = (xi(qp) - xi(qm)) / (2.0 * step);
    ImmersionJet J = chart.jet(p);
    auto G = chart.ambient().christoffel_at(J.value);
    Vec JX = J.jacobian * dir_param;
    Vec xi0 = xi(p);
    for (int k = 0; k < chart.ambient_dim(); ++k) d(k) += JX.dot(G[k] * xi0);
    return fr.project_normal(d);
}

// Same differencing for the full ambient covariant derivative of any field
// along the immersion (no projection).
inline Vec ambient_connection_fd(const ImmersionChart& chart, const AmbientField& field,
                                 const Vec& p, const Vec& dir_param, double step) {
    Vec qp = p + step * dir_param, qm = p - step * dir_param;
    Vec d = (field(qp) - field(qm)) / (2.0 * step);
    ImmersionJet J = chart.jet(p);
    auto G = chart.ambient().christoffel_at(J.value);
    Vec JX = J.jacobian * dir_param;
    Vec f0 = field(p);
    for (int k = 0; k < chart.ambient_dim(); ++k) d(k) += JX.dot(G[k] * f0);
    return d;
}

// h(V,W) as an ambient-vector field over the parameter domain for parameter
// fields V, W.
inline AmbientField h_field(const ImmersionChart& chart, const FieldOnPatch& V,
                            const FieldOnPatch& W) {
    return [&chart, &V, &W](const Vec& q) -> Vec {
        SecondFundamentalData s = second_fundamental_form(chart, q);
        ImmersionJet J = chart.jet(q);
        Vec vamb = J.jacobian * V.eval(q);
        Vec wamb = J.jacobian * W.eval(q);
        return s.h_of(s.frame.tangent_coeffs(vamb), s.frame.tangent_coeffs(wamb));
    };
}

// (nabla-bar_U h)(V,W) per Eq. (2.10) at p, expressed as an ambient normal vector.
inline Vec nabla_h(const ImmersionChart& chart, const FieldOnPatch& U, const FieldOnPatch& V,
                   const FieldOnPatch& W, const Vec& p, double step) {
    AdaptedFrame fr = chart.adapted_frame(p);
    SecondFundamentalData sfd = second_fundamental_form(chart, p);
    ImmersionJet J = chart.jet(p);
    Vec u = U.eval(p);

    Vec term1 = normal_connection_fd(chart, fr, h_field(chart, V, W), p, u, step);

    GaussSplit dUV = induced_connection(chart, U, V, p);
    GaussSplit dUW = induced_connection(chart, U, W, p);
    Vec wamb = J.jacobian * W.eval(p);
    Vec vamb = J.jacobian * V.eval(p);
    Vec term2 = sfd.h_of(fr.tangent_coeffs(dUV.tangent_part), fr.tangent_coeffs(wamb));
    Vec term3 = sfd.h_of(fr.tangent_coeffs(vamb), fr.tangent_coeffs(dUW.tangent_part));
    return term1 - term2 - term3;
}

// Codazzi residual |(R(U,V)W)^perp - [(nabla_U h)(V,W) - (nabla_V h)(U,W)]|_g at p.
inline double codazzi_residual(const ImmersionChart& chart, const Vec& p, const FieldOnPatch& U,
                               const FieldOnPatch& V, const FieldOnPatch& W, double step) {
    AdaptedFrame fr = chart.adapted_frame(p);
    ImmersionJet J = chart.jet(p);
    Vec uamb = J.jacobian * U.eval(p);
    Vec vamb = J.jacobian * V.eval(p);
    Vec wamb = J.jacobian * W.eval(p);
    Vec R = chart.ambient().curvature_closed_form(J.value, uamb, vamb, wamb);
    Vec lhs = fr.project_normal(R);
    Vec rhs = nabla_h(chart, U, V, W, p, step) - nabla_h(chart, V, U, W, p, step);
    Vec diff = lhs - rhs;
    return std::sqrt(fr.inner(diff, diff));
}

}  // namespace slantlab
