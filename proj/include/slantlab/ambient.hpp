#pragma once

// Locally product Riemannian ambient models: flat space and products of space
// forms in the conformal constant-curvature chart, with the almost product
// structure F, Levi-Civita coefficients, and the curvature tensor.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "slantlab/errors.hpp"

namespace slantlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Axis-aligned box of admissible chart coordinates.
struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x, double margin = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (x(i) < lo(i) + margin || x(i) > hi(i) - margin) return false;
        return true;
    }
    Vec center() const { return 0.5 * (lo + hi); }
    double diameter() const { return (hi - lo).norm(); }
};

enum class StructureKind { Swap, Sign, Custom };

struct ProductStructure {
    StructureKind kind;
    Mat F;  // chart-constant matrix of the (1,1) tensor

    static ProductStructure swap(int n) {
        ProductStructure s;
        s.kind = StructureKind::Swap;
        s.F = Mat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            s.F(i, n + i) = 1.0;
            s.F(n + i, i) = 1.0;
        }
        return s;
    }
    static ProductStructure sign(int m1, int m2) {
        ProductStructure s;
        s.kind = StructureKind::Sign;
        s.F = Mat::Identity(m1 + m2, m1 + m2);
        s.F.bottomRightCorner(m2, m2) *= -1.0;
        return s;
    }
    static ProductStructure custom(const Mat& F) {
        ProductStructure s;
        s.kind = StructureKind::Custom;
        s.F = F;
        return s;
    }
};

enum class MetricKind { FlatEuclidean, SpaceFormProduct };

struct MetricModel {
    MetricKind kind;
    int m1 = 0, m2 = 0;     // factor dims (SpaceFormProduct)
    double c1 = 0, c2 = 0;  // factor curvatures

    static MetricModel flat(int m) {
        MetricModel g;
        g.kind = MetricKind::FlatEuclidean;
        g.m1 = m;
        return g;
    }
    static MetricModel space_form_product(int m1, double c1, int m2, double c2) {
        MetricModel g;
        g.kind = MetricKind::SpaceFormProduct;
        g.m1 = m1;
        g.c1 = c1;
        g.m2 = m2;
        g.c2 = c2;
        return g;
    }
    int dim() const { return kind == MetricKind::FlatEuclidean ? m1 : m1 + m2; }
};

class AmbientManifold {
  public:
    AmbientManifold(MetricModel metric, ProductStructure structure, Box chart_domain,
                    double tol = 1e-9)
        : metric_(metric), structure_(std::move(structure)), domain_(std::move(chart_domain)) {
        validate(tol);
    }

    int dim() const { return metric_.dim(); }
    const MetricModel& metric() const { return metric_; }
    const ProductStructure& structure() const { return structure_; }
    const Box& chart_domain() const { return domain_; }
    bool flat() const {
        return metric_.kind == MetricKind::FlatEuclidean ||
               (metric_.c1 == 0.0 && metric_.c2 == 0.0);
    }

    void require_inside(const Vec& x, double margin = 0.0) const {
        if (!domain_.contains(x, margin))
            throw PointOutsideChart("point outside chart domain");
        if (metric_.kind == MetricKind::SpaceFormProduct) {
            if (factor_lambda(x, 0) <= 0.0 || factor_lambda(x, 1) <= 0.0)
                throw PointOutsideChart("conformal factor not positive at point");
        }
    }

    // conformal denominator lambda = 1 + (c/4)|x_f|^2 of factor f in {0,1}
    double factor_lambda(const Vec& x, int f) const {
        const double c = (f == 0) ? metric_.c1 : metric_.c2;
        const int off = (f == 0) ? 0 : metric_.m1;
        const int len = (f == 0) ? metric_.m1 : metric_.m2;
        return 1.0 + 0.25 * c * x.segment(off, len).squaredNorm();
    }

    Mat metric_at(const Vec& x) const {
        require_inside(x);
        Mat g = Mat::Identity(dim(), dim());
        if (metric_.kind == MetricKind::FlatEuclidean) return g;
        const double p1 = 1.0 / factor_lambda(x, 0);
        const double p2 = 1.0 / factor_lambda(x, 1);
        g.topLeftCorner(metric_.m1, metric_.m1) *= p1 * p1;
        g.bottomRightCorner(metric_.m2, metric_.m2) *= p2 * p2;
        return g;
    }

    Mat metric_inv_at(const Vec& x) const {
        Mat g = metric_at(x);
        for (int i = 0; i < dim(); ++i) g(i, i) = 1.0 / g(i, i);
        return g;  // metric is diagonal in both models
    }

    Mat structure_at(const Vec& x) const {
        require_inside(x);
        return structure_.F;
    }

    double inner(const Vec& x, const Vec& u, const Vec& v) const {
        return u.dot(metric_at(x) * v);
    }

    // a_i = d_i log(phi) for the factor containing index i; zero in flat model
    Vec log_conformal_grad(const Vec& x) const {
        Vec a = Vec::Zero(dim());
        if (metric_.kind == MetricKind::FlatEuclidean) return a;
        const double l1 = factor_lambda(x, 0), l2 = factor_lambda(x, 1);
        for (int i = 0; i < metric_.m1; ++i) a(i) = -0.5 * metric_.c1 * x(i) / l1;
        for (int i = 0; i < metric_.m2; ++i)
            a(metric_.m1 + i) = -0.5 * metric_.c2 * x(metric_.m1 + i) / l2;
        return a;
    }

    // Christoffel symbols Gamma[k](i,j), closed form from the conformal chart.
    // Nonzero entries only when i, j, k lie in the same factor.
    std::vector<Mat> christoffel_at(const Vec& x) const {
        require_inside(x);
        const int m = dim();
        std::vector<Mat> G(m, Mat::Zero(m, m));
        if (metric_.kind == MetricKind::FlatEuclidean) return G;
        Vec a = log_conformal_grad(x);
        auto fill = [&](int off, int len) {
            for (int k = 0; k < len; ++k)
                for (int i = 0; i < len; ++i)
                    for (int j = 0; j < len; ++j) {
                        double v = 0.0;
                        if (i == k) v += a(off + j);
                        if (j == k) v += a(off + i);
                        if (i == j) v -= a(off + k);
                        G[off + k](off + i, off + j) = v;
                    }
        };
        fill(0, metric_.m1);
        fill(metric_.m1, metric_.m2);
        return G;
    }

    // Finite-difference cross-check path for Christoffels, from metric_at only.
    std::vector<Mat> christoffel_fd(const Vec& x, double h = 1e-6) const {
        const int m = dim();
        Mat ginv = metric_inv_at(x);
        std::vector<Mat> dg(m, Mat::Zero(m, m));  // dg[k] = d_k g
        for (int k = 0; k < m; ++k) {
            Vec xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            dg[k] = (metric_at(xp) - metric_at(xm)) / (2.0 * h);
        }
        std::vector<Mat> G(m, Mat::Zero(m, m));
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < m; ++l)
                        s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
                    G[k](i, j) = 0.5 * s;
                }
        return G;
    }

    // R(U,V)W from Gamma and its first differences (standard coordinate formula,
    // convention R(U,V) = [nabla_U, nabla_V] - nabla_[U,V]).
    Vec curvature_numeric(const Vec& x, const Vec& U, const Vec& V, const Vec& W,
                          double h = 1e-5) const {
        require_inside(x);
        const int m = dim();
        if (flat()) return Vec::Zero(m);
        std::vector<std::vector<Mat>> dG(m);  // dG[i][l] = d_i Gamma^l
        for (int i = 0; i < m; ++i) {
            Vec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            auto Gp = christoffel_at(xp);
            auto Gm = christoffel_at(xm);
            dG[i].resize(m);
            for (int l = 0; l < m; ++l) dG[i][l] = (Gp[l] - Gm[l]) / (2.0 * h);
        }
        auto G = christoffel_at(x);
        Vec out = Vec::Zero(m);
        for (int l = 0; l < m; ++l) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                if (U(i) == 0.0) continue;
                for (int j = 0; j < m; ++j) {
                    if (V(j) == 0.0) continue;
                    for (int k = 0; k < m; ++k) {
                        if (W(k) == 0.0) continue;
                        double r = dG[i][l](j, k) - dG[j][l](i, k);
                        for (int mm = 0; mm < m; ++mm)
                            r += G[l](i, mm) * G[mm](j, k) - G[l](j, mm) * G[mm](i, k);
                        acc += U(i) * V(j) * W(k) * r;
                    }
                }
            }
            out(l) = acc;
        }
        return out;
    }

    // Closed form for the product of space forms:
    //   R(U,V)W = (c1+c2)/4 {g(V,W)U - g(U,W)V + g(FV,W)FU - g(FU,W)FV}
    //           + (c1-c2)/4 {g(FV,W)U - g(FU,W)V + g(V,W)FU - g(U,W)FV}
    Vec curvature_closed_form(const Vec& x, const Vec& U, const Vec& V, const Vec& W) const {
        require_inside(x);
        if (metric_.kind == MetricKind::FlatEuclidean) return Vec::Zero(dim());
        const double a = 0.25 * (metric_.c1 + metric_.c2);
        const double b = 0.25 * (metric_.c1 - metric_.c2);
        Mat g = metric_at(x);
        const Mat& F = structure_.F;
        Vec FU = F * U, FV = F * V;
        auto ip = [&](const Vec& p, const Vec& q) { return p.dot(g * q); };
        Vec out = a * (ip(V, W) * U - ip(U, W) * V + ip(FV, W) * FU - ip(FU, W) * FV);
        out += b * (ip(FV, W) * U - ip(FU, W) * V + ip(V, W) * FU - ip(U, W) * FV);
        return out;
    }

    // Sectional curvature of the plane spanned by orthonormal (w.r.t. g) u, v.
    double sectional_closed_form(const Vec& x, const Vec& u, const Vec& v) const {
        Vec r = curvature_closed_form(x, u, v, v);
        return r.dot(metric_at(x) * u);
    }

    // max over samples of the component-wise norm of (nabla F): for constant F
    // this is the commutator residual Gamma_i F - F Gamma_i contracted suitably.
    double check_structure_parallel(const std::vector<Vec>& samples) const {
        double worst = 0.0;
        const int m = dim();
        const Mat& F = structure_.F;
        for (const Vec& x : samples) {
            auto G = christoffel_at(x);
            // (nabla_i F)^k_j = Gamma^k_{i m} F^m_j - F^k_m Gamma^m_{i j}
            for (int i = 0; i < m; ++i) {
                Mat Gi(m, m);
                for (int k = 0; k < m; ++k)
                    for (int j = 0; j < m; ++j) Gi(k, j) = G[k](i, j);
                Mat resid = Gi * F - F * Gi;
                worst = std::max(worst, resid.cwiseAbs().maxCoeff());
            }
        }
        return worst;
    }

    // true iff g(F ehat_j, ehat_j) = 0 for the normalized coordinate basis at
    // every sample point.
    bool is_trace_free_structure(const std::vector<Vec>& samples, double tol = 1e-9) const {
        for (const Vec& x : samples) {
            Mat g = metric_at(x);
            for (int j = 0; j < dim(); ++j) {
                Vec ej = Vec::Zero(dim());
                ej(j) = 1.0 / std::sqrt(g(j, j));
                if (std::fabs((structure_.F * ej).dot(g * ej)) > tol) return false;
            }
        }
        return true;
    }

    // Interior sample points on a fixed sub-grid of the chart domain.
    std::vector<Vec> grid_samples(int per_axis = 3, double shrink = 0.2) const {
        std::vector<Vec> pts;
        const int m = dim();
        Vec lo = domain_.lo + shrink * (domain_.hi - domain_.lo);
        Vec hi = domain_.hi - shrink * (domain_.hi - domain_.lo);
        std::vector<int> idx(m, 0);
        for (;;) {
            Vec x(m);
            for (int i = 0; i < m; ++i)
                x(i) = (per_axis == 1) ? 0.5 * (lo(i) + hi(i))
                                       : lo(i) + (hi(i) - lo(i)) * idx[i] / double(per_axis - 1);
            if (domain_.contains(x)) pts.push_back(x);
            int i = 0;
            while (i < m && ++idx[i] == per_axis) idx[i++] = 0;
            if (i == m) break;
            if (pts.size() > 2048) break;  // cap for high-dimensional charts
        }
        return pts;
    }

  private:
    void validate(double tol) {
        const int m = dim();
        if (m < 2) throw ValidationError("ambient.dim", "ambient dimension must be >= 2");
        if (structure_.F.rows() != m || structure_.F.cols() != m)
            throw ValidationError("structure", "structure matrix dimension mismatch");
        if (domain_.dim() != m)
            throw ValidationError("chart_domain", "domain dimension mismatch");
        const Mat& F = structure_.F;
        double invol = (F * F - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
        double itol = (structure_.kind == StructureKind::Custom) ? tol : 1e-12;
        if (invol > itol)
            throw ValidationError("structure", "F*F != I (residual " + std::to_string(invol) + ")");
        if ((F - Mat::Identity(m, m)).cwiseAbs().maxCoeff() <= itol ||
            (F + Mat::Identity(m, m)).cwiseAbs().maxCoeff() <= itol)
            throw ValidationError("structure", "F = +/-I is forbidden");
        if (metric_.kind == MetricKind::SpaceFormProduct) {
            if (structure_.kind != StructureKind::Sign)
                throw ValidationError("structure",
                                      "SpaceFormProduct requires the Sign(m1,m2) structure");
            Mat expected = ProductStructure::sign(metric_.m1, metric_.m2).F;
            if ((F - expected).cwiseAbs().maxCoeff() > 1e-12)
                throw ValidationError("structure", "Sign blocks must match factor dimensions");
        }
        // metric compatibility g(FU,FV) = g(U,V) and nabla F = 0 at sample points
        auto all = grid_samples(2);
        std::vector<Vec> pts;
        std::size_t stride = std::max<std::size_t>(1, all.size() / 32);
        for (std::size_t i = 0; i < all.size(); i += stride) pts.push_back(all[i]);
        for (const Vec& x : pts) {
            Mat g = metric_at(x);
            double comp = (F.transpose() * g * F - g).cwiseAbs().maxCoeff();
            if (comp > 1e-9)
                throw NotLocallyProduct("metric compatibility g(FU,FV)=g(U,V) fails, residual " +
                                        std::to_string(comp));
        }
        double par = check_structure_parallel(pts);
        if (par > 1e-6)
            throw NotLocallyProduct("structure not parallel: nabla F residual " +
                                    std::to_string(par));
    }

    MetricModel metric_;
    ProductStructure structure_;
    Box domain_;
};

}  // namespace slantlab
