#pragma once

// Expression-defined immersions: order-2 jets, adapted orthonormal frames,
// the induced connection split (Gauss formula), Lie brackets of parameter
// vector fields, and smooth distribution-valued test fields.

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "slantlab/ambient.hpp"
#include "slantlab/expr.hpp"

namespace slantlab {

struct ImmersionJet {
    Vec value;                  // f(p), ambient (m)
    Mat jacobian;               // J (m x d)
    std::vector<Mat> hessian;   // hessian[k] = d x d Hessian of component k
};

// Orthonormal adapted frame at a point: tangent frame E (columns, ambient
// coords), normal frame Xi (columns), plus the parameter coordinates of E and
// the pivot order used to complete the normal frame.
struct AdaptedFrame {
    Vec param_point;
    Vec ambient_point;
    Mat E;        // m x d
    Mat Xi;       // m x (m-d)
    Mat paramE;   // d x d, E.col(i) = J * paramE.col(i)
    Mat g;        // ambient metric at the point
    std::vector<int> gram_log;  // ambient basis indices accepted for Xi

    int d() const { return static_cast<int>(E.cols()); }
    int m() const { return static_cast<int>(E.rows()); }
    double inner(const Vec& u, const Vec& v) const { return u.dot(g * v); }
    Vec tangent_coeffs(const Vec& w) const {  // coefficients on E
        Vec c(d());
        for (int i = 0; i < d(); ++i) c(i) = inner(E.col(i), w);
        return c;
    }
    Vec normal_coeffs(const Vec& w) const {
        Vec c(m() - d());
        for (int a = 0; a < m() - d(); ++a) c(a) = inner(Xi.col(a), w);
        return c;
    }
    Vec project_tangent(const Vec& w) const { return E * tangent_coeffs(w); }
    Vec project_normal(const Vec& w) const { return Xi * normal_coeffs(w); }
};

class ImmersionChart {
  public:
    ImmersionChart(std::vector<std::string> param_names, Box domain,
                   std::vector<Expr> components, std::shared_ptr<const AmbientManifold> ambient)
        : params_(std::move(param_names)),
          domain_(std::move(domain)),
          components_(std::move(components)),
          ambient_(std::move(ambient)) {
        if (static_cast<int>(components_.size()) != ambient_->dim())
            throw ValidationError("immersion.components",
                                  "component count must equal ambient dimension");
        if (domain_.dim() != static_cast<int>(params_.size()))
            throw ValidationError("immersion.domain", "domain dimension mismatch");
    }

    int param_dim() const { return static_cast<int>(params_.size()); }
    int ambient_dim() const { return ambient_->dim(); }
    const Box& domain() const { return domain_; }
    const AmbientManifold& ambient() const { return *ambient_; }
    const std::vector<std::string>& param_names() const { return params_; }
    const std::vector<Expr>& components() const { return components_; }

    Vec value(const Vec& p) const {
        Vec f(ambient_dim());
        for (int k = 0; k < ambient_dim(); ++k) f(k) = components_[k].eval(p);
        return f;
    }

    ImmersionJet jet(const Vec& p, double rank_tol = 1e-8) const {
        const int m = ambient_dim(), d = param_dim();
        ImmersionJet out;
        out.value = Vec(m);
        out.jacobian = Mat(m, d);
        out.hessian.resize(m);
        for (int k = 0; k < m; ++k) {
            Jet2 j = components_[k].eval_jet2(p);
            out.value(k) = j.value;
            out.jacobian.row(k) = j.grad.transpose();
            out.hessian[k] = 0.5 * (j.hess + j.hess.transpose());
        }
        Eigen::JacobiSVD<Mat> svd(out.jacobian);
        if (svd.singularValues().minCoeff() < rank_tol)
            throw ImmersionDegenerate("Jacobian rank below parameter dimension at sample point");
        return out;
    }

    // Modified Gram-Schmidt on the Jacobian columns under the ambient metric,
    // then completion of the normal frame from ambient basis vectors in index
    // order, skipping near-dependent candidates.
    AdaptedFrame adapted_frame(const Vec& p, double dep_tol = 1e-8) const {
        ImmersionJet J = jet(p);
        AdaptedFrame fr;
        fr.param_point = p;
        fr.ambient_point = J.value;
        fr.g = ambient_->metric_at(J.value);
        const int m = ambient_dim(), d = param_dim();
        fr.E = Mat(m, d);
        fr.paramE = Mat::Zero(d, d);
        auto ip = [&](const Vec& a, const Vec& b) { return a.dot(fr.g * b); };

        for (int i = 0; i < d; ++i) {
            Vec v = J.jacobian.col(i);
            Vec coeff = Vec::Zero(d);
            coeff(i) = 1.0;
            for (int k = 0; k < i; ++k) {
                double pr = ip(fr.E.col(k), v);
                v -= pr * fr.E.col(k);
                coeff -= pr * fr.paramE.col(k);
            }
            double n = std::sqrt(ip(v, v));
            if (n < dep_tol)
                throw ImmersionDegenerate("tangent frame degenerate at sample point");
            fr.E.col(i) = v / n;
            fr.paramE.col(i) = coeff / n;
        }

        fr.Xi = Mat(m, m - d);
        int have = 0;
        for (int cand = 0; cand < m && have < m - d; ++cand) {
            Vec v = Vec::Zero(m);
            v(cand) = 1.0;
            for (int k = 0; k < d; ++k) v -= ip(fr.E.col(k), v) * fr.E.col(k);
            for (int k = 0; k < have; ++k) v -= ip(fr.Xi.col(k), v) * fr.Xi.col(k);
            double n = std::sqrt(ip(v, v));
            if (n < dep_tol) continue;
            fr.Xi.col(have) = v / n;
            fr.gram_log.push_back(cand);
            ++have;
        }
        if (have != m - d)
            throw ImmersionDegenerate("could not complete orthonormal normal frame");
        return fr;
    }

    void require_inside(const Vec& p, double margin = 0.0) const {
        if (!domain_.contains(p, margin))
            throw PointOutsideChart("parameter point outside immersion domain");
    }

    // Interior grid samples of the parameter box.
    std::vector<Vec> grid_samples(int per_axis = 3, double shrink = 0.15) const {
        Box b{domain_.lo + shrink * (domain_.hi - domain_.lo),
              domain_.hi - shrink * (domain_.hi - domain_.lo)};
        const int d = param_dim();
        std::vector<Vec> pts;
        std::vector<int> idx(d, 0);
        for (;;) {
            Vec x(d);
            for (int i = 0; i < d; ++i)
                x(i) = (per_axis == 1)
                           ? 0.5 * (b.lo(i) + b.hi(i))
                           : b.lo(i) + (b.hi(i) - b.lo(i)) * idx[i] / double(per_axis - 1);
            pts.push_back(x);
            int i = 0;
            while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
            if (i == d) break;
        }
        return pts;
    }

    std::vector<Vec> random_samples(int count, std::uint64_t seed, double shrink = 0.15) const;

  private:
    std::vector<std::string> params_;
    Box domain_;
    std::vector<Expr> components_;
    std::shared_ptr<const AmbientManifold> ambient_;
};

// Deterministic uniform doubles in [0,1) from raw mt19937_64 bits.
class DeterministicRng {
  public:
    explicit DeterministicRng(std::uint64_t seed) : eng_(seed) {}
    double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    Vec box_point(const Box& b, double shrink = 0.0) {
        Vec x(b.dim());
        for (int i = 0; i < b.dim(); ++i) {
            double lo = b.lo(i) + shrink * (b.hi(i) - b.lo(i));
            double hi = b.hi(i) - shrink * (b.hi(i) - b.lo(i));
            x(i) = uniform(lo, hi);
        }
        return x;
    }
    Vec sphere_vec(int n) {  // direction on S^{n-1} via normalized Gaussian pairs
        Vec v(n);
        for (int i = 0; i < n; ++i) {
            // Box-Muller from deterministic uniforms
            double u1 = std::max(uniform01(), 1e-300), u2 = uniform01();
            v(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        double n2 = v.norm();
        return (n2 > 0) ? Vec(v / n2) : sphere_vec(n);
    }

  private:
    std::mt19937_64 eng_;
};

inline std::vector<Vec> ImmersionChart::random_samples(int count, std::uint64_t seed,
                                                       double shrink) const {
    DeterministicRng rng(seed);
    std::vector<Vec> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) pts.push_back(rng.box_point(domain_, shrink));
    return pts;
}

// Tangent vector field given by d coefficient expressions in the parameter
// coordinate basis d/du_i.
struct FieldOnPatch {
    std::vector<Expr> coeffs;  // size d

    static FieldOnPatch coordinate(const std::vector<std::string>& params, int i) {
        FieldOnPatch f;
        for (std::size_t k = 0; k < params.size(); ++k)
            f.coeffs.push_back(parse(k == static_cast<std::size_t>(i) ? "1" : "0", params));
        return f;
    }
    Vec eval(const Vec& p) const {
        Vec v(coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) v(i) = coeffs[i].eval(p);
        return v;
    }
    // gradient matrix D(i,j) = d coeff_i / d u_j
    Mat grad(const Vec& p) const {
        const int d = static_cast<int>(coeffs.size());
        Mat D(d, d);
        for (int i = 0; i < d; ++i) D.row(i) = coeffs[i].eval_jet2(p).grad.transpose();
        return D;
    }
};

// [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i, in parameter coordinates.
inline Vec lie_bracket(const FieldOnPatch& X, const FieldOnPatch& Y, const Vec& p) {
    Vec xv = X.eval(p), yv = Y.eval(p);
    return Y.grad(p) * xv - X.grad(p) * yv;
}

struct GaussSplit {
    Vec ambient_derivative;  // full nabla-bar_X Y along the immersion
    Vec tangent_part;        // nabla_X Y (ambient coords)
    Vec normal_part;         // h(X,Y) contribution (ambient coords)
};

// nabla-bar_X Y for parameter fields X, Y, split by the adapted frame.
inline GaussSplit induced_connection(const ImmersionChart& chart, const FieldOnPatch& X,
                                     const FieldOnPatch& Y, const Vec& p) {
    ImmersionJet J = chart.jet(p);
    AdaptedFrame fr = chart.adapted_frame(p);
    const int m = chart.ambient_dim(), d = chart.param_dim();
    Vec xv = X.eval(p), yv = Y.eval(p);
    Mat dY = Y.grad(p);
    Vec dYalongX = dY * xv;  // X(Y^j) per coefficient j

    Vec amb = Vec::Zero(m);
    amb += J.jacobian * dYalongX;
    for (int k = 0; k < m; ++k) amb(k) += xv.dot(J.hessian[k] * yv);
    // ambient Christoffel correction Gamma(JX, JY)
    auto G = chart.ambient().christoffel_at(J.value);
    Vec JX = J.jacobian * xv, JY = J.jacobian * yv;
    for (int k = 0; k < m; ++k) amb(k) += JX.dot(G[k] * JY);

    GaussSplit out;
    out.ambient_derivative = amb;
    out.tangent_part = fr.project_tangent(amb);
    out.normal_part = amb - out.tangent_part;
    return out;
}

}  // namespace slantlab
