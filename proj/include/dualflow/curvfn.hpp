#pragma once

// Curvature functions of the principal curvatures on the positive cone.
//
// Every built-in family is symmetric and homogeneous of degree one, and is
// rescaled so that F(1, ..., 1) = 1. Values, gradients and Hessians are exact
// (closed form or chain rule), never finite differences.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dualflow {

inline constexpr int kMaxDimension = 16;

/// Family of a curvature function, independent of the dimension n.
struct FamilySpec {
    enum class Kind {
        PowerMean,          // ((1/n) sum k_i^r)^(1/r), |r| <= 1; r = 0 is the geometric mean
        SigmaK,             // H_k^(1/k)
        QuotientKL,         // (H_k / H_l)^(1/(k-l)), 0 <= l < k
        WeightedGeometric,  // prod_k (H_k / H_{k-1})^alpha_k, alpha_k >= 0, sum alpha = 1
        CompleteSymmetric,  // (sum_{|a|=k} k^a)^(1/k)
        Mean,               // H / n
        NormOfA,            // |A| / sqrt(n)
        InverseOf,          // 1 / F(1/k)
    };

    Kind kind = Kind::Mean;
    double r = 1.0;
    int k = 1;
    int l = 0;
    std::vector<double> alpha;
    std::shared_ptr<const FamilySpec> inner;

    static FamilySpec power_mean(double r);
    static FamilySpec sigma_k(int k);
    static FamilySpec quotient(int k, int l);
    static FamilySpec weighted_geometric(std::vector<double> alpha);
    static FamilySpec complete_symmetric(int k);
    static FamilySpec mean();
    static FamilySpec norm_of_a();
    static FamilySpec inverse_of(FamilySpec inner);

    friend bool operator==(const FamilySpec& a, const FamilySpec& b);
};

/// Config-file name, e.g. "sigma_k:2", "power_mean:0.5", "inverse:quotient:2:1".
std::string family_name(const FamilySpec& spec);

/// Inverse of family_name. Throws ParseError on malformed names.
FamilySpec parse_family(std::string_view name);

struct CurvatureFunctionSpec {
    FamilySpec family;
    int n = 1;
};

struct EvalResult {
    double value = 0.0;
    std::vector<double> gradient;
    std::vector<double> hessian;  // row-major n x n
    int n = 0;

    double hess(int i, int j) const { return hessian[static_cast<std::size_t>(i * n + j)]; }
};

class CurvatureFunction {
public:
    /// Validates the family parameters against n and computes the normalization.
    /// Throws ConstructionError naming the violated constraint.
    explicit CurvatureFunction(CurvatureFunctionSpec spec);

    int dimension() const noexcept { return n_; }
    const CurvatureFunctionSpec& spec() const noexcept { return spec_; }
    std::string name() const { return family_name(spec_.family); }

    /// Scale factor applied to the raw family so that F(1,...,1) = 1.
    double normalization() const noexcept { return scale_; }

    /// F(kappa). Throws DomainError if kappa is not in the positive cone.
    double value(std::span<const double> kappa) const;

    /// Value and derivatives up to `order` (0, 1 or 2).
    EvalResult evaluate(std::span<const double> kappa, int order = 2) const;

private:
    void raw(std::span<const double> kappa, int order, double& f, double* grad, double* hess) const;
    void check_domain(std::span<const double> kappa) const;

    CurvatureFunctionSpec spec_;
    int n_;
    double scale_ = 1.0;
    std::vector<double> log_coeff_;  // exponents c_k of prod H_k^{c_k}, index 0..n
    std::shared_ptr<const CurvatureFunction> inner_;
};

CurvatureFunction make_function(const CurvatureFunctionSpec& spec);

/// F~(kappa) = 1 / F(1/kappa).
CurvatureFunction invert(const CurvatureFunction& f);

enum class Concavity { StrictlyConcave, ConcaveDegenerate, NotConcave };

const char* to_string(Concavity c);

/// Classifies D^2F(kappa) on the complement of the radial direction.
/// tol < 0 selects the scale-aware default 1e-8 * (max |eigenvalue| + 1).
Concavity check_strict_concavity(const CurvatureFunction& f, std::span<const double> kappa,
                                 double tol = -1.0);

/// Elementary symmetric polynomial H_k (H_0 = 1) via the product recurrence.
double elementary_symmetric(std::span<const double> kappa, int k);

/// Complete homogeneous symmetric polynomial h_k (h_0 = 1).
double complete_homogeneous(std::span<const double> kappa, int k);

}  // namespace dualflow
