#include "dualflow/curvfn.hpp"

#include "dualflow/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dualflow {

namespace {

using Buffer = std::array<double, kMaxDimension + 3>;

// e[0..k] of the entries of kappa, skipping indices skip_a and skip_b.
void esym_table(std::span<const double> kappa, int kmax, int skip_a, int skip_b, double* e) {
    e[0] = 1.0;
    for (int j = 1; j <= kmax; ++j) e[j] = 0.0;
    for (int i = 0; i < static_cast<int>(kappa.size()); ++i) {
        if (i == skip_a || i == skip_b) continue;
        for (int j = kmax; j >= 1; --j) e[j] += kappa[static_cast<std::size_t>(i)] * e[j - 1];
    }
}

// h[0..k] of kappa with the extra entries appended (NaN marks "absent").
void chsym_table(std::span<const double> kappa, int kmax, double extra_a, double extra_b, double* h) {
    h[0] = 1.0;
    for (int j = 1; j <= kmax; ++j) h[j] = 0.0;
    auto absorb = [&](double x) {
        for (int j = 1; j <= kmax; ++j) h[j] += x * h[j - 1];
    };
    for (double x : kappa) absorb(x);
    if (!std::isnan(extra_a)) absorb(extra_a);
    if (!std::isnan(extra_b)) absorb(extra_b);
}

std::string format_number(double x) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

double parse_number(std::string_view s, std::string_view whole) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("malformed number '" + std::string(s) + "' in curvature function '" +
                         std::string(whole) + "'");
    return x;
}

int parse_int(std::string_view s, std::string_view whole) {
    int x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("malformed integer '" + std::string(s) + "' in curvature function '" +
                         std::string(whole) + "'");
    return x;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FamilySpec

FamilySpec FamilySpec::power_mean(double r) {
    FamilySpec s;
    s.kind = Kind::PowerMean;
    s.r = r;
    return s;
}

FamilySpec FamilySpec::sigma_k(int k) {
    FamilySpec s;
    s.kind = Kind::SigmaK;
    s.k = k;
    return s;
}

FamilySpec FamilySpec::quotient(int k, int l) {
    FamilySpec s;
    s.kind = Kind::QuotientKL;
    s.k = k;
    s.l = l;
    return s;
}

FamilySpec FamilySpec::weighted_geometric(std::vector<double> alpha) {
    FamilySpec s;
    s.kind = Kind::WeightedGeometric;
    s.alpha = std::move(alpha);
    return s;
}

FamilySpec FamilySpec::complete_symmetric(int k) {
    FamilySpec s;
    s.kind = Kind::CompleteSymmetric;
    s.k = k;
    return s;
}

FamilySpec FamilySpec::mean() { return FamilySpec{}; }

FamilySpec FamilySpec::norm_of_a() {
    FamilySpec s;
    s.kind = Kind::NormOfA;
    return s;
}

FamilySpec FamilySpec::inverse_of(FamilySpec inner) {
    FamilySpec s;
    s.kind = Kind::InverseOf;
    s.inner = std::make_shared<const FamilySpec>(std::move(inner));
    return s;
}

bool operator==(const FamilySpec& a, const FamilySpec& b) {
    if (a.kind != b.kind) return false;
    using K = FamilySpec::Kind;
    switch (a.kind) {
        case K::PowerMean: return a.r == b.r;
        case K::SigmaK:
        case K::CompleteSymmetric: return a.k == b.k;
        case K::QuotientKL: return a.k == b.k && a.l == b.l;
        case K::WeightedGeometric: return a.alpha == b.alpha;
        case K::Mean:
        case K::NormOfA: return true;
        case K::InverseOf: return *a.inner == *b.inner;
    }
    return false;
}

std::string family_name(const FamilySpec& spec) {
    using K = FamilySpec::Kind;
    switch (spec.kind) {
        case K::PowerMean: return "power_mean:" + format_number(spec.r);
        case K::SigmaK: return "sigma_k:" + std::to_string(spec.k);
        case K::QuotientKL: return "quotient:" + std::to_string(spec.k) + ":" + std::to_string(spec.l);
        case K::WeightedGeometric: {
            std::string s = "geom:";
            for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
                if (i) s += ',';
                s += format_number(spec.alpha[i]);
            }
            return s;
        }
        case K::CompleteSymmetric: return "complete:" + std::to_string(spec.k);
        case K::Mean: return "mean";
        case K::NormOfA: return "norm_A";
        case K::InverseOf: return "inverse:" + family_name(*spec.inner);
    }
    return "?";
}

FamilySpec parse_family(std::string_view name) {
    auto colon = name.find(':');
    std::string_view head = name.substr(0, colon);
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
    auto need_args = [&](bool want) {
        if (want && colon == std::string_view::npos)
            throw ParseError("curvature function '" + std::string(name) + "' needs parameters");
        if (!want && colon != std::string_view::npos)
            throw ParseError("curvature function '" + std::string(head) + "' takes no parameters");
    };

    if (head == "mean") {
        need_args(false);
        return FamilySpec::mean();
    }
    if (head == "norm_A") {
        need_args(false);
        return FamilySpec::norm_of_a();
    }
    if (head == "inverse") {
        need_args(true);
        return FamilySpec::inverse_of(parse_family(rest));
    }
    need_args(true);
    if (head == "power_mean") return FamilySpec::power_mean(parse_number(rest, name));
    if (head == "sigma_k") return FamilySpec::sigma_k(parse_int(rest, name));
    if (head == "complete") return FamilySpec::complete_symmetric(parse_int(rest, name));
    if (head == "quotient") {
        auto parts = split(rest, ':');
        if (parts.size() != 2) throw ParseError("quotient expects 'quotient:k:l', got '" + std::string(name) + "'");
        return FamilySpec::quotient(parse_int(parts[0], name), parse_int(parts[1], name));
    }
    if (head == "geom") {
        std::vector<double> alpha;
        for (auto p : split(rest, ',')) alpha.push_back(parse_number(p, name));
        return FamilySpec::weighted_geometric(std::move(alpha));
    }
    throw ParseError("unknown curvature function '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// CurvatureFunction

CurvatureFunction::CurvatureFunction(CurvatureFunctionSpec spec) : spec_(std::move(spec)), n_(spec_.n) {
    using K = FamilySpec::Kind;
    const auto& fam = spec_.family;
    if (n_ < 1 || n_ > kMaxDimension)
        throw ConstructionError("dimension n must lie in [1, " + std::to_string(kMaxDimension) + "], got " +
                                std::to_string(n_));

    log_coeff_.assign(static_cast<std::size_t>(n_ + 1), 0.0);
    switch (fam.kind) {
        case K::PowerMean:
            if (!(std::abs(fam.r) <= 1.0))
                throw ConstructionError("power_mean requires |r| <= 1, got r = " + format_number(fam.r));
            break;
        case K::SigmaK:
            if (fam.k < 1 || fam.k > n_)
                throw ConstructionError("sigma_k requires 1 <= k <= n, got k = " + std::to_string(fam.k));
            log_coeff_[static_cast<std::size_t>(fam.k)] = 1.0 / fam.k;
            break;
        case K::QuotientKL:
            if (!(0 <= fam.l && fam.l < fam.k && fam.k <= n_))
                throw ConstructionError("quotient requires 0 <= l < k <= n, got k = " + std::to_string(fam.k) +
                                        ", l = " + std::to_string(fam.l));
            log_coeff_[static_cast<std::size_t>(fam.k)] += 1.0 / (fam.k - fam.l);
            log_coeff_[static_cast<std::size_t>(fam.l)] -= 1.0 / (fam.k - fam.l);
            break;
        case K::WeightedGeometric: {
            if (static_cast<int>(fam.alpha.size()) != n_)
                throw ConstructionError("geom requires n = " + std::to_string(n_) + " weights, got " +
                                        std::to_string(fam.alpha.size()));
            double sum = 0.0;
            for (double a : fam.alpha) {
                if (!(a >= 0.0)) throw ConstructionError("geom requires weights alpha_i >= 0");
                sum += a;
            }
            if (std::abs(sum - 1.0) > 1e-12) throw ConstructionError("geom requires weights summing to 1");
            for (int k = 1; k <= n_; ++k) {
                log_coeff_[static_cast<std::size_t>(k)] += fam.alpha[static_cast<std::size_t>(k - 1)];
                log_coeff_[static_cast<std::size_t>(k - 1)] -= fam.alpha[static_cast<std::size_t>(k - 1)];
            }
            break;
        }
        case K::CompleteSymmetric:
            if (fam.k < 1 || fam.k > n_)
                throw ConstructionError("complete requires 1 <= k <= n, got k = " + std::to_string(fam.k));
            break;
        case K::Mean:
        case K::NormOfA: break;
        case K::InverseOf:
            inner_ = std::make_shared<const CurvatureFunction>(CurvatureFunctionSpec{*fam.inner, n_});
            break;
    }
    log_coeff_[0] = 0.0;  // H_0 = 1

    std::vector<double> ones(static_cast<std::size_t>(n_), 1.0);
    double f1 = 0.0;
    raw(ones, 0, f1, nullptr, nullptr);
    scale_ = 1.0 / f1;
}

void CurvatureFunction::check_domain(std::span<const double> kappa) const {
    if (static_cast<int>(kappa.size()) != n_)
        throw DomainError("curvature vector has " + std::to_string(kappa.size()) + " entries, expected " +
                          std::to_string(n_));
    for (std::size_t i = 0; i < kappa.size(); ++i)
        if (!(kappa[i] > 0.0) || !std::isfinite(kappa[i]))
            throw DomainError("principal curvature kappa_" + std::to_string(i) + " = " + format_number(kappa[i]) +
                              " is outside the positive cone");
}

void CurvatureFunction::raw(std::span<const double> kappa, int order, double& f, double* grad,
                            double* hess) const {
    using K = FamilySpec::Kind;
    const int n = n_;
    const auto& fam = spec_.family;
    auto H = [&](int i, int j) -> double& { return hess[i * n + j]; };

    // Families written as exp(L) supply L, L_i, L_ij; the rest fill f/grad/hess directly.
    Buffer Li{};
    std::array<double, kMaxDimension * kMaxDimension> Lij{};
    double L = 0.0;
    bool log_form = true;

    switch (fam.kind) {
        case K::Mean: {
            log_form = false;
            f = std::accumulate(kappa.begin(), kappa.end(), 0.0);
            if (order >= 1)
                for (int i = 0; i < n; ++i) grad[i] = 1.0;
            if (order >= 2)
                for (int i = 0; i < n * n; ++i) hess[i] = 0.0;
            break;
        }
        case K::NormOfA: {
            log_form = false;
            double s = 0.0;
            for (double x : kappa) s += x * x;
            const double a = std::sqrt(s);
            f = a;
            if (order >= 1)
                for (int i = 0; i < n; ++i) grad[i] = kappa[i] / a;
            if (order >= 2)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) H(i, j) = ((i == j) ? 1.0 / a : 0.0) - kappa[i] * kappa[j] / (a * a * a);
            break;
        }
        case K::InverseOf: {
            log_form = false;
            Buffer y{};
            for (int i = 0; i < n; ++i) y[i] = 1.0 / kappa[i];
            auto in = inner_->evaluate(std::span<const double>(y.data(), static_cast<std::size_t>(n)), order);
            const double F = in.value;
            f = 1.0 / F;
            if (order >= 1)
                for (int i = 0; i < n; ++i) grad[i] = in.gradient[i] * y[i] * y[i] / (F * F);
            if (order >= 2)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        const double yy = y[i] * y[i] * y[j] * y[j];
                        double v = -in.hess(i, j) * yy / (F * F) + 2.0 * in.gradient[i] * in.gradient[j] * yy / (F * F * F);
                        if (i == j) v -= 2.0 * in.gradient[i] * y[i] * y[i] * y[i] / (F * F);
                        H(i, j) = v;
                        H(j, i) = v;
                    }
            break;
        }
        case K::PowerMean: {
            if (fam.r == 0.0) {
                for (int i = 0; i < n; ++i) {
                    L += std::log(kappa[i]) / n;
                    Li[i] = 1.0 / (n * kappa[i]);
                    Lij[i * n + i] = -1.0 / (n * kappa[i] * kappa[i]);
                }
            } else {
                const double r = fam.r;
                Buffer p{};
                double S = 0.0;
                for (int i = 0; i < n; ++i) {
                    p[i] = std::pow(kappa[i], r);
                    S += p[i];
                }
                L = (std::log(S) - std::log(static_cast<double>(n))) / r;
                for (int i = 0; i < n; ++i) Li[i] = p[i] / (kappa[i] * S);
                if (order >= 2)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            double v = -r * Li[i] * Li[j];
                            if (i == j) v += (r - 1.0) * p[i] / (kappa[i] * kappa[i] * S);
                            Lij[i * n + j] = v;
                        }
            }
            break;
        }
        case K::CompleteSymmetric: {
            const int k = fam.k;
            constexpr double absent = std::numeric_limits<double>::quiet_NaN();
            Buffer h{};
            chsym_table(kappa, k, absent, absent, h.data());
            const double hk = h[k];
            L = std::log(hk) / k;
            if (order >= 1) {
                Buffer dh{};
                for (int i = 0; i < n; ++i) {
                    Buffer t{};
                    chsym_table(kappa, k - 1, kappa[i], absent, t.data());
                    dh[i] = t[k - 1];
                    Li[i] = dh[i] / (k * hk);
                }
                if (order >= 2)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            double d2 = 0.0;
                            if (k >= 2) {
                                Buffer t{};
                                chsym_table(kappa, k - 2, kappa[i], kappa[j], t.data());
                                d2 = t[k - 2] * (i == j ? 2.0 : 1.0);
                            }
                            Lij[i * n + j] = (d2 / hk - dh[i] * dh[j] / (hk * hk)) / k;
                        }
            }
            break;
        }
        case K::SigmaK:
        case K::QuotientKL:
        case K::WeightedGeometric: {
            Buffer e{};
            esym_table(kappa, n, -1, -1, e.data());
            for (int k = 1; k <= n; ++k) {
                const double c = log_coeff_[static_cast<std::size_t>(k)];
                if (c == 0.0) continue;
                L += c * std::log(e[k]);
            }
            if (order >= 1) {
                // de[i][k] = dH_k/dkappa_i = H_{k-1}(kappa without i)
                std::array<Buffer, kMaxDimension> de{};
                for (int i = 0; i < n; ++i) {
                    Buffer t{};
                    esym_table(kappa, n - 1, i, -1, t.data());
                    de[i][0] = 0.0;
                    for (int k = 1; k <= n; ++k) de[i][k] = t[k - 1];
                }
                for (int i = 0; i < n; ++i) {
                    double s = 0.0;
                    for (int k = 1; k <= n; ++k) {
                        const double c = log_coeff_[static_cast<std::size_t>(k)];
                        if (c != 0.0) s += c * de[i][k] / e[k];
                    }
                    Li[i] = s;
                }
                if (order >= 2)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            Buffer t{};
                            if (i != j) esym_table(kappa, n - 2, i, j, t.data());
                            double s = 0.0;
                            for (int k = 1; k <= n; ++k) {
                                const double c = log_coeff_[static_cast<std::size_t>(k)];
                                if (c == 0.0) continue;
                                const double d2 = (i != j && k >= 2) ? t[k - 2] : 0.0;
                                s += c * (d2 / e[k] - de[i][k] * de[j][k] / (e[k] * e[k]));
                            }
                            Lij[i * n + j] = s;
                        }
            }
            break;
        }
    }

    if (log_form) {
        f = std::exp(L);
        if (order >= 1)
            for (int i = 0; i < n; ++i) grad[i] = f * Li[i];
        if (order >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) H(i, j) = f * (Lij[i * n + j] + Li[i] * Li[j]);
    }
}

double CurvatureFunction::value(std::span<const double> kappa) const {
    check_domain(kappa);
    double f = 0.0;
    raw(kappa, 0, f, nullptr, nullptr);
    return scale_ * f;
}

EvalResult CurvatureFunction::evaluate(std::span<const double> kappa, int order) const {
    check_domain(kappa);
    EvalResult r;
    r.n = n_;
    if (order >= 1) r.gradient.assign(static_cast<std::size_t>(n_), 0.0);
    if (order >= 2) r.hessian.assign(static_cast<std::size_t>(n_ * n_), 0.0);
    raw(kappa, order, r.value, order >= 1 ? r.gradient.data() : nullptr,
        order >= 2 ? r.hessian.data() : nullptr);
    r.value *= scale_;
    for (double& g : r.gradient) g *= scale_;
    for (double& h : r.hessian) h *= scale_;
    if (order >= 2)
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                const double v = 0.5 * (r.hessian[static_cast<std::size_t>(i * n_ + j)] + r.hessian[static_cast<std::size_t>(j * n_ + i)]);
                r.hessian[static_cast<std::size_t>(i * n_ + j)] = v;
                r.hessian[static_cast<std::size_t>(j * n_ + i)] = v;
            }
    return r;
}

CurvatureFunction make_function(const CurvatureFunctionSpec& spec) { return CurvatureFunction(spec); }

CurvatureFunction invert(const CurvatureFunction& f) {
    const auto& fam = f.spec().family;
    // invert(invert(F)) is F itself, not a doubly wrapped function.
    if (fam.kind == FamilySpec::Kind::InverseOf) return CurvatureFunction({*fam.inner, f.dimension()});
    return CurvatureFunction({FamilySpec::inverse_of(fam), f.dimension()});
}

// ---------------------------------------------------------------------------

const char* to_string(Concavity c) {
    switch (c) {
        case Concavity::StrictlyConcave: return "strictly_concave";
        case Concavity::ConcaveDegenerate: return "concave_degenerate";
        case Concavity::NotConcave: return "not_concave";
    }
    return "?";
}

Concavity check_strict_concavity(const CurvatureFunction& f, std::span<const double> kappa, double tol) {
    const int n = f.dimension();
    auto ev = f.evaluate(kappa, 2);
    Eigen::MatrixXd D(n, n);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            D(i, j) = ev.hess(i, j);
            scale = std::max(scale, std::abs(D(i, j)));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (D + D.transpose()));
    const auto& lam = solver.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    if (tol < 0.0) tol = 1e-8 * (lam_max + 1.0);

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(D(i, j) - D(j, i)) > tol)
                throw NumericalConsistencyError("Hessian is not symmetric at (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ")");

    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k(i) = kappa[static_cast<std::size_t>(i)];
    const Eigen::VectorXd k_hat = k.normalized();
    if ((D * k_hat).norm() > tol)
        throw NumericalConsistencyError("radial direction is not a null vector of the Hessian");

    // Drop the eigenvector best aligned with kappa; the remaining ones span its complement.
    int radial = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(solver.eigenvectors().col(i).dot(k_hat));
        if (a > best) {
            best = a;
            radial = i;
        }
    }
    bool all_negative = true;
    for (int i = 0; i < n; ++i) {
        if (lam(i) > tol) return Concavity::NotConcave;
        if (i != radial && !(lam(i) < -tol)) all_negative = false;
    }
    return all_negative ? Concavity::StrictlyConcave : Concavity::ConcaveDegenerate;
}

double elementary_symmetric(std::span<const double> kappa, int k) {
    const int n = static_cast<int>(kappa.size());
    if (k < 0 || k > n)
        throw DomainError("elementary_symmetric requires 0 <= k <= n, got k = " + std::to_string(k));
    std::vector<double> e(static_cast<std::size_t>(k + 1));
    esym_table(kappa, k, -1, -1, e.data());
    return e[static_cast<std::size_t>(k)];
}

double complete_homogeneous(std::span<const double> kappa, int k) {
    if (k < 0) throw DomainError("complete_homogeneous requires k >= 0");
    std::vector<double> h(static_cast<std::size_t>(k + 1));
    constexpr double absent = std::numeric_limits<double>::quiet_NaN();
    chsym_table(kappa, k, absent, absent, h.data());
    return h[static_cast<std::size_t>(k)];
}

}  // namespace dualflow
