#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>

#include "potmap/energy.hpp"
#include "potmap/field.hpp"
#include "potmap/geometry.hpp"
#include "potmap/jets.hpp"

namespace potmap {

// Layouts used by this module:
//   nabla X  [j][alpha][i]     = nabla_j X^i_alpha
//   D X      [beta][alpha][i]  = D_beta X^i_alpha
//   F        [alpha][j][i]     = F_j^i_alpha
//   omega    [alpha][j][i]     = omega_{j i alpha}
//   U        [alpha][beta][i]  = U^i_{alpha beta}

/// Everything derived from X, h and g at one point of T x M.
struct FieldGeometry {
  Matrix X;            // p x n
  Tensor3 dX_dt;       // [beta][alpha][i]
  Tensor3 dX_dx;       // [j][alpha][i]
  Matrix h, h_inv;     // p x p
  Matrix g, g_inv;     // n x n
  Tensor3 H;           // [a][b][c]
  Tensor3 G;           // [i][j][k]
  Tensor3 nabla_X;     // [j][alpha][i]
  Tensor3 D_X;         // [beta][alpha][i]
  Tensor3 F;           // [alpha][j][i]
};

FieldGeometry field_geometry(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                             const Vector& x);

struct CovariantDerivatives {
  Tensor3 nabla;  // [j][alpha][i]
  Tensor3 D;      // [beta][alpha][i]
};

CovariantDerivatives covariant_derivatives_of_X(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                                const Vector& t, const Vector& x);

/// F_j^i_alpha = nabla_j X^i_alpha - g_hj g^ik nabla_k X^h_alpha.
Tensor3 helicity(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t, const Vector& x);

/// omega_{j i alpha} = scale * g_hi F_j^h_alpha. scale = 1 is the world-force
/// convention; the polysymplectic forms use scale = 1/2.
Tensor3 lower_helicity(const Tensor3& F, const Matrix& g, double scale = 1.0);

/// max |omega_{ji} + omega_{ij}|.
double skew_defect(const Tensor3& omega);

enum class CausalClass { Timelike, Lightlike, Spacelike };

inline constexpr double kNullBand = 1e-12;
inline constexpr double kCriticalTol = 1e-8;

std::string_view to_string(CausalClass c) noexcept;
CausalClass classify_potential_energy(double f, double null_band = kNullBand) noexcept;
/// Nonspacelike (causal) means f <= 0 within the null band.
inline bool is_nonspacelike(CausalClass c) noexcept { return c != CausalClass::Spacelike; }

struct CausalCharacter {
  double f = 0.0;
  CausalClass kind = CausalClass::Lightlike;
  /// X / sqrt(2|f|); present only when |f| > critical tolerance at the queried
  /// point. Evaluating it on the critical set throws CriticalPoint.
  std::optional<DistTensorField> rescaled;
};

CausalCharacter potential_energy_and_character(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                               const Vector& t, const Vector& x, double critical_tol = kCriticalTol);

/// The rescaled field X / sqrt(2|f|) as a global object (masked on the critical set).
DistTensorField rescaled_field(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                               double critical_tol = kCriticalTol);

/// dX^i_a/dt^b + dX^i_a/dx^j X^j_b - (a <-> b), laid out [a][b][i].
Tensor3 integrability_residual(const DistTensorField& X, const Vector& t, const Vector& x);

/// Which second-order system derived from x1 = X is evaluated.
enum class ProlongationMode { Eq9, Eq10, Eq11, Eq12, Eq11Reduced, Eq12Reduced };

/// Parses "eq9", "eq10", "eq11", "eq12", "eq11p", "eq12p". Throws BadMode.
ProlongationMode parse_prolongation_mode(std::string_view name);
std::string_view to_string(ProlongationMode mode) noexcept;
bool is_traced(ProlongationMode mode) noexcept;

/// Right-hand side of the selected system at a jet point: the untraced systems
/// return [alpha][beta][i], the traced ones an n-vector.
std::variant<Tensor3, Vector> prolongation_rhs(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                               const JetPoint& jet, ProlongationMode mode);

/// Traced right-hand side; throws BadMode for Eq9/Eq10.
Vector traced_prolongation_rhs(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                               const JetPoint& jet, ProlongationMode mode);

/// tau(phi) - traced rhs.
Vector prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const SheetJet& jet,
                             ProlongationMode mode);
Vector prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                             const SheetSample& phi, const Vector& t, ProlongationMode mode);

/// x^i_ab - rhs for Eq9/Eq10.
Tensor3 untraced_prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                       const SheetJet& jet, ProlongationMode mode);

struct GradfCheck {
  Vector term;      // g^ih h^ab g_kj (nabla_h X^k_a) X^j_b
  Vector gradf_fd;  // g^ih d f / d x^h at fixed t, central differences
};

GradfCheck gradf_term_check(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                            const Vector& x, double step = 1e-5);

/// Generalized Poisson residual:
/// tau^i - g^ij dc/dx^j - h^ab (nabla_k X^i_b - g_kj g^il nabla_l X^j_b) x^k_a - h^ab D_a X^i_b.
Vector potential_residual(const LagrangianSpec& spec, const SheetJet& jet);
Vector potential_residual(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t);

/// Data of a world-force law: F_j^i_alpha, U^i_ab and the potential c.
struct ForceData {
  std::function<Tensor3(const Vector&, const Vector&)> F;  // [alpha][j][i]
  std::function<Tensor3(const Vector&, const Vector&)> U;  // [alpha][beta][i]
  std::function<double(const Vector&, const Vector&)> c;
  std::function<Vector(const Vector&, const Vector&)> grad_c;  // optional dc/dx
};

inline constexpr double kSkewTol = 1e-10;

/// F = helicity of X, U_ab = D_b X_a, c = f with its closed-form gradient.
ForceData force_from_field(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g);

/// tau^i - g^ij dc/dx^j - h^ab F_j^i_a x^j_b - h^ab U^i_ab. Throws SkewViolation
/// when g_hi F_j^h_a is not skew in (j, i).
Vector lorentz_udriste_residual(const ForceData& force, const MetricSpec& h, const MetricSpec& g, const SheetJet& jet);
Vector lorentz_udriste_residual(const ForceData& force, const MetricSpec& h, const MetricSpec& g,
                                const SheetSample& phi, const Vector& t);

struct NonlinearConnection {
  Tensor3 N;  // [alpha][j][i] = G^i_jk x^k_alpha - F_j^i_alpha
  Tensor3 M;  // [alpha][beta][i] = -H^c_ab x^i_c
};

NonlinearConnection nonlinear_connection(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                         const JetPoint& jet);

}  // namespace potmap
