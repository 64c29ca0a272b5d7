#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "potmap/field.hpp"
#include "potmap/forms.hpp"
#include "potmap/geometry.hpp"
#include "potmap/jets.hpp"

namespace potmap {

/// Frame rows: delta/delta t^a, delta/delta x^i, d/d x^i_a in coordinate components.
/// Coframe rows: dt^a, dx^i, delta x^i_a. Ordered like JetChart coordinates.
struct AdaptedFrames {
  Matrix frame;
  Matrix coframe;
};

AdaptedFrames adapted_frames(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp);

/// S = h dt dt + g dx dx + h^ab g_ij delta x delta x in the coordinate cobasis.
Matrix sasaki_metric(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp);
/// block-diag(h, g, h^-1 (x) g): the same metric in the adapted cobasis.
Matrix sasaki_adapted_blocks(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp);

enum class HamiltonVariant { Theorem1, Theorem2 };

/// "theorem1" / "theorem2". Throws BadMode.
HamiltonVariant parse_hamilton_variant(std::string_view name);
std::string_view to_string(HamiltonVariant v) noexcept;

/// Inputs shared by the polysymplectic constructions. The first variant uses X
/// only through f; the second also through omega = 1/2 g F and D X.
struct HamiltonSetup {
  std::optional<DistTensorField> X;
  MetricSpec h;
  MetricSpec g;
  HamiltonVariant variant = HamiltonVariant::Theorem1;
  JetChart chart;
};

/// Throws MissingField for the second variant without X.
HamiltonSetup make_hamilton_setup(std::optional<DistTensorField> X, MetricSpec h, MetricSpec g,
                                  HamiltonVariant variant);

/// dv_h = sqrt|h| dt^1 ^ ... ^ dt^p.
FormValue volume_form_value(const JetChart& chart, const MetricSpec& h, const Vector& t);
DifferentialForm volume_form(const JetChart& chart, const MetricSpec& h);

/// The 2-form A_a with Omega_a = A_a ^ dv_h.
FormValue polysymplectic_prefactor_value(const HamiltonSetup& s, int alpha, const Vector& z);
DifferentialForm polysymplectic_prefactor(const HamiltonSetup& s, int alpha);

struct LiouvilleForms {
  std::vector<DifferentialForm> theta;  // (p+1)-forms
  std::vector<DifferentialForm> omega;  // (p+2)-forms
};

LiouvilleForms liouville_and_omega(const std::optional<DistTensorField>& X, const MetricSpec& h, const MetricSpec& g,
                                   HamiltonVariant variant);
LiouvilleForms liouville_and_omega(const HamiltonSetup& s);

/// H = (1/2 h^ab g_ij x^i_a x^j_b - f) dv_h, with f = 0 when X is absent.
DifferentialForm hamiltonian_form(const HamiltonSetup& s);

/// The closed-form differential of H modulo dv_h:
/// B = h^ab g_ij x^j_b delta x^i_a - h^ab g_ij X^j_b nabla_k X^i_a dx^k, so dH = B ^ dv_h.
FormValue hamiltonian_differential_prefactor(const HamiltonSetup& s, const JetPoint& jp);

/// Given a (p+1)-form value w, returns the 1-form B with w = B ^ dv_h on the
/// non-time directions. Throws NotResolvable if w has other components.
FormValue split_volume_factor(const JetChart& chart, const MetricSpec& h, const Vector& t, const FormValue& w,
                              double tol = 1e-6);

inline constexpr double kResolveTol = 1e-8;

/// Vector fields X^a = (fixed part) + u^{al} delta/delta x^l + V^{al}_c d/dx^l_c
/// solving sum_a X^a -| A_a = B on the dx and dx1 directions.
struct HamiltonianObject {
  Matrix u;                     // p x n, u(a, l) = u^{al}
  Tensor3 V;                    // [a][l][c] = V^{al}_c (minimum-norm choice)
  Vector trace;                 // W^l = sum_a V^{al}_a
  std::vector<Vector> vectors;  // X^a in coordinate components
  double residual = 0.0;
};

/// Least-squares solve on the ansatz. `with_time_part` adds h^{ac} delta/delta t^c
/// to X^a (the shape used for the Hamiltonian of the second variant).
/// Throws NotResolvable when the residual exceeds `tol`.
HamiltonianObject resolve_vector_object(const HamiltonSetup& s, const JetPoint& jp, const FormValue& B,
                                        bool with_time_part, double tol = kResolveTol);

/// X_H from the closed-form differential of H.
HamiltonianObject resolve_hamiltonian_object(const HamiltonSetup& s, const JetPoint& jp);

struct HamiltonResidual {
  Matrix r1;        // u^{ai} - h^ab x^i_b
  Vector r2;        // delta u^{ai} / dt^a - W^i
  Vector divergence;  // delta u^{ai} / dt^a along phi
  Vector rhs;       // W^i
};

HamiltonResidual hamilton_system_residual(const std::optional<DistTensorField>& X, const MetricSpec& h,
                                          const MetricSpec& g, const SheetSample& phi, const Vector& t,
                                          HamiltonVariant variant);
HamiltonResidual hamilton_system_residual(const HamiltonSetup& s, const SheetJet& jet);

/// {f1, f2} = sum_a (X1^a -| X2^a -| A_a) ^ dv_h, where X_f -| Omega = df and
/// df is taken by central differences with `fd_step`. The observables must be
/// of the form phi dv_h up to terms killed by dv_h.
DifferentialForm poisson_bracket(const HamiltonSetup& s, const DifferentialForm& f1, const DifferentialForm& f2,
                                 double fd_step = 1e-4);

}  // namespace potmap
