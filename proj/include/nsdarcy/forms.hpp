#pragma once

#include <functional>
#include <vector>

#include "nsdarcy/fem.hpp"
#include "nsdarcy/mesh.hpp"
#include "nsdarcy/sparse.hpp"

namespace nsdarcy {

/// Physical parameters. K is the scalar conductivity of K = K*I.
struct ModelParams {
  double nu = 1.0;
  double rho = 1.0;
  double gravity = 1.0;
  double porosity = 1.0;
  double conductivity = 1.0;
  double alpha_bjs = 1.0;

  /// Throws ValidationError unless every parameter is strictly positive.
  void validate() const;
  double rho_g() const { return rho * gravity; }
  /// nu * alpha / sqrt(nu * K), the slip coefficient of the interface term.
  double bjs_coefficient() const;
};

/// Outward fluid normal and tangent on the interface y = 1.
inline constexpr std::array<double, 2> kInterfaceNormal{0.0, -1.0};
inline constexpr std::array<double, 2> kInterfaceTangent{1.0, 0.0};

/// A field that can be sampled at points of another mesh: a discrete field
/// (evaluated in-cell when the target mesh has the same grid, located
/// otherwise) or an analytic function. Holds a reference to the field.
class FieldSource {
 public:
  using Analytic = std::function<FieldSample(Point2)>;

  FieldSource(const DiscreteField& field) : field_(&field) {}  // NOLINT(implicit)
  static FieldSource analytic(Analytic f);

  /// Sample at physical point x, which lies at bary in cell `cell` of target.
  FieldSample at(const TriMesh& target, int cell, const std::array<double, 3>& bary, Point2 x) const;
  /// Sample at a physical point, locating it in the source mesh.
  FieldSample at(Point2 x) const;

 private:
  FieldSource() = default;
  const DiscreteField* field_ = nullptr;
  Analytic analytic_;
};

/// Triangle quadrature degree used for assembly on a velocity or scalar map:
/// 6 when any P2 space is involved, 5 otherwise.
int assembly_degree(const DofMap& dofmap);
/// Gauss points per interface edge.
inline constexpr int kInterfacePoints = 5;

/// (rho g / n) K int grad psi_i . grad psi_j
CsrMatrix assemble_ap(const DofMap& phi, const ModelParams& params);

/// nu int grad u : grad v plus the slip term on interface edges.
CsrMatrix assemble_af(const DofMap& velocity, const ModelParams& params);

/// Entry (q_i, v_j) = -int q_i div v_j.
CsrMatrix assemble_b(const DofMap& velocity, const DofMap& pressure);

/// int q_i q_j
CsrMatrix assemble_mass(const DofMap& scalar);

enum class ConvectionMode { Plain, Newton };

struct Convection {
  CsrMatrix matrix;
  std::vector<double> load;  // Newton only: c(a, a, v_i)
};

/// Plain: N1(a) with entries c(a, phi_j, phi_i). Newton: N1(a) + N2(a), where
/// N2 has entries c(phi_j, a, phi_i), plus the load c(a, a, phi_i).
Convection assemble_convection(const DofMap& velocity, const FieldSource& state, ConvectionMode mode,
                               const ModelParams& params);

struct InterfaceCoupling {
  CsrMatrix c_vphi;  // rows velocity: rho g int phi_j (v_i . n_f)
  CsrMatrix c_phiu;  // rows head: -rho g int psi_i (u_j . n_f)
};

InterfaceCoupling assemble_interface_coupling(const CoupledMesh& mesh, const DofMap& velocity, const DofMap& phi,
                                              const ModelParams& params);

/// rho g int_Gamma psi_i (u_src . n_f)
std::vector<double> assemble_interface_load_darcy(const DofMap& phi, const FieldSource& velocity_source,
                                                  const ModelParams& params);

/// -rho g int_Gamma phi_src (v_i . n_f)
std::vector<double> assemble_interface_load_ns(const DofMap& velocity, const FieldSource& head_source,
                                               const ModelParams& params);

/// weight * int f psi_i. quad_degree 0 selects assembly_degree.
std::vector<double> assemble_volume_load(const DofMap& scalar, const ScalarFunction& f, double weight = 1.0,
                                         int quad_degree = 0);
/// weight * int f . v_i
std::vector<double> assemble_volume_load(const DofMap& velocity, const VectorFunction& f, double weight = 1.0,
                                         int quad_degree = 0);

/// c(a, s, v_i) + c(s, a - s, v_i)
std::vector<double> assemble_correction_load(const DofMap& velocity, const FieldSource& a, const FieldSource& s,
                                             const ModelParams& params);

/// Trilinear form c(a, b, w) by direct quadrature on the mesh of w.
double trilinear(const DiscreteField& a, const DiscreteField& b, const DiscreteField& w, const ModelParams& params);

}  // namespace nsdarcy
