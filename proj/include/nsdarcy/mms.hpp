#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nsdarcy/fem.hpp"
#include "nsdarcy/forms.hpp"
#include "nsdarcy/state.hpp"

namespace nsdarcy {

/// Data of a coupled boundary value problem: volume forcings and the
/// essential traces on the outer boundaries.
class CoupledProblem {
 public:
  virtual ~CoupledProblem() = default;
  virtual std::array<double, 2> fluid_forcing(Point2 x) const = 0;
  virtual double porous_source(Point2 x) const = 0;
  virtual std::array<double, 2> velocity_trace(Point2 x) const = 0;
  virtual double head_trace(Point2 x) const = 0;
};

/// Problem with no forcing and homogeneous traces.
class ZeroProblem final : public CoupledProblem {
 public:
  std::array<double, 2> fluid_forcing(Point2) const override { return {0.0, 0.0}; }
  double porous_source(Point2) const override { return 0.0; }
  std::array<double, 2> velocity_trace(Point2) const override { return {0.0, 0.0}; }
  double head_trace(Point2) const override { return 0.0; }
};

/// The closed-form test solution on (0,1)x(0,2):
///   u = cos^2(pi y / 2) sin(pi x / 2)
///   v = -cos(pi x / 2) (sin(pi y) / 4 + pi y / 4)
///   p = (pi / 4) cos(pi x / 2) (y - 1 - cos(pi y))
///   phi = (pi y / 4) cos(pi x / 2)
/// with f_f = -nu lap u + grad p + rho (u . grad) u and f_p = -(K/n) lap phi.
/// The interface conditions hold exactly only when every parameter is 1.
class ManufacturedProblem final : public CoupledProblem {
 public:
  explicit ManufacturedProblem(ModelParams params = {});

  const ModelParams& params() const noexcept { return params_; }

  std::array<double, 2> velocity(Point2 x) const;
  /// grad[c] = gradient of velocity component c.
  std::array<std::array<double, 2>, 2> velocity_grad(Point2 x) const;
  std::array<double, 2> velocity_laplacian(Point2 x) const;
  double pressure(Point2 x) const;
  std::array<double, 2> pressure_grad(Point2 x) const;
  double head(Point2 x) const;
  std::array<double, 2> head_grad(Point2 x) const;
  double head_laplacian(Point2 x) const;

  FieldSample velocity_sample(Point2 x) const;
  FieldSample head_sample(Point2 x) const;

  std::array<double, 2> fluid_forcing(Point2 x) const override;
  double porous_source(Point2 x) const override;
  std::array<double, 2> velocity_trace(Point2 x) const override { return velocity(x); }
  double head_trace(Point2 x) const override { return head(x); }

 private:
  ModelParams params_;
};

ManufacturedProblem manufactured_problem(const ModelParams& params);

enum class Variable { Phi, U, V, P };
enum class Norm { L2, H1 };

inline constexpr std::array<Variable, 4> kVariables{Variable::Phi, Variable::U, Variable::V, Variable::P};

std::string to_string(Variable v);
std::string to_string(Norm n);

/// L2 and H1-seminorm errors of (phi, u, v) and the L2 error of p.
struct ErrorReport {
  int level = 0;
  int n = 0;
  std::string stage;  // "fe", "intermediate", "final"
  std::string algorithm;
  double phi_l2 = 0.0, phi_h1 = 0.0;
  double u_l2 = 0.0, u_h1 = 0.0;
  double v_l2 = 0.0, v_h1 = 0.0;
  double p_l2 = 0.0;

  double h() const { return 1.0 / n; }
  /// Throws std::invalid_argument for (P, H1).
  double get(Variable var, Norm norm) const;
};

/// Energy-norm member of a variable: H1 seminorm, L2 for the pressure.
Norm energy_norm(Variable v);

ErrorReport error_norms(const CoupledState& state, const ManufacturedProblem& mms, int quad_degree = 8);

/// Errors of each field alone. Fields on other meshes are not accepted.
double l2_error(const DiscreteField& field, int component, const ScalarFunction& exact, int quad_degree = 8);
double h1_error(const DiscreteField& field, int component,
                const std::function<std::array<double, 2>(Point2)>& exact_grad, int quad_degree = 8);

struct ConvergenceTable {
  std::vector<ErrorReport> reports;
  /// rates[i] is the rate between reports[i-1] and reports[i]; rates[0] is empty.
  std::vector<std::optional<ErrorReport>> rates;

  std::optional<double> rate(std::size_t row, Variable var, Norm norm) const;
};

/// Observed rates log(e_{i-1}/e_i) / log(h_{i-1}/h_i). Throws InsufficientData
/// for fewer than two reports or repeated meshes.
ConvergenceTable rate_table(std::vector<ErrorReport> reports);

}  // namespace nsdarcy
