#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorid/plant.hpp"
#include "rotorid/spectral.hpp"

namespace rotorid {

enum class ModelMatrix { M, F, G, H, J, Tau };

/// Location of one scalar in the model. Tau entries use col = input index, row = 0.
struct EntryRef {
  ModelMatrix matrix;
  Eigen::Index row = 0;
  Eigen::Index col = 0;

  /// "F13" style (1-based), "F(10,2)" beyond single digits, "tau1" for delays.
  std::string name() const;
  static EntryRef parse(const std::string& name);
  friend bool operator==(const EntryRef&, const EntryRef&) = default;
};

/// A priori model structure: every entry of M, F, G, H, J and tau is either
/// Fixed at its value or Free starting from it.
class ModelStructure {
 public:
  /// All entries Fixed at `base`; then `free` entries become Free starting from base values.
  ModelStructure(const LinearPlantModel& base, std::vector<EntryRef> free);

  const LinearPlantModel& base() const { return base_; }
  const std::vector<EntryRef>& free_entries() const { return free_; }
  std::size_t n_free() const { return free_.size(); }
  std::vector<std::string> parameter_names() const;
  Eigen::VectorXd initial() const;
  bool is_free(const EntryRef& e) const;

  /// Fixed entries from the base, Free entries from params.
  LinearPlantModel extract_model(const Eigen::VectorXd& params) const;
  /// Same structure, new starting point.
  ModelStructure with_initial(const Eigen::VectorXd& params) const;

 private:
  LinearPlantModel base_;
  std::vector<EntryRef> free_;
};

/// T(jw) = H (jwM - F)^-1 G + J, column u scaled by exp(-j w tau_u). One n_y x n_u matrix per w.
/// Throws (Numerical) naming w if jwM - F is singular.
std::vector<Eigen::MatrixXcd> model_frf(const LinearPlantModel& model, const std::vector<double>& omega);
std::vector<Eigen::MatrixXcd> model_frf(const ModelStructure& s, const Eigen::VectorXd& params,
                                        const std::vector<double>& omega);

struct FrfPair {
  FrequencyResponse frf;  // frf.input / frf.output name the model channels
  double omega_lo = 0.0;
  double omega_hi = std::numeric_limits<double>::infinity();
};

struct FrfDataset {
  std::vector<FrfPair> pairs;
};

struct CostWeights {
  double W_g = 1.0;       // per dB^2
  double W_p = 0.01745;   // per deg^2
  double coherence_floor = 0.6;
};

/// [1.58 (1 - exp(-g2))]^2
double coherence_weight(double gamma2);

struct CostResult {
  double total = 0.0;
  std::vector<double> per_pair;
};

/// J = (1 / n_pairs) sum_pairs (20 / n_w) sum_w W_coh [W_g dMag^2 + W_p dPhase^2],
/// dPhase wrapped to (-180, 180]. Throws (Data) if a pair has no usable point.
CostResult cost(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                const CostWeights& w = {});

/// Residual vector whose squared norm is the cost, in (pair, point, [mag, phase]) order.
Eigen::VectorXd residuals(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                          const CostWeights& w = {});

/// Forward-difference Jacobian of residuals(); central differences when `central`.
Eigen::MatrixXd residual_jacobian(const ModelStructure& s, const Eigen::VectorXd& params,
                                  const FrfDataset& data, const CostWeights& w, bool central = false);

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-8;
  double cost_tolerance = 1e-10;
  int multistart = 8;
  std::uint64_t seed = 1;
  /// Optional box constraints per free parameter, applied by projection.
  std::vector<double> lower, upper;
};

struct FitReport {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd initial;
  double cost = 0.0;
  std::vector<double> pair_costs;
  std::vector<std::string> pair_labels;  // "input->output"
  int iterations = 0;
  int best_start = 0;
  bool converged = false;
  std::string termination;
};

/// Levenberg-Marquardt on residuals() with a forward-difference Jacobian. Start 0
/// is the structure's initial point; further starts scale each parameter by a
/// log-uniform factor in [0.5, 1.5]. Lowest cost wins, ties to the earlier start.
FitReport fit(const ModelStructure& s, const FrfDataset& data, const CostWeights& w = {},
              const FitOptions& opt = {});

/// Every +-rel single-parameter perturbation strictly increases the cost.
bool is_local_minimum(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                      const CostWeights& w = {}, double rel = 0.01);

/// Analytic FRF of a model on a grid, coherence 1, as one pair per (input, output).
FrfDataset synthesize_dataset(const LinearPlantModel& model, const std::vector<double>& omega);

std::string fit_report_text(const ModelStructure& s, const FitReport& r);
/// Columns: parameter,value,initial,status. Lists every entry; status is fixed or free.
std::string fit_report_csv(const ModelStructure& s, const FitReport& r);
/// Rebuilds the fitted model from fit_report_csv output on top of the structure's base.
LinearPlantModel model_from_fit_csv(const ModelStructure& s, const std::string& csv);

}  // namespace rotorid
