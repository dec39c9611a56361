#pragma once

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "saa/problem.hpp"

namespace saa {

struct NoiseSpec {
  enum class Family { none, pareto, student_t };
  Family family = Family::none;
  double tail_index = 0.0;  // pareto
  double dof = 0.0;         // student_t
  double scale = 1.0;       // factor = 1 + scale (X - 1) resp. 1 + scale T
};

// Fine population grid backing ground-truth minima for instances without
// closed forms (d <= 3, box hard sets). min bounds are certified: the true
// minimum over X_gamma lies in [lo, hi].
class GridTruth {
 public:
  GridTruth(const StochasticProgram& program, const std::vector<std::function<double(const Vec&)>>& f,
            const std::vector<double>& lip, int points_per_axis);

  MinBounds min_relaxed(double gamma) const;  // throws Errc::empty_set
  Vec argmin_relaxed(double gamma) const;     // grid argmin over the exact set
  double cover() const { return cover_; }
  double mesh() const { return mesh_; }

 private:
  Vec point(long long idx) const;
  Vec lo_, hi_;
  std::vector<int> counts_;
  double mesh_ = 0.0, cover_ = 0.0;
  std::vector<std::vector<double>> vals_;  // [i][point]
  std::vector<double> lip_;
};

struct InstanceDescriptor {
  int schema_version = 1;
  std::string name;
  int dimension = 1;
  int m = 0;
  ConvexBody hard_set = ConvexBody::box(Vec::Zero(1), Vec::Ones(1));
  std::string loss_family;          // objective family: affine|quadratic|norm|max_affine
  std::vector<NoiseSpec> noise;     // size m+1
  double relaxation = 0.0;
  nlohmann::json params;            // family coefficients + constraint list
};

struct Instance {
  std::string id;
  StochasticProgram program;
  PopulationOracle oracle;
  std::shared_ptr<const GridTruth> grid_truth;  // null for closed-form oracles
  nlohmann::json descriptor_json;
};

InstanceDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json descriptor_to_json(const InstanceDescriptor& d);
InstanceDescriptor load_descriptor(const std::string& path);

// Builds program + oracle from a descriptor. Ground-truth minima come from a
// population grid unless the caller patches closed forms afterwards.
Instance make_instance(const InstanceDescriptor& d);

// Registry of analytic reference instances (closed-form oracles).
//   thm3-fixed-1d, thm4-exterior-1d, thm5-scq-1d, cor4-interior-1d, locdemo-2d
Instance builtin_instance(const std::string& name);
std::vector<std::string> builtin_instance_names();

// "builtin:<name>" or a descriptor file path.
Instance load_instance(const std::string& ref);

// Random grid-verifiable convex instances for the deterministic-theorem
// soundness experiment. The mode cycles through the theorem/corollary shapes.
struct SoundnessInstance {
  Instance instance;
  std::string mode;       // c0 | c1c2c3 | exterior | interior-solution | interior-scq
  Vec interior_point;     // strictly feasible, margin below
  double interior_margin = 0.0;
};
SoundnessInstance make_soundness_instance(std::uint64_t seed, std::uint64_t index);

}  // namespace saa
