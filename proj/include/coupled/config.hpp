#ifndef COUPLED_CONFIG_HPP
#define COUPLED_CONFIG_HPP

#include "coupled/bvp.hpp"
#include "coupled/oracle.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace coupled::config {

using json = nlohmann::ordered_json;

/// Invalid or missing configuration entry; `key()` names the offending key.
class ConfigError : public std::runtime_error
{
public:
   ConfigError(std::string key, const std::string &what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
   const std::string &key() const { return key_; }
private:
   std::string key_;
};

enum class Mode { validate, solve_abstract, solve_bvp, verify_conditions, verify_oracle };

const char *to_string(Mode m);
Mode parse_mode(const std::string &name);

struct RunConfig
{
   Mode mode = Mode::solve_bvp;
   json problem;
   double tol = 1e-10;
   std::size_t max_iter = 1000;
   std::uint64_t seed = 0;
   std::size_t sample_count = 1000;
   std::string output_dir = ".";
};

/// Reads common keys (tol, max_iter, seed, sample_count) and keeps the whole
/// document as the mode-specific problem description.
RunConfig parse_run_config(Mode mode, const json &doc);

json load_json_file(const std::string &path);

double number(const json &j, const std::string &key);
double number_or(const json &j, const std::string &key, double fallback);

/// Built-in scalar fields f(t, u):
///   affine          {a, c}                  a u + c
///   sin_forced      {a, amplitude, frequency}  a u + amplitude sin(2 pi frequency t)
///   tanh_perturbed  {a, b, c}               a u + b tanh(u) + c
ScalarField scalar_field(const json &j, const std::string &key, std::string *name = nullptr);

PointwiseMap pointwise_map(const json &j, const std::string &key);

AlteringDistance altering_distance(const json &j, const std::string &key);

/// Builds a BvpSpec from keys T, lambda1, lambda2, mu1, mu2, N, quadrature,
/// f, h and optional G.
BvpSpec bvp_spec(const json &doc);

/// A grid function from a number (constant) or an array of N+1 values.
GridFunction grid_function(const json &doc, const std::string &key, std::size_t intervals);

oracle::FiniteProblem finite_problem(const json &j, const std::string &key);

} // namespace coupled::config

#endif
