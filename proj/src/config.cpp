#include "coupled/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace coupled::config {

const char *to_string(Mode m)
{
   switch (m)
   {
      case Mode::validate: return "validate";
      case Mode::solve_abstract: return "solve-abstract";
      case Mode::solve_bvp: return "solve-bvp";
      case Mode::verify_conditions: return "verify-conditions";
      case Mode::verify_oracle: return "verify-oracle";
   }
   return "?";
}

Mode parse_mode(const std::string &name)
{
   for (Mode m : {Mode::validate, Mode::solve_abstract, Mode::solve_bvp, Mode::verify_conditions,
                  Mode::verify_oracle})
      if (name == to_string(m)) return m;
   throw ConfigError("mode", "unrecognized mode '" + name + "'");
}

json load_json_file(const std::string &path)
{
   std::ifstream in(path);
   if (!in) throw ConfigError("config", "cannot read file '" + path + "'");
   try
   {
      return json::parse(in);
   }
   catch (const json::parse_error &e)
   {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
   }
}

double number(const json &j, const std::string &key)
{
   if (!j.is_object() || !j.contains(key)) throw ConfigError(key, "missing");
   const auto &v = j.at(key);
   if (!v.is_number()) throw ConfigError(key, "expected a number");
   const double d = v.get<double>();
   if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
   return d;
}

double number_or(const json &j, const std::string &key, double fallback)
{
   if (!j.is_object() || !j.contains(key)) return fallback;
   return number(j, key);
}

namespace {

std::size_t count(const json &j, const std::string &key, std::size_t fallback, std::size_t min_value)
{
   if (!j.contains(key)) return fallback;
   const auto &v = j.at(key);
   if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
      throw ConfigError(key, "expected an integer >= " + std::to_string(min_value));
   return static_cast<std::size_t>(v.get<long long>());
}

const json &object(const json &j, const std::string &key)
{
   if (!j.contains(key)) throw ConfigError(key, "missing");
   const auto &v = j.at(key);
   if (!v.is_object()) throw ConfigError(key, "expected an object");
   return v;
}

std::string kind(const json &obj, const std::string &key)
{
   if (!obj.contains("kind") || !obj.at("kind").is_string()) throw ConfigError(key + ".kind", "missing or not a string");
   return obj.at("kind").get<std::string>();
}

double param(const json &obj, const std::string &key, const std::string &name)
{
   try
   {
      return number(obj, name);
   }
   catch (const ConfigError &e)
   {
      throw ConfigError(key + "." + name, e.what());
   }
}

} // namespace

RunConfig parse_run_config(Mode mode, const json &doc)
{
   if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
   RunConfig rc;
   rc.mode = mode;
   rc.problem = doc;
   rc.tol = number_or(doc, "tol", rc.tol);
   if (!(rc.tol > 0.0)) throw ConfigError("tol", "must be positive");
   rc.max_iter = count(doc, "max_iter", rc.max_iter, 1);
   rc.sample_count = count(doc, "sample_count", rc.sample_count, 1);
   rc.seed = count(doc, "seed", 0, 0);
   return rc;
}

ScalarField scalar_field(const json &j, const std::string &key, std::string *name)
{
   const json &obj = object(j, key);
   const std::string k = kind(obj, key);
   if (name) *name = k;
   if (k == "affine")
   {
      const double a = param(obj, key, "a"), c = param(obj, key, "c");
      return [a, c](double, double u) { return a * u + c; };
   }
   if (k == "sin_forced")
   {
      const double a = param(obj, key, "a"), amp = param(obj, key, "amplitude");
      const double freq = param(obj, key, "frequency");
      return [a, amp, freq](double t, double u) {
         return a * u + amp * std::sin(2.0 * std::numbers::pi * freq * t);
      };
   }
   if (k == "tanh_perturbed")
   {
      const double a = param(obj, key, "a"), b = param(obj, key, "b"), c = param(obj, key, "c");
      return [a, b, c](double, double u) { return a * u + b * std::tanh(u) + c; };
   }
   throw ConfigError(key + ".kind", "unknown scalar field '" + k + "'");
}

PointwiseMap pointwise_map(const json &j, const std::string &key)
{
   if (!j.contains(key)) return identity_transform();
   const json &obj = object(j, key);
   const std::string k = kind(obj, key);
   if (k == "identity") return identity_transform();
   if (k == "scale")
   {
      const double f = param(obj, key, "factor");
      if (!(f > 0.0)) throw ConfigError(key + ".factor", "must be positive");
      return scale_transform(f);
   }
   throw ConfigError(key + ".kind", "unknown transform '" + k + "'");
}

AlteringDistance altering_distance(const json &j, const std::string &key)
{
   const json &obj = j.is_object() && j.contains("kind") ? j : object(j, key);
   const std::string k = kind(obj, key);
   if (k == "identity") return altering::identity();
   if (k == "square") return altering::square();
   if (k == "square_minus_log") return altering::square_minus_log();
   if (k == "scaled") return altering::scaled(param(obj, key, "factor"));
   if (k == "power") return altering::power(param(obj, key, "exponent"));
   if (k == "zero") return {"zero", [](double) { return 0.0; }};
   throw ConfigError(key + ".kind", "unknown altering distance '" + k + "'");
}

BvpSpec bvp_spec(const json &doc)
{
   BvpSpec s;
   s.period = number_or(doc, "T", 1.0);
   s.lambda1 = number(doc, "lambda1");
   s.lambda2 = number(doc, "lambda2");
   s.mu1 = number(doc, "mu1");
   s.mu2 = number(doc, "mu2");
   s.intervals = count(doc, "N", 200, 1);
   if (doc.contains("quadrature"))
   {
      if (!doc.at("quadrature").is_string()) throw ConfigError("quadrature", "expected a string");
      try
      {
         s.quadrature = parse_quadrature(doc.at("quadrature").get<std::string>());
      }
      catch (const PreconditionError &e)
      {
         throw ConfigError("quadrature", e.what());
      }
   }
   s.f = scalar_field(doc, "f", &s.f_name);
   s.h = scalar_field(doc, "h", &s.h_name);
   s.G = pointwise_map(doc, "G");
   try
   {
      validate_spec(s);
   }
   catch (const PreconditionError &e)
   {
      throw ConfigError("lambda1/lambda2/mu1/mu2/T/N", e.what());
   }
   return s;
}

GridFunction grid_function(const json &doc, const std::string &key, std::size_t intervals)
{
   if (!doc.contains(key)) throw ConfigError(key, "missing");
   const auto &v = doc.at(key);
   if (v.is_number()) return GridFunction::constant(intervals, v.get<double>());
   if (!v.is_array() || v.size() != intervals + 1)
      throw ConfigError(key, "expected a number or an array of N+1 = " + std::to_string(intervals + 1) + " values");
   GridFunction g;
   for (const auto &x : v)
   {
      if (!x.is_number()) throw ConfigError(key, "array entries must be numbers");
      g.values.push_back(x.get<double>());
   }
   return g;
}

oracle::FiniteProblem finite_problem(const json &j, const std::string &key)
{
   const json &obj = object(j, key);
   oracle::FiniteProblem p;
   p.name = obj.value("name", std::string("finite"));
   try
   {
      p.labels = obj.at("points").get<std::vector<std::string>>();
      p.leq = obj.at("leq").get<std::vector<std::vector<bool>>>();
      p.dist = obj.at("dist").get<std::vector<std::vector<double>>>();
      p.F = obj.at("F").get<std::vector<std::vector<int>>>();
      p.G = obj.at("G").get<std::vector<int>>();
      p.S = obj.at("S").get<std::vector<int>>();
   }
   catch (const json::exception &e)
   {
      throw ConfigError(key, std::string("malformed finite problem tables: ") + e.what());
   }
   const auto rep = oracle::validate_tables(p);
   if (!rep.passed())
      throw ConfigError(key, "tables violate " + rep.violations.front().property + " at " + rep.violations.front().witness);
   return p;
}

} // namespace coupled::config
