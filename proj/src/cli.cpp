#include "coupled/cli.hpp"

#include "coupled/bvp.hpp"
#include "coupled/config.hpp"
#include "coupled/oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace coupled {

namespace {

namespace fs = std::filesystem;
using config::ConfigError;
using config::json;
using config::Mode;
using config::RunConfig;

struct Outcome
{
   json report = json::object();
   std::optional<std::string> trace_csv;
   bool violations = false;
};

void write_atomic(const fs::path &path, const std::string &content)
{
   fs::path tmp = path;
   tmp += ".tmp";
   {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
      out << content;
      if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
   }
   fs::rename(tmp, path);
}

json violation_json(const std::string &subject, const Violation &v)
{
   json j{{"subject", subject}, {"property", v.property}, {"witness", v.witness}, {"margin", v.margin}};
   if (!v.values.empty()) j["values"] = v.values;
   return j;
}

void append_report(Outcome &out, const ValidationReport &rep)
{
   for (const auto &v : rep.violations) out.report["violations"].push_back(violation_json(rep.subject, v));
   json check{{"subject", rep.subject}, {"checked", rep.checked}, {"skipped", rep.skipped},
              {"violations", rep.violations.size()}, {"inconclusive", rep.inconclusive}};
   if (!rep.notes.empty()) check["notes"] = rep.notes;
   out.report["checks"].push_back(check);
   if (!rep.passed()) out.violations = true;
}

template <class P>
void append_contraction(Outcome &out, const CoupledProblem<P> &pb, const ContractionCheck<P> &cc,
                        const std::string &subject)
{
   const auto bad = cc.violations();
   const auto &sp = pb.space;
   for (const auto &w : bad)
   {
      out.report["violations"].push_back(
          {{"subject", subject},
           {"property", "contraction"},
           {"witness", "x=" + sp.show(w.x) + ", y=" + sp.show(w.y) + ", u=" + sp.show(w.u) + ", v=" + sp.show(w.v)},
           {"margin", w.margin},
           {"values", {w.max_distance, w.lhs, w.rhs}}});
   }
   out.report["checks"].push_back({{"subject", subject},
                                   {"checked", cc.eligible},
                                   {"skipped", cc.skipped},
                                   {"violations", bad.size()},
                                   {"inconclusive", cc.inconclusive}});
   if (!bad.empty()) out.violations = true;
}

void init_report(Outcome &out, Mode mode)
{
   out.report["mode"] = config::to_string(mode);
   out.report["status"] = nullptr;
   out.report["iterations"] = 0;
   out.report["residuals"] = nullptr;
   out.report["violations"] = json::array();
}

template <class P>
void record_run(Outcome &out, const CoincidenceResult<P> &r)
{
   out.report["status"] = to_string(r.status);
   out.report["iterations"] = r.iterations;
   out.report["residuals"] = {{"Gx", r.residuals.Gx}, {"Gy", r.residuals.Gy}, {"Sx", r.residuals.Sx},
                              {"Sy", r.residuals.Sy}};
   out.report["trace_path"] = "trace.csv";
   out.report["chain_violations"] = r.chain_violations.size();
   if (!r.chain_violations.empty())
      out.report["first_chain_violation"] = {{"n", r.chain_violations.front().n},
                                             {"relation", r.chain_violations.front().relation}};
   if (!r.note.empty()) out.report["note"] = r.note;
   std::ostringstream os;
   write_trace_csv(os, r);
   out.trace_csv = os.str();
}

void finish_verifier_status(Outcome &out)
{
   out.report["status"] = out.violations ? "violations" : "passed";
}

// ---- validate ---------------------------------------------------------------

std::vector<double> default_altering_grid()
{
   std::vector<double> g{0.0};
   for (int k = -8; k <= 2; ++k)
      for (double m : {1.0, 2.0, 5.0}) g.push_back(m * std::pow(10.0, k));
   return g;
}

Outcome run_validate(const RunConfig &rc)
{
   Outcome out;
   init_report(out, rc.mode);
   const json &doc = rc.problem;

   std::vector<double> grid = default_altering_grid();
   if (doc.contains("grid"))
   {
      try
      {
         grid = doc.at("grid").get<std::vector<double>>();
      }
      catch (const json::exception &)
      {
         throw ConfigError("grid", "expected an array of numbers");
      }
   }

   std::vector<AlteringDistance> fns;
   if (doc.contains("altering_distances"))
   {
      const auto &arr = doc.at("altering_distances");
      if (!arr.is_array()) throw ConfigError("altering_distances", "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i)
         fns.push_back(config::altering_distance(arr[i], "altering_distances[" + std::to_string(i) + "]"));
   }
   else
   {
      fns = {altering::square(), altering::square_minus_log()};
   }
   for (const auto &f : fns)
   {
      try
      {
         append_report(out, validate_altering_distance(f, grid));
      }
      catch (const PreconditionError &e)
      {
         throw ConfigError("grid", e.what());
      }
   }

   if (doc.contains("space"))
   {
      const auto &sp = doc.at("space");
      if (!sp.is_object() || !sp.contains("kind") || !sp.at("kind").is_string())
         throw ConfigError("space.kind", "missing or not a string");
      const std::string kind = sp.at("kind").get<std::string>();
      const double samples = config::number_or(sp, "samples", 60);
      if (samples < 3) throw ConfigError("space.samples", "must be at least 3");
      const auto n = static_cast<std::size_t>(samples);
      if (kind == "real_line")
      {
         const double range = config::number_or(sp, "range", 10.0);
         append_report(out, check_metric_order_axioms(real_line(-range, range), n, rc.seed));
      }
      else if (kind == "grid_functions")
      {
         const double N = config::number_or(sp, "N", 50);
         if (N < 1) throw ConfigError("space.N", "must be at least 1");
         append_report(out, check_metric_order_axioms(
                                grid_function_space(static_cast<std::size_t>(N), config::number_or(sp, "T", 1.0)),
                                n, rc.seed));
      }
      else
      {
         throw ConfigError("space.kind", "unknown space '" + kind + "'");
      }
   }
   finish_verifier_status(out);
   return out;
}

// ---- solve-abstract ---------------------------------------------------------

CoupledProblem<double> linear_problem(const json &doc)
{
   const auto &p = doc.at("problem");
   const double a = config::number_or(p, "a", 0.0);
   const double b = config::number_or(p, "b", 0.0);
   const double c = config::number_or(p, "c", 0.0);
   const double range = config::number_or(p, "range", 10.0);
   const PointwiseMap G = config::pointwise_map(doc, "G");
   const PointwiseMap S = config::pointwise_map(doc, "S");
   CoupledProblem<double> pb;
   pb.space = real_line(-range, range);
   pb.F = [a, b, c](double x, double y) { return a * x + b * y + c; };
   pb.G = G.forward;
   pb.S = S.forward;
   pb.G_preimage = G.inverse;
   pb.S_preimage = S.inverse;
   return pb;
}

std::array<double, 4> real_start(const json &doc)
{
   if (!doc.contains("start")) throw ConfigError("start", "missing");
   const auto &s = doc.at("start");
   if (!s.is_array() || s.size() != 4) throw ConfigError("start", "expected [x0, y0, x1, y1]");
   std::array<double, 4> out{};
   for (std::size_t i = 0; i < 4; ++i)
   {
      if (!s[i].is_number()) throw ConfigError("start", "entries must be numbers");
      out[i] = s[i].get<double>();
   }
   return out;
}

std::array<int, 4> finite_start(const json &doc, const oracle::FiniteProblem &fp)
{
   if (!doc.contains("start")) throw ConfigError("start", "missing");
   const auto &s = doc.at("start");
   if (!s.is_array() || s.size() != 4) throw ConfigError("start", "expected [x0, y0, x1, y1]");
   std::array<int, 4> out{};
   for (std::size_t i = 0; i < 4; ++i)
   {
      if (s[i].is_number_integer())
      {
         out[i] = s[i].get<int>();
         if (out[i] < 0 || static_cast<std::size_t>(out[i]) >= fp.size())
            throw ConfigError("start", "point index out of range");
      }
      else if (s[i].is_string())
      {
         const auto it = std::find(fp.labels.begin(), fp.labels.end(), s[i].get<std::string>());
         if (it == fp.labels.end()) throw ConfigError("start", "unknown point label");
         out[i] = static_cast<int>(it - fp.labels.begin());
      }
      else
      {
         throw ConfigError("start", "entries must be point indices or labels");
      }
   }
   return out;
}

bool want_checks(const json &doc)
{
   if (!doc.contains("checks")) return false;
   if (!doc.at("checks").is_boolean()) throw ConfigError("checks", "expected a boolean");
   return doc.at("checks").get<bool>();
}

AlteringDistance altering_or(const json &doc, const std::string &key, AlteringDistance fallback)
{
   return doc.contains(key) ? config::altering_distance(doc, key) : fallback;
}

template <class P>
void abstract_checks(Outcome &out, const RunConfig &rc, const CoupledProblem<P> &pb)
{
   const json &doc = rc.problem;
   const auto phi = altering_or(doc, "phi", altering::square());
   const auto psi = altering_or(doc, "psi", altering::square_minus_log());
   append_report(out, check_mixed_GS_monotone(pb, rc.sample_count, rc.seed));
   append_contraction(out, pb, check_contraction(pb, phi, psi, rc.sample_count, rc.seed),
                      "contraction with phi=" + phi.name + ", psi=" + psi.name);
   append_report(out, check_commutation(pb, rc.sample_count, rc.seed, kAxiomTol));
}

Outcome run_solve_abstract(const RunConfig &rc)
{
   Outcome out;
   init_report(out, rc.mode);
   const json &doc = rc.problem;
   if (!doc.contains("problem") || !doc.at("problem").is_object()) throw ConfigError("problem", "missing object");
   const auto &p = doc.at("problem");
   if (!p.contains("kind") || !p.at("kind").is_string()) throw ConfigError("problem.kind", "missing or not a string");
   const std::string kind = p.at("kind").get<std::string>();
   const bool checks = want_checks(doc);

   if (kind == "linear")
   {
      const auto pb = linear_problem(doc);
      const auto s = real_start(doc);
      const auto r = run(pb, init_iteration(pb, s[0], s[1], s[2], s[3]), rc.tol, rc.max_iter);
      record_run(out, r);
      out.report["alpha"] = r.alpha;
      out.report["alpha_prime"] = r.alpha_prime;
      if (checks) abstract_checks(out, rc, pb);
   }
   else if (kind == "finite")
   {
      const auto fp = config::finite_problem(doc, "problem");
      const auto pb = oracle::as_coupled_problem(fp);
      const auto s = finite_start(doc, fp);
      const auto r = run(pb, init_iteration(pb, s[0], s[1], s[2], s[3]), rc.tol, rc.max_iter);
      record_run(out, r);
      out.report["alpha"] = fp.labels[r.alpha];
      out.report["alpha_prime"] = fp.labels[r.alpha_prime];

      // Cross-check against brute-force enumeration of F(x,y) = w, F(y,x) = w'
      // with w = G(x) = S(x'') for some preimages.
      bool member = false;
      for (int x = 0; x < static_cast<int>(fp.size()); ++x)
         for (int y = 0; y < static_cast<int>(fp.size()); ++y)
            if (fp.G[x] == r.alpha && fp.G[y] == r.alpha_prime && fp.F[x][y] == fp.G[x] && fp.F[y][x] == fp.G[y])
               member = true;
      out.report["limit_in_coincidence_set"] = member;
      if (checks)
      {
         append_report(out, oracle::check_mixed_monotone_exhaustive(fp));
         abstract_checks(out, rc, pb);
      }
   }
   else
   {
      throw ConfigError("problem.kind", "unknown problem '" + kind + "'");
   }
   return out;
}

// ---- solve-bvp --------------------------------------------------------------

void record_solution(Outcome &out, const BvpSolution &sol)
{
   record_run(out, sol.run);
   out.report["u"] = sol.u.values;
   out.report["residual"] = sol.residual.max_residual;
   out.report["periodicity_gap"] = sol.residual.periodicity_gap;
   out.report["warnings"] = sol.warnings;
}

Outcome run_solve_bvp(const RunConfig &rc)
{
   Outcome out;
   init_report(out, rc.mode);
   const BvpSpec spec = config::bvp_spec(rc.problem);
   const auto alpha = config::grid_function(rc.problem, "alpha", spec.intervals);
   const auto beta = config::grid_function(rc.problem, "beta", spec.intervals);
   record_solution(out, solve_bvp(spec, alpha, beta, rc.tol, rc.max_iter));
   return out;
}

// ---- verify-conditions ------------------------------------------------------

ValidationReport kernel_sign_check(const BvpSpec &spec, std::size_t count, std::uint64_t seed)
{
   const KernelPair kp = make_kernels(spec);
   ValidationReport rep;
   rep.subject = "kernel signs";
   Rng rng(seed);
   for (std::size_t i = 0; i < count; ++i)
   {
      const double t = uniform(rng, 0.0, spec.period);
      const double s = uniform(rng, 0.0, spec.period);
      const double k1 = kp.k1(t, s), k2 = kp.k2(t, s);
      const std::string wit = "t=" + format_real(t) + ", s=" + format_real(s);
      ++rep.checked;
      if (k1 < -kAxiomTol) rep.add("k1 >= 0", wit, k1, {t, s, k1});
      if (k1 + k2 < -kAxiomTol) rep.add("k1 + k2 >= 0", wit, k1 + k2, {t, s, k1 + k2});
      if (k1 - k2 < -kAxiomTol) rep.add("k1 - k2 >= 0", wit, k1 - k2, {t, s, k1 - k2});
   }
   return rep;
}

Outcome run_verify_conditions(const RunConfig &rc)
{
   Outcome out;
   init_report(out, rc.mode);
   const json &doc = rc.problem;
   const BvpSpec spec = config::bvp_spec(doc);
   const double range = config::number_or(doc, "value_range", 10.0);
   if (!(range > 0.0)) throw ConfigError("value_range", "must be positive");
   out.report["im_ratio"] = im_ratio(spec);
   append_report(out, check_growth_conditions(spec, rc.sample_count, rc.seed, range));
   append_report(out, kernel_sign_check(spec, std::min<std::size_t>(rc.sample_count, 10000), rc.seed));

   const bool has_pair = doc.contains("alpha") || doc.contains("beta");
   std::shared_ptr<const KernelWeights> kw;
   if (has_pair || want_checks(doc))
      kw = std::make_shared<const KernelWeights>(discretize(make_kernels(spec), spec.intervals, spec.quadrature));
   if (has_pair)
   {
      const auto alpha = config::grid_function(doc, "alpha", spec.intervals);
      const auto beta = config::grid_function(doc, "beta", spec.intervals);
      append_report(out, verify_lower_upper(spec, *kw, alpha, beta));
   }
   if (want_checks(doc))
   {
      // Operator-level checks sample grid functions; they are costly, so the
      // sample count is capped separately.
      RunConfig sub = rc;
      sub.sample_count = static_cast<std::size_t>(config::number_or(doc, "operator_samples", 200));
      if (sub.sample_count == 0) throw ConfigError("operator_samples", "must be positive");
      const auto pb = make_bvp_problem(spec, kw);
      const auto phi = altering_or(doc, "phi", altering::square());
      const auto psi = altering_or(doc, "psi", altering::square_minus_log());
      append_report(out, check_mixed_GS_monotone(pb, sub.sample_count, rc.seed));
      append_contraction(out, pb, check_contraction(pb, phi, psi, sub.sample_count, rc.seed),
                         "contraction with phi=" + phi.name + ", psi=" + psi.name);
   }
   finish_verifier_status(out);
   return out;
}

// ---- verify-oracle ----------------------------------------------------------

Outcome run_verify_oracle(const RunConfig &rc)
{
   Outcome out;
   init_report(out, rc.mode);
   const json &doc = rc.problem;
   const BvpSpec spec = config::bvp_spec(doc);
   const auto alpha = config::grid_function(doc, "alpha", spec.intervals);
   const auto beta = config::grid_function(doc, "beta", spec.intervals);
   const BvpSolution sol = solve_bvp(spec, alpha, beta, rc.tol, rc.max_iter);
   record_solution(out, sol);

   const double steps = config::number_or(doc, "oracle_steps", 10000);
   if (steps < 1) throw ConfigError("oracle_steps", "must be at least 1");
   double lo = *std::min_element(alpha.values.begin(), alpha.values.end()) - 1.0;
   double hi = *std::max_element(beta.values.begin(), beta.values.end()) + 1.0;
   if (doc.contains("oracle_bracket"))
   {
      const auto &b = doc.at("oracle_bracket");
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
         throw ConfigError("oracle_bracket", "expected [lo, hi]");
      lo = b[0].get<double>();
      hi = b[1].get<double>();
   }
   const auto f = spec.f, h = spec.h;
   oracle::PeriodicSolution ref;
   try
   {
      ref = oracle::solve_periodic_ode([f, h](double t, double u) { return f(t, u) + h(t, u); }, spec.period,
                                       static_cast<std::size_t>(steps), lo, hi, spec.intervals);
   }
   catch (const std::invalid_argument &e)
   {
      throw ConfigError("oracle_bracket", e.what());
   }

   double diff = 0.0;
   for (std::size_t i = 0; i < sol.u.size(); ++i) diff = std::max(diff, std::abs(sol.u[i] - ref.trajectory[i]));
   const double hstep = spec.period / static_cast<double>(spec.intervals);
   const double tolerance = std::max(1e-5, 10.0 * hstep * hstep);
   out.report["oracle"] = {{"max_abs_diff", diff},
                           {"tolerance", tolerance},
                           {"u0", ref.u0},
                           {"bisection_steps", ref.bisection_steps}};
   if (!(diff <= tolerance))
   {
      out.report["violations"].push_back({{"subject", "oracle agreement"},
                                          {"property", "sup |u - u_oracle| <= tolerance"},
                                          {"witness", "N=" + std::to_string(spec.intervals)},
                                          {"margin", tolerance - diff}});
      out.violations = true;
   }
   return out;
}

Outcome dispatch(const RunConfig &rc)
{
   switch (rc.mode)
   {
      case Mode::validate: return run_validate(rc);
      case Mode::solve_abstract: return run_solve_abstract(rc);
      case Mode::solve_bvp: return run_solve_bvp(rc);
      case Mode::verify_conditions: return run_verify_conditions(rc);
      case Mode::verify_oracle: return run_verify_oracle(rc);
   }
   throw std::logic_error("unhandled mode");
}

int execute(Mode mode, const std::string &config_path, const std::string &out_dir,
            std::optional<long long> seed)
{
   const auto start = std::chrono::steady_clock::now();
   RunConfig rc = config::parse_run_config(mode, config::load_json_file(config_path));
   if (seed)
   {
      if (*seed < 0) throw ConfigError("seed", "must be non-negative");
      rc.seed = static_cast<std::uint64_t>(*seed);
   }
   rc.output_dir = out_dir;

   Outcome out = dispatch(rc);
   const double elapsed =
       std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
   out.report["seed"] = rc.seed;
   out.report["timing"] = {{"elapsed_ms", elapsed}};

   const fs::path dir(rc.output_dir);
   fs::create_directories(dir);
   if (out.trace_csv) write_atomic(dir / "trace.csv", *out.trace_csv);
   write_atomic(dir / "report.json", out.report.dump(2) + "\n");

   std::cout << config::to_string(mode) << ": " << out.report["status"].get<std::string>();
   if (out.trace_csv) std::cout << " after " << out.report["iterations"].get<std::size_t>() << " iterations";
   std::cout << ", " << out.report["violations"].size() << " violation(s)\n";
   return out.violations ? exit_violations : exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string> &args)
{
   CLI::App app{"Coupled coincidence point iteration and periodic BVP solver", "coupled-point"};
   app.require_subcommand(1);

   std::string config_path;
   std::string out_dir = ".";
   std::optional<long long> seed;
   const auto add = [&](Mode m, const std::string &help) {
      auto *sub = app.add_subcommand(config::to_string(m), help);
      sub->add_option("--config", config_path, "JSON configuration file")->required();
      sub->add_option("--out", out_dir, "Output directory for report.json and trace.csv");
      sub->add_option("--seed", seed, "Override the sampling seed");
      return sub;
   };
   std::vector<std::pair<CLI::App *, Mode>> subs{
       {add(Mode::validate, "Check altering distances and metric/order axioms"), Mode::validate},
       {add(Mode::solve_abstract, "Run the coupled iteration on an abstract problem"), Mode::solve_abstract},
       {add(Mode::solve_bvp, "Solve the periodic boundary value problem"), Mode::solve_bvp},
       {add(Mode::verify_conditions, "Check growth, kernel and lower/upper conditions"), Mode::verify_conditions},
       {add(Mode::verify_oracle, "Compare the solver against the shooting oracle"), Mode::verify_oracle},
   };

   std::vector<std::string> reversed(args.rbegin(), args.rend());
   try
   {
      app.parse(reversed);
   }
   catch (const CLI::ParseError &e)
   {
      const int code = app.exit(e);
      return code == 0 ? exit_ok : exit_error;
   }

   try
   {
      for (const auto &[sub, mode] : subs)
         if (sub->parsed()) return execute(mode, config_path, out_dir, seed);
      return exit_error;
   }
   catch (const std::exception &e)
   {
      std::cerr << "coupled-point: error: " << e.what() << "\n";
      return exit_error;
   }
}

int run_cli(int argc, char **argv)
{
   std::vector<std::string> args;
   for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
   return run_cli(args);
}

} // namespace coupled
