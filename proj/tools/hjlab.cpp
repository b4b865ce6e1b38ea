// hjlab: Hamilton-Jacobi analysis of singular Lagrangians and the lattice
// Chern-Simons-Higgs model.
//
// exit codes: 0 ok, 1 input/parse/config error, 2 engine error, 3 verify mismatch,
//             4 net charge on the torus, 5 non-finite field

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "hjlab/cs/verify.hpp"
#include "hjlab/dsl/parser.hpp"
#include "hjlab/hj/report.hpp"
#include "hjlab/integrator/config.hpp"

using namespace hjlab;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 1, kEngine = 2, kMismatch = 3, kNetCharge = 4, kNonFinite = 5 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to `path`, or stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void print_parse_error(const std::string& file, const dsl::ParseError& e) {
  std::cerr << file << ":" << e.line << ":" << e.column << ": " << to_string(e.kind) << ": " << e.message << "\n";
  if (!e.snippet.empty()) {
    std::cerr << "  " << e.snippet << "\n  " << std::string(static_cast<std::size_t>(std::max(0, e.column - 1)), ' ')
              << "^\n";
  }
}

int cmd_analyze(const std::string& file, const std::string& format, const std::string& out) {
  std::string source;
  try {
    source = read_file(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  SystemSpec spec;
  try {
    spec = dsl::parse(source);
  } catch (const dsl::ParseError& e) {
    print_parse_error(file, e);
    return kInput;
  }
  spec.name = std::filesystem::path(file).stem().string();
  try {
    auto a = hj::analyze(spec);
    emit(out, format == "json" ? hj::render_json(a) + "\n" : hj::render_text(a));
  } catch (const NonConstantPivotUndecidable& e) {
    std::cerr << "engine error: " << e.what() << "\n  pivot: " << e.pivot.str() << "\n";
    return kEngine;
  } catch (const std::exception& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kEngine;
  }
  return kOk;
}

int cmd_verify(int N, double e, const std::string& format, std::uint64_t seed, int states) {
  cs::LatticeConfig cfg;
  cfg.N = N;
  cfg.e = e;
  std::optional<cs::VerifyReport> verified;
  cs::RhsAgreement agree;
  try {
    verified = cs::verify_lattice(cfg);
    agree = cs::compare_with_rhs(*verified, states, seed);
  } catch (const std::exception& ex) {
    std::cerr << "engine error: " << ex.what() << "\n";
    return kEngine;
  }
  const auto& report = *verified;
  const double rhs_tolerance = 1e-12;
  bool rhs_ok = agree.max_abs_diff < rhs_tolerance;
  const auto& c = report.census;

  if (format == "json") {
    json items = json::array();
    for (const auto& it : report.items) {
      json j = {{"name", it.name}, {"pass", it.pass}};
      if (!it.pass) {
        j["got"] = it.got;
        j["want"] = it.want;
      }
      items.push_back(j);
    }
    json j = {{"N", N},
              {"e", e},
              {"items", items},
              {"census",
               {{"primary", c.primary},
                {"secondary", c.secondary},
                {"fixes_differential", c.fixes_differential},
                {"generates_constraint", c.generates_constraint},
                {"identically_zero", c.identically_zero}}},
              {"rhs_agreement", {{"states", agree.states}, {"max_abs_diff", agree.max_abs_diff}, {"pass", rhs_ok}}},
              {"report", json::parse(hj::render_json(report.analysis))}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "verify-cs N=" << N << " e=" << e << " (" << N * N << " sites)\n";
    for (const auto& it : report.items) std::cout << (it.pass ? "PASS " : "FAIL ") << it.name << "\n";
    std::cout << (rhs_ok ? "PASS " : "FAIL ") << "engine EOM vs rhs at " << agree.states
              << " random states: max |diff| = " << agree.max_abs_diff << "\n";
    std::cout << "census: " << c.primary << " primary, " << c.secondary << " secondary; " << c.generates_constraint
              << " generate constraints, " << c.fixes_differential << " fix differentials, " << c.identically_zero
              << " identically zero\n";
  }
  for (const auto& it : report.items) {
    if (!it.pass) {
      std::cerr << "first mismatch in '" << it.name << "':\n  got:  " << it.got << "\n  want: " << it.want << "\n";
      return kMismatch;
    }
  }
  if (!rhs_ok) {
    std::cerr << "engine EOM and rhs differ by " << agree.max_abs_diff << " in " << agree.worst << "\n";
    return kMismatch;
  }
  return kOk;
}

json drift_json(const integrator::Drift& d) {
  return {{"energy_rel", d.energy},
          {"charge_rel", d.charge},
          {"gauss_max", d.gauss},
          {"gauss_initial", d.gauss_initial},
          {"current_div_max", d.current_div}};
}

// Runs `body` and maps simulation exceptions to exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const integrator::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInput;
  } catch (const cs::NetChargeOnTorus& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNetCharge;
  } catch (const integrator::NonFiniteField& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonFinite;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEngine;
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  return guarded([&] {
    auto c = integrator::load_config(config_path);
    auto state = cs::init_gauss_consistent(c.lattice, c.packet);
    auto a0 = integrator::make_a0(c.lattice, c.a0_mode);

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "monitors.csv");
    if (!csv) throw std::runtime_error("cannot write into " + out_dir);
    integrator::write_monitor_csv_header(csv);
    auto result = integrator::run(c.lattice, state, c.run, a0,
                                  [&](const integrator::Monitors& m) { integrator::write_monitor_csv_row(csv, m); });
    csv.close();

    const auto& last = result.series.back();
    json summary = {{"config", json::parse(integrator::to_json(c))},
                    {"rows", result.series.size()},
                    {"t_final", last.t},
                    {"final", {{"gauss_res", last.gauss_res}, {"charge", last.charge}, {"energy", last.energy},
                               {"current_div_res", last.current_div_res}}},
                    {"charge_scale", result.charge_scale},
                    {"drift", drift_json(integrator::drift_of(result))}};
    emit((std::filesystem::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    std::ofstream snapshot(std::filesystem::path(out_dir) / "final_state.csv");
    cs::write_snapshot_csv(snapshot, c.lattice, result.final_state);
    std::cout << "wrote " << result.series.size() << " monitor rows to " << out_dir << "\n";
    return kOk;
  });
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k] / x.size();
    my += y[k] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

int cmd_convergence(const std::string& config_path, std::vector<double> dts, double T, const std::string& out) {
  return guarded([&] {
    auto c = integrator::load_config(config_path);
    if (dts.empty()) dts = c.dt_list;
    if (T <= 0) T = c.run.dt * c.run.steps;
    auto state = cs::init_gauss_consistent(c.lattice, c.packet);
    auto table = integrator::convergence_study(c.lattice, state, T, dts, integrator::make_a0(c.lattice, c.a0_mode));

    std::vector<double> logdt, loge, logg, logc;
    json rows = json::array();
    std::ostringstream text;
    text << "dt,energy_drift,gauss_max,current_div_max\n";
    text.precision(6);
    for (const auto& r : table.rows) {
      rows.push_back({{"dt", r.dt}, {"drift", drift_json(r.drift)}});
      text << r.dt << "," << r.drift.energy << "," << r.drift.gauss << "," << r.drift.current_div << "\n";
      logdt.push_back(std::log(r.dt));
      loge.push_back(std::log(r.drift.energy));
      logg.push_back(std::log(r.drift.gauss));
      logc.push_back(std::log(r.drift.current_div));
    }
    json fits = {{"energy", {{"pairs", table.energy_orders}, {"least_squares", least_squares_slope(logdt, loge)}}},
                 {"gauss", {{"pairs", table.gauss_orders}, {"least_squares", least_squares_slope(logdt, logg)}}},
                 {"current_div",
                  {{"pairs", table.current_div_orders}, {"least_squares", least_squares_slope(logdt, logc)}}}};
    text << "energy order (least squares): " << fits["energy"]["least_squares"].get<double>() << "\n";
    std::cerr << text.str();
    json j = {{"T", T}, {"config", json::parse(integrator::to_json(c))}, {"rows", rows}, {"orders", fits}};
    emit(out, j.dump(2) + "\n");
    return kOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi constraint analysis and lattice Chern-Simons-Higgs simulation"};
  app.require_subcommand(1);

  std::string file, format = "text", out;
  auto* analyze = app.add_subcommand("analyze", "Analyze a .hjl system description");
  analyze->add_option("file", file, ".hjl file")->required();
  analyze->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--out", out, "write the report here instead of stdout");

  int N = 2;
  double e = 0.5;
  std::uint64_t seed = 1;
  int states = 10;
  auto* verify = app.add_subcommand("verify-cs", "Check the engine against the hand-derived lattice CS forms");
  verify->add_option("N", N, "lattice size (2 or 3)")->required();
  verify->add_option("--e", e, "gauge coupling");
  verify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--seed", seed, "seed for the random rhs comparison states");
  verify->add_option("--states", states, "number of random states")->check(CLI::PositiveNumber);

  std::string config, out_dir = "out";
  auto* simulate = app.add_subcommand("simulate", "Run the lattice simulation from a JSON config");
  simulate->add_option("config", config, "config JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "output directory (monitors.csv, summary.json, final_state.csv)");

  std::vector<double> dts;
  double T = 0;
  auto* convergence = app.add_subcommand("convergence", "Time-step convergence study");
  convergence->add_option("config", config, "config JSON")->required()->check(CLI::ExistingFile);
  convergence->add_option("--dt", dts, "time steps, each half the previous (default: config dt_list)");
  convergence->add_option("--T", T, "final time (default: run.dt * run.steps)");
  convergence->add_option("--out", out, "write the JSON table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kOk : kInput;
  }

  if (*analyze) return cmd_analyze(file, format, out);
  if (*verify) return cmd_verify(N, e, format, seed, states);
  if (*simulate) return cmd_simulate(config, out_dir);
  return cmd_convergence(config, dts, T, out);
}
