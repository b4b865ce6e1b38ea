#include "hjlab/integrator/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hjlab/dsl/parser.hpp"

namespace hjlab::integrator {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  SimulationConfig c;
  read(j, "N", c.lattice.N);
  read(j, "h", c.lattice.h);
  read(j, "kappa", c.lattice.kappa);
  read(j, "e", c.lattice.e);
  read(j, "m", c.lattice.m);
  read(j, "a0_mode", c.a0_mode);
  read(j, "dt_list", c.dt_list);
  if (j.contains("packet")) {
    const auto& p = j.at("packet");
    read(p, "center", c.packet.center);
    read(p, "width", c.packet.width);
    read(p, "momentum", c.packet.momentum);
    read(p, "amplitude", c.packet.amplitude);
    read(p, "pair", c.packet.pair);
    read(p, "separation", c.packet.separation);
  }
  if (j.contains("run")) {
    const auto& r = j.at("run");
    read(r, "dt", c.run.dt);
    read(r, "steps", c.run.steps);
    read(r, "monitor_every", c.run.monitor_every);
  }
  try {
    c.lattice.validate();
    c.run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(c.packet.width > 0)) throw ConfigError("packet width must be positive");
  make_a0(c.lattice, c.a0_mode);  // reject bad modes early
  return c;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const SimulationConfig& c) {
  json j = {{"N", c.lattice.N},
            {"h", c.lattice.h},
            {"kappa", c.lattice.kappa},
            {"e", c.lattice.e},
            {"m", c.lattice.m},
            {"packet",
             {{"center", c.packet.center},
              {"width", c.packet.width},
              {"momentum", c.packet.momentum},
              {"amplitude", c.packet.amplitude},
              {"pair", c.packet.pair},
              {"separation", c.packet.separation}}},
            {"a0_mode", c.a0_mode},
            {"run", {{"dt", c.run.dt}, {"steps", c.run.steps}, {"monitor_every", c.run.monitor_every}}},
            {"dt_list", c.dt_list}};
  return j.dump(2);
}

A0Provider make_a0(const cs::LatticeConfig& lattice, const std::string& mode) {
  if (mode == "zero") return cs::zero_a0(lattice);
  if (mode.rfind("expr ", 0) != 0) throw ConfigError("a0_mode must be \"zero\" or \"expr <text>\", got \"" + mode + "\"");

  Atom x = Atom::intern("x", AtomKind::parameter), y = Atom::intern("y", AtomKind::parameter),
       t = Atom::intern("t", AtomKind::parameter);
  Expr e;
  try {
    e = dsl::parse_expression(mode.substr(5), {{"x", x}, {"y", y}, {"t", t}});
  } catch (const dsl::ParseError& err) {
    throw ConfigError("a0 expression: " + std::string(err.what()));
  }
  return [lattice, e, x, y, t](double time) {
    cs::RealField out(static_cast<std::size_t>(lattice.sites()));
    Assignment v{{t, time}};
    for (int i = 0; i < lattice.N; ++i) {
      for (int k = 0; k < lattice.N; ++k) {
        v[x] = i * lattice.h;
        v[y] = k * lattice.h;
        auto value = evaluate(e, v);
        if (std::abs(value.imag()) > 1e-12 * std::max(1.0, std::abs(value.real()))) {
          throw ConfigError("a0 expression must be real");
        }
        out[lattice.index(i, k)] = value.real();
      }
    }
    return out;
  };
}

}  // namespace hjlab::integrator
