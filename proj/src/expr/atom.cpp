#include "hjlab/expr/atom.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <tuple>

#include "hjlab/expr/expr.hpp"

namespace hjlab {

std::string_view to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::coordinate: return "coordinate";
    case AtomKind::velocity: return "velocity";
    case AtomKind::momentum: return "momentum";
    case AtomKind::parameter: return "parameter";
    case AtomKind::time_parameter: return "time-parameter";
    case AtomKind::exponential: return "exponential";
  }
  return "unknown";
}

namespace {

struct AtomInfo {
  std::string name;
  AtomKind kind;
  Site site;
  std::string display;
  std::shared_ptr<const Expr> argument;
  std::optional<Atom::Id> conjugate;
};

struct Registry {
  std::mutex mutex;
  std::deque<AtomInfo> atoms;  // deque keeps references stable
  std::map<std::tuple<std::string, AtomKind, Site>, Atom::Id> index;
  std::multimap<std::string, Atom::Id> by_display;
};

Registry& registry() {
  static Registry r;
  return r;
}

std::string make_display(std::string_view name, const Site& site) {
  std::string out(name);
  if (!site.empty()) {
    out += '[';
    for (std::size_t i = 0; i < site.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(site[i]);
    }
    out += ']';
  }
  return out;
}

const AtomInfo& info(Atom::Id id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.atoms.at(id);
}

}  // namespace

Atom Atom::intern(std::string_view name, AtomKind kind, const Site& site) {
  if (kind == AtomKind::exponential) {
    throw std::invalid_argument("exponential atoms are declared with Atom::exponential");
  }
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto key = std::make_tuple(std::string(name), kind, site);
  if (auto it = r.index.find(key); it != r.index.end()) return Atom(it->second);
  auto id = static_cast<Id>(r.atoms.size());
  r.atoms.push_back({std::string(name), kind, site, make_display(name, site), nullptr, std::nullopt});
  r.index.emplace(std::move(key), id);
  r.by_display.emplace(r.atoms.back().display, id);
  return Atom(id);
}

Atom Atom::exponential(std::string_view name, const Site& site, const Expr& arg) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto key = std::make_tuple(std::string(name), AtomKind::exponential, site);
  if (auto it = r.index.find(key); it != r.index.end()) {
    if (!(*r.atoms[it->second].argument == arg)) {
      throw std::invalid_argument("exponential atom " + make_display(name, site) +
                                  " redeclared with a different argument");
    }
    return Atom(it->second);
  }
  auto id = static_cast<Id>(r.atoms.size());
  r.atoms.push_back({std::string(name), AtomKind::exponential, site, make_display(name, site),
                     std::make_shared<const Expr>(arg), std::nullopt});
  r.index.emplace(std::move(key), id);
  r.by_display.emplace(r.atoms.back().display, id);
  return Atom(id);
}

std::vector<Atom> Atom::lookup(std::string_view display) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<Atom> out;
  auto [lo, hi] = r.by_display.equal_range(std::string(display));
  for (auto it = lo; it != hi; ++it) out.push_back(Atom(it->second));
  std::sort(out.begin(), out.end());
  return out;
}

Atom Atom::from_id(Id id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  if (id >= r.atoms.size()) throw std::out_of_range("unknown atom id");
  return Atom(id);
}

void Atom::link_conjugates(Atom a, Atom b) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.atoms.at(a.id_).conjugate = b.id_;
  r.atoms.at(b.id_).conjugate = a.id_;
}

const std::string& Atom::name() const { return info(id_).name; }
AtomKind Atom::kind() const { return info(id_).kind; }
const Site& Atom::site() const { return info(id_).site; }
const std::string& Atom::display() const { return info(id_).display; }
const Expr* Atom::exponent_argument() const { return info(id_).argument.get(); }

std::optional<Atom> Atom::conjugate() const {
  auto c = info(id_).conjugate;
  if (!c) return std::nullopt;
  return Atom(*c);
}

}  // namespace hjlab
