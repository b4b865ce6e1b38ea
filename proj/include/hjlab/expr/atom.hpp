#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hjlab {

class Expr;

enum class AtomKind : std::uint8_t {
  coordinate,
  velocity,
  momentum,
  parameter,
  time_parameter,
  // exp(arg) for a polynomial arg; used for lattice link variables.
  exponential,
};

std::string_view to_string(AtomKind kind);

/// Lattice multi-index; empty for mechanics atoms.
using Site = std::vector<int>;

/// Handle to an interned symbol. Atoms are process-wide and immutable once
/// declared; the id encodes declaration order, which drives term ordering.
class Atom {
 public:
  using Id = std::uint32_t;

  /// Returns the existing atom for (name, kind, site) or declares a new one.
  static Atom intern(std::string_view name, AtomKind kind, const Site& site = {});
  /// Declares exp(arg). Re-interning the same name/site with another arg throws.
  static Atom exponential(std::string_view name, const Site& site, const Expr& arg);
  /// All atoms whose display() equals `display`, in declaration order.
  static std::vector<Atom> lookup(std::string_view display);
  static Atom from_id(Id id);
  /// Links two atoms as a complex-conjugate pair (metadata only).
  static void link_conjugates(Atom a, Atom b);

  Id id() const { return id_; }
  const std::string& name() const;
  AtomKind kind() const;
  const Site& site() const;
  /// name plus "[i,j]" when the atom carries a site.
  const std::string& display() const;
  /// Argument of an exponential atom; nullptr otherwise.
  const Expr* exponent_argument() const;
  std::optional<Atom> conjugate() const;
  /// Parameters and exponentials may carry negative exponents.
  bool invertible() const {
    auto k = kind();
    return k == AtomKind::parameter || k == AtomKind::exponential;
  }

  friend bool operator==(Atom a, Atom b) { return a.id_ == b.id_; }
  friend auto operator<=>(Atom a, Atom b) { return a.id_ <=> b.id_; }

 private:
  explicit Atom(Id id) : id_(id) {}
  Id id_;
};

}  // namespace hjlab
