// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/smarts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "synthkit/errors.hpp"

namespace synthkit {

// ---------------------------------------------------------------------------
// Query helpers

namespace {

template <typename F>
void for_each_conjunct(const AtomQuery &q, F &&f) {
  if (q.kind == AtomQuery::Kind::kAnd) {
    for (const AtomQuery &c : q.children) for_each_conjunct(c, f);
  } else {
    f(q);
  }
}

}  // namespace

std::optional<int> AtomQuery::pinned_element() const {
  std::optional<int> out;
  for_each_conjunct(*this, [&](const AtomQuery &q) {
    if (q.kind == Kind::kElement) out = q.value;
  });
  return out;
}

std::optional<bool> AtomQuery::pinned_aromatic() const {
  std::optional<bool> out;
  for_each_conjunct(*this, [&](const AtomQuery &q) {
    if (q.kind == Kind::kElement && q.aromatic_spec != 2) out = q.aromatic_spec == 1;
    if (q.kind == Kind::kAromatic) out = true;
    if (q.kind == Kind::kAliphatic) out = false;
  });
  return out;
}

std::optional<int> AtomQuery::pinned_charge() const {
  std::optional<int> out;
  for_each_conjunct(*this, [&](const AtomQuery &q) {
    if (q.kind == Kind::kCharge) out = q.value;
  });
  return out;
}

std::optional<int> AtomQuery::pinned_hydrogens() const {
  std::optional<int> out;
  for_each_conjunct(*this, [&](const AtomQuery &q) {
    if (q.kind == Kind::kHydrogens) out = q.value;
  });
  return out;
}

std::optional<BondOrder> BondQuery::pinned_order() const {
  switch (kind) {
    case Kind::kSingle: return BondOrder::kSingle;
    case Kind::kDouble: return BondOrder::kDouble;
    case Kind::kTriple: return BondOrder::kTriple;
    case Kind::kAromatic: return BondOrder::kAromatic;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Pattern

Pattern::Pattern(std::vector<PatternAtom> atoms, std::vector<PatternBond> bonds, std::string text)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), text_(std::move(text)) {
  const int n = static_cast<int>(atoms_.size());
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    adj[static_cast<std::size_t>(bonds_[i].a)].push_back({bonds_[i].b, static_cast<int>(i)});
    adj[static_cast<std::size_t>(bonds_[i].b)].push_back({bonds_[i].a, static_cast<int>(i)});
  }
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  for (int root = 0; root < n; ++root) {
    if (position[static_cast<std::size_t>(root)] >= 0) continue;
    ++num_components_;
    std::size_t head = order_.size();
    position[static_cast<std::size_t>(root)] = static_cast<int>(order_.size());
    order_.push_back(root);
    parent_.push_back(-1);
    while (head < order_.size()) {
      const int u = order_[head++];
      for (const auto &[v, bond] : adj[static_cast<std::size_t>(u)]) {
        if (position[static_cast<std::size_t>(v)] >= 0) continue;
        position[static_cast<std::size_t>(v)] = static_cast<int>(order_.size());
        order_.push_back(v);
        parent_.push_back(u);
      }
    }
  }
  back_.resize(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const int u = order_[k];
    for (const auto &[v, bond] : adj[static_cast<std::size_t>(u)])
      if (position[static_cast<std::size_t>(v)] < static_cast<int>(k)) back_[k].push_back({v, bond});
  }
}

int Pattern::atom_with_map(int map) const noexcept {
  if (map == 0) return -1;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].atom_map == map) return static_cast<int>(i);
  return -1;
}

int Pattern::bond_between(int a, int b) const noexcept {
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    const PatternBond &pb = bonds_[i];
    if ((pb.a == a && pb.b == b) || (pb.a == b && pb.b == a)) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class SmartsParser {
 public:
  explicit SmartsParser(std::string_view text) : text_(text) {}

  Pattern parse() {
    if (text_.empty()) throw SyntaxError("empty SMARTS", 0);
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0 || pending_) throw SyntaxError("branch without a preceding atom", pos_);
        branches_.push_back(prev_);
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) throw SyntaxError("unbalanced ')'", pos_);
        if (pending_) throw SyntaxError("bond before ')'", pos_);
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_ || prev_ < 0 || !branches_.empty())
          throw SyntaxError("misplaced '.'", pos_);
        prev_ = -1;
        ++pos_;
      } else if (c == '[') {
        add_atom(read_bracket());
      } else if (is_digit(c) || c == '%') {
        read_ring_closure();
      } else if (is_bond_char(c)) {
        if (prev_ < 0) throw SyntaxError("bond without a preceding atom", pos_);
        if (pending_) throw SyntaxError("consecutive bond expressions", pos_);
        pending_ = read_bond_expr();
      } else {
        add_atom(read_bare());
      }
    }
    if (!branches_.empty()) throw SyntaxError("unclosed branch", text_.size());
    if (pending_) throw SyntaxError("dangling bond", text_.size());
    if (!rings_.empty()) throw SyntaxError("unclosed ring", rings_.begin()->second.position);
    if (prev_ < 0) throw SyntaxError("SMARTS ends with '.'", text_.size());
    std::map<int, int> seen;
    for (const PatternAtom &a : atoms_) {
      if (a.atom_map && seen[a.atom_map]++) throw SyntaxError("duplicate atom map :" + std::to_string(a.atom_map), 0);
    }
    return Pattern(std::move(atoms_), std::move(bonds_), std::string(text_));
  }

 private:
  struct RingOpen {
    int atom;
    std::optional<BondQuery> query;
    std::size_t position;
  };

  static bool is_bond_char(char c) {
    switch (c) {
      case '-': case '=': case '#': case ':': case '~': case '@': case '/': case '\\':
      case '!': case '&': case ',': case ';':
        return true;
      default:
        return false;
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  int read_number() {
    int value = 0;
    while (!at_end() && is_digit(text_[pos_])) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 100000) throw SyntaxError("number too large", pos_);
      ++pos_;
    }
    return value;
  }

  void add_atom(PatternAtom atom) {
    const int index = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(atom));
    if (prev_ >= 0) connect(prev_, index, pending_ ? *pending_ : BondQuery{});
    pending_.reset();
    prev_ = index;
  }

  void connect(int a, int b, BondQuery q) {
    for (const PatternBond &pb : bonds_)
      if ((pb.a == a && pb.b == b) || (pb.a == b && pb.b == a)) throw SyntaxError("duplicate bond", pos_);
    bonds_.push_back({a, b, std::move(q)});
  }

  void read_ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) throw SyntaxError("ring closure without a preceding atom", pos_);
    int number;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2]))
        throw SyntaxError("malformed '%' ring closure", pos_);
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_++] - '0';
    }
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = {prev_, pending_, start};
      pending_.reset();
      return;
    }
    RingOpen open = it->second;
    rings_.erase(it);
    BondQuery q = pending_ ? *pending_ : (open.query ? *open.query : BondQuery{});
    pending_.reset();
    if (open.atom == prev_) throw SyntaxError("ring closure to the same atom", start);
    connect(open.atom, prev_, std::move(q));
  }

  PatternAtom read_bare() {
    const char c = text_[pos_];
    PatternAtom atom;
    auto element = [&](int z, int arom, std::size_t len) {
      atom.query.kind = AtomQuery::Kind::kElement;
      atom.query.value = z;
      atom.query.aromatic_spec = arom;
      pos_ += len;
    };
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') { element(17, 0, 2); return atom; }
    if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') { element(35, 0, 2); return atom; }
    switch (c) {
      case 'B': element(5, 0, 1); break;
      case 'C': element(6, 0, 1); break;
      case 'N': element(7, 0, 1); break;
      case 'O': element(8, 0, 1); break;
      case 'P': element(15, 0, 1); break;
      case 'S': element(16, 0, 1); break;
      case 'F': element(9, 0, 1); break;
      case 'I': element(53, 0, 1); break;
      case 'b': element(5, 1, 1); break;
      case 'c': element(6, 1, 1); break;
      case 'n': element(7, 1, 1); break;
      case 'o': element(8, 1, 1); break;
      case 'p': element(15, 1, 1); break;
      case 's': element(16, 1, 1); break;
      case '*': atom.query.kind = AtomQuery::Kind::kTrue; ++pos_; break;
      case 'A': atom.query.kind = AtomQuery::Kind::kAliphatic; ++pos_; break;
      case 'a': atom.query.kind = AtomQuery::Kind::kAromatic; ++pos_; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
    return atom;
  }

  PatternAtom read_bracket() {
    const std::size_t open = pos_++;
    PatternAtom atom;
    // "[H]", "[H+]" and friends denote a hydrogen atom rather than a count.
    if (peek() == 'H' && pos_ + 1 < text_.size() &&
        (text_[pos_ + 1] == ']' || text_[pos_ + 1] == '+' || text_[pos_ + 1] == '-' ||
         text_[pos_ + 1] == ':')) {
      ++pos_;
      atom.query.kind = AtomQuery::Kind::kElement;
      atom.query.value = 1;
      atom.query.aromatic_spec = 0;
      if (peek() == '+' || peek() == '-') {
        AtomQuery both;
        both.kind = AtomQuery::Kind::kAnd;
        both.children.push_back(atom.query);
        both.children.push_back(read_primitive());
        atom.query = std::move(both);
      }
    } else {
      atom.query = read_low();
    }
    if (peek() == ':') {
      ++pos_;
      if (!is_digit(peek())) throw SyntaxError("malformed atom map", pos_);
      atom.atom_map = read_number();
    }
    if (peek() != ']') {
      if (at_end()) throw SyntaxError("unterminated bracket atom", open);
      throw SyntaxError(std::string("unexpected character '") + peek() + "' in bracket atom", pos_);
    }
    ++pos_;
    return atom;
  }

  static AtomQuery combine(AtomQuery::Kind kind, std::vector<AtomQuery> parts) {
    if (parts.size() == 1) return std::move(parts.front());
    AtomQuery q;
    q.kind = kind;
    q.children = std::move(parts);
    return q;
  }

  AtomQuery read_low() {
    std::vector<AtomQuery> parts{read_or()};
    while (peek() == ';') {
      ++pos_;
      parts.push_back(read_or());
    }
    return combine(AtomQuery::Kind::kAnd, std::move(parts));
  }

  AtomQuery read_or() {
    std::vector<AtomQuery> parts{read_high()};
    while (peek() == ',') {
      ++pos_;
      parts.push_back(read_high());
    }
    return combine(AtomQuery::Kind::kOr, std::move(parts));
  }

  AtomQuery read_high() {
    std::vector<AtomQuery> parts{read_unary()};
    for (;;) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
        parts.push_back(read_unary());
      } else if (c == '\0' || c == ']' || c == ';' || c == ',' || c == ':' || c == ')') {
        break;
      } else {
        parts.push_back(read_unary());
      }
    }
    return combine(AtomQuery::Kind::kAnd, std::move(parts));
  }

  AtomQuery read_unary() {
    if (peek() == '!') {
      ++pos_;
      AtomQuery q;
      q.kind = AtomQuery::Kind::kNot;
      q.children.push_back(read_unary());
      return q;
    }
    return read_primitive();
  }

  AtomQuery read_primitive() {
    if (at_end()) throw SyntaxError("unterminated bracket atom", pos_);
    const std::size_t start = pos_;
    const char c = text_[pos_];
    AtomQuery q;
    auto count_after = [&](int fallback) { return is_digit(peek()) ? read_number() : fallback; };
    if (is_digit(c)) {
      q.kind = AtomQuery::Kind::kIsotope;
      q.value = read_number();
      return q;
    }
    switch (c) {
      case '*': ++pos_; q.kind = AtomQuery::Kind::kTrue; return q;
      case 'a': ++pos_; q.kind = AtomQuery::Kind::kAromatic; return q;
      case 'A':
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            elements::atomic_number(text_.substr(pos_, 2)))
          break;
        ++pos_;
        q.kind = AtomQuery::Kind::kAliphatic;
        return q;
      case '#':
        ++pos_;
        if (!is_digit(peek())) throw SyntaxError("'#' needs an atomic number", pos_);
        q.kind = AtomQuery::Kind::kElement;
        q.value = read_number();
        q.aromatic_spec = 2;
        if (q.value < 1 || q.value > 118) throw SyntaxError("atomic number out of range", start);
        return q;
      case 'H':
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            elements::atomic_number(text_.substr(pos_, 2)))
          break;
        ++pos_;
        q.kind = AtomQuery::Kind::kHydrogens;
        q.value = count_after(1);
        return q;
      case 'D':
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            elements::atomic_number(text_.substr(pos_, 2)))
          break;
        ++pos_;
        q.kind = AtomQuery::Kind::kDegree;
        q.value = count_after(1);
        return q;
      case 'X':
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            elements::atomic_number(text_.substr(pos_, 2)))
          break;
        ++pos_;
        q.kind = AtomQuery::Kind::kConnectivity;
        q.value = count_after(1);
        return q;
      case 'R':
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            elements::atomic_number(text_.substr(pos_, 2)))
          break;
        ++pos_;
        q.kind = AtomQuery::Kind::kInRing;
        if (is_digit(peek())) {
          const int n = read_number();
          if (n != 0) throw UnsupportedFeature("R" + std::to_string(n));
          q.value = 0;
        } else {
          q.value = 1;
        }
        return q;
      case '+':
      case '-': {
        ++pos_;
        int magnitude = 1;
        if (is_digit(peek())) {
          magnitude = read_number();
        } else {
          while (peek() == c) {
            ++magnitude;
            ++pos_;
          }
        }
        q.kind = AtomQuery::Kind::kCharge;
        q.value = c == '+' ? magnitude : -magnitude;
        return q;
      }
      case '@':
        ++pos_;
        if (peek() == '@') ++pos_;
        q.kind = AtomQuery::Kind::kTrue;
        return q;
      case '$': {
        ++pos_;
        if (peek() != '(') throw SyntaxError("expected '(' after '$'", pos_);
        const std::size_t body = ++pos_;
        int depth = 1;
        while (!at_end() && depth > 0) {
          if (text_[pos_] == '(') ++depth;
          if (text_[pos_] == ')') --depth;
          ++pos_;
        }
        if (depth) throw SyntaxError("unterminated recursive SMARTS", start);
        auto inner = std::make_shared<Pattern>(SmartsParser(text_.substr(body, pos_ - 1 - body)).parse());
        if (inner->num_components() != 1) throw UnsupportedFeature("disconnected recursive SMARTS");
        q.kind = AtomQuery::Kind::kRecursive;
        q.recursive = std::move(inner);
        return q;
      }
      case 'h': case 'v': case 'x': case 'r': case '^': case 'z': case 'Z':
        throw UnsupportedFeature(std::string(1, c));
      default:
        break;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::pair<std::string_view, int> kAromatic[] = {
          {"se", 34}, {"as", 33}, {"te", 52}, {"b", 5}, {"c", 6},
          {"n", 7},   {"o", 8},   {"p", 15},  {"s", 16}};
      for (const auto &[sym, z] : kAromatic) {
        if (text_.substr(pos_, sym.size()) == sym) {
          pos_ += sym.size();
          q.kind = AtomQuery::Kind::kElement;
          q.value = z;
          q.aromatic_spec = 1;
          return q;
        }
      }
      throw SyntaxError(std::string("unknown primitive '") + c + "'", pos_);
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      int z = 0;
      std::size_t len = 1;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        z = elements::atomic_number(text_.substr(pos_, 2));
        len = 2;
      }
      if (!z) {
        z = elements::atomic_number(text_.substr(pos_, 1));
        len = 1;
      }
      if (!z) throw SyntaxError(std::string("unknown primitive '") + c + "'", pos_);
      pos_ += len;
      q.kind = AtomQuery::Kind::kElement;
      q.value = z;
      q.aromatic_spec = 0;
      return q;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  // Bond expressions use the same precedence as atom expressions.
  BondQuery read_bond_expr() { return read_bond_low(); }

  static BondQuery combine_bonds(BondQuery::Kind kind, std::vector<BondQuery> parts) {
    if (parts.size() == 1) return std::move(parts.front());
    BondQuery q;
    q.kind = kind;
    q.children = std::move(parts);
    return q;
  }

  BondQuery read_bond_low() {
    std::vector<BondQuery> parts{read_bond_or()};
    while (peek() == ';') {
      ++pos_;
      parts.push_back(read_bond_or());
    }
    return combine_bonds(BondQuery::Kind::kAnd, std::move(parts));
  }

  BondQuery read_bond_or() {
    std::vector<BondQuery> parts{read_bond_high()};
    while (peek() == ',') {
      ++pos_;
      parts.push_back(read_bond_high());
    }
    return combine_bonds(BondQuery::Kind::kOr, std::move(parts));
  }

  BondQuery read_bond_high() {
    std::vector<BondQuery> parts{read_bond_unary()};
    for (;;) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
        parts.push_back(read_bond_unary());
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!' ||
                 c == '/' || c == '\\') {
        parts.push_back(read_bond_unary());
      } else {
        break;
      }
    }
    return combine_bonds(BondQuery::Kind::kAnd, std::move(parts));
  }

  BondQuery read_bond_unary() {
    BondQuery q;
    const char c = peek();
    switch (c) {
      case '!':
        ++pos_;
        q.kind = BondQuery::Kind::kNot;
        q.children.push_back(read_bond_unary());
        return q;
      case '-': case '/': case '\\': q.kind = BondQuery::Kind::kSingle; break;
      case '=': q.kind = BondQuery::Kind::kDouble; break;
      case '#': q.kind = BondQuery::Kind::kTriple; break;
      case ':': q.kind = BondQuery::Kind::kAromatic; break;
      case '~': q.kind = BondQuery::Kind::kAny; break;
      case '@': q.kind = BondQuery::Kind::kRing; break;
      default:
        throw SyntaxError("malformed bond expression", pos_);
    }
    ++pos_;
    return q;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<PatternAtom> atoms_;
  std::vector<PatternBond> bonds_;
  std::map<int, RingOpen> rings_;
  std::vector<int> branches_;
  std::optional<BondQuery> pending_;
  int prev_ = -1;
};

// ---------------------------------------------------------------------------
// Matching

class Matcher {
 public:
  explicit Matcher(const Molecule &mol) : mol_(mol) {
    hydrogens_.resize(mol.num_atoms());
    for (std::size_t i = 0; i < mol.num_atoms(); ++i) {
      int h = mol.atoms()[i].hydrogens;
      for (const Neighbor &nb : mol.neighbors(static_cast<int>(i))) h += mol.atom(nb.atom).element == 1;
      hydrogens_[i] = h;
    }
  }

  bool atom_ok(const AtomQuery &q, int atom) {
    const Atom &a = mol_.atom(atom);
    switch (q.kind) {
      case AtomQuery::Kind::kTrue: return true;
      case AtomQuery::Kind::kElement:
        return a.element == q.value && (q.aromatic_spec == 2 || a.aromatic == (q.aromatic_spec == 1));
      case AtomQuery::Kind::kAromatic: return a.aromatic;
      case AtomQuery::Kind::kAliphatic: return !a.aromatic;
      case AtomQuery::Kind::kHydrogens: return hydrogens_[static_cast<std::size_t>(atom)] == q.value;
      case AtomQuery::Kind::kDegree: return mol_.degree(atom) == q.value;
      case AtomQuery::Kind::kConnectivity: return mol_.degree(atom) + a.hydrogens == q.value;
      case AtomQuery::Kind::kCharge: return a.charge == q.value;
      case AtomQuery::Kind::kInRing: return mol_.in_ring(atom) == (q.value != 0);
      case AtomQuery::Kind::kIsotope: return a.isotope == q.value;
      case AtomQuery::Kind::kRecursive: return recursive_ok(*q.recursive, atom);
      case AtomQuery::Kind::kNot: return !atom_ok(q.children.front(), atom);
      case AtomQuery::Kind::kAnd:
        for (const AtomQuery &c : q.children)
          if (!atom_ok(c, atom)) return false;
        return true;
      case AtomQuery::Kind::kOr:
        for (const AtomQuery &c : q.children)
          if (atom_ok(c, atom)) return true;
        return false;
    }
    return false;
  }

  bool bond_ok(const BondQuery &q, int bond) const {
    const BondOrder order = mol_.bond(bond).order;
    switch (q.kind) {
      case BondQuery::Kind::kDefault: return order == BondOrder::kSingle || order == BondOrder::kAromatic;
      case BondQuery::Kind::kSingle: return order == BondOrder::kSingle;
      case BondQuery::Kind::kDouble: return order == BondOrder::kDouble;
      case BondQuery::Kind::kTriple: return order == BondOrder::kTriple;
      case BondQuery::Kind::kAromatic: return order == BondOrder::kAromatic;
      case BondQuery::Kind::kAny: return true;
      case BondQuery::Kind::kRing: return mol_.bond_in_ring(bond);
      case BondQuery::Kind::kNot: return !bond_ok(q.children.front(), bond);
      case BondQuery::Kind::kAnd:
        for (const BondQuery &c : q.children)
          if (!bond_ok(c, bond)) return false;
        return true;
      case BondQuery::Kind::kOr:
        for (const BondQuery &c : q.children)
          if (bond_ok(c, bond)) return true;
        return false;
    }
    return false;
  }

  /// Enumerates embeddings; `visit` returns false to stop early. `anchor`
  /// pins pattern atom 0 to a molecule atom.
  void search(const Pattern &p, int anchor, const std::function<bool(const std::vector<int> &)> &visit) {
    const std::size_t n = p.num_atoms();
    if (n == 0 || n > mol_.num_atoms()) return;
    State st{p, std::vector<int>(n, -1), std::vector<char>(mol_.num_atoms(), 0),
             std::vector<signed char>(n * mol_.num_atoms(), -1), anchor, visit, false};
    extend(st, 0);
  }

 private:
  struct State {
    const Pattern &p;
    std::vector<int> assignment;
    std::vector<char> used;
    std::vector<signed char> atom_cache;  // [pattern atom * N + mol atom]
    int anchor;
    const std::function<bool(const std::vector<int> &)> &visit;
    bool stop;
  };

  bool cached_atom_ok(State &st, int patom, int matom) {
    auto &slot = st.atom_cache[static_cast<std::size_t>(patom) * mol_.num_atoms() + static_cast<std::size_t>(matom)];
    if (slot < 0) slot = atom_ok(st.p.atom(patom).query, matom) ? 1 : 0;
    return slot == 1;
  }

  bool try_assign(State &st, std::size_t depth, int patom, int matom) {
    if (st.used[static_cast<std::size_t>(matom)]) return false;
    if (!cached_atom_ok(st, patom, matom)) return false;
    for (const auto &[other, pbond] : st.p.back_bonds()[depth]) {
      const int mb = mol_.bond_between(matom, st.assignment[static_cast<std::size_t>(other)]);
      if (mb < 0 || !bond_ok(st.p.bonds()[static_cast<std::size_t>(pbond)].query, mb)) return false;
    }
    return true;
  }

  void extend(State &st, std::size_t depth) {
    if (st.stop) return;
    if (depth == st.p.num_atoms()) {
      if (!st.visit(st.assignment)) st.stop = true;
      return;
    }
    const int patom = st.p.search_order()[depth];
    const int parent = st.p.search_parent()[depth];
    auto attempt = [&](int matom) {
      if (!try_assign(st, depth, patom, matom)) return;
      st.assignment[static_cast<std::size_t>(patom)] = matom;
      st.used[static_cast<std::size_t>(matom)] = 1;
      extend(st, depth + 1);
      st.used[static_cast<std::size_t>(matom)] = 0;
      st.assignment[static_cast<std::size_t>(patom)] = -1;
    };
    if (parent >= 0) {
      const int from = st.assignment[static_cast<std::size_t>(parent)];
      for (const Neighbor &nb : mol_.neighbors(from)) {
        attempt(nb.atom);
        if (st.stop) return;
      }
    } else if (depth == 0 && st.anchor >= 0) {
      attempt(st.anchor);
    } else {
      for (int m = 0; m < static_cast<int>(mol_.num_atoms()); ++m) {
        attempt(m);
        if (st.stop) return;
      }
    }
  }

  bool recursive_ok(const Pattern &p, int atom) {
    auto &memo = recursive_memo_[&p];
    if (memo.empty()) memo.assign(mol_.num_atoms(), -1);
    auto &slot = memo[static_cast<std::size_t>(atom)];
    if (slot < 0) {
      bool found = false;
      search(p, atom, [&](const std::vector<int> &) {
        found = true;
        return false;
      });
      slot = found ? 1 : 0;
    }
    return slot == 1;
  }

  const Molecule &mol_;
  std::vector<int> hydrogens_;
  std::unordered_map<const Pattern *, std::vector<signed char>> recursive_memo_;
};

}  // namespace

Pattern parse_smarts(std::string_view text) { return SmartsParser(text).parse(); }

bool atom_matches(const AtomQuery &query, const Molecule &mol, int atom) {
  return Matcher(mol).atom_ok(query, atom);
}

bool bond_matches(const BondQuery &query, const Molecule &mol, int bond) {
  return Matcher(mol).bond_ok(query, bond);
}

std::vector<Match> match_substructure(const Pattern &pattern, const Molecule &mol) {
  std::vector<Match> out;
  Matcher matcher(mol);
  matcher.search(pattern, -1, [&](const std::vector<int> &assignment) {
    out.push_back(Match{assignment, 0});
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool has_substructure(const Pattern &pattern, const Molecule &mol) {
  bool found = false;
  Matcher matcher(mol);
  matcher.search(pattern, -1, [&](const std::vector<int> &) {
    found = true;
    return false;
  });
  return found;
}

}  // namespace synthkit
