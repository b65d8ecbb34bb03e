// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/reaction.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "synthkit/errors.hpp"
#include "synthkit/smiles.hpp"

namespace synthkit {

namespace {

// Splits on '.' outside brackets and parentheses.
std::vector<std::string_view> split_components(std::string_view side, std::size_t offset) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < side.size(); ++i) {
    const char c = side[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == '.' && depth == 0) {
      if (i == start) throw SyntaxError("empty reaction component", offset + i);
      parts.push_back(side.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start >= side.size()) throw SyntaxError("empty reaction component", offset + side.size());
  parts.push_back(side.substr(start));
  return parts;
}

using AtomKey = std::pair<int, int>;  // (slot, molecule atom)

struct Assembly {
  std::vector<Atom> atoms;
  std::map<std::pair<int, int>, BondOrder> bonds;  // key has a < b
  std::map<AtomKey, int> from_reactant;

  void set_bond(int a, int b, BondOrder order) { bonds[std::minmax(a, b)] = order; }
  void drop_bond(int a, int b) { bonds.erase(std::minmax(a, b)); }
};

class ForwardApplier {
 public:
  ForwardApplier(const ReactionTemplate &tpl, const std::vector<const Molecule *> &reactants)
      : tpl_(tpl), reactants_(reactants) {
    for (std::size_t p = 0; p < tpl.product_patterns.size(); ++p) {
      const Pattern &pat = tpl.product_patterns[p];
      for (std::size_t i = 0; i < pat.num_atoms(); ++i)
        if (pat.atoms()[i].atom_map) product_maps_.insert(pat.atoms()[i].atom_map);
    }
  }

  std::vector<Product> run() {
    std::vector<std::vector<Match>> matches;
    for (std::size_t s = 0; s < tpl_.num_slots(); ++s) {
      matches.push_back(reactant_matches(tpl_, s, *reactants_[s]));
      if (matches.back().empty()) return {};
    }
    std::vector<const Match *> chosen(matches.size());
    enumerate(matches, chosen, 0);
    std::vector<Product> out;
    out.reserve(products_.size());
    for (auto &[smiles, mol] : products_) out.push_back({std::move(mol), smiles});
    return out;
  }

 private:
  void enumerate(const std::vector<std::vector<Match>> &matches, std::vector<const Match *> &chosen,
                 std::size_t slot) {
    if (slot == matches.size()) {
      build(chosen);
      return;
    }
    for (const Match &m : matches[slot]) {
      chosen[slot] = &m;
      enumerate(matches, chosen, slot + 1);
    }
  }

  void build(const std::vector<const Match *> &chosen) {
    const int nslots = static_cast<int>(chosen.size());
    // map number -> reactant atom; matched atoms per slot.
    std::map<int, AtomKey> mapped;
    std::vector<std::vector<char>> matched(static_cast<std::size_t>(nslots));
    for (int s = 0; s < nslots; ++s) {
      const Pattern &pat = tpl_.reactant_patterns[static_cast<std::size_t>(s)];
      const Molecule &mol = *reactants_[static_cast<std::size_t>(s)];
      matched[static_cast<std::size_t>(s)].assign(mol.num_atoms(), 0);
      const auto &assign = chosen[static_cast<std::size_t>(s)]->atom_assignment;
      for (std::size_t i = 0; i < assign.size(); ++i) {
        matched[static_cast<std::size_t>(s)][static_cast<std::size_t>(assign[i])] = 1;
        if (pat.atoms()[i].atom_map) mapped[pat.atoms()[i].atom_map] = {s, assign[i]};
      }
    }

    Assembly as;
    // Product pattern atoms first, in pattern order.
    std::vector<std::vector<int>> product_index(tpl_.product_patterns.size());
    std::vector<int> pinned_h_atoms;
    std::vector<int> created_atoms;
    for (std::size_t p = 0; p < tpl_.product_patterns.size(); ++p) {
      const Pattern &pat = tpl_.product_patterns[p];
      for (std::size_t i = 0; i < pat.num_atoms(); ++i) {
        const PatternAtom &pa = pat.atoms()[i];
        const int index = static_cast<int>(as.atoms.size());
        product_index[p].push_back(index);
        Atom atom;
        if (pa.atom_map) {
          const AtomKey key = mapped.at(pa.atom_map);
          atom = reactants_[static_cast<std::size_t>(key.first)]->atom(key.second);
          as.from_reactant[key] = index;
          if (auto z = pa.query.pinned_element(); z && *z != atom.element) {
            atom.element = *z;
            atom.aromatic = pa.query.pinned_aromatic().value_or(false);
          }
        } else {
          atom.element = *pa.query.pinned_element();
          atom.aromatic = pa.query.pinned_aromatic().value_or(false);
          atom.hydrogens = 0;
          created_atoms.push_back(index);
        }
        atom.atom_map = 0;
        if (auto q = pa.query.pinned_charge()) atom.charge = *q;
        if (auto h = pa.query.pinned_hydrogens()) {
          atom.hydrogens = *h;
          pinned_h_atoms.push_back(index);
        }
        as.atoms.push_back(std::move(atom));
      }
    }

    // Unmatched reactant atoms hanging off kept mapped atoms are carried over.
    for (int s = 0; s < nslots; ++s) {
      const Molecule &mol = *reactants_[static_cast<std::size_t>(s)];
      std::vector<int> stack;
      std::vector<char> seen(mol.num_atoms(), 0);
      for (const auto &[key, index] : as.from_reactant)
        if (key.first == s) stack.push_back(key.second);
      std::vector<int> carried;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const Neighbor &nb : mol.neighbors(u)) {
          const auto v = static_cast<std::size_t>(nb.atom);
          if (seen[v] || matched[static_cast<std::size_t>(s)][v]) continue;
          seen[v] = 1;
          carried.push_back(nb.atom);
          stack.push_back(nb.atom);
        }
      }
      std::sort(carried.begin(), carried.end());
      for (const int a : carried) {
        as.from_reactant[{s, a}] = static_cast<int>(as.atoms.size());
        Atom atom = mol.atom(a);
        atom.atom_map = 0;
        as.atoms.push_back(std::move(atom));
      }
    }

    // Reactant bonds between surviving atoms.
    for (int s = 0; s < nslots; ++s) {
      const Molecule &mol = *reactants_[static_cast<std::size_t>(s)];
      for (const Bond &b : mol.bonds()) {
        auto ia = as.from_reactant.find({s, b.a});
        auto ib = as.from_reactant.find({s, b.b});
        if (ia != as.from_reactant.end() && ib != as.from_reactant.end())
          as.set_bond(ia->second, ib->second, b.order);
      }
      // Bonds matched by the reactant pattern are owned by the product pattern.
      const Pattern &pat = tpl_.reactant_patterns[static_cast<std::size_t>(s)];
      const auto &assign = chosen[static_cast<std::size_t>(s)]->atom_assignment;
      for (const PatternBond &pb : pat.bonds()) {
        auto ia = as.from_reactant.find({s, assign[static_cast<std::size_t>(pb.a)]});
        auto ib = as.from_reactant.find({s, assign[static_cast<std::size_t>(pb.b)]});
        if (ia != as.from_reactant.end() && ib != as.from_reactant.end()) as.drop_bond(ia->second, ib->second);
      }
    }

    // Product pattern bonds.
    for (std::size_t p = 0; p < tpl_.product_patterns.size(); ++p) {
      const Pattern &pat = tpl_.product_patterns[p];
      for (const PatternBond &pb : pat.bonds()) {
        const int a = product_index[p][static_cast<std::size_t>(pb.a)];
        const int b = product_index[p][static_cast<std::size_t>(pb.b)];
        BondOrder order = BondOrder::kSingle;
        if (auto pinned = pb.query.pinned_order()) {
          order = *pinned;
        } else if (auto existing = reactant_bond(pat, pb, mapped)) {
          order = *existing;
        }
        as.set_bond(a, b, order);
      }
    }

    std::vector<Bond> bonds;
    bonds.reserve(as.bonds.size());
    std::vector<int> sums(as.atoms.size(), 0);
    for (const auto &[ends, order] : as.bonds) {
      bonds.push_back({ends.first, ends.second, order, 0});
      sums[static_cast<std::size_t>(ends.first)] += bond_valence(order);
      sums[static_cast<std::size_t>(ends.second)] += bond_valence(order);
    }

    // Hydrogens: mapped atoms shift by the change in bond valence.
    for (const auto &[map, key] : mapped) {
      if (!product_maps_.count(map)) continue;
      const int index = as.from_reactant.at(key);
      if (std::find(pinned_h_atoms.begin(), pinned_h_atoms.end(), index) != pinned_h_atoms.end()) continue;
      const Molecule &mol = *reactants_[static_cast<std::size_t>(key.first)];
      const int delta = sums[static_cast<std::size_t>(index)] - mol.bond_valence_sum(key.second);
      Atom &atom = as.atoms[static_cast<std::size_t>(index)];
      atom.hydrogens = std::max(0, atom.hydrogens - delta);
    }
    for (const int index : created_atoms) {
      if (std::find(pinned_h_atoms.begin(), pinned_h_atoms.end(), index) != pinned_h_atoms.end()) continue;
      Atom &atom = as.atoms[static_cast<std::size_t>(index)];
      const int h = implicit_hydrogens(atom.element, atom.aromatic, sums[static_cast<std::size_t>(index)]);
      if (h < 0) return;
      atom.hydrogens = h;
    }

    try {
      Molecule product(std::move(as.atoms), std::move(bonds));
      validate_valence(product);
      std::string smiles = canonical_smiles(product);
      if (products_.count(smiles)) return;
      // Products must survive a round trip through SMILES.
      if (!try_parse_smiles(smiles)) return;
      products_.emplace(std::move(smiles), std::move(product));
    } catch (const Error &) {
    } catch (const std::invalid_argument &) {
    }
  }

  std::optional<BondOrder> reactant_bond(const Pattern &pat, const PatternBond &pb,
                                         const std::map<int, AtomKey> &mapped) const {
    const int ma = pat.atoms()[static_cast<std::size_t>(pb.a)].atom_map;
    const int mb = pat.atoms()[static_cast<std::size_t>(pb.b)].atom_map;
    if (!ma || !mb) return std::nullopt;
    const AtomKey ka = mapped.at(ma);
    const AtomKey kb = mapped.at(mb);
    if (ka.first != kb.first) return std::nullopt;
    const Molecule &mol = *reactants_[static_cast<std::size_t>(ka.first)];
    const int bond = mol.bond_between(ka.second, kb.second);
    if (bond < 0) return std::nullopt;
    return mol.bond(bond).order;
  }

  const ReactionTemplate &tpl_;
  const std::vector<const Molecule *> &reactants_;
  std::set<int> product_maps_;
  std::map<std::string, Molecule> products_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ReactionTemplate parse_reaction(std::string_view smirks, std::string id, std::string name) {
  const std::string text = normalize_smarts(smirks);
  const std::size_t arrow = text.find(">>");
  if (arrow == std::string::npos) throw SyntaxError("reaction needs a '>>' separator", 0);
  if (text.find(">>", arrow + 2) != std::string::npos || text.find('>', arrow + 2) != std::string::npos)
    throw SyntaxError("reaction has more than one '>>'", arrow);
  const std::string_view view(text);
  const std::string_view lhs = view.substr(0, arrow);
  const std::string_view rhs = view.substr(arrow + 2);
  if (lhs.empty()) throw SyntaxError("reaction has no reactants", 0);
  if (rhs.empty()) throw SyntaxError("reaction has no products", arrow + 2);

  ReactionTemplate tpl;
  tpl.id = std::move(id);
  tpl.name = std::move(name);
  tpl.smarts_text = std::string(trim(smirks));
  for (const std::string_view part : split_components(lhs, 0)) tpl.reactant_patterns.push_back(parse_smarts(part));
  for (const std::string_view part : split_components(rhs, arrow + 2))
    tpl.product_patterns.push_back(parse_smarts(part));

  std::map<int, int> reactant_maps;
  for (const Pattern &p : tpl.reactant_patterns)
    for (const PatternAtom &a : p.atoms())
      if (a.atom_map && reactant_maps[a.atom_map]++)
        throw MapClosureError("atom map :" + std::to_string(a.atom_map) + " appears in more than one reactant");
  std::set<int> product_maps;
  for (const Pattern &p : tpl.product_patterns) {
    for (const PatternAtom &a : p.atoms()) {
      if (a.atom_map) {
        if (!reactant_maps.count(a.atom_map))
          throw MapClosureError("product atom map :" + std::to_string(a.atom_map) + " has no reactant source");
        if (!product_maps.insert(a.atom_map).second)
          throw MapClosureError("atom map :" + std::to_string(a.atom_map) + " repeated in products");
      } else if (!a.query.pinned_element()) {
        throw UnsupportedFeature("unmapped product atom without a fixed element");
      }
    }
  }
  return tpl;
}

std::vector<Match> reactant_matches(const ReactionTemplate &tpl, std::size_t slot, const Molecule &mol) {
  std::vector<Match> matches = match_substructure(tpl.reactant_patterns.at(slot), mol);
  for (Match &m : matches) m.slot = static_cast<int>(slot);
  return matches;
}

std::vector<Product> apply_forward(const ReactionTemplate &tpl, const std::vector<const Molecule *> &reactants) {
  if (reactants.size() != tpl.num_slots())
    throw SlotCountMismatch("template " + tpl.id + " takes " + std::to_string(tpl.num_slots()) +
                            " reactants, got " + std::to_string(reactants.size()));
  return ForwardApplier(tpl, reactants).run();
}

std::vector<Product> apply_forward(const ReactionTemplate &tpl, const std::vector<Molecule> &reactants) {
  std::vector<const Molecule *> ptrs;
  for (const Molecule &m : reactants) ptrs.push_back(&m);
  return apply_forward(tpl, ptrs);
}

std::string normalize_smarts(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

TemplateSet::TemplateSet(std::vector<ReactionTemplate> templates) : templates_(std::move(templates)) {
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const int index = static_cast<int>(i);
    if (!templates_[i].id.empty() && !by_id_.emplace(templates_[i].id, index).second)
      throw SyntaxError("duplicate template id " + templates_[i].id, 0);
    by_text_.emplace(normalize_smarts(templates_[i].smarts_text), index);
  }
}

int TemplateSet::find(std::string_view id_or_smarts) const {
  const std::string_view key = trim(id_or_smarts);
  if (auto it = by_id_.find(key); it != by_id_.end()) return it->second;
  if (auto it = by_text_.find(normalize_smarts(key)); it != by_text_.end()) return it->second;
  return -1;
}

TemplateSet parse_templates(std::string_view tsv, std::string_view source) {
  std::vector<ReactionTemplate> templates;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.emplace_back(trim(field));
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (fields.size() != 3) throw SyntaxError(where + ": expected 3 tab-separated fields", 0);
    try {
      ReactionTemplate tpl = parse_reaction(fields[2], fields[0], fields[1]);
      if (tpl.num_slots() > 2)
        throw UnsupportedFeature(where + ": templates take at most two reactants");
      templates.push_back(std::move(tpl));
    } catch (const SyntaxError &e) {
      throw SyntaxError(where + ": " + e.what(), e.position());
    }
  }
  return TemplateSet(std::move(templates));
}

TemplateSet load_templates(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_templates(buf.str(), path.string());
}

}  // namespace synthkit
