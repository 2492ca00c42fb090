#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>

#include "molforge/error.hpp"
#include "molforge/molecule.hpp"
#include "molforge/rings.hpp"
#include "molforge/smiles.hpp"
#include "oracles.hpp"

namespace molforge {
namespace {

using testing::isomorphic;
using testing::permute;
using testing::random_molecule;
using testing::random_permutation;

Molecule chain(int n) {
  Molecule mol = new_empty().add_atom(Element::C, 4, std::nullopt, 0);
  for (int i = 1; i < n; ++i) mol = mol.add_atom(Element::C, 4, i - 1, 1);
  return mol;
}

TEST(Molecule, EmptyHasNoAtoms) {
  const Molecule mol = new_empty();
  EXPECT_EQ(mol.atom_count(), 0u);
  EXPECT_EQ(mol.bond_count(), 0u);
  EXPECT_EQ(canonical_key(mol), canonical_key(new_empty()));
  EXPECT_EQ(write_smiles(mol), "");
}

TEST(Molecule, FreeValence) {
  EXPECT_EQ(free_valence(parse_smiles("C"), 0), 4);
  const Molecule ethane = parse_smiles("CC");
  EXPECT_EQ(free_valence(ethane, 0), 3);
  EXPECT_EQ(free_valence(ethane, 1), 3);
  const Molecule cyclohexane = parse_smiles("C1CCCCC1");
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(free_valence(cyclohexane, i), 2);
  EXPECT_THROW(free_valence(ethane, 2), IndexOutOfRange);
}

TEST(Molecule, SetBondReturnsNewValue) {
  const Molecule ethane = parse_smiles("CC");
  const Molecule ethene = set_bond(ethane, 0, 1, 2);
  EXPECT_EQ(ethene.bond_order(0, 1), 2);
  EXPECT_EQ(ethane.bond_order(0, 1), 1);
  EXPECT_EQ(canonical_key(ethene), canonical_key(parse_smiles("C=C")));
}

TEST(Molecule, SetBondSameOrderIsIdentity) {
  const Molecule ethyne = parse_smiles("C#C");
  const Molecule same = set_bond(ethyne, 0, 1, 3);
  EXPECT_EQ(same, ethyne);
  EXPECT_EQ(canonical_key(same), canonical_key(ethyne));
}

TEST(Molecule, SetBondErrors) {
  const Molecule propane = parse_smiles("CCC");
  EXPECT_THROW(set_bond(propane, 1, 1, 1), SelfBond);
  EXPECT_THROW(set_bond(propane, 0, 7, 1), IndexOutOfRange);
  EXPECT_NO_THROW(set_bond(parse_smiles("OC"), 0, 1, 2));
  EXPECT_THROW(set_bond(parse_smiles("OC"), 0, 1, 3), ValenceViolation);
  EXPECT_THROW(set_bond(parse_smiles("C(C)(C)(C)C"), 0, 1, 2), ValenceViolation);
  EXPECT_THROW(set_bond(propane, 0, 1, 0), DisconnectedMolecule);
}

TEST(Molecule, FromPartsValidates) {
  const Atom c{Element::C, 4};
  EXPECT_THROW(Molecule::from_parts({c, c}, {}), DisconnectedMolecule);
  EXPECT_THROW(Molecule::from_parts({c, c}, {{0, 1, 1}, {1, 0, 2}}), Error);
  EXPECT_THROW(Molecule::from_parts({c}, {{0, 0, 1}}), SelfBond);
  EXPECT_THROW(Molecule::from_parts({c, {Element::F, 1}}, {{0, 1, 2}}), ValenceViolation);
  EXPECT_NO_THROW(Molecule::from_parts({c, c}, {{1, 0, 3}}));
}

TEST(Molecule, DetachBondSingletonCleanup) {
  const Molecule propane = parse_smiles("CCC");
  const auto ethane = propane.detach_bond(0, 1);
  ASSERT_TRUE(ethane.has_value());
  EXPECT_EQ(canonical_key(*ethane), canonical_key(parse_smiles("CC")));

  EXPECT_FALSE(parse_smiles("CCCC").detach_bond(1, 2).has_value());

  const auto kept = parse_smiles("CO").detach_bond(0, 1);
  ASSERT_TRUE(kept.has_value());
  EXPECT_EQ(write_smiles(*kept), "C");
  const auto heavier = parse_smiles("FCl").detach_bond(0, 1);
  ASSERT_TRUE(heavier.has_value());
  EXPECT_EQ(write_smiles(*heavier), "Cl");
}

TEST(Rings, Examples) {
  const RingInfo hexane = ring_info(parse_smiles("C1CCCCC1"));
  EXPECT_EQ(hexane.ring_sizes, std::vector<int>{6});
  for (bool b : hexane.atom_in_ring) EXPECT_TRUE(b);

  const RingInfo butane = ring_info(parse_smiles("CCCC"));
  EXPECT_TRUE(butane.ring_sizes.empty());
  for (bool b : butane.atom_in_ring) EXPECT_FALSE(b);

  EXPECT_EQ(ring_info(parse_smiles("C1CC2CCC12")).ring_sizes, (std::vector<int>{4, 4}));
  EXPECT_EQ(ring_info(parse_smiles("C12C3C1C23")).ring_sizes, (std::vector<int>{3, 3, 3}));
}

TEST(Rings, MatchBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const Molecule mol = random_molecule(rng, 8, {Element::C, Element::N, Element::O});
    const RingInfo info = ring_info(mol);
    EXPECT_EQ(info.ring_sizes, testing::brute_force_ring_sizes(mol)) << write_smiles(mol);
    const auto cycles = testing::all_simple_cycles(mol);
    std::vector<bool> bond_on_cycle(mol.bond_count(), false);
    for (const auto& cyc : cycles) {
      for (int b : cyc) bond_on_cycle[b] = true;
    }
    for (std::size_t k = 0; k < mol.bond_count(); ++k) {
      EXPECT_EQ(info.bond_in_ring[k], bond_on_cycle[k]);
    }
    for (std::size_t i = 0; i < mol.atom_count(); ++i) {
      bool incident = false;
      for (std::size_t k = 0; k < mol.bond_count(); ++k) {
        const Bond& b = mol.bonds()[k];
        if ((b.a == i || b.b == i) && bond_on_cycle[k]) incident = true;
      }
      EXPECT_EQ(info.atom_in_ring[i], incident);
    }
    const int cyclomatic = static_cast<int>(mol.bond_count()) - static_cast<int>(mol.atom_count()) +
                           static_cast<int>(mol.component_count());
    EXPECT_EQ(static_cast<int>(info.ring_count()), cyclomatic);
  }
}

TEST(Smiles, ParseExamples) {
  const Molecule cyclohexane = parse_smiles("C1CCCCC1");
  EXPECT_EQ(cyclohexane.atom_count(), 6u);
  EXPECT_EQ(cyclohexane.bond_count(), 6u);
  for (const Bond& b : cyclohexane.bonds()) EXPECT_EQ(b.order, 1);

  const Molecule methane = parse_smiles("C");
  EXPECT_EQ(methane.atom_count(), 1u);
  EXPECT_EQ(methane.implicit_hydrogens(0), 4);

  const Molecule acid = parse_smiles("CC(=O)O");
  EXPECT_EQ(acid.bond_order(1, 2), 2);
  EXPECT_EQ(acid.bond_order(1, 3), 1);

  const Molecule labelled = parse_smiles("C=1CCCCC1");
  EXPECT_EQ(labelled.bond_order(0, 5), 2);
  EXPECT_EQ(parse_smiles("C%10CC%10").bond_count(), 3u);
  EXPECT_EQ(parse_smiles("BrC(Cl)(F)I").atom_count(), 5u);
}

TEST(Smiles, AromaticRejected) {
  try {
    parse_smiles("c1ccccc1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.message(), "aromatic atoms unsupported; supply Kekulé form");
    EXPECT_EQ(e.position(), 0u);
  }
}

TEST(Smiles, RejectsUnsupportedTokens) {
  for (const char* bad : {"[CH4]", "C.C", "C/C=C/C", "C(", "C1CC", "C=", "CB", "C(C)(C)(C)(C)C",
                          "O=O=O", "C=1CCCC#1", "C:C", "C$C", "()", "C()C", "%1", "C11", "1C"}) {
    EXPECT_THROW(parse_smiles(bad), ParseError) << bad;
  }
}

TEST(Smiles, FuzzNeverCrashes) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "CNOFPSIBrcl()=#-123%0[]@+.H\\/ \x01\xff";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 24);
  std::uniform_int_distribution<int> byte(0, 255);
  int parsed = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::string text;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      text.push_back(trial % 4 == 0 ? static_cast<char>(byte(rng)) : alphabet[pick(rng)]);
    }
    try {
      const Molecule mol = parse_smiles(text);
      EXPECT_LE(mol.component_count(), 1u);
      ++parsed;
    } catch (const ParseError&) {
    }
  }
  EXPECT_GT(parsed, 0);
}

TEST(Smiles, WriteRoundTrip) {
  for (const char* text : {"C1CCCCC1", "CC(=O)O", "C#CC(N)=O", "C1CC2CCC12", "OCC1CC(F)C1Cl",
                           "C12C3C1C23", "C=C1CCC(=O)CC1"}) {
    const Molecule mol = parse_smiles(text);
    const std::string written = write_smiles(mol);
    const Molecule back = parse_smiles(written);
    EXPECT_TRUE(isomorphic(mol, back)) << text << " -> " << written;
    EXPECT_EQ(write_smiles(back), written);
  }
}

TEST(Canonical, Examples) {
  const Molecule methane_a = parse_smiles("C");
  const Molecule methane_b = new_empty().add_atom(Element::C, 4, std::nullopt, 0);
  EXPECT_EQ(canonical_key(methane_a), canonical_key(methane_b));

  const Atom c{Element::C, 4};
  const Atom o{Element::O, 2};
  const Molecule ethanol_cco = Molecule::from_parts({c, c, o}, {{0, 1, 1}, {1, 2, 1}});
  const Molecule ethanol_occ = Molecule::from_parts({o, c, c}, {{0, 1, 1}, {1, 2, 1}});
  EXPECT_EQ(canonical_key(ethanol_cco), canonical_key(ethanol_occ));
  EXPECT_EQ(write_smiles(ethanol_cco), write_smiles(ethanol_occ));
  EXPECT_NE(canonical_key(ethanol_cco), canonical_key(parse_smiles("COC")));
}

TEST(Canonical, PermutationInvariantAndSound) {
  std::mt19937_64 rng(2024);
  std::map<std::string, Molecule> representatives;
  for (int trial = 0; trial < 1000; ++trial) {
    const Molecule mol = random_molecule(rng, 7, {Element::C, Element::N, Element::O, Element::S});
    const std::string key = canonical_key(mol).text();
    for (int p = 0; p < 10; ++p) {
      const Molecule shuffled = permute(mol, random_permutation(mol.atom_count(), rng));
      ASSERT_EQ(canonical_key(shuffled).text(), key) << write_smiles(mol);
    }
    const auto [it, inserted] = representatives.emplace(key, mol);
    if (!inserted) {
      EXPECT_TRUE(isomorphic(it->second, mol)) << key;
    }
  }
  std::vector<const Molecule*> reps;
  for (const auto& [key, mol] : representatives) reps.push_back(&mol);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      ASSERT_FALSE(isomorphic(*reps[i], *reps[j]));
    }
  }
  EXPECT_GT(representatives.size(), 200u);
}

TEST(Canonical, HighlySymmetricGraphs) {
  // Cubane and prism skeletons stress the individualization search.
  for (const char* text : {"C12C3C4C1C5C2C3C45", "C12C3C1C23", "C1CC2CC1C2", "C1CCCCCCCCC1",
                           "C1CC2CCC1CC2"}) {
    const Molecule mol = parse_smiles(text);
    const std::string key = canonical_key(mol).text();
    std::mt19937_64 rng(3);
    for (int p = 0; p < 30; ++p) {
      EXPECT_EQ(canonical_key(permute(mol, random_permutation(mol.atom_count(), rng))).text(), key)
          << text;
    }
    EXPECT_TRUE(isomorphic(parse_smiles(key), mol));
  }
}

TEST(Canonical, LongChainsStayCheap) {
  const Molecule c40 = chain(40);
  EXPECT_EQ(write_smiles(c40), std::string(40, 'C'));
}

}  // namespace
}  // namespace molforge
