#!/usr/bin/env python3
"""Writes the desk-scale building-block library (data/building_blocks.smi).

Entries are assembled from functional-group scaffolds and substituents so the
library covers every shipped template slot, including bifunctional blocks that
allow multi-step routes. Output is deterministic.
"""

import argparse
import pathlib

PARA = ["", "F", "Cl", "C", "OC", "C(F)(F)F", "C#N", "CC"]
META = ["F", "Cl", "C", "OC"]


def aryl(head, sub, meta=False):
    """Benzene ring bearing `head` at position 1 and `sub` para (or meta)."""
    if not sub:
        return f"{head}c1ccccc1"
    if meta:
        return f"{head}c1cccc({sub})c1"
    return f"{head}c1ccc({sub})cc1"


def entries():
    out = []

    def add(prefix, smiles_list):
        for smi in smiles_list:
            out.append((f"{prefix}{len([e for e in out if e[0].startswith(prefix)]) + 1:03d}", smi))

    acids = [aryl("OC(=O)", s) for s in PARA] + [aryl("OC(=O)", s, True) for s in META]
    acids += ["CC(=O)O", "CCC(=O)O", "CC(C)C(=O)O", "OC(=O)C1CC1", "OC(=O)C1CCCC1", "OC(=O)C1CCOCC1",
              "OC(=O)Cc1ccccc1", "OC(=O)CCc1ccccc1", "OC(=O)c1ccncc1", "OC(=O)c1cccnc1",
              "OC(=O)c1ccco1", "OC(=O)c1cccs1", "OC(=O)c1ccc2ccccc2c1", "COCC(=O)O", "OC(=O)CC1CCCCC1",
              "OC(=O)c1ccc(F)cc1F", "OC(=O)c1ccc(C)c(C)c1", "OC(=O)CCC(C)C", "OC(=O)c1cnccn1",
              "OC(=O)C1CCCCC1"]
    add("acid", acids)

    amines = ["NCC", "NCCC", "NC(C)C", "NC1CC1", "NC1CCCC1", "NC1CCCCC1", "C1CCNCC1", "C1COCCN1",
              "C1CCNC1", "CNC", "CCNCC", "CN1CCNCC1", "NCCOC", "NCc1ccco1", "NCCc1ccccc1",
              "NCc1ccncc1", "CNCc1ccccc1", "NC1CCOCC1", "OCCN", "NCC1CC1", "NCCCC",
              "NCC(C)C", "NC1CCC1", "CNCCOC", "NCc1ccccn1", "C1CCCNCC1", "CC1CCNCC1", "NCCN1CCOCC1"]
    amines += [aryl("NC", s) for s in PARA]
    amines += ["NCc1ccc(C2CC2)cc1", "NCc1ccc(C2CCC2)cc1"]
    amines += [aryl("N", s) for s in ["", "F", "C", "OC", "Cl"]]
    add("amine", amines)

    halides = [aryl("Br", s) for s in PARA] + [aryl("I", s) for s in ["", "F", "C", "OC"]]
    halides += ["Brc1ccncc1", "Brc1cccnc1", "Brc1cccs1", "Brc1ccc2ccccc2c1", "Ic1ccncc1", "Brc1cncnc1"]
    add("arylhal", halides)

    boronic = [aryl("OB(O)", s) for s in PARA] + [aryl("OB(O)", s, True) for s in META]
    boronic += ["OB(O)c1ccncc1", "OB(O)c1cccs1", "OB(O)c1ccco1", "OB(O)c1ccc2ccccc2c1"]
    add("boronic", boronic)

    sulfonyl = [aryl("ClS(=O)(=O)", s) for s in ["", "F", "C", "OC", "Cl", "C(F)(F)F"]]
    sulfonyl += ["CS(=O)(=O)Cl", "CCS(=O)(=O)Cl", "ClS(=O)(=O)Cc1ccccc1", "ClS(=O)(=O)c1cccs1"]
    add("sulfonyl", sulfonyl)

    aldehydes = [aryl("O=C", s) for s in PARA] + [aryl("O=C", s, True) for s in META]
    aldehydes += ["CCC=O", "CC(C)C=O", "O=CC1CCCCC1", "O=Cc1ccncc1", "O=Cc1ccco1", "O=Cc1cccs1",
                  "O=CCc1ccccc1"]
    add("aldehyde", aldehydes)

    alcohols = ["OCC", "OCCC", "OCC(C)C", "OCc1ccccc1", "OCCc1ccccc1", "OCC1CC1", "OCCOC", "OC1CCCCC1",
                "OCCCl", "OCc1ccncc1", "OC(C)C", "OCC(F)(F)F"]
    add("alcohol", alcohols)

    isocyanates = [aryl("O=C=N", s) for s in ["", "F", "C", "OC", "Cl"]]
    isocyanates += ["CCN=C=O", "O=C=NC1CCCCC1", "O=C=NCc1ccccc1"]
    add("isocyanate", isocyanates)

    alkyl = [aryl("BrC", s) for s in ["", "F", "C", "OC", "Cl", "C#N"]]
    alkyl += ["CCBr", "CCCBr", "BrCC1CC1", "BrCCOC", "ICCC", "BrCc1ccncc1"]
    add("alkylhal", alkyl)

    phenols = [aryl("O", s) for s in ["", "F", "C", "OC", "Cl", "C#N", "C(F)(F)F"]]
    phenols += ["Oc1ccncc1", "Oc1ccc2ccccc2c1", "Oc1cccc(C)c1"]
    add("phenol", phenols)

    bifunctional = [
        "OC(=O)c1ccc(Br)cc1", "OC(=O)c1cccc(Br)c1", "OC(=O)c1ccc(I)cc1", "OC(=O)c1ccc(B(O)O)cc1",
        "OC(=O)c1cccc(B(O)O)c1", "O=Cc1ccc(Br)cc1", "O=Cc1ccc(B(O)O)cc1", "NCc1ccc(Br)cc1",
        "NCc1ccc(B(O)O)cc1", "C1CN(CCN1)c1ccccc1", "OC(=O)CN1CCNCC1", "OC(=O)C1CCNCC1",
        "NCCC(=O)O", "OC(=O)c1ccc(CBr)cc1", "Oc1ccc(Br)cc1", "Oc1ccc(C(=O)O)cc1",
        "OCc1ccc(Br)cc1", "ClS(=O)(=O)c1ccc(Br)cc1", "O=C=Nc1ccc(Br)cc1", "BrCc1ccc(Br)cc1",
        "OB(O)c1ccc(C=O)cc1F", "Brc1ccc(N)cc1", "OC(=O)c1ccc(O)cc1F", "NC1CCN(CC1)c1ccccc1",
        "OC(=O)c1cc(Br)ccc1F", "O=Cc1ccc(O)cc1", "NCc1ccc(O)cc1", "OC(=O)CCC(=O)O",
    ]
    add("bifunc", bifunctional)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", type=pathlib.Path)
    args = parser.parse_args()
    rows = entries()
    smiles = [s for _, s in rows]
    if len(set(smiles)) != len(smiles):
        raise SystemExit("duplicate SMILES in generated library")
    lines = ["# Desk-scale building-block library: SMILES<TAB>id", *(f"{s}\t{i}" for i, s in rows)]
    args.output.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} building blocks to {args.output}")


if __name__ == "__main__":
    main()
