#!/usr/bin/env python3
# Copyright 2026 The QP-VQE Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the qubit Hamiltonian fixtures under data/.

Requires pyscf and openfermion. The engine never runs this script; the
checked-in .ham files are the ground truth for every test, and the exact
diagonalization oracle in the C++ harness defines reference energies from
them. Spin orbitals use the interleaved ordering (2p = alpha, 2p+1 = beta).
"""

import argparse
import os

import numpy as np
import openfermion as of
from openfermion.chem.molecular_data import spinorb_from_spatial
from openfermion.ops.representations import get_active_space_integrals
from pyscf import ao2mo, gto, scf


def mo_integrals(atoms, basis="sto-3g"):
    mol = gto.M(atom=atoms, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    c = mf.mo_coeff
    n = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), n)
    # OpenFermion ordering: (ps|qr) stored at [p, q, r, s].
    h2 = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    return mol, c, mol.energy_nuc(), h1, h2


def qubit_hamiltonian(constant, h1, h2):
    one, two = spinorb_from_spatial(h1, h2)
    op = of.InteractionOperator(constant, one, 0.5 * two)
    return of.jordan_wigner(of.get_fermion_operator(op))


def write_ham(path, qop, n_qubits, comment):
    lines = [f"# {comment}", f"qubits {n_qubits}"]
    terms = []
    for word, coeff in qop.terms.items():
        c = complex(coeff)
        if abs(c.imag) > 1e-10:
            raise ValueError(f"non-real coefficient {c} on {word}")
        if abs(c.real) < 1e-14:
            continue
        text = " ".join(f"{p}{q}" for q, p in word) if word else "I"
        terms.append((word, c.real, text))
    terms.sort(key=lambda t: (len(t[0]), t[0]))
    for _, c, text in terms:
        lines.append(f"{c:.16e} {text}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def dipole_z(mol, c):
    r = mol.intor("int1e_r")
    dz = -(c.T @ r[2] @ c)
    n = dz.shape[0]
    one, _ = spinorb_from_spatial(dz, np.zeros((n, n, n, n)))
    op = of.InteractionOperator(0.0, one, np.zeros((2 * n,) * 4))
    return of.jordan_wigner(of.get_fermion_operator(op))


def h2_chain(n_atoms, spacing):
    return [["H", (0.0, 0.0, i * spacing)] for i in range(n_atoms)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    out = os.path.abspath(args.out)
    os.makedirs(os.path.join(out, "h2"), exist_ok=True)
    os.makedirs(os.path.join(out, "lih"), exist_ok=True)
    os.makedirs(os.path.join(out, "h4"), exist_ok=True)

    manifest = ["# H2 STO-3G dissociation sweep", "set k 4", "set sector 2,0"]
    for i in range(26):
        d = round(0.5 + 0.1 * i, 2)
        mol, c, enuc, h1, h2 = mo_integrals(h2_chain(2, d))
        qop = qubit_hamiltonian(enuc, h1, h2)
        name = f"h2_{d:.2f}.ham"
        write_ham(os.path.join(out, "h2", name), qop, 4, f"H2 STO-3G R={d:.2f} A, JW interleaved")
        manifest.append(f"{d:.2f} h2/{name}")
        if abs(d - 0.7) < 1e-9:
            write_ham(os.path.join(out, "h2", "h2_0.70_dipole_z.ham"), dipole_z(mol, c), 4,
                      "H2 STO-3G R=0.70 A, electronic dipole z component")
    with open(os.path.join(out, "h2.sweep"), "w") as f:
        f.write("\n".join(manifest) + "\n")

    # LiH with the Li 1s orbital frozen: 5 active spatial orbitals, 10 qubits.
    d = 1.6
    _, _, enuc, h1, h2 = mo_integrals([["Li", (0, 0, 0)], ["H", (0, 0, d)]])
    core, h1a, h2a = get_active_space_integrals(h1, h2, occupied_indices=[0],
                                                active_indices=[1, 2, 3, 4, 5])
    write_ham(os.path.join(out, "lih", f"lih_{d:.2f}.ham"), qubit_hamiltonian(enuc + core, h1a, h2a), 10,
              f"LiH STO-3G R={d:.2f} A, frozen Li 1s, JW interleaved")

    d = 1.0
    _, _, enuc, h1, h2 = mo_integrals(h2_chain(4, d))
    write_ham(os.path.join(out, "h4", f"h4_{d:.2f}.ham"), qubit_hamiltonian(enuc, h1, h2), 8,
              f"linear H4 STO-3G spacing={d:.2f} A, JW interleaved")


if __name__ == "__main__":
    main()
