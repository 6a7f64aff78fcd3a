//! Canonical text traces of the main derivations. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::path::PathBuf;

use gfactor_core::dirac::{derive_wave_equation, v1_commutator_form, v2_commutator_form};
use gfactor_core::fw::{fw_transform, pauli_reduce, v1_alteration_terms, v1_residual, AssumptionSet, Hamiltonian};
use gfactor_core::ops::text::{emit, parse};
use gfactor_core::ops::OpExpr;

fn golden(name: &str, e: &OpExpr) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = emit(e);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(stored, text, "{name} differs from the stored trace");
    assert_eq!(&parse(&stored).unwrap(), e);
}

#[test]
fn wave_equation_corrections() {
    let w = derive_wave_equation(2).unwrap();
    golden("v1_commutator.txt", &w.v_series[0]);
    golden("v2_commutator.txt", &w.v_series[1]);
    assert_eq!(w.v_series[0], v1_commutator_form());
    assert_eq!(w.v_series[1], v2_commutator_form());
}

#[test]
fn reduced_dirac_hamiltonian() {
    golden("fw_dirac.txt", &pauli_reduce(&fw_transform(&Hamiltonian::dirac(), 2).unwrap()).unwrap());
}

#[test]
fn first_order_alteration() {
    let alt = v1_alteration_terms().unwrap();
    golden("fw_v1_alteration.txt", &(&alt.even + &alt.odd));
    golden("v1_residual.txt", &v1_residual(&AssumptionSet::default()).unwrap().result);
}
