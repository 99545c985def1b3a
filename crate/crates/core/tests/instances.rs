mod common;

use lucp_core::algebra::FiniteGroupTable;
use lucp_core::instance::{galois, twisted, BimoduleBlock, FactorMapBlock, InstanceFile, LedgerBlock};
use lucp_core::Error;

use common::builtin_fixtures;

#[test]
fn builtins_round_trip() {
    for (name, file) in builtin_fixtures() {
        let inst = file.validate().unwrap();
        let text = inst.file.to_json();
        let again = InstanceFile::from_json(&text).unwrap();
        assert_eq!(again, file, "{name}");
        assert_eq!(again.validate().unwrap().file.to_json(), text, "{name}");
    }
}

fn explicit_factor_map(file: &InstanceFile) -> InstanceFile {
    let inst = file.validate().unwrap();
    let n = inst.group.order();
    let f = (0..n * n).map(|k| inst.fm.f_plain(k / n, k % n).to_rows()).collect();
    let mut out = file.clone();
    out.factor_map = Some(FactorMapBlock { f, iota: inst.fm.iota().to_rows() });
    out
}

#[test]
fn explicit_factor_map_matches_multiplication() {
    let file = explicit_factor_map(&galois(2, 2).unwrap());
    let inst = file.validate().unwrap();
    assert!(inst.fm.is_associative());
    let again = InstanceFile::from_json(&file.to_json()).unwrap();
    assert_eq!(again, file);
}

#[test]
fn rescaled_factor_map_is_rejected_with_location() {
    let mut file = explicit_factor_map(&galois(2, 2).unwrap());
    // F_{x,x} multiplied by w is not associative
    let block = file.factor_map.as_mut().unwrap();
    let fxx = &block.f[3];
    let w = [[0u64, 1], [1, 1]];
    block.f[3] = (0..2).map(|i| (0..fxx[0].len()).map(|j| (w[i][0] * fxx[0][j] + w[i][1] * fxx[1][j]) % 2).collect()).collect();
    match file.validate() {
        Err(Error::Validation { pointer, message }) => {
            assert!(pointer.starts_with("/factor_map"), "{pointer}");
            assert!(message.contains("associativity"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_invertible_ledger_generator_is_rejected() {
    let mut file = galois(3, 2).unwrap();
    // R (+) R is not invertible
    let inst = file.validate().unwrap();
    let two = lucp_core::bimodule::Bimodule::regular(inst.ext.base.clone()).power(2);
    file.ledger = Some(LedgerBlock { pic: vec![BimoduleBlock::from(&two)] });
    match file.validate() {
        Err(Error::Validation { pointer, .. }) => assert_eq!(pointer, "/ledger/pic/0"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invertible_ledger_generator_is_accepted() {
    let mut file = galois(3, 2).unwrap();
    let inst = file.validate().unwrap();
    let twist = inst.fm.theta(1).x.clone();
    file.ledger = Some(LedgerBlock { pic: vec![BimoduleBlock::from(&twist)] });
    let again = InstanceFile::from_json(&file.to_json()).unwrap();
    assert_eq!(again.validate().unwrap().extra_pic.len(), 1);
}

#[test]
fn theta_must_cover_the_group() {
    let mut file = galois(2, 2).unwrap();
    file.theta.pop();
    assert!(matches!(file.validate(), Err(Error::Validation { ref pointer, .. }) if pointer == "/theta"));
    let mut file = galois(2, 2).unwrap();
    file.theta[1].basis.pop();
    assert!(matches!(file.validate(), Err(Error::Validation { ref pointer, .. }) if pointer.starts_with("/theta/")));
}

#[test]
fn twisted_over_f2_is_the_group_algebra() {
    let file = twisted(2, &FiniteGroupTable::cyclic(2), &[vec![1, 1], vec![1, 1]]).unwrap();
    let inst = file.validate().unwrap();
    assert_eq!(inst.ext.top.dim(), 2);
    assert!(inst.fm.is_associative());
}
