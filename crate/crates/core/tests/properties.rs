mod common;

use common::oracle;
use common::props;
use corec::proof::linear::entails_linear;

#[test]
fn normalize_is_idempotent() {
    props::normalize_idempotent().unwrap();
}

#[test]
fn shifts_compose() {
    props::shift_composition().unwrap();
}

#[test]
fn pointwise_sum_and_product() {
    props::pointwise_laws().unwrap();
}

#[test]
fn expansion_agrees_with_iterated_tails() {
    props::expansion_matches_iterated_tail().unwrap();
}

#[test]
fn normal_forms_print_and_reparse() {
    props::printed_expressions_reparse().unwrap();
}

#[test]
fn entailment_matches_vertex_oracle() {
    let corpus = oracle::corpus(200);
    let entailed = corpus.iter().filter(|i| oracle::entails(&i.assumptions, &i.goal, i.vars)).count();
    assert!((40..=160).contains(&entailed), "corpus is lopsided: {entailed} of 200 entailed");
    for inst in &corpus {
        assert_eq!(
            entails_linear(&inst.assumptions, &inst.goal),
            oracle::entails(&inst.assumptions, &inst.goal, inst.vars),
            "{:?}",
            inst
        );
    }
}
