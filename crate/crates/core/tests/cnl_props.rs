mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::{quoted, slot_expr};
use edtl_cnl::classify::ClassificationReport;
use edtl_cnl::cli::{embedded_corpus, embedded_report};
use edtl_cnl::cnl::{parse_requirement, render_requirement, CnlCorpus, CnlError};
use edtl_cnl::edtl::{
    combination_of, enumerate_combinations, AttributeCombination, AttributeName, AttributeValue,
    Requirement, Tristate,
};
use edtl_cnl::propexpr::PropExpr;

fn data() -> &'static (ClassificationReport, CnlCorpus) {
    static DATA: OnceLock<(ClassificationReport, CnlCorpus)> = OnceLock::new();
    DATA.get_or_init(|| (embedded_report(), embedded_corpus()))
}

/// Combinations named by renderable templates.
fn anchors() -> Vec<AttributeCombination> {
    let (report, corpus) = data();
    corpus
        .templates
        .iter()
        .filter(|t| t.renderable)
        .map(|t| t.anchor(report).unwrap())
        .collect()
}

fn requirement_for(c: AttributeCombination, exprs: &[PropExpr]) -> Requirement {
    Requirement::from_fn(|a| match c.get(a) {
        Tristate::Var => AttributeValue::Expr(exprs[a.index()].clone()),
        Tristate::True => AttributeValue::Const(true),
        Tristate::False => AttributeValue::Const(false),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_restores_the_requirement(which in 0usize..16, exprs in proptest::collection::vec(slot_expr(), 6)) {
        let (report, corpus) = data();
        let anchors = anchors();
        let c = anchors[which % anchors.len()];
        let r = requirement_for(c, &exprs);
        let phrase = render_requirement(&r, corpus, report).unwrap();
        let parsed = parse_requirement(&phrase, corpus, report).unwrap();
        prop_assert_eq!(combination_of(&parsed.requirement), c);
        prop_assert_eq!(&parsed.requirement, &r);
        prop_assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn class_members_render_into_their_class(which in 0usize..729, exprs in proptest::collection::vec(slot_expr(), 6)) {
        let (report, corpus) = data();
        let c = enumerate_combinations()[which];
        let r = requirement_for(c, &exprs);
        match render_requirement(&r, corpus, report) {
            Ok(phrase) => {
                let parsed = parse_requirement(&phrase, corpus, report).unwrap();
                let class = edtl_cnl::classify::canonical_class(&c, report).unwrap();
                prop_assert_eq!(parsed.class_id, class.class_id);
            }
            Err(CnlError::NoTemplate { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn constant_attributes_never_appear_as_slots() {
    let (report, corpus) = data();
    let mut rendered = 0;
    for c in enumerate_combinations() {
        let Ok(phrase) = render_requirement(&c.symbolic_requirement(), corpus, report) else {
            continue;
        };
        rendered += 1;
        let slots = quoted(&phrase);
        for a in c.constant_attributes() {
            assert!(
                !slots.iter().any(|s| s == a.name() || s == a.abbreviation()),
                "{c}: `{phrase}` names constant {a}"
            );
        }
    }
    assert!(rendered > 3);
}

#[test]
fn table_phrases_render_exactly() {
    let (report, corpus) = data();
    let symbolic = |key: &str| {
        let c: AttributeCombination = key.parse().unwrap();
        Requirement::from_fn(|a| match c.get(a) {
            Tristate::Var => AttributeValue::Expr(PropExpr::var(a.name())),
            Tristate::True => AttributeValue::Const(true),
            Tristate::False => AttributeValue::Const(false),
        })
    };
    assert_eq!(
        render_requirement(&symbolic("vtttvf"), corpus, report).unwrap(),
        "After 'trigger', 'reaction' occurs now."
    );
    assert_eq!(
        render_requirement(&symbolic("vvtvvv"), corpus, report).unwrap(),
        "After 'trigger', 'invariant' is valid until either 'release' or 'reaction', and 'reaction' occurs within 'delay' from now."
    );
    assert!(matches!(
        render_requirement(&symbolic("vvvttf"), corpus, report),
        Err(CnlError::NoTemplate { .. })
    ));
}

#[test]
fn hand_dryer_phrase_parses_to_the_table_requirement() {
    let (report, corpus) = data();
    let parsed = parse_requirement("After 'H and D', 'D' occurs now.", corpus, report).unwrap();
    let expected = Requirement::from_json(
        r#"{"trigger": "H and D", "invariant": true, "final": true, "delay": true, "reaction": "D", "release": false}"#,
    )
    .unwrap();
    assert_eq!(parsed.requirement, expected);
    assert_eq!(
        parsed.requirement.get(AttributeName::Trigger),
        &AttributeValue::Expr(PropExpr::and(PropExpr::var("H"), PropExpr::var("D")))
    );
}

#[test]
fn errors_carry_positions() {
    let (report, corpus) = data();
    match parse_requirement("After 'T', 'R' happens now.", corpus, report) {
        Err(CnlError::Syntax { pos, .. }) => assert_eq!(pos, 15),
        other => panic!("{other:?}"),
    }
    match parse_requirement("After 'T and', 'R' occurs now.", corpus, report) {
        Err(CnlError::SlotExpression { pos, .. }) => assert!((7..=12).contains(&pos), "{pos}"),
        other => panic!("{other:?}"),
    }
}
