//! End-to-end behaviour of dataset validation.

mod common;

use common::*;
use shaclds::model::{Graph, Literal, Term};
use shaclds::report::conforms;
use shaclds::{validate_dataset, vocab, ValidationError, ValidationOptions, ValidationOutcome, Vocabulary};

const PREFIXES: &str = r#"@prefix ex: <http://example.org/> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix shds: <http://www.w3id.org/shacl-ds#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
"#;

fn validate(shapes: &str, data: &str) -> Result<ValidationOutcome, ValidationError> {
    let options = ValidationOptions { vocab: Vocabulary::default(), ..ValidationOptions::default() };
    validate_dataset(&trig(&format!("{PREFIXES}{shapes}")), &trig(&format!("{PREFIXES}{data}")), &options)
}

fn objects(report: &Graph, predicate: &str) -> Vec<Term> {
    let mut out: Vec<Term> = report.with_predicate(&vocab::sh(predicate)).iter().map(|t| t.object.clone()).collect();
    out.sort();
    out
}

#[test]
fn shapes_graph_without_declarations_validates_nothing() {
    let out = validate("ex:s { ex:S sh:targetClass ex:T ; sh:nodeKind sh:Literal . }", "ex:a a ex:T .").unwrap();
    assert!(out.conforms);
    assert!(out.results.is_empty());
    assert!(out.warnings.is_empty());
}

#[test]
fn declarations_for_absent_shapes_graph_warn() {
    let out = validate("ex:missing shds:targetGraph shds:default .", "ex:a a ex:T .").unwrap();
    assert!(out.conforms);
    assert!(out.warnings.iter().any(|w| w.contains("http://example.org/missing")), "{:?}", out.warnings);
}

#[test]
fn missing_target_graph_warns() {
    let out = validate(
        "ex:s shds:targetGraph ex:nowhere . ex:s { ex:S sh:targetClass ex:T ; sh:nodeKind sh:Literal . }",
        "ex:a a ex:T .",
    )
    .unwrap();
    assert!(out.conforms);
    assert!(out.warnings.iter().any(|w| w.contains("nowhere")));
}

#[test]
fn same_shape_iri_in_two_shapes_graphs_is_disambiguated() {
    let out = validate(
        "ex:s1 shds:targetGraph shds:default . ex:s2 shds:targetGraph shds:default .
         ex:s1 { ex:S sh:targetClass ex:T ; sh:nodeKind sh:Literal . }
         ex:s2 { ex:S sh:targetClass ex:T ; sh:class ex:U . }",
        "ex:a a ex:T .",
    )
    .unwrap();
    assert_eq!(out.results.len(), 2);
    assert_eq!(objects(&out.report, "sourceShape"), vec![Term::Iri(ex("S")), Term::Iri(ex("S"))]);
    let v = Vocabulary::default();
    let mut graphs: Vec<Term> = out.report.with_predicate(&v.source_shape_graph).iter().map(|t| t.object.clone()).collect();
    graphs.sort();
    assert_eq!(graphs, vec![Term::Iri(ex("s1")), Term::Iri(ex("s2"))]);
}

#[test]
fn declarations_may_live_inside_the_shapes_graph() {
    let out = validate(
        "ex:s { ex:s shds:targetGraph ex:g . ex:S sh:targetClass ex:T ; sh:nodeKind sh:Literal . }",
        "ex:g { ex:a a ex:T . }",
    )
    .unwrap();
    assert_eq!(out.results.len(), 1);
}

#[test]
fn ill_formed_declarations_are_all_reported() {
    let err = validate(
        r#"ex:s shds:targetGraph "g" ; shds:targetGraphCombination [ shds:minus ( shds:named ex:g ) ] ."#,
        "ex:a a ex:T .",
    )
    .unwrap_err();
    match err {
        ValidationError::IllFormed(v) => assert_eq!(v.len(), 2),
        other => panic!("{other}"),
    }
}

#[test]
fn reserved_graph_name_in_data_is_rejected() {
    let err = validate(
        "ex:s shds:targetGraph shds:default . ex:s { ex:S sh:targetClass ex:T ; sh:nodeKind sh:Literal . }",
        "shds:default { ex:a a ex:T . }",
    )
    .unwrap_err();
    assert!(matches!(err, ValidationError::View(_)));
}

#[test]
fn prohibited_queries_fail_before_evaluation() {
    let err = validate(
        r#"ex:s shds:targetGraph shds:default .
        ex:s { ex:S sh:targetClass ex:T ; sh:sparql [ sh:select "SELECT $this WHERE { VALUES ?x { 1 } $this ?p ?x }" ] . }"#,
        "ex:a a ex:T .",
    )
    .unwrap_err();
    assert!(err.to_string().contains("VALUES"), "{err}");
}

#[test]
fn warnings_and_infos_keep_conformance() {
    let out = validate(
        "ex:s shds:targetGraph shds:default .
         ex:s { ex:S sh:targetClass ex:T ; sh:severity sh:Warning ; sh:nodeKind sh:Literal .
                ex:I sh:targetClass ex:T ; sh:severity sh:Info ; sh:class ex:U . }",
        "ex:a a ex:T .",
    )
    .unwrap();
    assert!(out.conforms);
    assert_eq!(conforms(&out.report), Ok(true));
    assert_eq!(objects(&out.report, "resultSeverity"), vec![Term::Iri(vocab::sh("Info")), Term::Iri(vocab::sh("Warning"))]);
}

#[test]
fn graph_boundaries_are_respected() {
    // The type lives in the default graph, the value in a named graph: no
    // focus node in either graph sees both.
    let out = validate(
        "ex:s shds:targetGraph shds:all .
         ex:s { ex:S sh:targetClass ex:T ; sh:property [ sh:path ex:age ; sh:minCount 1 ] . }",
        "ex:a a ex:T . ex:g { ex:a ex:age 3 . }",
    )
    .unwrap();
    assert_eq!(out.results.len(), 1);
    let v = Vocabulary::default();
    assert_eq!(out.report.with_predicate(&v.focus_graph)[0].object, Term::Iri(v.default.clone()));
}

#[test]
fn combination_bridges_graph_boundaries() {
    let out = validate(
        "ex:s shds:targetGraphCombination [ shds:or ( shds:all ) ] .
         ex:s { ex:S sh:targetClass ex:T ; sh:property [ sh:path ex:age ; sh:minCount 1 ; sh:maxInclusive 2 ] . }",
        "ex:a a ex:T . ex:g { ex:a ex:age 3 . }",
    )
    .unwrap();
    assert_eq!(objects(&out.report, "value"), vec![Term::Literal(Literal::integer(3))]);
    assert_eq!(objects(&out.report, "sourceConstraintComponent"), vec![Term::Iri(vocab::sh("MaxInclusiveConstraintComponent"))]);
}

#[test]
fn blank_node_results_keep_data_and_shape_nodes_apart() {
    let out = validate(
        "ex:s shds:targetGraph shds:default .
         ex:s { _:x sh:targetClass ex:T ; sh:nodeKind sh:IRI . }",
        "_:x a ex:T .",
    )
    .unwrap();
    let focus = objects(&out.report, "focusNode");
    let shape = objects(&out.report, "sourceShape");
    assert!(focus[0].is_blank_node() && shape[0].is_blank_node());
    assert_ne!(focus, shape);
}

#[test]
fn sparql_messages_and_paths() {
    let out = validate(
        r#"ex:s shds:targetGraph shds:default .
        ex:s { ex:S sh:targetClass ex:T ;
            sh:property [ sh:path ex:age ;
                sh:sparql [ sh:message "{$this} has age {?value}"@en ;
                    sh:select "SELECT $this ?value WHERE { $this $PATH ?value . FILTER (?value > 1) }" ] ] . }"#,
        "ex:a a ex:T ; ex:age 1, 5 .",
    )
    .unwrap();
    assert_eq!(out.results.len(), 1);
    assert_eq!(objects(&out.report, "resultPath"), vec![Term::Iri(ex("age"))]);
    assert_eq!(objects(&out.report, "resultMessage"), vec![Term::Literal(Literal::lang("http://example.org/a has age 5", "en"))]);
}

#[test]
fn outcome_results_match_report() {
    let out = validate(
        "ex:s shds:targetGraph shds:all .
         ex:s { ex:S sh:targetClass ex:T ; sh:property [ sh:path ex:p ; sh:minCount 2 ; sh:datatype xsd:integer ] . }",
        r#"ex:a a ex:T ; ex:p "x" . ex:g { ex:b a ex:T . } ex:h { ex:c a ex:T ; ex:p 1, 2 . }"#,
    )
    .unwrap();
    assert_eq!(out.results.len(), 3);
    assert_eq!(out.report.with_predicate(&vocab::sh("result")).len(), 3);
    assert!(!out.truncated);
    assert!(!out.conforms);
}
