mod common;

use forge_core::qsf::{parse_problem, write_problem, QsfError};
use forge_core::{ConeSpec, ProblemData, ProblemError, SparseMat, SparseSym};
use proptest::prelude::*;
use serde_json::Value;

#[test]
fn toy_problem_is_valid() {
    let p = common::toy_problem();
    assert_eq!((p.n, p.m(), p.p), (4, 4, 2));
    assert_eq!(p.validate(), Ok(()));
}

#[test]
fn empty_problem_is_valid() {
    let p = ProblemData {
        n: 0,
        p: 0,
        P: SparseSym::zeros(0),
        c: vec![],
        A: SparseMat::zeros(0, 0),
        b: vec![],
        G: SparseMat::zeros(0, 0),
        h: vec![],
        cones: ConeSpec::default(),
    };
    assert_eq!(p.validate(), Ok(()));
}

#[test]
fn cone_dimension_mismatch_is_reported() {
    let mut p = common::toy_problem();
    p.cones = ConeSpec::new(2, vec![3]);
    assert!(matches!(p.validate(), Err(ProblemError::DimensionMismatch(_))));
}

#[test]
fn zero_dimensional_cone_is_rejected() {
    let mut p = common::toy_problem();
    p.cones = ConeSpec::new(1, vec![3, 0]);
    assert_eq!(p.validate(), Err(ProblemError::NegativeConeDim(1)));
}

#[test]
fn malformed_csc_is_rejected() {
    let mut p = common::toy_problem();
    p.A.colptr = vec![0, 2, 1, 4, 4];
    assert!(matches!(p.validate(), Err(ProblemError::MalformedCsc { .. })));

    let mut p = common::toy_problem();
    p.A.rowidx[0] = 7;
    assert!(matches!(p.validate(), Err(ProblemError::MalformedCsc { .. })));

    let mut p = common::toy_problem();
    p.P = SparseSym { n: 4, colptr: vec![0, 1, 3, 3, 3], rowidx: vec![0, 1, 1], vals: vec![1.0, 1.0, 1.0] };
    assert!(matches!(p.validate(), Err(ProblemError::MalformedCsc { col: 1, .. })));

    let mut p = common::toy_problem();
    p.P = SparseSym { n: 4, colptr: vec![0, 1, 1, 1, 1], rowidx: vec![2], vals: vec![1.0] };
    assert!(matches!(p.validate(), Err(ProblemError::MalformedCsc { col: 0, .. })));
}

#[test]
fn negative_p_diagonal_and_nonfinite_values_are_rejected() {
    let mut p = common::toy_problem();
    p.P.vals[1] = -1.0;
    assert_eq!(p.validate(), Err(ProblemError::NegativeDiagonal(1)));
    let mut p = common::toy_problem();
    p.c[0] = f64::NAN;
    assert!(matches!(p.validate(), Err(ProblemError::NonFinite(_))));
}

#[test]
fn toy_problem_round_trips() {
    let p = common::toy_problem();
    let q = parse_problem(&write_problem(&p)).unwrap();
    assert_eq!(p, q);
}

fn toy_json() -> Value {
    serde_json::from_slice(&write_problem(&common::toy_problem())).unwrap()
}

#[test]
fn missing_and_extra_keys_are_schema_errors() {
    let mut v = toy_json();
    v.as_object_mut().unwrap().remove("q");
    let bytes = serde_json::to_vec(&v).unwrap();
    assert_eq!(parse_problem(&bytes), Err(QsfError::Schema("q".into())));

    let mut v = toy_json();
    v.as_object_mut().unwrap().insert("extra".into(), Value::Null);
    let bytes = serde_json::to_vec(&v).unwrap();
    assert_eq!(parse_problem(&bytes), Err(QsfError::Schema("extra".into())));
}

#[test]
fn non_monotone_colptr_in_file_is_malformed() {
    let mut v = toy_json();
    v["A"]["colptr"] = serde_json::json!([0, 2, 1, 4, 4]);
    let bytes = serde_json::to_vec(&v).unwrap();
    assert!(matches!(parse_problem(&bytes), Err(QsfError::Invalid(ProblemError::MalformedCsc { .. }))));
}

#[test]
fn null_matrices_only_when_empty() {
    let mut v = toy_json();
    v["A"] = Value::Null;
    let bytes = serde_json::to_vec(&v).unwrap();
    assert_eq!(parse_problem(&bytes), Err(QsfError::Schema("A".into())));

    let mut v = toy_json();
    v["p"] = serde_json::json!(0);
    v["b"] = serde_json::json!([]);
    v["A"] = Value::Null;
    let p = parse_problem(&serde_json::to_vec(&v).unwrap()).unwrap();
    assert_eq!((p.p, p.A.rows, p.A.cols), (0, 0, 4));
}

#[test]
fn parse_errors_carry_byte_offsets() {
    let text = b"{\n  \"version\": 1,\n  \"n\": x\n}";
    match parse_problem(text) {
        Err(QsfError::Parse { offset, .. }) => assert_eq!(text[offset], b'x'),
        other => panic!("unexpected {other:?}"),
    }
}

fn arb_problem() -> impl Strategy<Value = ProblemData> {
    (0usize..6, 0usize..4, 0usize..4, proptest::collection::vec(1usize..4, 0..3))
        .prop_flat_map(|(n, p, l, q)| {
            let m = l + q.iter().sum::<usize>();
            let dense = |r: usize, c: usize| {
                proptest::collection::vec(
                    prop_oneof![Just(0.0), -1e6f64..1e6, any::<f64>().prop_filter("finite", |v| v.is_finite())],
                    r * c,
                )
            };
            (Just((n, p, l, q)), dense(n, n), dense(n, 1), dense(p, n), dense(p, 1), dense(m, n), dense(m, 1))
        })
        .prop_map(|((n, p, l, q), pd, c, a, b, g, h)| {
            let mut pd = pd;
            for i in 0..n {
                pd[i * n + i] = pd[i * n + i].abs();
            }
            ProblemData {
                n,
                p,
                P: SparseSym::from_dense_upper(n, &pd),
                c,
                A: SparseMat::from_dense(p, n, &a),
                b,
                G: SparseMat::from_dense(l + q.iter().sum::<usize>(), n, &g),
                h,
                cones: ConeSpec::new(l, q),
            }
        })
}

fn arb_json() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i32>().prop_map(|v| serde_json::json!(v)),
        (-1e3f64..1e3).prop_map(|v| serde_json::json!(v)),
        "[a-zA-Z]{0,4}".prop_map(Value::String),
    ];
    leaf.prop_recursive(4, 32, 6, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..6).prop_map(Value::Array),
            proptest::collection::btree_map(
                prop_oneof![
                    Just("version".to_string()),
                    Just("n".to_string()),
                    Just("q".to_string()),
                    Just("P".to_string()),
                    Just("colptr".to_string()),
                    "[a-z]{1,3}"
                ],
                inner,
                0..6
            )
            .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(p in arb_problem()) {
        prop_assert_eq!(p.validate(), Ok(()));
        let q = parse_problem(&write_problem(&p)).unwrap();
        prop_assert_eq!(p.P.vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), q.P.vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(p.G.vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), q.G.vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(p, q);
    }

    #[test]
    fn parse_never_panics_on_arbitrary_json(v in arb_json()) {
        let _ = parse_problem(&serde_json::to_vec(&v).unwrap());
    }

    #[test]
    fn parse_never_panics_on_mutated_problem_files(p in arb_problem(), key in 0usize..11, val in arb_json()) {
        let mut v: Value = serde_json::from_slice(&write_problem(&p)).unwrap();
        let keys = ["version", "n", "p", "l", "q", "P", "c", "A", "b", "G", "h"];
        v[keys[key]] = val;
        let _ = parse_problem(&serde_json::to_vec(&v).unwrap());
    }
}
