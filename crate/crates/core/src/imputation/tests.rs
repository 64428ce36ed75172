use super::*;
use crate::dataset::Attribute;
use crate::learners::{KnnConfig, LearnerConfig, LinRegConfig, TreeConfig, ZeroRConfig};
use crate::missingness::{inject_mcar, MissingnessSpec};

fn linreg() -> ModelConfig {
    ModelConfig::Learner(LearnerConfig::LinReg(LinRegConfig::default()))
}

/// y = 2x + 1 with the y cells of the given rows missing.
fn line_dataset(masked: &[usize]) -> Dataset {
    let rows: Vec<Vec<Value>> = (0..12)
        .map(|i| {
            let y = if masked.contains(&i) {
                Value::Missing
            } else {
                Value::Numeric(2.0 * i as f64 + 1.0)
            };
            vec![Value::Numeric(i as f64), y]
        })
        .collect();
    Dataset::new(
        "line",
        vec![Attribute::numeric("x"), Attribute::numeric("y")],
        rows,
        None,
    )
    .unwrap()
}

#[test]
fn no_missing_cells_is_a_no_op() {
    let d = line_dataset(&[]);
    let plan = ImputationPlan::new(1, linreg(), 0);
    let out = impute_single_target(&d, &plan).unwrap();
    assert!(out.no_op);
    assert_eq!(out.dataset, d);
    assert!(out.model.is_none());
}

#[test]
fn exact_linear_target_is_recovered() {
    let d = line_dataset(&[2, 5, 9]);
    let plan = ImputationPlan::new(1, linreg(), 0);
    let out = impute_single_target(&d, &plan).unwrap();
    assert!(!out.no_op && !out.degenerate);
    for &r in &[2usize, 5, 9] {
        let got = out.dataset.cell(r, 1).as_numeric().unwrap();
        let want = 2.0 * r as f64 + 1.0;
        assert!((got - want).abs() < 1e-6, "row {r}: {got} vs {want}");
    }
    // observed cells are untouched
    for r in (0..12).filter(|r| ![2usize, 5, 9].contains(r)) {
        assert_eq!(out.dataset.cell(r, 1), d.cell(r, 1));
    }
}

#[test]
fn single_observed_class_fills_with_it_and_flags() {
    let rows: Vec<Vec<Value>> = (0..6)
        .map(|i| {
            let c = if i < 3 { Value::Nominal(1) } else { Value::Missing };
            vec![Value::Numeric(i as f64), c]
        })
        .collect();
    let d = Dataset::new(
        "t",
        vec![
            Attribute::numeric("x"),
            Attribute::nominal("c", vec!["a".into(), "b".into()]),
        ],
        rows,
        None,
    )
    .unwrap();
    let plan = ImputationPlan::new(
        1,
        ModelConfig::Learner(LearnerConfig::Tree(TreeConfig::default())),
        0,
    );
    let out = impute_single_target(&d, &plan).unwrap();
    assert!(out.degenerate);
    for r in 3..6 {
        assert_eq!(out.dataset.cell(r, 1), &Value::Nominal(1));
    }
}

#[test]
fn all_missing_target_is_an_error() {
    let rows: Vec<Vec<Value>> = (0..4)
        .map(|i| vec![Value::Numeric(i as f64), Value::Missing])
        .collect();
    let d = Dataset::new(
        "t",
        vec![Attribute::numeric("x"), Attribute::numeric("y")],
        rows,
        None,
    )
    .unwrap();
    let plan = ImputationPlan::new(1, linreg(), 0);
    assert!(matches!(
        impute_single_target(&d, &plan),
        Err(ImputeError::NoObservedValues(_))
    ));
}

#[test]
fn task_mismatch_is_rejected() {
    let d = line_dataset(&[1]);
    let plan = ImputationPlan::new(
        1,
        ModelConfig::Learner(LearnerConfig::Svm(Default::default())),
        0,
    );
    assert!(matches!(
        impute_single_target(&d, &plan),
        Err(ImputeError::Model(_))
    ));
}

#[test]
fn selection_prefers_the_better_candidate_and_keeps_order_on_ties() {
    let d = line_dataset(&[]);
    let plan = SplitPlan::kfold(4, 3);
    // linear regression nails y = 2x + 1, ZeroR cannot
    let zero_r = ModelConfig::Learner(LearnerConfig::ZeroR(ZeroRConfig::default()));
    let outcome = select_best_model(&d, 1, &[zero_r.clone(), linreg()], &plan).unwrap();
    assert_eq!(outcome.best_index, 1);

    // a single candidate wins trivially
    let outcome = select_best_model(&d, 1, &[zero_r.clone()], &plan).unwrap();
    assert_eq!(outcome.best_index, 0);

    // identical candidates: the first stays
    let outcome = select_best_model(&d, 1, &[linreg(), linreg()], &plan).unwrap();
    assert_eq!(outcome.best_index, 0);
}

#[test]
fn selection_skips_failing_candidates_and_errors_when_all_fail() {
    let d = line_dataset(&[]);
    let plan = SplitPlan::kfold(4, 3);
    let svm = ModelConfig::Learner(LearnerConfig::Svm(Default::default()));
    // the SVM cannot regress; the linreg candidate still wins
    let outcome = select_best_model(&d, 1, &[svm.clone(), linreg()], &plan).unwrap();
    assert_eq!(outcome.best_index, 1);
    assert!(outcome.candidates[0].outcome.is_err());

    assert!(matches!(
        select_best_model(&d, 1, &[svm], &plan),
        Err(ImputeError::NoViableCandidate(_))
    ));
}

#[test]
fn mice_with_nothing_missing_returns_m_copies() {
    let d = line_dataset(&[]);
    let out = mice_impute(&d, &MiceConfig { m: 3, ..Default::default() }).unwrap();
    assert_eq!(out.imputations.len(), 3);
    for imp in &out.imputations {
        assert_eq!(imp, &d);
    }
    for t in &out.traces {
        assert!(t.converged);
        assert!(t.cycles.is_empty());
    }
}

/// Three numeric attributes tied by exact linear relations, with disjoint
/// holes so every row keeps two observed predictors.
fn linear_system() -> (Dataset, Vec<(usize, usize, f64)>) {
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for i in 0..30 {
        let x1 = i as f64 * 0.7 - 10.0;
        let x2 = 3.0 - 0.2 * i as f64;
        let x3 = x1 + x2;
        let mut row = vec![
            Value::Numeric(x1),
            Value::Numeric(x2),
            Value::Numeric(x3),
        ];
        match i % 10 {
            0 => {
                row[0] = Value::Missing;
                truth.push((i, 0, x1));
            }
            3 => {
                row[1] = Value::Missing;
                truth.push((i, 1, x2));
            }
            6 => {
                row[2] = Value::Missing;
                truth.push((i, 2, x3));
            }
            _ => {}
        }
        rows.push(row);
    }
    let d = Dataset::new(
        "linear",
        vec![
            Attribute::numeric("x1"),
            Attribute::numeric("x2"),
            Attribute::numeric("x3"),
        ],
        rows,
        None,
    )
    .unwrap();
    (d, truth)
}

#[test]
fn mice_recovers_an_exact_linear_system() {
    let (d, truth) = linear_system();
    let config = MiceConfig { m: 2, seed: 4, ..Default::default() };
    let out = mice_impute(&d, &config).unwrap();
    for imp in &out.imputations {
        assert_eq!(imp.total_missing(), 0);
        for &(row, attr, want) in &truth {
            let got = imp.cell(row, attr).as_numeric().unwrap();
            assert!(
                (got - want).abs() < 1e-3,
                "row {row} attr {attr}: {got} vs {want}"
            );
        }
    }
    for t in &out.traces {
        assert!(t.converged, "chain {} did not converge: {:?}", t.chain, t.cycles);
        assert!(t.cycles.len() <= 10);
        assert!(t.cycles.last().unwrap().change <= config.tolerance);
    }
}

#[test]
fn mice_completes_co_missing_mixed_attributes() {
    // occupation/age/income-style table: nominal + two numerics with
    // overlapping holes (including a row missing two of three)
    let mut rows = Vec::new();
    for i in 0..40 {
        let occupation = i % 3;
        let age = 25.0 + (i % 17) as f64 * 2.0 + occupation as f64 * 5.0;
        let income = 20_000.0 + 1_000.0 * age + 8_000.0 * occupation as f64;
        let mut row = vec![
            Value::Nominal(occupation),
            Value::Numeric(age),
            Value::Numeric(income),
        ];
        if i % 7 == 0 {
            row[0] = Value::Missing;
        }
        if i % 9 == 0 {
            row[1] = Value::Missing;
        }
        if i % 7 == 0 && i % 9 == 0 || i % 11 == 0 {
            row[2] = Value::Missing;
        }
        rows.push(row);
    }
    let d = Dataset::new(
        "survey",
        vec![
            Attribute::nominal(
                "occupation",
                vec!["clerk".into(), "teacher".into(), "engineer".into()],
            ),
            Attribute::numeric("age"),
            Attribute::numeric("income"),
        ],
        rows,
        None,
    )
    .unwrap();
    assert!(d.total_missing() > 0);
    let out = mice_impute(&d, &MiceConfig { m: 3, seed: 1, ..Default::default() }).unwrap();
    for imp in &out.imputations {
        assert_eq!(imp.total_missing(), 0);
        // observed cells are bitwise unchanged
        for r in 0..d.n_rows() {
            for a in 0..d.n_attributes() {
                if !d.cell(r, a).is_missing() {
                    assert_eq!(d.cell(r, a), imp.cell(r, a));
                }
            }
        }
    }
}

#[test]
fn mice_rejects_an_unobservable_attribute() {
    let rows: Vec<Vec<Value>> = (0..5)
        .map(|i| vec![Value::Numeric(i as f64), Value::Missing])
        .collect();
    let d = Dataset::new(
        "t",
        vec![Attribute::numeric("x"), Attribute::numeric("y")],
        rows,
        None,
    )
    .unwrap();
    assert!(matches!(
        mice_impute(&d, &MiceConfig::default()),
        Err(ImputeError::NoObservedValues(_))
    ));
}

#[test]
fn mice_is_deterministic() {
    let (d, _) = linear_system();
    let config = MiceConfig { m: 3, seed: 9, ..Default::default() };
    let a = mice_impute(&d, &config).unwrap();
    let b = mice_impute(&d, &config).unwrap();
    assert_eq!(a.imputations, b.imputations);
    assert_eq!(a.traces, b.traces);
}

fn single_hole_numeric() -> Dataset {
    Dataset::new(
        "t",
        vec![Attribute::numeric("x")],
        vec![
            vec![Value::Missing],
            vec![Value::Numeric(5.0)],
            vec![Value::Numeric(7.0)],
        ],
        None,
    )
    .unwrap()
}

fn with_cell(d: &Dataset, row: usize, attr: usize, v: Value) -> Dataset {
    let mut out = d.clone();
    out.set_cell(row, attr, v).unwrap();
    out
}

#[test]
fn pooling_a_single_imputation_is_identity_with_zero_variance() {
    let original = single_hole_numeric();
    let imp = with_cell(&original, 0, 0, Value::Numeric(6.0));
    let pooled = pool_imputations(&original, &[imp.clone()]).unwrap();
    assert_eq!(pooled.dataset, imp);
    assert_eq!(pooled.cells.len(), 1);
    assert_eq!(pooled.cells[0].spread, 0.0);
}

#[test]
fn numeric_pooling_means_and_sample_variance() {
    let original = single_hole_numeric();
    let imps: Vec<Dataset> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&v| with_cell(&original, 0, 0, Value::Numeric(v)))
        .collect();
    let pooled = pool_imputations(&original, &imps).unwrap();
    assert_eq!(pooled.dataset.cell(0, 0), &Value::Numeric(2.0));
    assert!((pooled.cells[0].spread - 1.0).abs() < 1e-12);
    // pooled value sits inside [min, max] of the chain values
    let v = pooled.dataset.cell(0, 0).as_numeric().unwrap();
    assert!((1.0..=3.0).contains(&v));
}

#[test]
fn nominal_pooling_takes_the_mode_with_agreement() {
    let original = Dataset::new(
        "t",
        vec![Attribute::nominal("c", vec!["a".into(), "b".into()])],
        vec![vec![Value::Missing], vec![Value::Nominal(0)]],
        None,
    )
    .unwrap();
    let imps: Vec<Dataset> = [0usize, 0, 1]
        .iter()
        .map(|&c| with_cell(&original, 0, 0, Value::Nominal(c)))
        .collect();
    let pooled = pool_imputations(&original, &imps).unwrap();
    assert_eq!(pooled.dataset.cell(0, 0), &Value::Nominal(0));
    assert!((pooled.cells[0].spread - 2.0 / 3.0).abs() < 1e-12);

    // a 1-1 tie with m = 2 resolves to the lower category index
    let imps: Vec<Dataset> = [1usize, 0]
        .iter()
        .map(|&c| with_cell(&original, 0, 0, Value::Nominal(c)))
        .collect();
    let pooled = pool_imputations(&original, &imps).unwrap();
    assert_eq!(pooled.dataset.cell(0, 0), &Value::Nominal(0));
}

#[test]
fn pooling_rejects_mismatched_schemas_and_incomplete_chains() {
    let original = single_hole_numeric();
    let other = Dataset::new(
        "t",
        vec![Attribute::numeric("z")],
        vec![vec![Value::Numeric(0.0)]; 3],
        None,
    )
    .unwrap();
    assert!(matches!(
        pool_imputations(&original, &[other]),
        Err(ImputeError::SchemaMismatch)
    ));
    assert!(matches!(
        pool_imputations(&original, &[original.clone()]),
        Err(ImputeError::IncompleteImputation { .. })
    ));
}

#[test]
fn pooled_csv_lists_each_cell() {
    let original = single_hole_numeric();
    let imp = with_cell(&original, 0, 0, Value::Numeric(6.0));
    let pooled = pool_imputations(&original, &[imp]).unwrap();
    let csv = pooled.to_csv();
    assert!(csv.starts_with("row,attribute,pooled_value,variance_or_agreement\n"));
    assert!(csv.contains("0,x,6,0"));
}

/// Masks cells of a numeric dataset, imputes them back with the given cell
/// values, and scores.
#[test]
fn evaluation_scores_exact_and_imperfect_restores() {
    let rows: Vec<Vec<Value>> = (0..4)
        .map(|i| vec![Value::Numeric(i as f64 + 1.0), Value::Nominal(i % 2)])
        .collect();
    let original = Dataset::new(
        "t",
        vec![
            Attribute::numeric("x"),
            Attribute::nominal("c", vec!["a".into(), "b".into()]),
        ],
        rows,
        None,
    )
    .unwrap();
    let (masked, log) = inject_mcar(
        &original,
        &MissingnessSpec {
            targets: vec![(0, 1.0), (1, 1.0)],
            seed: 0,
        },
    )
    .unwrap();
    assert_eq!(masked.total_missing(), 8);

    // perfect restore
    let score = evaluate_imputation(&original, &log, &original).unwrap();
    assert_eq!(score.nominal_accuracy, Some(1.0));
    assert_eq!(score.numeric_rmse, Some(0.0));
    assert_eq!(score.nominal_cells, 4);
    assert_eq!(score.numeric_cells, 4);

    // 3 of 4 nominal cells restored, numeric truths [1,2,3,4] guessed as
    // [1,2,3,8]: rmse = sqrt(16/4) = 2
    let mut imputed = original.clone();
    imputed.set_cell(3, 1, Value::Nominal(0)).unwrap();
    imputed.set_cell(3, 0, Value::Numeric(8.0)).unwrap();
    let score = evaluate_imputation(&original, &log, &imputed).unwrap();
    assert_eq!(score.nominal_accuracy, Some(0.75));
    assert!((score.numeric_rmse.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(score.per_attribute.len(), 2);
}

#[test]
fn evaluation_rejects_incomplete_imputations_and_bad_logs() {
    let original = single_hole_numeric();
    let observed_original = with_cell(&original, 0, 0, Value::Numeric(6.0));
    let (masked, log) = inject_mcar(
        &observed_original,
        &MissingnessSpec::single(0, 1.0, 0),
    )
    .unwrap();
    // the imputed dataset still has the hole
    assert!(matches!(
        evaluate_imputation(&observed_original, &log, &masked),
        Err(ImputeError::IncompleteImputation { .. })
    ));
    // log disagrees with the dataset it claims to describe
    let tampered = with_cell(&observed_original, 0, 0, Value::Numeric(-1.0));
    assert!(matches!(
        evaluate_imputation(&tampered, &log, &observed_original),
        Err(ImputeError::LogMismatch(_))
    ));
}

#[test]
fn masked_numeric_rmse_matches_the_small_example() {
    let rows: Vec<Vec<Value>> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&v| vec![Value::Numeric(v)])
        .collect();
    let original = Dataset::new("t", vec![Attribute::numeric("x")], rows, None).unwrap();
    let (_, log) = inject_mcar(&original, &MissingnessSpec::single(0, 1.0, 0)).unwrap();
    let mut imputed = original.clone();
    imputed.set_cell(2, 0, Value::Numeric(7.0)).unwrap();
    let score = evaluate_imputation(&original, &log, &imputed).unwrap();
    assert!((score.numeric_rmse.unwrap() - 2.309401076758503).abs() < 1e-12);
}

#[test]
fn knn_based_single_imputation_works_on_nominal_targets() {
    // class is determined by x's sign
    let rows: Vec<Vec<Value>> = (0..10)
        .map(|i| {
            let x = i as f64 - 4.5;
            let c = if i == 3 || i == 8 {
                Value::Missing
            } else {
                Value::Nominal(usize::from(x > 0.0))
            };
            vec![Value::Numeric(x), c]
        })
        .collect();
    let d = Dataset::new(
        "t",
        vec![
            Attribute::numeric("x"),
            Attribute::nominal("c", vec!["neg".into(), "pos".into()]),
        ],
        rows,
        None,
    )
    .unwrap();
    let plan = ImputationPlan::new(
        1,
        ModelConfig::Learner(LearnerConfig::Knn(KnnConfig { k: 3 })),
        0,
    );
    let out = impute_single_target(&d, &plan).unwrap();
    assert_eq!(out.dataset.cell(3, 1), &Value::Nominal(0));
    assert_eq!(out.dataset.cell(8, 1), &Value::Nominal(1));
}
