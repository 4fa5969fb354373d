//! Minibatch SGD on a seen-class classification loss.
//!
//! Each epoch shuffles the seen-class training instances (seeded,
//! independent of the initialization stream), walks minibatches including
//! the final partial one, and applies plain SGD steps from analytic
//! gradients. After every epoch the current parameters are scored by
//! zero-shot top-1 accuracy on the disjoint validation classes; the
//! reported parameters are either the best-validation checkpoint (earliest
//! epoch on ties) or the final-epoch state.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::embeddings::{ClassEmbeddingTable, EmbeddingTable};
use crate::linalg::{dot, Mat};
use crate::model::{init_params, score_matrix, Activation, ClassScores, ProjectionParams};
use crate::rng::{seeded_rng, STREAM_SHUFFLE};
use crate::{Error, Result};

/// Training loss over seen-class compatibility scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LossKind {
    #[default]
    SoftmaxCrossEntropy,
    MarginRanking,
}

/// Which epoch's parameters the report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Selection {
    #[default]
    BestValidation,
    FinalEpoch,
}

/// Hyperparameters; the defaults are learning rate 0.01, batch size 32,
/// 200 epochs of plain SGD, cross-entropy loss, tanh activation, and
/// factorization rank equal to the semantic dimension.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", default))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub loss: LossKind,
    /// Margin for [`LossKind::MarginRanking`]; ignored by cross-entropy.
    pub margin: f64,
    pub selection: Selection,
    pub activation: Activation,
    /// Factorization rank; `None` means the semantic dimension.
    pub rank: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            batch_size: 32,
            epochs: 200,
            seed: 0,
            loss: LossKind::default(),
            margin: 1.0,
            selection: Selection::default(),
            activation: Activation::default(),
            rank: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |message: &str| {
            Err(Error::InvalidConfig {
                message: message.to_string(),
            })
        };
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning_rate must be positive and finite");
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return fail("margin must be positive and finite");
        }
        if self.rank == Some(0) {
            return fail("rank must be at least 1");
        }
        Ok(())
    }
}

/// Per-instance loss over scored seen classes.
///
/// Cross-entropy is `-log softmax(s)[true]` with max-subtraction for
/// stability; margin ranking is `sum over y != true of
/// max(0, margin - s_true + s_y)`.
pub fn loss(scores: &ClassScores, true_class: &str, config: &TrainConfig) -> Result<f64> {
    let s_true = scores.get(true_class).ok_or_else(|| Error::MissingClass {
        class: true_class.to_string(),
        context: String::from("scored classes"),
    })?;
    match config.loss {
        LossKind::SoftmaxCrossEntropy => {
            let max = scores
                .iter()
                .map(|(_, s)| s)
                .fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = scores.iter().map(|(_, s)| libm::exp(s - max)).sum();
            Ok(libm::log(denom) - (s_true - max))
        }
        LossKind::MarginRanking => {
            let mut total = 0.0;
            for (mid, s) in scores.iter() {
                if mid != true_class {
                    let violation = config.margin - s_true + s;
                    if violation > 0.0 {
                        total += violation;
                    }
                }
            }
            Ok(total)
        }
    }
}

/// One training instance: acoustic vector plus its class.
#[derive(Debug, Clone, Copy)]
pub struct BatchItem<'a> {
    pub theta: &'a [f64],
    pub class_mid: &'a str,
}

/// Mean-over-batch analytic gradients of the configured loss with respect
/// to `U` and `V`, plus the mean batch loss.
///
/// With hidden activations `a_y = t(U^T phi_y)` and instance projections
/// `w_i = V theta_i`, the score is `s_iy = a_y . w_i`. Given per-score loss
/// derivatives `g_iy`, the chain rule yields
/// `dV = sum_i (sum_y g_iy a_y) theta_i^T` and
/// `dU = sum_y phi_y (u_y o t'(a_y))^T` with `u_y = sum_i g_iy w_i`.
pub fn gradients(
    params: &ProjectionParams,
    batch: &[BatchItem<'_>],
    seen_table: &ClassEmbeddingTable,
    config: &TrainConfig,
) -> Result<(Mat, Mat, f64)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("gradient batch"),
        });
    }
    if seen_table.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("seen class table"),
        });
    }
    if seen_table.dimension() != params.d_s() {
        return Err(Error::DimensionMismatch {
            expected: params.d_s(),
            found: seen_table.dimension(),
            context: String::from("seen semantic table"),
        });
    }

    let classes: Vec<(&str, &[f64])> = seen_table.iter().collect();
    let n_classes = classes.len();
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, (mid, _))| (*mid, i))
        .collect();

    // hidden activations per seen class, reused across the whole batch
    let activations: Vec<Vec<f64>> = classes
        .iter()
        .map(|(_, phi)| Ok(params.hidden(check_theta_like(phi, params.d_s(), "semantic")?)))
        .collect::<Result<_>>()?;

    let mut du = Mat::zeros(params.d_s(), params.rank());
    let mut dv = Mat::zeros(params.rank(), params.d_a());
    // per-class accumulators u_y, flushed into dU once per batch
    let mut class_acc: Vec<Vec<f64>> = vec![vec![0.0; params.rank()]; n_classes];
    let mut total_loss = 0.0;
    let inv_batch = 1.0 / batch.len() as f64;

    for item in batch {
        check_theta_like(item.theta, params.d_a(), "acoustic")?;
        let true_idx = *class_index
            .get(item.class_mid)
            .ok_or_else(|| Error::MissingClass {
                class: item.class_mid.to_string(),
                context: String::from("seen semantic table"),
            })?;

        let w = params.v().matvec(item.theta);
        let scores: Vec<f64> = activations.iter().map(|a| dot(a, &w)).collect();

        let mut g = vec![0.0; n_classes];
        match config.loss {
            LossKind::SoftmaxCrossEntropy => {
                let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut denom = 0.0;
                for (gy, &s) in g.iter_mut().zip(&scores) {
                    *gy = libm::exp(s - max);
                    denom += *gy;
                }
                for gy in &mut g {
                    *gy /= denom;
                }
                total_loss += libm::log(denom) - (scores[true_idx] - max);
                g[true_idx] -= 1.0;
            }
            LossKind::MarginRanking => {
                let s_true = scores[true_idx];
                for (y, &s) in scores.iter().enumerate() {
                    if y != true_idx {
                        let violation = config.margin - s_true + s;
                        if violation > 0.0 {
                            total_loss += violation;
                            g[y] = 1.0;
                            g[true_idx] -= 1.0;
                        }
                    }
                }
            }
        }

        // dV contribution: (sum_y g_y a_y) outer theta
        let mut q = vec![0.0; params.rank()];
        for (gy, a) in g.iter().zip(&activations) {
            if *gy != 0.0 {
                for (qk, &ak) in q.iter_mut().zip(a) {
                    *qk += gy * ak;
                }
            }
        }
        dv.add_outer(&q, item.theta, inv_batch);

        // dU contributions accumulate per class across the batch
        for (gy, acc) in g.iter().zip(&mut class_acc) {
            if *gy != 0.0 {
                for (ck, &wk) in acc.iter_mut().zip(&w) {
                    *ck += gy * wk;
                }
            }
        }
    }

    for (((_, phi), a), acc) in classes.iter().zip(&activations).zip(&class_acc) {
        let mut back: Vec<f64> = acc.clone();
        for (b, &ak) in back.iter_mut().zip(a) {
            *b *= params.activation().derivative_from_output(ak);
        }
        du.add_outer(phi, &back, inv_batch);
    }

    Ok((du, dv, total_loss * inv_batch))
}

fn check_theta_like<'a>(v: &'a [f64], expected: usize, what: &str) -> Result<&'a [f64]> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
            context: alloc::format!("{what} vector"),
        });
    }
    Ok(v)
}

/// In-place SGD update: `U -= lr dU`, `V -= lr dV`.
pub fn sgd_step(
    params: &mut ProjectionParams,
    du: &Mat,
    dv: &Mat,
    learning_rate: f64,
) -> Result<()> {
    if (du.rows(), du.cols()) != (params.d_s(), params.rank())
        || (dv.rows(), dv.cols()) != (params.rank(), params.d_a())
    {
        return Err(Error::DimensionMismatch {
            expected: params.d_s() * params.rank(),
            found: du.rows() * du.cols(),
            context: String::from("gradient shapes"),
        });
    }
    params.u_mut().add_scaled(du, -learning_rate);
    params.v_mut().add_scaled(dv, -learning_rate);
    Ok(())
}

/// Loss curve, validation curve, and the selected parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-instance training loss per epoch.
    pub train_loss: Vec<f64>,
    /// Zero-shot top-1 validation accuracy per epoch.
    pub val_accuracy: Vec<f64>,
    /// Epoch index (0-based) whose parameters were selected.
    pub selected_epoch: usize,
    pub params: ProjectionParams,
}

/// Trains projection parameters on seen-class instances with model
/// selection on the disjoint validation classes.
pub fn train(
    train_instances: &EmbeddingTable,
    seen_semantics: &ClassEmbeddingTable,
    val_instances: &EmbeddingTable,
    val_semantics: &ClassEmbeddingTable,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if train_instances.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("training instances"),
        });
    }
    if val_instances.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("validation instances"),
        });
    }
    if let Some(overlap) = seen_semantics
        .classes()
        .intersection(&val_semantics.classes())
        .next()
    {
        return Err(Error::OverlappingClassSets {
            class: overlap.clone(),
        });
    }
    if seen_semantics.dimension() != val_semantics.dimension() {
        return Err(Error::DimensionMismatch {
            expected: seen_semantics.dimension(),
            found: val_semantics.dimension(),
            context: String::from("validation semantic table"),
        });
    }
    if train_instances.dimension() != val_instances.dimension() {
        return Err(Error::DimensionMismatch {
            expected: train_instances.dimension(),
            found: val_instances.dimension(),
            context: String::from("validation instances"),
        });
    }
    for record in train_instances.records() {
        if seen_semantics.get(&record.class_mid).is_none() {
            return Err(Error::MissingClass {
                class: record.class_mid.clone(),
                context: String::from("seen semantic table"),
            });
        }
    }
    for record in val_instances.records() {
        if val_semantics.get(&record.class_mid).is_none() {
            return Err(Error::MissingClass {
                class: record.class_mid.clone(),
                context: String::from("validation semantic table"),
            });
        }
    }

    let d_s = seen_semantics.dimension();
    let d_a = train_instances.dimension();
    let rank = config.rank.unwrap_or(d_s);
    let mut params = init_params(d_s, d_a, rank, config.activation, config.seed);
    let mut shuffle_rng = seeded_rng(config.seed, STREAM_SHUFFLE);

    let n = train_instances.len();
    let mut order: Vec<usize> = (0..n).collect();
    let val_thetas: Vec<Vec<f64>> = val_instances
        .records()
        .iter()
        .map(|r| r.vector.clone())
        .collect();

    let mut train_loss = Vec::with_capacity(config.epochs);
    let mut val_accuracy = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, ProjectionParams)> = None;

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<BatchItem<'_>> = chunk
                .iter()
                .map(|&i| {
                    let record = &train_instances.records()[i];
                    BatchItem {
                        theta: &record.vector,
                        class_mid: &record.class_mid,
                    }
                })
                .collect();
            let (du, dv, batch_loss) = gradients(&params, &batch, seen_semantics, config)?;
            sgd_step(&mut params, &du, &dv, config.learning_rate)?;
            epoch_loss += batch_loss * chunk.len() as f64;
        }
        train_loss.push(epoch_loss / n as f64);

        let scores = score_matrix(&params, &val_thetas, val_semantics)?;
        let correct = scores
            .iter()
            .zip(val_instances.records())
            .filter(|(s, r)| s.argmax() == r.class_mid)
            .count();
        let accuracy = correct as f64 / val_thetas.len() as f64;
        val_accuracy.push(accuracy);

        let improved = match &best {
            Some((best_acc, _, _)) => accuracy > *best_acc,
            None => true,
        };
        if improved {
            best = Some((accuracy, epoch, params.clone()));
        }
    }

    let (selected_epoch, selected_params) = match config.selection {
        Selection::BestValidation => {
            let (_, epoch, params) = best.expect("epochs >= 1 guarantees a checkpoint");
            (epoch, params)
        }
        Selection::FinalEpoch => (config.epochs - 1, params),
    };

    Ok(TrainReport {
        train_loss,
        val_accuracy,
        selected_epoch,
        params: selected_params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{EmbeddingRecord, InstanceModality, SemanticModality};

    const LN_3: f64 = 1.0986122886681098;

    fn scores(entries: &[(&str, f64)]) -> ClassScores {
        ClassScores::new(
            entries
                .iter()
                .map(|(mid, s)| (mid.to_string(), *s))
                .collect(),
        )
        .unwrap()
    }

    fn class_table(entries: &[(&str, &[f64])], dim: usize) -> ClassEmbeddingTable {
        ClassEmbeddingTable::new(
            SemanticModality::Text,
            dim,
            entries
                .iter()
                .map(|(mid, v)| (mid.to_string(), v.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn instance_table(entries: &[(&str, &str, &[f64])], dim: usize) -> EmbeddingTable {
        EmbeddingTable::new(
            InstanceModality::Acoustic,
            dim,
            entries
                .iter()
                .map(|(id, mid, v)| EmbeddingRecord {
                    instance_id: id.to_string(),
                    class_mid: mid.to_string(),
                    vector: v.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cross_entropy_hand_values() {
        let config = TrainConfig::default();
        let uniform = scores(&[("a", 0.4), ("b", 0.4), ("c", 0.4)]);
        assert!((loss(&uniform, "b", &config).unwrap() - LN_3).abs() < 1e-12);

        // frozen against direct evaluation of -log softmax
        let s = scores(&[("a", 2.0), ("b", 0.5), ("c", -1.0)]);
        assert!((loss(&s, "a", &config).unwrap() - 0.24131129665715703).abs() < 1e-12);

        assert!(matches!(
            loss(&s, "nope", &config),
            Err(Error::MissingClass { .. })
        ));
    }

    #[test]
    fn cross_entropy_is_shift_invariant() {
        let config = TrainConfig::default();
        let base = scores(&[("a", 1.0), ("b", -0.5), ("c", 0.25)]);
        let shifted = scores(&[("a", 101.0), ("b", 99.5), ("c", 100.25)]);
        let l0 = loss(&base, "c", &config).unwrap();
        let l1 = loss(&shifted, "c", &config).unwrap();
        assert!((l0 - l1).abs() < 1e-10);
    }

    #[test]
    fn margin_ranking_hand_values() {
        let config = TrainConfig {
            loss: LossKind::MarginRanking,
            ..TrainConfig::default()
        };
        // true score exceeds all others by at least the margin -> 0
        let saturated = scores(&[("a", 3.0), ("b", 1.0), ("c", 0.0)]);
        assert_eq!(loss(&saturated, "a", &config).unwrap(), 0.0);

        // hinge terms: (1 - 0.5 + 0.2) + (1 - 0.5 + 0.9) = 0.7 + 1.4
        let active = scores(&[("a", 0.5), ("b", 0.2), ("c", 0.9)]);
        assert!((loss(&active, "a", &config).unwrap() - 2.1).abs() < 1e-12);
    }

    #[test]
    fn single_class_loss_and_gradients_vanish() {
        let config = TrainConfig::default();
        let only = scores(&[("a", 2.7)]);
        assert_eq!(loss(&only, "a", &config).unwrap(), 0.0);

        let params = init_params(2, 2, 2, Activation::Tanh, 1);
        let seen = class_table(&[("a", &[0.5, 0.5])], 2);
        let theta = [1.0, -1.0];
        let batch = [BatchItem {
            theta: &theta,
            class_mid: "a",
        }];
        let (du, dv, l) = gradients(&params, &batch, &seen, &config).unwrap();
        assert_eq!(l, 0.0);
        assert!(du.as_slice().iter().all(|&x| x == 0.0));
        assert!(dv.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_params_sit_at_a_saddle() {
        let config = TrainConfig::default();
        let params = crate::model::ProjectionParams::from_parts(
            3,
            2,
            2,
            Activation::Tanh,
            alloc::vec![0.0; 6],
            alloc::vec![0.0; 4],
            0,
        )
        .unwrap();
        let seen = class_table(&[("a", &[1.0, 0.0, 0.0]), ("b", &[0.0, 1.0, 0.0])], 3);
        let theta = [0.3, -0.7];
        let batch = [BatchItem {
            theta: &theta,
            class_mid: "a",
        }];
        let (du, dv, l) = gradients(&params, &batch, &seen, &config).unwrap();
        // all scores are identically zero, so the loss is ln 2 and both
        // gradients vanish (hidden activations and projections are zero)
        assert!((l - libm::log(2.0)).abs() < 1e-12);
        assert!(du.as_slice().iter().all(|&x| x == 0.0));
        assert!(dv.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sgd_step_is_plain_descent() {
        let mut params = init_params(2, 2, 2, Activation::Tanh, 5);
        let before = params.clone();

        let zero_u = Mat::zeros(2, 2);
        let zero_v = Mat::zeros(2, 2);
        sgd_step(&mut params, &zero_u, &zero_v, 0.01).unwrap();
        assert_eq!(params, before);

        let mut du = Mat::zeros(2, 2);
        du.set(0, 1, 1.0);
        sgd_step(&mut params, &du, &zero_v, 0.01).unwrap();
        assert!((params.u().get(0, 1) - (before.u().get(0, 1) - 0.01)).abs() < 1e-15);

        sgd_step(&mut params, &du, &zero_v, 0.01).unwrap();
        assert!((params.u().get(0, 1) - (before.u().get(0, 1) - 0.02)).abs() < 1e-15);

        let wrong = Mat::zeros(3, 3);
        assert!(sgd_step(&mut params, &wrong, &zero_v, 0.01).is_err());
    }

    fn tiny_world() -> (
        EmbeddingTable,
        ClassEmbeddingTable,
        EmbeddingTable,
        ClassEmbeddingTable,
    ) {
        let train = instance_table(
            &[
                ("t0", "a", &[1.0, 0.1]),
                ("t1", "a", &[0.9, -0.1]),
                ("t2", "b", &[-0.1, 1.0]),
                ("t3", "b", &[0.1, 0.9]),
            ],
            2,
        );
        let seen = class_table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])], 2);
        let val = instance_table(&[("v0", "c", &[-1.0, 0.0]), ("v1", "d", &[0.0, -1.0])], 2);
        let val_sem = class_table(&[("c", &[-1.0, 0.0]), ("d", &[0.0, -1.0])], 2);
        (train, seen, val, val_sem)
    }

    #[test]
    fn training_is_deterministic_and_respects_lr_zero_limit() {
        let (train_t, seen, val_t, val_sem) = tiny_world();
        let config = TrainConfig {
            epochs: 3,
            batch_size: 2,
            seed: 42,
            ..TrainConfig::default()
        };
        let r1 = train(&train_t, &seen, &val_t, &val_sem, &config).unwrap();
        let r2 = train(&train_t, &seen, &val_t, &val_sem, &config).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.train_loss.len(), 3);
        assert_eq!(r1.val_accuracy.len(), 3);

        // one epoch at a vanishing rate leaves parameters at initialization
        let frozen = TrainConfig {
            epochs: 1,
            learning_rate: 1e-300,
            selection: Selection::FinalEpoch,
            seed: 42,
            ..TrainConfig::default()
        };
        let r = train(&train_t, &seen, &val_t, &val_sem, &frozen).unwrap();
        let fresh = init_params(2, 2, 2, Activation::Tanh, 42);
        for (a, b) in r.params.u().as_slice().iter().zip(fresh.u().as_slice()) {
            assert!((a - b).abs() < 1e-250);
        }
    }

    #[test]
    fn epoch_count_does_not_perturb_early_epochs() {
        let (train_t, seen, val_t, val_sem) = tiny_world();
        let short = TrainConfig {
            epochs: 2,
            seed: 7,
            ..TrainConfig::default()
        };
        let long = TrainConfig {
            epochs: 5,
            seed: 7,
            ..TrainConfig::default()
        };
        let r_short = train(&train_t, &seen, &val_t, &val_sem, &short).unwrap();
        let r_long = train(&train_t, &seen, &val_t, &val_sem, &long).unwrap();
        assert_eq!(r_short.train_loss[..2], r_long.train_loss[..2]);
        assert_eq!(r_short.val_accuracy[..2], r_long.val_accuracy[..2]);
    }

    #[test]
    fn overlapping_class_sets_are_rejected() {
        let (train_t, seen, val_t, _) = tiny_world();
        let bad_val_sem = class_table(&[("a", &[1.0, 0.0]), ("c", &[-1.0, 0.0])], 2);
        assert!(matches!(
            train(
                &train_t,
                &seen,
                &val_t,
                &bad_val_sem,
                &TrainConfig::default()
            ),
            Err(Error::OverlappingClassSets { .. })
        ));
    }

    #[test]
    fn full_batch_loss_is_nonincreasing_early() {
        // fixed separable data, small rate, full batches: any sign error in
        // the gradients would show up as an increasing loss curve
        let (train_t, seen, val_t, val_sem) = tiny_world();
        let config = TrainConfig {
            epochs: 10,
            batch_size: 4,
            learning_rate: 1e-3,
            seed: 3,
            ..TrainConfig::default()
        };
        let report = train(&train_t, &seen, &val_t, &val_sem, &config).unwrap();
        for w in report.train_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn selection_picks_earliest_maximum() {
        let (train_t, seen, val_t, val_sem) = tiny_world();
        let config = TrainConfig {
            epochs: 4,
            seed: 11,
            ..TrainConfig::default()
        };
        let report = train(&train_t, &seen, &val_t, &val_sem, &config).unwrap();
        let best = report
            .val_accuracy
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let earliest = report.val_accuracy.iter().position(|&a| a == best).unwrap();
        assert_eq!(report.selected_epoch, earliest);

        let final_cfg = TrainConfig {
            selection: Selection::FinalEpoch,
            ..config
        };
        let report = train(&train_t, &seen, &val_t, &val_sem, &final_cfg).unwrap();
        assert_eq!(report.selected_epoch, 3);
    }

    #[test]
    fn rank_defaults_to_semantic_dimension() {
        let (train_t, seen, val_t, val_sem) = tiny_world();
        let config = TrainConfig {
            epochs: 1,
            ..TrainConfig::default()
        };
        let report = train(&train_t, &seen, &val_t, &val_sem, &config).unwrap();
        assert_eq!(report.params.rank(), seen.dimension());

        let low_rank = TrainConfig {
            epochs: 1,
            rank: Some(1),
            ..TrainConfig::default()
        };
        let report = train(&train_t, &seen, &val_t, &val_sem, &low_rank).unwrap();
        assert_eq!(report.params.rank(), 1);
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let bad_epochs = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(bad_epochs.validate().is_err());
        let bad_rate = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(bad_rate.validate().is_err());
        let bad_batch = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(bad_batch.validate().is_err());
    }
}
