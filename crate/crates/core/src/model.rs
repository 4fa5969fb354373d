//! Factorized nonlinear projection and compatibility classification.
//!
//! A semantic class vector `phi` (length `d_s`) is projected into acoustic
//! space as `H(phi) = V^T t(U^T phi)` with `U: d_s x r`, `V: r x d_a`, and
//! `t` either tanh or the identity. The compatibility of an acoustic
//! instance `theta` with class `y` is the dot product `H(phi(y)) . theta`;
//! classification picks the candidate with the highest compatibility,
//! breaking exact ties toward the lexicographically smallest MID.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::{dot, Mat};
use crate::rng::{seeded_rng, STREAM_INIT};
use crate::{Error, Result};

/// Elementwise nonlinearity between the two projection layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(x),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation output `a = t(x)`;
    /// for tanh that is `1 - a^2`, for identity it is 1.
    pub fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }
}

/// Learned projection parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionParams {
    d_s: usize,
    d_a: usize,
    r: usize,
    activation: Activation,
    u: Mat,
    v: Mat,
    seed: u64,
}

impl ProjectionParams {
    /// Rebuilds parameters from raw row-major buffers (checkpoint loading).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        d_s: usize,
        d_a: usize,
        r: usize,
        activation: Activation,
        u: Vec<f64>,
        v: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        let u = Mat::from_vec(d_s, r, u)?;
        let v = Mat::from_vec(r, d_a, v)?;
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite {
                context: String::from("projection parameters"),
            });
        }
        Ok(ProjectionParams {
            d_s,
            d_a,
            r,
            activation,
            u,
            v,
            seed,
        })
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    pub(crate) fn u_mut(&mut self) -> &mut Mat {
        &mut self.u
    }

    pub(crate) fn v_mut(&mut self) -> &mut Mat {
        &mut self.v
    }

    /// Hidden activations `t(U^T phi)`.
    pub(crate) fn hidden(&self, phi: &[f64]) -> Vec<f64> {
        let mut h = self.u.matvec_t(phi);
        for x in &mut h {
            *x = self.activation.apply(*x);
        }
        h
    }
}

/// Uniform fan-based initialization: entries of each matrix are i.i.d.
/// uniform on +-sqrt(6 / (fan_in + fan_out)).
pub fn init_params(
    d_s: usize,
    d_a: usize,
    r: usize,
    activation: Activation,
    seed: u64,
) -> ProjectionParams {
    let mut rng = seeded_rng(seed, STREAM_INIT);
    let mut fill = |rows: usize, cols: usize, fan_in: usize, fan_out: usize| {
        let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Mat::from_vec(rows, cols, data).expect("sized by construction")
    };
    let u = fill(d_s, r, d_s, r);
    let v = fill(r, d_a, r, d_a);
    ProjectionParams {
        d_s,
        d_a,
        r,
        activation,
        u,
        v,
        seed,
    }
}

/// Projects a semantic vector into acoustic space: `V^T t(U^T phi)`.
pub fn project_semantic(params: &ProjectionParams, phi: &[f64]) -> Result<Vec<f64>> {
    if phi.len() != params.d_s {
        return Err(Error::DimensionMismatch {
            expected: params.d_s,
            found: phi.len(),
            context: String::from("semantic vector"),
        });
    }
    Ok(params.v.matvec_t(&params.hidden(phi)))
}

/// Compatibility `F(x, y) = H(phi(y)) . theta(x)`.
pub fn compatibility(params: &ProjectionParams, phi: &[f64], theta: &[f64]) -> Result<f64> {
    if theta.len() != params.d_a {
        return Err(Error::DimensionMismatch {
            expected: params.d_a,
            found: theta.len(),
            context: String::from("acoustic vector"),
        });
    }
    Ok(dot(&project_semantic(params, phi)?, theta))
}

/// Compatibility of one instance against a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    scores: BTreeMap<String, f64>,
}

impl ClassScores {
    pub fn new(scores: BTreeMap<String, f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::EmptyInput {
                context: String::from("class scores"),
            });
        }
        for (mid, score) in &scores {
            if !score.is_finite() {
                return Err(Error::NonFinite {
                    context: alloc::format!("score for class {mid:?}"),
                });
            }
        }
        Ok(ClassScores { scores })
    }

    pub fn get(&self, mid: &str) -> Option<f64> {
        self.scores.get(mid).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Iterates `(mid, score)` in sorted MID order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Highest-scoring MID; exact ties go to the lexicographically smallest,
    /// which is the first one encountered in sorted iteration.
    pub fn argmax(&self) -> &str {
        let mut best: Option<(&str, f64)> = None;
        for (mid, score) in self.iter() {
            match best {
                Some((_, s)) if score <= s => {}
                _ => best = Some((mid, score)),
            }
        }
        best.expect("scores verified non-empty").0
    }
}

/// Projections of every candidate class, computed once and reused across
/// instances.
fn candidate_projections(
    params: &ProjectionParams,
    candidates: &crate::embeddings::ClassEmbeddingTable,
) -> Result<Vec<(String, Vec<f64>)>> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("candidate class set"),
        });
    }
    candidates
        .iter()
        .map(|(mid, phi)| Ok((mid.to_string(), project_semantic(params, phi)?)))
        .collect()
}

/// Scores one instance against projected candidates.
fn score_against(
    projections: &[(String, Vec<f64>)],
    theta: &[f64],
    d_a: usize,
) -> Result<ClassScores> {
    if theta.len() != d_a {
        return Err(Error::DimensionMismatch {
            expected: d_a,
            found: theta.len(),
            context: String::from("acoustic vector"),
        });
    }
    let scores = projections
        .iter()
        .map(|(mid, proj)| (mid.clone(), dot(proj, theta)))
        .collect();
    ClassScores::new(scores)
}

/// Classifies one acoustic instance against the candidate classes.
pub fn classify(
    params: &ProjectionParams,
    theta: &[f64],
    candidates: &crate::embeddings::ClassEmbeddingTable,
) -> Result<String> {
    let projections = candidate_projections(params, candidates)?;
    Ok(score_against(&projections, theta, params.d_a)?
        .argmax()
        .to_string())
}

/// Scores a batch of instances; candidate projections are computed once.
pub fn score_matrix(
    params: &ProjectionParams,
    thetas: &[Vec<f64>],
    candidates: &crate::embeddings::ClassEmbeddingTable,
) -> Result<Vec<ClassScores>> {
    let projections = candidate_projections(params, candidates)?;
    thetas
        .iter()
        .map(|theta| score_against(&projections, theta, params.d_a))
        .collect()
}
