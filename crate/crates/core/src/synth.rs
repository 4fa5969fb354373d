//! Synthetic embedding worlds with controllable cross-modal alignment.
//!
//! Each class owns an acoustic centroid drawn uniformly on the unit
//! sphere. Acoustic instances scatter around the centroid with an
//! isotropic Gaussian, and the class's semantic vector is a fixed random
//! linear map of the centroid plus its own Gaussian corruption. The two
//! noise knobs are the only difficulty controls: with both at zero the
//! semantic-acoustic linkage is exactly linear and a projection model can
//! represent it perfectly.
//!
//! Draw order is fixed (map, then all centroids, then all semantic
//! vectors, then all instances), so worlds that share a seed and
//! `(n_classes, d_a, d_s)` also share their centroids regardless of the
//! noise and sample-count settings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::embeddings::{
    ClassEmbeddingTable, EmbeddingRecord, EmbeddingTable, InstanceModality, SemanticModality,
};
use crate::linalg::Mat;
use crate::ontology::{NodeSpec, Taxonomy};
use crate::rng::{seeded_rng, standard_normal, unit_sphere, STREAM_WORLD};
use crate::{Error, Result};

/// Parameters of one synthetic world.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorldSpec {
    pub n_classes: usize,
    /// Acoustic dimension.
    pub d_a: usize,
    /// Semantic dimension.
    pub d_s: usize,
    pub samples_per_class: usize,
    /// Std-dev of the isotropic scatter of instances around centroids.
    pub within_class_noise: f64,
    /// Std-dev of the corruption added to the mapped semantic vectors.
    pub semantic_map_noise: f64,
    pub seed: u64,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_classes == 0 || self.d_a == 0 || self.d_s == 0 || self.samples_per_class == 0 {
            return Err(Error::InvalidConfig {
                message: String::from("world counts and dimensions must be at least 1"),
            });
        }
        let noise_ok = |x: f64| x.is_finite() && x >= 0.0;
        if !noise_ok(self.within_class_noise) || !noise_ok(self.semantic_map_noise) {
            return Err(Error::InvalidConfig {
                message: String::from("world noise levels must be finite and nonnegative"),
            });
        }
        Ok(())
    }
}

/// MID of synthetic class `index`.
pub fn synth_class_mid(index: usize) -> String {
    format!("/syn/{index:03}")
}

/// Generates the acoustic table, the semantic class table, and a flat
/// taxonomy (every class a root) for one spec. Identical specs produce
/// bit-identical worlds.
pub fn generate_world(spec: &WorldSpec) -> Result<(EmbeddingTable, ClassEmbeddingTable, Taxonomy)> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed, STREAM_WORLD);

    // Shared semantic map; entry variance 1/d_a keeps mapped vectors at
    // unit scale since centroids have unit norm.
    let map_scale = 1.0 / libm::sqrt(spec.d_a as f64);
    let mut map = Mat::zeros(spec.d_s, spec.d_a);
    for i in 0..spec.d_s {
        for j in 0..spec.d_a {
            map.set(i, j, map_scale * standard_normal(&mut rng));
        }
    }

    let centroids: Vec<Vec<f64>> = (0..spec.n_classes)
        .map(|_| unit_sphere(&mut rng, spec.d_a))
        .collect();

    let mut semantic_entries = BTreeMap::new();
    for (c, centroid) in centroids.iter().enumerate() {
        let mut vector = map.matvec(centroid);
        if spec.semantic_map_noise > 0.0 {
            for x in &mut vector {
                *x += spec.semantic_map_noise * standard_normal(&mut rng);
            }
        }
        semantic_entries.insert(synth_class_mid(c), vector);
    }

    let mut records = Vec::with_capacity(spec.n_classes * spec.samples_per_class);
    for (c, centroid) in centroids.iter().enumerate() {
        let mid = synth_class_mid(c);
        for s in 0..spec.samples_per_class {
            let mut vector = centroid.clone();
            if spec.within_class_noise > 0.0 {
                for x in &mut vector {
                    *x += spec.within_class_noise * standard_normal(&mut rng);
                }
            }
            records.push(EmbeddingRecord {
                instance_id: format!("{mid}/i{s:04}"),
                class_mid: mid.clone(),
                vector,
            });
        }
    }

    let acoustic = EmbeddingTable::new(InstanceModality::Acoustic, spec.d_a, records)?;
    let semantic = ClassEmbeddingTable::new(SemanticModality::Text, spec.d_s, semantic_entries)?;

    let mids: Vec<String> = (0..spec.n_classes).map(synth_class_mid).collect();
    let nodes = mids
        .iter()
        .enumerate()
        .map(|(c, mid)| NodeSpec {
            mid: mid.clone(),
            label: format!("synthetic class {c}"),
            children: Vec::new(),
        })
        .collect();
    let taxonomy = Taxonomy::new(nodes, mids)?;

    Ok((acoustic, semantic, taxonomy))
}
