//! JSON serialization of constructed roots.
//!
//! A recipe stores what the construction chose (anchors, seed, pocket
//! schedule), not samples; loading it rebuilds the same symbolic evaluator
//! against the map it was made for.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{Theorem, TheoremCase};
use crate::engine::{Piece, RootFunction, Schedule};
use crate::error::{Error, Result};
use crate::kernel::{KernelRecipe, KernelRoot};
use crate::monotone::MonotoneSegment;
use crate::pm::PmFunction;

pub const RECIPE_FORMAT: &str = "pmroot-recipe/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RootRecipe {
    pub format: String,
    pub source_theorem: Theorem,
    pub theorem_case: TheoremCase,
    pub mirrored: bool,
    /// SHA-256 of the canonical JSON of the map, hex encoded.
    pub fixture_hash: String,
    /// Lap carrying the kernel, in the (possibly mirrored) construction coordinates.
    pub kernel_lap: usize,
    pub kernel: KernelRecipe,
    pub pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

/// Hash of the map's canonical input form.
pub fn fixture_hash(f: &PmFunction) -> String {
    let json = serde_json::to_string(&f.to_input()).expect("inputs serialize");
    hex::encode(Sha256::digest(json.as_bytes()))
}

impl RootRecipe {
    /// Recipe for `root`, which was constructed for `f`.
    pub fn from_root(f: &PmFunction, root: &RootFunction) -> Self {
        RootRecipe {
            format: RECIPE_FORMAT.to_string(),
            source_theorem: root.source_theorem(),
            theorem_case: root.theorem_case(),
            mirrored: root.mirrored(),
            fixture_hash: fixture_hash(f),
            kernel_lap: root.kernel_lap(),
            kernel: root.kernel().recipe(),
            pieces: root.pieces().to_vec(),
            schedule: root.schedule().cloned(),
        }
    }

    /// Rebuilds the evaluator. Ranges and junctions are not re-checked here;
    /// that is the verifier's job.
    pub fn instantiate(&self, f: &PmFunction) -> Result<RootFunction> {
        if self.format != RECIPE_FORMAT {
            return Err(Error::Recipe(format!("unsupported format {:?}", self.format)));
        }
        let hash = fixture_hash(f);
        if hash != self.fixture_hash {
            return Err(Error::Recipe(format!("recipe was made for map {}, not {hash}", self.fixture_hash)));
        }
        let base = if self.mirrored { f.mirror_conjugate() } else { f.clone() };
        if self.kernel_lap >= base.lap_count() {
            return Err(Error::Recipe(format!("kernel lap {} out of range", self.kernel_lap)));
        }
        let phi = MonotoneSegment::from_lap(&base, self.kernel_lap);
        let kernel = KernelRoot::from_recipe(phi, &self.kernel)?;
        let mut root =
            RootFunction::unchecked(base, self.kernel_lap, kernel, self.pieces.clone(), self.source_theorem, self.theorem_case)?;
        root.set_mirrored(self.mirrored);
        root.set_schedule(self.schedule.clone());
        Ok(root)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recipes serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Recipe(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{construct, construct_auto, ConstructOptions, RootClass};
    use crate::fixtures;

    fn round_trip(f: &PmFunction, root: &RootFunction) {
        let json = RootRecipe::from_root(f, root).to_json();
        let back = RootRecipe::from_json(&json).unwrap().instantiate(f).unwrap();
        for i in 0..=1000 {
            let x = f.domain().0 + (f.domain().1 - f.domain().0) * i as f64 / 1000.0;
            assert!((root.eval(x).unwrap() - back.eval(x).unwrap()).abs() <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn round_trips() {
        let opts = ConstructOptions::default();
        for (f, t) in [
            (fixtures::f1(), Theorem::T21),
            (fixtures::f2(), Theorem::T22),
            (fixtures::f3(), Theorem::T23),
            (fixtures::f2(), Theorem::T24),
        ] {
            round_trip(&f, &construct(&f, t, &opts).unwrap());
        }
        let g = fixtures::f1().mirror_conjugate();
        round_trip(&g, &construct_auto(&g, RootClass::Any, &opts).unwrap());
    }

    #[test]
    fn wrong_map_rejected() {
        let f1 = fixtures::f1();
        let root = construct(&f1, Theorem::T21, &ConstructOptions::default()).unwrap();
        let recipe = RootRecipe::from_root(&f1, &root);
        assert!(matches!(recipe.instantiate(&fixtures::f2()), Err(Error::Recipe(_))));
    }
}
