//! Kochen-Specker vector sets: loading, exact validation, and the exhaustive
//! {0,1}-colourability search.
//!
//! A set has the Kochen-Specker property when no {0,1}-colouring of its
//! vectors gives every orthogonal pair at most one 1 and every orthogonal
//! d-tuple exactly one 1. Sets are shipped as JSON data with exact integer
//! components; orthogonality is checked in integer arithmetic, no tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite vector family in ℝ^d with orthogonality contexts (index tuples of
/// size 2 up to d).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSSet {
    pub dimension: usize,
    pub vectors: Vec<Vec<i64>>,
    pub contexts: Vec<Vec<usize>>,
}

impl KSSet {
    pub fn new(dimension: usize, vectors: Vec<Vec<i64>>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        let set = KSSet {
            dimension,
            vectors,
            contexts,
        };
        set.validate()?;
        Ok(set)
    }

    /// Parse from JSON. Vector components must be exact integers; floats are
    /// rejected by the deserializer.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let set: KSSet = serde_json::from_str(s)?;
        set.validate()?;
        Ok(set)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("KSSet serializes")
    }

    pub fn n_vectors(&self) -> usize {
        self.vectors.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d < 3 {
            return Err(Error::validation("KS set needs dimension ≥ 3"));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::validation(format!(
                    "vector {i} has {} components, expected {d}",
                    v.len()
                )));
            }
            if v.iter().all(|&x| x == 0) {
                return Err(Error::validation(format!("vector {i} is zero")));
            }
        }
        for i in 0..self.vectors.len() {
            for j in i + 1..self.vectors.len() {
                if parallel(&self.vectors[i], &self.vectors[j]) {
                    return Err(Error::validation(format!(
                        "vectors {i} and {j} span the same line"
                    )));
                }
            }
        }
        let mut used = vec![false; self.vectors.len()];
        for (ci, ctx) in self.contexts.iter().enumerate() {
            if ctx.len() < 2 || ctx.len() > d {
                return Err(Error::validation(format!(
                    "context {ci} has {} members; needs between 2 and {d}",
                    ctx.len()
                )));
            }
            for (a, &i) in ctx.iter().enumerate() {
                if i >= self.vectors.len() {
                    return Err(Error::validation(format!(
                        "context {ci} references missing vector {i}"
                    )));
                }
                used[i] = true;
                for &j in ctx.iter().skip(a + 1) {
                    if i == j {
                        return Err(Error::validation(format!(
                            "context {ci} lists vector {i} twice"
                        )));
                    }
                    if dot_exact(&self.vectors[i], &self.vectors[j]) != 0 {
                        return Err(Error::validation(format!(
                            "context {ci}: vectors {i} and {j} are not orthogonal"
                        )));
                    }
                }
            }
        }
        if let Some(i) = used.iter().position(|&u| !u) {
            if !self.vectors.is_empty() {
                return Err(Error::validation(format!(
                    "vector {i} appears in no context"
                )));
            }
        }
        Ok(())
    }
}

fn dot_exact(a: &[i64], b: &[i64]) -> i128 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| x as i128 * y as i128)
        .sum()
}

fn parallel(a: &[i64], b: &[i64]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] as i128 * b[j] as i128 != a[j] as i128 * b[i] as i128 {
                return false;
            }
        }
    }
    true
}

/// Result of the exhaustive colourability search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KsVerdict {
    /// The search exhausted every {0,1}-colouring without finding one that
    /// satisfies the constraints: the set has the Kochen-Specker property.
    NonColourable { nodes_explored: u64 },
    /// A satisfying colouring exists; the lexicographically first witness.
    Colourable { witness: Vec<bool> },
}

impl KsVerdict {
    pub fn is_non_colourable(&self) -> bool {
        matches!(self, KsVerdict::NonColourable { .. })
    }
}

/// Exhaustive backtracking search over {0,1}-colourings.
///
/// Constraints per context: at most one 1 for contexts shorter than d,
/// exactly one 1 for full d-tuples.
pub fn verify_ks_property(ks: &KSSet) -> KsVerdict {
    let n = ks.n_vectors();
    let full = ks.dimension;
    // contexts touching each vector, for incremental checks
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, ctx) in ks.contexts.iter().enumerate() {
        for &v in ctx {
            touching[v].push(ci);
        }
    }
    let mut colour = vec![false; n];
    let mut assigned_in: Vec<usize> = vec![0; ks.contexts.len()];
    let mut ones_in: Vec<usize> = vec![0; ks.contexts.len()];
    let mut nodes: u64 = 0;

    fn consistent(
        ks: &KSSet,
        full: usize,
        ci: usize,
        assigned: usize,
        ones: usize,
    ) -> bool {
        let len = ks.contexts[ci].len();
        if ones > 1 {
            return false;
        }
        if len == full && assigned == len && ones == 0 {
            return false;
        }
        true
    }

    fn search(
        ks: &KSSet,
        full: usize,
        touching: &[Vec<usize>],
        colour: &mut Vec<bool>,
        assigned_in: &mut Vec<usize>,
        ones_in: &mut Vec<usize>,
        depth: usize,
        nodes: &mut u64,
    ) -> bool {
        if depth == colour.len() {
            return true;
        }
        for &value in &[false, true] {
            *nodes += 1;
            colour[depth] = value;
            let mut ok = true;
            for &ci in &touching[depth] {
                assigned_in[ci] += 1;
                if value {
                    ones_in[ci] += 1;
                }
                if !consistent(ks, full, ci, assigned_in[ci], ones_in[ci]) {
                    ok = false;
                }
            }
            if ok
                && search(
                    ks,
                    full,
                    touching,
                    colour,
                    assigned_in,
                    ones_in,
                    depth + 1,
                    nodes,
                )
            {
                return true;
            }
            for &ci in &touching[depth] {
                assigned_in[ci] -= 1;
                if value {
                    ones_in[ci] -= 1;
                }
            }
        }
        false
    }

    if search(
        ks,
        full,
        &touching,
        &mut colour,
        &mut assigned_in,
        &mut ones_in,
        0,
        &mut nodes,
    ) {
        KsVerdict::Colourable { witness: colour }
    } else {
        KsVerdict::NonColourable {
            nodes_explored: nodes,
        }
    }
}

/// The shipped 18-vector, 9-context set in dimension 4.
pub fn shipped_d4_18vec() -> KSSet {
    KSSet::from_json_str(include_str!("../../data/ks_d4_18vec.json"))
        .expect("shipped d=4 set is valid")
}

/// A deliberately colourable control set: one orthogonal triple in d=3.
pub fn shipped_d3_control() -> KSSet {
    KSSet::from_json_str(include_str!("../../data/ks_d3_control.json"))
        .expect("shipped control set is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_d4_set_is_non_colourable() {
        let ks = shipped_d4_18vec();
        assert_eq!(ks.n_vectors(), 18);
        assert_eq!(ks.contexts.len(), 9);
        // every vector sits in exactly two contexts
        for v in 0..18 {
            let count = ks.contexts.iter().filter(|c| c.contains(&v)).count();
            assert_eq!(count, 2, "vector {v}");
        }
        assert!(verify_ks_property(&ks).is_non_colourable());
    }

    #[test]
    fn single_triple_is_colourable() {
        let ks = shipped_d3_control();
        match verify_ks_property(&ks) {
            KsVerdict::Colourable { witness } => {
                assert_eq!(witness.iter().filter(|&&c| c).count(), 1);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn empty_set_is_colourable() {
        let ks = KSSet::new(3, vec![], vec![]).unwrap();
        assert_eq!(
            verify_ks_property(&ks),
            KsVerdict::Colourable { witness: vec![] }
        );
    }

    #[test]
    fn pair_context_forbids_two_ones() {
        // two orthogonal pairs sharing no vector: colourable with all zeros
        let ks = KSSet::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        match verify_ks_property(&ks) {
            KsVerdict::Colourable { witness } => {
                // pair constraints are at-most-one: all-0 is the first witness
                assert!(witness.iter().all(|&c| !c));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_orthogonal_context_rejected() {
        let res = KSSet::new(
            3,
            vec![vec![1, 0, 0], vec![1, 1, 0]],
            vec![vec![0, 1]],
        );
        assert!(res.is_err());
    }

    #[test]
    fn parallel_vectors_rejected() {
        let res = KSSet::new(
            3,
            vec![vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0]],
            vec![vec![0, 2], vec![1, 2]],
        );
        assert!(res.is_err());
    }

    #[test]
    fn floats_rejected_in_json() {
        let text = r#"{"dimension":3,"vectors":[[1.0,0,0],[0,1,0]],"contexts":[[0,1]]}"#;
        assert!(KSSet::from_json_str(text).is_err());
        let text = r#"{"dimension":3,"vectors":[[0.5,0,0],[0,1,0]],"contexts":[[0,1]]}"#;
        assert!(KSSet::from_json_str(text).is_err());
    }

    #[test]
    fn unused_vector_rejected() {
        let res = KSSet::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1]],
        );
        assert!(res.is_err());
    }

    #[test]
    fn json_round_trip() {
        let ks = shipped_d4_18vec();
        let text = ks.to_json_string();
        let again = KSSet::from_json_str(&text).unwrap();
        assert_eq!(again.vectors, ks.vectors);
        assert_eq!(again.contexts, ks.contexts);
    }
}
