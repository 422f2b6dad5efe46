//! Candidate extraction and selection: every length-L window of every
//! training series is scored with the generalized Rayleigh quotient of its
//! relaxed-fixed distance row, then ranked with optional overlap deletion.

use rayon::prelude::*;

use crate::dataset::ValidatedDataset;
use crate::distance::{relaxed_fixed_distance, Placement, RelaxConfig};
use crate::error::{Result, SistError};

/// Keeps the degenerate zero-variance case (a perfect separator) finite and
/// at the top of the ranking instead of producing NaN/Inf priorities.
pub const GRQ_EPSILON: f64 = 1e-12;

/// One length-L window of one training series, with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeletCandidate {
    pub values: Vec<f64>,
    /// Row of the source series in the training set (0-based).
    pub source_index: usize,
    /// Start position within the source series (1-based).
    pub start_position: usize,
    /// Canonical label of the source series.
    pub class_label: i8,
}

impl ShapeletCandidate {
    pub fn placement(&self) -> Placement {
        Placement::new(self.source_index, self.start_position, self.values.len())
    }
}

/// A candidate with its selection priority and the cached distance row that
/// the transform later reuses verbatim.
#[derive(Debug, Clone)]
pub struct ScoredCandidate {
    pub candidate: ShapeletCandidate,
    pub grq: f64,
    pub dist_row: Vec<f64>,
}

/// Whether overlap deletion compares position intervals across all series or
/// only within the candidate's own source series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapScope {
    AnySeries,
    SameSeries,
}

impl std::fmt::Display for OverlapScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverlapScope::AnySeries => write!(f, "any-series"),
            OverlapScope::SameSeries => write!(f, "same-series"),
        }
    }
}

/// The selected shapelet basis, in descending priority order, together with
/// the distance configuration it was scored under.
#[derive(Debug, Clone)]
pub struct ShapeletSet {
    members: Vec<ScoredCandidate>,
    pub config: RelaxConfig,
    pub shapelet_len: usize,
    /// Fingerprint of the dataset the cached distance rows belong to.
    pub source_fingerprint: u64,
}

impl ShapeletSet {
    pub fn new(
        members: Vec<ScoredCandidate>,
        config: RelaxConfig,
        shapelet_len: usize,
        source_fingerprint: u64,
    ) -> Self {
        Self { members, config, shapelet_len, source_fingerprint }
    }

    pub fn members(&self) -> &[ScoredCandidate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Enumerates all n·(m−L+1) candidates, ordered by (source series, start).
pub fn extract_candidates(d: &ValidatedDataset, len: usize) -> Result<Vec<ShapeletCandidate>> {
    let m = d.series_len();
    if len == 0 || len > m {
        return Err(SistError::LengthTooLarge { len, series: m });
    }
    let mut out = Vec::with_capacity(d.n() * (m - len + 1));
    for (source_index, series) in d.series().iter().enumerate() {
        let vals = series.values();
        for start in 1..=(m - len + 1) {
            out.push(ShapeletCandidate {
                values: vals[start - 1..start - 1 + len].to_vec(),
                source_index,
                start_position: start,
                class_label: d.canonical_labels()[source_index],
            });
        }
    }
    Ok(out)
}

/// Generalized Rayleigh quotient of two one-dimensional samples:
/// |mean(A) − mean(B)| / (var(A) + var(B) + ε), with population variance.
pub fn grq(class_a: &[f64], class_b: &[f64]) -> Result<f64> {
    if class_a.is_empty() || class_b.is_empty() {
        return Err(SistError::EmptyClass);
    }
    let (mean_a, var_a) = mean_and_popvar(class_a);
    let (mean_b, var_b) = mean_and_popvar(class_b);
    Ok((mean_a - mean_b).abs() / (var_a + var_b + GRQ_EPSILON))
}

fn mean_and_popvar(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Computes every candidate's relaxed-fixed distance row over the training
/// set and its GRQ priority. Candidates are independent, so scoring runs in
/// parallel; the output order and every value are schedule-invariant.
pub fn score_all(
    d: &ValidatedDataset,
    candidates: Vec<ShapeletCandidate>,
    cfg: &RelaxConfig,
) -> Result<Vec<ScoredCandidate>> {
    candidates
        .into_par_iter()
        .map(|candidate| {
            let placement = candidate.placement();
            let mut dist_row = Vec::with_capacity(d.n());
            for series in d.series() {
                dist_row.push(relaxed_fixed_distance(&candidate.values, &placement, series, cfg)?);
            }
            let grq = grq_of_row(&dist_row, d.canonical_labels())?;
            Ok(ScoredCandidate { candidate, grq, dist_row })
        })
        .collect()
}

/// GRQ of a distance row split by canonical label.
pub fn grq_of_row(dist_row: &[f64], labels: &[i8]) -> Result<f64> {
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (dist, label) in dist_row.iter().zip(labels) {
        if *label < 0 {
            neg.push(*dist);
        } else {
            pos.push(*dist);
        }
    }
    grq(&neg, &pos)
}

fn priority_order(a: &ScoredCandidate, b: &ScoredCandidate) -> std::cmp::Ordering {
    b.grq
        .total_cmp(&a.grq)
        .then(a.candidate.source_index.cmp(&b.candidate.source_index))
        .then(a.candidate.start_position.cmp(&b.candidate.start_position))
}

fn intervals_overlap(a: &ShapeletCandidate, b: &ShapeletCandidate) -> bool {
    let (a1, a2) = (a.start_position, a.start_position + a.values.len() - 1);
    let (b1, b2) = (b.start_position, b.start_position + b.values.len() - 1);
    a1 <= b2 && b1 <= a2
}

/// Sorts by (GRQ desc, source index asc, start asc) and keeps the top `n`.
/// With `delete_overlap`, the sorted list is walked in priority order and a
/// candidate is dropped when its position interval intersects one already
/// kept (within `scope`); the survivor count may therefore fall short of `n`.
pub fn rank_and_select(
    mut scored: Vec<ScoredCandidate>,
    n: usize,
    delete_overlap: bool,
    scope: OverlapScope,
    d: &ValidatedDataset,
    cfg: &RelaxConfig,
) -> ShapeletSet {
    let shapelet_len = scored.first().map_or(0, |s| s.candidate.values.len());
    scored.sort_by(priority_order);
    let mut kept: Vec<ScoredCandidate> = Vec::with_capacity(n.min(scored.len()));
    for cand in scored {
        if kept.len() == n {
            break;
        }
        if delete_overlap {
            let clash = kept.iter().any(|k| {
                let same_series = k.candidate.source_index == cand.candidate.source_index;
                let in_scope = match scope {
                    OverlapScope::AnySeries => true,
                    OverlapScope::SameSeries => same_series,
                };
                in_scope && intervals_overlap(&k.candidate, &cand.candidate)
            });
            if clash {
                continue;
            }
        }
        kept.push(cand);
    }
    ShapeletSet::new(kept, *cfg, shapelet_len, d.fingerprint())
}
