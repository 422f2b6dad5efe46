//! The shapelet transform: each series becomes the vector of its distances
//! to a fixed shapelet basis. Also the cut-set machinery used to check that
//! under the fixed distance, replacing a shapelet by any contiguous
//! partition of itself preserves every transformed vector's Euclidean norm.

use rayon::prelude::*;

use crate::dataset::{TimeSeries, ValidatedDataset};
use crate::distance::{
    fixed_distance, relaxed_fixed_distance, sliding_min_distance, Placement, RelaxConfig,
};
use crate::error::{Result, SistError};
use crate::selection::ShapeletSet;

/// Distance used to build feature columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Fixed,
    RelaxedFixed(RelaxConfig),
    SlidingMin,
}

/// A shapelet as a standalone value: samples plus the placement tying it to
/// an absolute position of its source series.
#[derive(Debug, Clone, PartialEq)]
pub struct Shapelet {
    pub values: Vec<f64>,
    pub placement: Placement,
}

impl Shapelet {
    pub fn new(values: Vec<f64>, placement: Placement) -> Self {
        debug_assert_eq!(values.len(), placement.len);
        Self { values, placement }
    }
}

/// Row-major feature matrix: rows are series, columns are shapelets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    shapelet_refs: Vec<Placement>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, shapelet_refs: Vec<Placement>) -> Self {
        let nrows = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        let data = rows.into_iter().flatten().collect();
        Self { rows: nrows, cols, data, shapelet_refs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Placement provenance of each column.
    pub fn shapelet_refs(&self) -> &[Placement] {
        &self.shapelet_refs
    }

    pub fn row_norm(&self, row: usize) -> f64 {
        self.row(row).iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn column_distance(s: &Shapelet, x: &TimeSeries, metric: &Metric) -> Result<f64> {
    let promote = |e: SistError| match e {
        SistError::PlacementOutOfRange { start, end, series } => {
            SistError::MetricPlacementMismatch { start, end, series }
        }
        other => other,
    };
    match metric {
        Metric::Fixed => fixed_distance(&s.values, &s.placement, x).map_err(promote),
        Metric::RelaxedFixed(cfg) => {
            relaxed_fixed_distance(&s.values, &s.placement, x, cfg).map_err(promote)
        }
        Metric::SlidingMin => sliding_min_distance(&s.values, x),
    }
}

/// Transforms every series of `d` through an explicit shapelet list.
pub fn transform_shapelets(
    d: &ValidatedDataset,
    shapelets: &[Shapelet],
    metric: &Metric,
) -> Result<FeatureMatrix> {
    let rows: Result<Vec<Vec<f64>>> = d
        .series()
        .par_iter()
        .map(|x| shapelets.iter().map(|s| column_distance(s, x, metric)).collect())
        .collect();
    let refs = shapelets.iter().map(|s| s.placement).collect();
    Ok(FeatureMatrix::from_rows(rows?, refs))
}

/// Transforms `d` through a selected basis. When the basis carries distance
/// rows cached from scoring and the metric matches the scoring
/// configuration on the same dataset, those rows are reused verbatim and no
/// distance is recomputed.
pub fn shapelet_transform(
    d: &ValidatedDataset,
    basis: &ShapeletSet,
    metric: &Metric,
) -> Result<FeatureMatrix> {
    if let Metric::RelaxedFixed(cfg) = metric {
        let cache_valid = *cfg == basis.config
            && basis.source_fingerprint == d.fingerprint()
            && basis.members().iter().all(|m| m.dist_row.len() == d.n());
        if cache_valid {
            let cols = basis.len();
            let mut rows = vec![Vec::with_capacity(cols); d.n()];
            for member in basis.members() {
                for (row, dist) in rows.iter_mut().zip(&member.dist_row) {
                    row.push(*dist);
                }
            }
            let refs = basis.members().iter().map(|m| m.candidate.placement()).collect();
            return Ok(FeatureMatrix::from_rows(rows, refs));
        }
    }
    let shapelets: Vec<Shapelet> = basis
        .members()
        .iter()
        .map(|m| Shapelet::new(m.candidate.values.clone(), m.candidate.placement()))
        .collect();
    transform_shapelets(d, &shapelets, metric)
}

/// Feature matrix as CSV with the header `series_id,label,f1..fN`.
pub fn feature_matrix_csv(d: &ValidatedDataset, fm: &FeatureMatrix) -> String {
    let mut out = String::from("series_id,label");
    for p in 1..=fm.cols() {
        out.push_str(&format!(",f{p}"));
    }
    out.push('\n');
    for i in 0..fm.rows() {
        out.push_str(&format!("{i},{}", d.as_labeled().labels()[i]));
        for v in fm.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// A contiguous partition of a parent shapelet at the given cut points.
#[derive(Debug, Clone)]
pub struct CutSet {
    pub parent: Shapelet,
    pub pieces: Vec<Shapelet>,
    pub cut_points: Vec<usize>,
}

/// Cuts `s` after each position in `cut_points` (1-based offsets within the
/// shapelet, strictly increasing, interior). The pieces inherit absolute
/// placements from the parent, so concatenating them reproduces it exactly.
/// An empty cut list yields the trivial singleton set.
pub fn cut_set(s: &Shapelet, cut_points: &[usize]) -> Result<CutSet> {
    let k = s.values.len();
    let valid = cut_points.windows(2).all(|w| w[0] < w[1])
        && cut_points.iter().all(|&c| c > 0 && c < k);
    if !valid {
        return Err(SistError::InvalidCutPoints(cut_points.to_vec()));
    }
    let mut pieces = Vec::with_capacity(cut_points.len() + 1);
    let mut prev = 0usize;
    for &c in cut_points.iter().chain(std::iter::once(&k)) {
        let piece_values = s.values[prev..c].to_vec();
        let placement =
            Placement::new(s.placement.source_index, s.placement.start + prev, c - prev);
        pieces.push(Shapelet::new(piece_values, placement));
        prev = c;
    }
    Ok(CutSet { parent: s.clone(), pieces, cut_points: cut_points.to_vec() })
}

/// Norm of a single series transformed through `{s}` and through the cut
/// set of `s`, both under the fixed distance. The two must agree: the cut
/// pieces partition exactly the same squared differences.
pub fn check_norm_invariance(
    x: &TimeSeries,
    s: &Shapelet,
    cuts: &[usize],
) -> Result<(f64, f64)> {
    let whole = fixed_distance(&s.values, &s.placement, x)?;
    let set = cut_set(s, cuts)?;
    let mut sum = 0.0;
    for piece in &set.pieces {
        let d = fixed_distance(&piece.values, &piece.placement, x)?;
        sum += d * d;
    }
    Ok((whole, sum.sqrt()))
}

/// Per-series norms of a dataset transformed through basis `C` and through
/// `F = (C − D) ∪ (cut sets of D)`, both under the fixed distance, where `D`
/// is given by `subset_idx` and `cuts[i]` are the cut points for the i-th
/// member of `D`.
pub fn check_basis_substitution(
    d: &ValidatedDataset,
    basis: &[Shapelet],
    subset_idx: &[usize],
    cuts: &[Vec<usize>],
) -> Result<Vec<(f64, f64)>> {
    assert_eq!(subset_idx.len(), cuts.len(), "one cut list per substituted shapelet");
    let mut substituted: Vec<Shapelet> = Vec::new();
    for (pos, s) in basis.iter().enumerate() {
        match subset_idx.iter().position(|&i| i == pos) {
            Some(which) => substituted.extend(cut_set(s, &cuts[which])?.pieces),
            None => substituted.push(s.clone()),
        }
    }
    let through_c = transform_shapelets(d, basis, &Metric::Fixed)?;
    let through_f = transform_shapelets(d, &substituted, &Metric::Fixed)?;
    Ok((0..d.n()).map(|i| (through_c.row_norm(i), through_f.row_norm(i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{validate_binary_isometric, LabeledDataset};
    use crate::selection::{extract_candidates, rank_and_select, score_all, OverlapScope};

    fn dataset(rows: Vec<(&str, Vec<f64>)>) -> ValidatedDataset {
        let series = rows.iter().map(|(_, v)| TimeSeries::new(v.clone()).unwrap()).collect();
        let labels = rows.iter().map(|(l, _)| l.to_string()).collect();
        validate_binary_isometric(LabeledDataset::new(series, labels).unwrap()).unwrap()
    }

    fn fig3_dataset() -> ValidatedDataset {
        dataset(vec![("a", vec![1.0, 0.0, 0.0, 0.0]), ("b", vec![0.0, 1.0, 0.0, 0.0])])
    }

    #[test]
    fn own_window_feature_is_zero() {
        let d = fig3_dataset();
        let s = Shapelet::new(vec![1.0, 0.0], Placement::new(0, 1, 2));
        let fm = transform_shapelets(&d, &[s], &Metric::Fixed).unwrap();
        assert_eq!(fm.get(0, 0), 0.0);
    }

    #[test]
    fn matrix_shape() {
        let d = fig3_dataset();
        let shapelets: Vec<Shapelet> = (1..=3)
            .map(|j| Shapelet::new(vec![0.0, 0.0], Placement::new(0, j, 2)))
            .collect();
        let fm = transform_shapelets(&d, &shapelets, &Metric::SlidingMin).unwrap();
        assert_eq!((fm.rows(), fm.cols()), (2, 3));
        assert!(fm.row(0).iter().all(|v| *v >= 0.0 && v.is_finite()));
    }

    #[test]
    fn position_blindness_of_sliding_vs_fixed_columns() {
        let d = fig3_dataset();
        let s = Shapelet::new(vec![1.0, 0.0], Placement::new(0, 1, 2));
        let sliding = transform_shapelets(&d, std::slice::from_ref(&s), &Metric::SlidingMin).unwrap();
        assert_eq!((sliding.get(0, 0), sliding.get(1, 0)), (0.0, 0.0));
        let fixed = transform_shapelets(&d, &[s], &Metric::Fixed).unwrap();
        assert_eq!((fixed.get(0, 0), fixed.get(1, 0)), (0.0, 2f64.sqrt()));
    }

    #[test]
    fn cached_rows_match_fresh_transform_bitwise() {
        let d = dataset(vec![
            ("a", vec![0.1, 0.4, 0.9, 1.6, 2.5]),
            ("a", vec![0.2, 0.3, 1.0, 1.5, 2.6]),
            ("b", vec![2.5, 1.6, 0.9, 0.4, 0.1]),
            ("b", vec![2.4, 1.7, 0.8, 0.5, 0.2]),
        ]);
        let cfg = RelaxConfig::shifted(1, 1);
        let scored = score_all(&d, extract_candidates(&d, 2).unwrap(), &cfg).unwrap();
        let basis = rank_and_select(scored, 4, false, OverlapScope::AnySeries, &d, &cfg);
        let cached = shapelet_transform(&d, &basis, &Metric::RelaxedFixed(cfg)).unwrap();
        // rebuild the basis without cached rows and recompute from scratch
        let stripped_members: Vec<_> = basis
            .members()
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.dist_row.clear();
                m
            })
            .collect();
        let stripped =
            ShapeletSet::new(stripped_members, cfg, basis.shapelet_len, basis.source_fingerprint);
        let fresh = shapelet_transform(&d, &stripped, &Metric::RelaxedFixed(cfg)).unwrap();
        assert_eq!(cached, fresh);
    }

    #[test]
    fn cut_set_two_pieces() {
        let s = Shapelet::new(vec![1.0, 2.0, 3.0, 4.0], Placement::new(0, 3, 4));
        let set = cut_set(&s, &[2]).unwrap();
        assert_eq!(set.pieces.len(), 2);
        assert_eq!(set.pieces[0].values, vec![1.0, 2.0]);
        assert_eq!(set.pieces[1].values, vec![3.0, 4.0]);
        assert_eq!(set.pieces[0].placement, Placement::new(0, 3, 2));
        assert_eq!(set.pieces[1].placement, Placement::new(0, 5, 2));
    }

    #[test]
    fn cut_set_maximal() {
        let s = Shapelet::new(vec![1.0, 2.0, 3.0, 4.0], Placement::new(0, 1, 4));
        let set = cut_set(&s, &[1, 2, 3]).unwrap();
        assert_eq!(set.pieces.len(), 4);
        assert!(set.pieces.iter().all(|p| p.values.len() == 1));
    }

    #[test]
    fn cut_set_rejects_unsorted_points() {
        let s = Shapelet::new(vec![1.0, 2.0, 3.0, 4.0], Placement::new(0, 1, 4));
        assert!(matches!(cut_set(&s, &[3, 1]).unwrap_err(), SistError::InvalidCutPoints(_)));
        assert!(matches!(cut_set(&s, &[0]).unwrap_err(), SistError::InvalidCutPoints(_)));
        assert!(matches!(cut_set(&s, &[4]).unwrap_err(), SistError::InvalidCutPoints(_)));
    }

    #[test]
    fn cut_set_empty_is_trivial_singleton() {
        let s = Shapelet::new(vec![1.0, 2.0], Placement::new(0, 1, 2));
        let set = cut_set(&s, &[]).unwrap();
        assert_eq!(set.pieces.len(), 1);
        assert_eq!(set.pieces[0], s);
    }

    #[test]
    fn norm_invariance_on_matching_window() {
        let x = TimeSeries::new(vec![0.5, 1.5, 2.5, 3.5]).unwrap();
        let s = Shapelet::new(vec![0.5, 1.5, 2.5], Placement::new(0, 1, 3));
        let (whole, cut) = check_norm_invariance(&x, &s, &[1, 2]).unwrap();
        assert_eq!(whole, 0.0);
        assert_eq!(cut, 0.0);
    }

    #[test]
    fn norm_invariance_random_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = rng.gen_range(4..20);
            let x =
                TimeSeries::new((0..m).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
            let k = rng.gen_range(2..=m);
            let j = rng.gen_range(1..=(m - k + 1));
            let s = Shapelet::new(
                (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect(),
                Placement::new(0, j, k),
            );
            let n_cuts = rng.gen_range(0..k);
            let mut cuts: Vec<usize> = (1..k).collect();
            for i in (1..cuts.len()).rev() {
                cuts.swap(i, rng.gen_range(0..=i));
            }
            cuts.truncate(n_cuts);
            cuts.sort_unstable();
            let (whole, cut) = check_norm_invariance(&x, &s, &cuts).unwrap();
            let tol = 1e-9 * whole.max(1.0);
            assert!((whole - cut).abs() <= tol, "norms {whole} vs {cut} differ");
        }
    }

    #[test]
    fn basis_substitution_empty_subset_is_identity() {
        let d = fig3_dataset();
        let basis = vec![
            Shapelet::new(vec![1.0, 0.0], Placement::new(0, 1, 2)),
            Shapelet::new(vec![0.0, 0.0], Placement::new(0, 3, 2)),
        ];
        for (a, b) in check_basis_substitution(&d, &basis, &[], &[]).unwrap() {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn basis_substitution_full_singleton_cuts() {
        let d = dataset(vec![
            ("a", vec![0.3, -0.2, 0.8, 1.1, -0.5]),
            ("b", vec![1.3, 0.4, -0.8, 0.1, 0.5]),
        ]);
        let basis = vec![
            Shapelet::new(vec![0.0, 0.1, 0.2], Placement::new(0, 1, 3)),
            Shapelet::new(vec![1.0, -1.0, 0.5], Placement::new(1, 3, 3)),
        ];
        let cuts = vec![vec![1, 2], vec![1, 2]];
        for (a, b) in check_basis_substitution(&d, &basis, &[0, 1], &cuts).unwrap() {
            assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    // Sliding-min is position blind, so cutting a shapelet lets each piece
    // slide independently: the norms genuinely differ. This witness shows
    // the fixed-distance precondition of the norm invariance is necessary.
    #[test]
    fn sliding_min_breaks_norm_invariance() {
        let x = TimeSeries::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let s = Shapelet::new(vec![1.0, 0.0], Placement::new(0, 1, 2));
        let whole = transform_shapelets(
            &dataset_single(&x),
            std::slice::from_ref(&s),
            &Metric::SlidingMin,
        )
        .unwrap()
        .row_norm(0);
        let pieces = cut_set(&s, &[1]).unwrap().pieces;
        let cut_norm = transform_shapelets(&dataset_single(&x), &pieces, &Metric::SlidingMin)
            .unwrap()
            .row_norm(0);
        assert!(whole > 0.9 && cut_norm < 1e-12, "whole {whole}, cut {cut_norm}");
    }

    fn dataset_single(x: &TimeSeries) -> ValidatedDataset {
        // a second series only to satisfy the binary-classes invariant
        dataset(vec![
            ("a", x.values().to_vec()),
            ("b", x.values().iter().map(|v| v + 1.0).collect()),
        ])
    }
}
