//! Ingestion, validation and partitioning of labeled time-series datasets in
//! the UCR text format (`label<sep>v1 ... vm`, one series per line).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SistError};

/// A fixed-length sequence of real-valued samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Wraps a non-empty sample vector. Finiteness is enforced later, by
    /// [`validate_binary_isometric`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SistError::EmptyInput);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A parsed dataset: series plus raw label tags, in file order.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    name: String,
    series: Vec<TimeSeries>,
    labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new(series: Vec<TimeSeries>, labels: Vec<String>) -> Result<Self> {
        if series.is_empty() {
            return Err(SistError::EmptyInput);
        }
        if series.len() != labels.len() {
            return Err(SistError::LengthMismatch { left: series.len(), right: labels.len() });
        }
        Ok(Self { name: String::from("unnamed"), series, labels })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.series.len()
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Length shared by every series, or an error if rows are ragged.
    pub fn series_len(&self) -> Result<usize> {
        let m = self.series[0].len();
        for (row, s) in self.series.iter().enumerate() {
            if s.len() != m {
                return Err(SistError::RaggedLengths { row, got: s.len(), expected: m });
            }
        }
        Ok(m)
    }

    pub fn distinct_labels(&self) -> Vec<String> {
        let mut tags: Vec<String> = self.labels.clone();
        tags.sort();
        tags.dedup();
        tags
    }
}

/// Parses the UCR text format. The first token of each non-empty line is the
/// class tag (kept verbatim as a string); the rest are samples. Tab, comma
/// and whitespace separators are all accepted since UCR distributions vary.
pub fn parse_ucr_tsv(text: &str) -> Result<LabeledDataset> {
    let mut series = Vec::new();
    let mut labels = Vec::new();
    let mut expected_len: Option<usize> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = series.len();
        let mut tokens = line.split(|c: char| c == '\t' || c == ',' || c.is_whitespace());
        let label = tokens.next().expect("non-empty line has a first token");
        let mut values = Vec::new();
        for token in tokens {
            if token.is_empty() {
                continue;
            }
            let v: f64 = token
                .parse()
                .map_err(|_| SistError::NonNumericValue { row, token: token.to_string() })?;
            values.push(v);
        }
        if values.is_empty() {
            return Err(SistError::NonNumericValue { row, token: String::new() });
        }
        if let Some(m) = expected_len {
            if values.len() != m {
                return Err(SistError::RaggedLengths { row, got: values.len(), expected: m });
            }
        } else {
            expected_len = Some(values.len());
        }
        labels.push(label.to_string());
        series.push(TimeSeries::new(values)?);
    }
    LabeledDataset::new(series, labels)
}

/// Serializes back to tab-separated UCR text. `parse_ucr_tsv` of the output
/// reproduces the dataset exactly (floats are written in shortest
/// round-trip form).
pub fn to_ucr_tsv(d: &LabeledDataset) -> String {
    let mut out = String::new();
    for (s, label) in d.series.iter().zip(&d.labels) {
        out.push_str(label);
        for v in s.values() {
            out.push('\t');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

/// Canonical tag-to-sign mapping: the lexicographically smaller tag becomes
/// −1, the larger +1. Keeps model files and sign conventions deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    negative: String,
    positive: String,
}

impl LabelMap {
    pub fn new(negative: impl Into<String>, positive: impl Into<String>) -> Self {
        Self { negative: negative.into(), positive: positive.into() }
    }

    pub fn to_canonical(&self, tag: &str) -> Option<i8> {
        if tag == self.negative {
            Some(-1)
        } else if tag == self.positive {
            Some(1)
        } else {
            None
        }
    }

    pub fn from_canonical(&self, sign: i8) -> &str {
        if sign < 0 {
            &self.negative
        } else {
            &self.positive
        }
    }

    pub fn negative(&self) -> &str {
        &self.negative
    }

    pub fn positive(&self) -> &str {
        &self.positive
    }
}

/// A dataset that passed the binary/isometric/finite checks. All downstream
/// stages operate on this type; its invariants are what they rely on.
#[derive(Debug, Clone)]
pub struct ValidatedDataset {
    inner: LabeledDataset,
    canonical: Vec<i8>,
    label_map: LabelMap,
    series_len: usize,
    fingerprint: u64,
}

impl ValidatedDataset {
    pub fn name(&self) -> &str {
        self.inner.name()
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    /// The isometric series length `m`.
    pub fn series_len(&self) -> usize {
        self.series_len
    }

    pub fn series(&self) -> &[TimeSeries] {
        self.inner.series()
    }

    /// Per-series canonical labels in {−1, +1}.
    pub fn canonical_labels(&self) -> &[i8] {
        &self.canonical
    }

    pub fn label_map(&self) -> &LabelMap {
        &self.label_map
    }

    pub fn as_labeled(&self) -> &LabeledDataset {
        &self.inner
    }

    /// Content hash used to detect whether cached per-candidate distance rows
    /// were computed against this exact dataset.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Row subset in the given index order. The canonical label map is
    /// inherited, so subsets of one dataset stay sign-compatible.
    pub fn subset(&self, indices: &[usize]) -> ValidatedDataset {
        let series = indices.iter().map(|&i| self.inner.series()[i].clone()).collect();
        let labels: Vec<String> = indices.iter().map(|&i| self.inner.labels()[i].clone()).collect();
        let canonical = indices.iter().map(|&i| self.canonical[i]).collect();
        let inner = LabeledDataset::new(series, labels)
            .expect("subset of a validated dataset is well-formed")
            .with_name(self.inner.name());
        let fingerprint = fingerprint_of(&inner);
        ValidatedDataset {
            inner,
            canonical,
            label_map: self.label_map.clone(),
            series_len: self.series_len,
            fingerprint,
        }
    }
}

fn fingerprint_of(d: &LabeledDataset) -> u64 {
    // FNV-1a over label bytes and sample bit patterns.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for (s, label) in d.series().iter().zip(d.labels()) {
        for b in label.as_bytes() {
            eat(*b);
        }
        for v in s.values() {
            for b in v.to_bits().to_le_bytes() {
                eat(b);
            }
        }
    }
    h
}

/// Checks that the dataset is binary, isometric and finite, and fixes the
/// canonical label map. Idempotent: validating an already-valid dataset
/// yields the same result.
pub fn validate_binary_isometric(d: LabeledDataset) -> Result<ValidatedDataset> {
    let series_len = d.series_len()?;
    for (row, s) in d.series().iter().enumerate() {
        if let Some(pos) = s.values().iter().position(|v| !v.is_finite()) {
            return Err(SistError::NonFiniteValue { row, pos });
        }
    }
    let tags = d.distinct_labels();
    if tags.len() != 2 {
        return Err(SistError::NotBinary(tags.len()));
    }
    let label_map = LabelMap::new(tags[0].clone(), tags[1].clone());
    let canonical = d
        .labels()
        .iter()
        .map(|t| label_map.to_canonical(t).expect("tag drawn from the dataset"))
        .collect();
    let fingerprint = fingerprint_of(&d);
    Ok(ValidatedDataset { inner: d, canonical, label_map, series_len, fingerprint })
}

/// Optional per-series z-normalization (zero mean, unit variance). Off by
/// default everywhere; constant series are left centered at zero.
pub fn z_normalize_per_series(d: &ValidatedDataset) -> ValidatedDataset {
    let series = d
        .series()
        .iter()
        .map(|s| {
            let vals = s.values();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let sd = var.sqrt();
            let normed: Vec<f64> = if sd > 0.0 {
                vals.iter().map(|v| (v - mean) / sd).collect()
            } else {
                vals.iter().map(|v| v - mean).collect()
            };
            TimeSeries::new(normed).expect("length preserved")
        })
        .collect();
    let inner = LabeledDataset::new(series, d.as_labeled().labels().to_vec())
        .expect("shape preserved")
        .with_name(d.name());
    let fingerprint = fingerprint_of(&inner);
    ValidatedDataset {
        inner,
        canonical: d.canonical.clone(),
        label_map: d.label_map.clone(),
        series_len: d.series_len,
        fingerprint,
    }
}

/// Deterministic stratified fold assignment.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fold index per series, aligned with dataset row order.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// (train indices, held-out indices) for one fold.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut held = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                held.push(i);
            } else {
                train.push(i);
            }
        }
        (train, held)
    }
}

/// Stratified k-fold assignment: within each class, indices are shuffled by a
/// seeded generator and dealt round-robin, so per-fold class counts differ
/// from the ideal ratio by at most one sample.
pub fn stratified_kfold(d: &ValidatedDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    assert!(k >= 2, "stratified_kfold requires k >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![usize::MAX; d.n()];
    for sign in [-1i8, 1] {
        let mut idx: Vec<usize> = (0..d.n()).filter(|&i| d.canonical[i] == sign).collect();
        if idx.len() < k {
            return Err(SistError::TooFewPerClass {
                label: d.label_map.from_canonical(sign).to_string(),
                count: idx.len(),
                k,
            });
        }
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            assignments[i] = pos % k;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(rows: &[(&str, &[f64])]) -> LabeledDataset {
        let series = rows.iter().map(|(_, v)| TimeSeries::new(v.to_vec()).unwrap()).collect();
        let labels = rows.iter().map(|(l, _)| l.to_string()).collect();
        LabeledDataset::new(series, labels).unwrap()
    }

    fn toy_owned(rows: Vec<(&str, Vec<f64>)>) -> ValidatedDataset {
        let series = rows.iter().map(|(_, v)| TimeSeries::new(v.clone()).unwrap()).collect();
        let labels = rows.iter().map(|(l, _)| l.to_string()).collect();
        validate_binary_isometric(LabeledDataset::new(series, labels).unwrap()).unwrap()
    }

    #[test]
    fn parse_two_rows() {
        let d = parse_ucr_tsv("1\t0.0\t1.0\n2\t1.0\t0.0\n").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.series_len().unwrap(), 2);
        assert_eq!(d.distinct_labels(), vec!["1", "2"]);
    }

    #[test]
    fn parse_accepts_commas_and_spaces() {
        let d1 = parse_ucr_tsv("1,0.5,1.5\n2,2.5,3.5\n").unwrap();
        let d2 = parse_ucr_tsv("1 0.5 1.5\n2 2.5 3.5\n").unwrap();
        assert_eq!(d1.series()[1].values(), d2.series()[1].values());
    }

    #[test]
    fn parse_ragged_rows_error() {
        let err = parse_ucr_tsv("1\t0.0\n2\t1.0\t2.0\n").unwrap_err();
        assert!(matches!(err, SistError::RaggedLengths { row: 1, got: 2, expected: 1 }));
    }

    #[test]
    fn parse_rejects_garbage_token() {
        let err = parse_ucr_tsv("1\t0.0\tpotato\n").unwrap_err();
        assert!(matches!(err, SistError::NonNumericValue { .. }));
    }

    #[test]
    fn parse_empty_input() {
        assert!(matches!(parse_ucr_tsv("").unwrap_err(), SistError::EmptyInput));
        assert!(matches!(parse_ucr_tsv("\n  \n").unwrap_err(), SistError::EmptyInput));
    }

    #[test]
    fn roundtrip_is_identity() {
        let d = parse_ucr_tsv("1\t0.125\t-3.5\n2\t1e-7\t42.0\n").unwrap();
        let again = parse_ucr_tsv(&to_ucr_tsv(&d)).unwrap();
        assert_eq!(d.labels(), again.labels());
        for (a, b) in d.series().iter().zip(again.series()) {
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn validate_canonical_map_is_lexicographic() {
        let d = toy(&[("0", &[1.0, 2.0]), ("1", &[3.0, 4.0])]);
        let v = validate_binary_isometric(d).unwrap();
        assert_eq!(v.label_map().to_canonical("0"), Some(-1));
        assert_eq!(v.label_map().to_canonical("1"), Some(1));
        assert_eq!(v.canonical_labels(), &[-1, 1]);
    }

    #[test]
    fn validate_rejects_three_classes() {
        let d = toy(&[("a", &[1.0]), ("b", &[2.0]), ("c", &[3.0])]);
        assert!(matches!(validate_binary_isometric(d).unwrap_err(), SistError::NotBinary(3)));
    }

    #[test]
    fn validate_rejects_nan() {
        let d = toy(&[("a", &[1.0, f64::NAN]), ("b", &[2.0, 3.0])]);
        assert!(matches!(
            validate_binary_isometric(d).unwrap_err(),
            SistError::NonFiniteValue { row: 0, pos: 1 }
        ));
    }

    #[test]
    fn validate_is_idempotent() {
        let d = toy(&[("x", &[1.0, 2.0]), ("y", &[0.0, 0.5])]);
        let v1 = validate_binary_isometric(d).unwrap();
        let v2 = validate_binary_isometric(v1.as_labeled().clone()).unwrap();
        assert_eq!(v1.canonical_labels(), v2.canonical_labels());
        assert_eq!(v1.fingerprint(), v2.fingerprint());
    }

    #[test]
    fn kfold_perfect_stratification() {
        let v = toy_owned(
            (0..10).map(|i| (if i < 5 { "a" } else { "b" }, vec![i as f64, 0.0])).collect(),
        );
        let plan = stratified_kfold(&v, 5, 7).unwrap();
        for fold in 0..5 {
            let (_, held) = plan.split(fold);
            assert_eq!(held.len(), 2);
            let neg = held.iter().filter(|&&i| v.canonical_labels()[i] == -1).count();
            assert_eq!(neg, 1, "fold {fold} should hold one of each class");
        }
    }

    #[test]
    fn kfold_deterministic() {
        let v = toy_owned(
            (0..12).map(|i| (if i % 2 == 0 { "a" } else { "b" }, vec![i as f64])).collect(),
        );
        let p1 = stratified_kfold(&v, 3, 42).unwrap();
        let p2 = stratified_kfold(&v, 3, 42).unwrap();
        assert_eq!(p1.assignments(), p2.assignments());
        let p3 = stratified_kfold(&v, 3, 43).unwrap();
        assert_ne!(p1.assignments(), p3.assignments());
    }

    #[test]
    fn kfold_12_vs_8_split_counts() {
        // 20 series (12 of class a, 8 of class b), k=4: every fold holds (3, 2).
        let v = toy_owned(
            (0..20).map(|i| (if i < 12 { "a" } else { "b" }, vec![i as f64])).collect(),
        );
        let plan = stratified_kfold(&v, 4, 1).unwrap();
        for fold in 0..4 {
            let (_, held) = plan.split(fold);
            let a = held.iter().filter(|&&i| v.canonical_labels()[i] == -1).count();
            let b = held.len() - a;
            assert_eq!((a, b), (3, 2));
        }
    }

    #[test]
    fn kfold_too_few_per_class() {
        let d = toy(&[("a", &[1.0]), ("b", &[2.0]), ("b", &[3.0])]);
        let v = validate_binary_isometric(d).unwrap();
        assert!(matches!(
            stratified_kfold(&v, 2, 0).unwrap_err(),
            SistError::TooFewPerClass { .. }
        ));
    }

    #[test]
    fn z_normalize_centers_and_scales() {
        let d = toy(&[("a", &[0.0, 2.0, 4.0]), ("b", &[5.0, 5.0, 5.0])]);
        let v = validate_binary_isometric(d).unwrap();
        let z = z_normalize_per_series(&v);
        let first = z.series()[0].values();
        assert!(first.iter().sum::<f64>().abs() < 1e-12);
        // constant series stays centered at zero
        assert_eq!(z.series()[1].values(), &[0.0, 0.0, 0.0]);
    }
}
