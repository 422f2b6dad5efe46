//! The training pipeline end to end: candidate extraction, GRQ scoring,
//! ranking, the (cache-backed) shapelet transform and linear training — plus
//! evaluation, 10-fold cross-validated grid search, model persistence and
//! the stage-timing ablation report.

use std::time::Instant;

use serde::Serialize;

use crate::classifier::{accuracy, predict, train_linear, LinearModel, TrainMeta};
use crate::dataset::{stratified_kfold, LabelMap, ValidatedDataset};
use crate::distance::{Placement, RelaxConfig, RelaxMode};
use crate::error::{Result, SistError};
use crate::oracle::{self, OracleConfig};
use crate::selection::{
    extract_candidates, rank_and_select, score_all, OverlapScope, ScoredCandidate,
    ShapeletCandidate, ShapeletSet,
};
use crate::transform::{shapelet_transform, FeatureMatrix, Metric};

/// Version string written by the trainer into model provenance.
pub fn builder_string() -> String {
    format!("sist-core {} ({})", env!("CARGO_PKG_VERSION"), env!("SIST_GIT_DESCRIBE"))
}

/// The full hyperparameter set of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub delete_overlap: bool,
    pub shapelet_len: usize,
    pub left_relax: usize,
    pub right_relax: usize,
    pub shapelet_count: usize,
    pub relax_mode: RelaxMode,
    pub overlap_scope: OverlapScope,
    pub reg_c: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            delete_overlap: true,
            shapelet_len: 3,
            left_relax: 3,
            right_relax: 3,
            shapelet_count: 100,
            relax_mode: RelaxMode::ShiftedWindow,
            overlap_scope: OverlapScope::AnySeries,
            reg_c: 1.0,
            tol: 1e-6,
            max_iter: 10_000,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn relax_config(&self) -> RelaxConfig {
        RelaxConfig::new(self.left_relax, self.right_relax, self.relax_mode)
    }
}

/// The published search lattice: overlap deletion {true,false} × length
/// {3,4} × relaxation {3,4}×{3,4} × shapelet count {10..2000}; 160 cells.
pub const GRID_LENGTHS: [usize; 2] = [3, 4];
pub const GRID_RELAX: [usize; 2] = [3, 4];
pub const GRID_COUNTS: [usize; 10] = [10, 50, 100, 250, 500, 750, 1000, 1250, 1500, 2000];

/// Builds the full grid (or a sublattice of it) on top of a base parameter
/// set; `None` selects the full published axis.
pub fn build_grid(
    base: &Hyperparams,
    delete_overlap: Option<Vec<bool>>,
    lengths: Option<Vec<usize>>,
    relaxes: Option<Vec<usize>>,
    counts: Option<Vec<usize>>,
) -> Vec<Hyperparams> {
    let dos = delete_overlap.unwrap_or_else(|| vec![true, false]);
    let lens = lengths.unwrap_or_else(|| GRID_LENGTHS.to_vec());
    let rels = relaxes.unwrap_or_else(|| GRID_RELAX.to_vec());
    let counts = counts.unwrap_or_else(|| GRID_COUNTS.to_vec());
    let mut grid = Vec::new();
    for &delete_overlap in &dos {
        for &shapelet_len in &lens {
            for &left in &rels {
                for &right in &rels {
                    for &shapelet_count in &counts {
                        grid.push(Hyperparams {
                            delete_overlap,
                            shapelet_len,
                            left_relax: left,
                            right_relax: right,
                            shapelet_count,
                            ..*base
                        });
                    }
                }
            }
        }
    }
    grid
}

/// Wall-clock seconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageTimings {
    pub extract_s: f64,
    pub score_s: f64,
    pub select_s: f64,
    pub transform_s: f64,
    pub classifier_s: f64,
    pub total_s: f64,
}

impl StageTimings {
    /// Extraction, scoring, selection and transform together: the feature
    /// construction period, as opposed to the classifier training period.
    pub fn feature_s(&self) -> f64 {
        self.extract_s + self.score_s + self.select_s + self.transform_s
    }

    pub fn attributed_s(&self) -> f64 {
        self.feature_s() + self.classifier_s
    }
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub dataset_name: String,
    pub train_size: usize,
    pub builder: String,
    pub train_wall_s: f64,
}

/// The serializable artifact of a training run: shapelet basis, distance
/// configuration, linear classifier and provenance.
#[derive(Debug, Clone)]
pub struct SistModel {
    pub basis: ShapeletSet,
    pub linear: LinearModel,
    pub hyperparams: Hyperparams,
    pub provenance: Provenance,
    pub train_series_len: usize,
    pub training_accuracy: f64,
    pub candidates_examined: u64,
    pub timings: StageTimings,
}

/// Trains the full pipeline on a validated binary dataset: extract all
/// n·(m−L+1) length-L candidates, score them with the GRQ of their
/// relaxed-fixed distance rows, rank (optionally deleting overlaps),
/// transform through the kept basis reusing the cached rows, and train the
/// linear classifier.
pub fn train_sist(d: &ValidatedDataset, hp: &Hyperparams) -> Result<SistModel> {
    let cfg = hp.relax_config();
    let t_total = Instant::now();

    let t = Instant::now();
    let candidates = extract_candidates(d, hp.shapelet_len)?;
    let extract_s = t.elapsed().as_secs_f64();
    let candidates_examined = candidates.len() as u64;

    let t = Instant::now();
    let scored = score_all(d, candidates, &cfg)?;
    let score_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let basis =
        rank_and_select(scored, hp.shapelet_count, hp.delete_overlap, hp.overlap_scope, d, &cfg);
    let select_s = t.elapsed().as_secs_f64();
    if basis.is_empty() {
        return Err(SistError::CandidateStarvation);
    }

    let t = Instant::now();
    let features = shapelet_transform(d, &basis, &Metric::RelaxedFixed(cfg))?;
    let transform_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut linear =
        train_linear(&features, d.canonical_labels(), hp.reg_c, hp.tol, hp.max_iter, hp.seed)?;
    linear.label_map = d.label_map().clone();
    let classifier_s = t.elapsed().as_secs_f64();

    let train_pred = predict(&linear, &features)?;
    let training_accuracy = accuracy(&train_pred, d.canonical_labels())?;
    let total_s = t_total.elapsed().as_secs_f64();

    Ok(SistModel {
        basis,
        linear,
        hyperparams: *hp,
        provenance: Provenance {
            dataset_name: d.name().to_string(),
            train_size: d.n(),
            builder: builder_string(),
            train_wall_s: total_s,
        },
        train_series_len: d.series_len(),
        training_accuracy,
        candidates_examined,
        timings: StageTimings { extract_s, score_s, select_s, transform_s, classifier_s, total_s },
    })
}

/// Evaluation outcome on one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub n_test: usize,
    pub true_negative: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_positive: usize,
    pub train_time_s: f64,
    pub transform_time_s: f64,
    pub predict_time_s: f64,
}

impl EvalReport {
    pub fn csv_header() -> &'static str {
        "dataset,n_test,accuracy,true_negative,false_positive,false_negative,true_positive,\
         train_time_s,transform_time_s,predict_time_s"
    }

    pub fn csv_row(&self, dataset: &str) -> String {
        format!(
            "{dataset},{},{},{},{},{},{},{},{},{}",
            self.n_test,
            self.accuracy,
            self.true_negative,
            self.false_positive,
            self.false_negative,
            self.true_positive,
            self.train_time_s,
            self.transform_time_s,
            self.predict_time_s
        )
    }
}

/// Transforms a test set through the stored basis with the stored relax
/// configuration, predicts with the stored classifier, and scores.
pub fn evaluate(model: &SistModel, test: &ValidatedDataset) -> Result<EvalReport> {
    if test.series_len() != model.train_series_len {
        return Err(SistError::LengthMismatch {
            left: test.series_len(),
            right: model.train_series_len,
        });
    }
    for tag in [test.label_map().negative(), test.label_map().positive()] {
        if model.linear.label_map.to_canonical(tag).is_none() {
            return Err(SistError::UnknownClass(tag.to_string()));
        }
    }
    let cfg = model.basis.config;
    let t = Instant::now();
    let features = shapelet_transform(test, &model.basis, &Metric::RelaxedFixed(cfg))?;
    let transform_time_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let pred = predict(&model.linear, &features)?;
    let predict_time_s = t.elapsed().as_secs_f64();

    // canonical signs agree because the tag sets were checked above
    let truth = test.canonical_labels();
    let mut confusion = [0usize; 4]; // tn, fp, fn, tp
    for (p, t) in pred.iter().zip(truth) {
        let idx = match (t, p) {
            (-1, -1) => 0,
            (-1, 1) => 1,
            (1, -1) => 2,
            _ => 3,
        };
        confusion[idx] += 1;
    }
    Ok(EvalReport {
        accuracy: accuracy(&pred, truth)?,
        n_test: test.n(),
        true_negative: confusion[0],
        false_positive: confusion[1],
        false_negative: confusion[2],
        true_positive: confusion[3],
        train_time_s: model.provenance.train_wall_s,
        transform_time_s,
        predict_time_s,
    })
}

/// One grid cell outcome.
#[derive(Debug, Clone)]
pub struct CvCell {
    pub hp: Hyperparams,
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

/// Runs stratified k-fold cross validation for every cell and returns the
/// winning cell plus the full table. The winner is the maximum mean
/// accuracy; exact ties fall to fewer shapelets, then shorter length, then
/// overlap deletion on, then smaller total relaxation, then the remaining
/// fields — a total order, so the result is invariant to cell enumeration
/// order.
pub fn grid_search_cv(
    d: &ValidatedDataset,
    grid: &[Hyperparams],
    k: usize,
    seed: u64,
) -> Result<(Hyperparams, Vec<CvCell>)> {
    assert!(!grid.is_empty(), "grid must be non-empty");
    let plan = stratified_kfold(d, k, seed)?;
    let mut table = Vec::with_capacity(grid.len());
    for hp in grid {
        let mut fold_accuracies = Vec::with_capacity(k);
        for fold in 0..k {
            let (train_idx, held_idx) = plan.split(fold);
            let train = d.subset(&train_idx);
            let held = d.subset(&held_idx);
            let model = train_sist(&train, hp)?;
            let report = evaluate(&model, &held)?;
            fold_accuracies.push(report.accuracy);
        }
        let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
        table.push(CvCell { hp: *hp, mean_accuracy, fold_accuracies });
    }
    let best = table
        .iter()
        .min_by(|a, b| cell_order(a, b))
        .expect("non-empty grid")
        .hp;
    Ok((best, table))
}

/// Total order on cells: better mean first, then the deterministic
/// tie-break chain.
fn cell_order(a: &CvCell, b: &CvCell) -> std::cmp::Ordering {
    let mode_rank = |m: RelaxMode| matches!(m, RelaxMode::SubsequenceDp) as u8;
    let scope_rank = |s: OverlapScope| matches!(s, OverlapScope::SameSeries) as u8;
    b.mean_accuracy
        .total_cmp(&a.mean_accuracy)
        .then(a.hp.shapelet_count.cmp(&b.hp.shapelet_count))
        .then(a.hp.shapelet_len.cmp(&b.hp.shapelet_len))
        .then(b.hp.delete_overlap.cmp(&a.hp.delete_overlap))
        .then((a.hp.left_relax + a.hp.right_relax).cmp(&(b.hp.left_relax + b.hp.right_relax)))
        .then(a.hp.left_relax.cmp(&b.hp.left_relax))
        .then(a.hp.right_relax.cmp(&b.hp.right_relax))
        .then(mode_rank(a.hp.relax_mode).cmp(&mode_rank(b.hp.relax_mode)))
        .then(scope_rank(a.hp.overlap_scope).cmp(&scope_rank(b.hp.overlap_scope)))
        .then(a.hp.reg_c.total_cmp(&b.hp.reg_c))
        .then(a.hp.seed.cmp(&b.hp.seed))
}

/// CSV table of grid results with a fixed column set.
pub fn cv_table_csv(table: &[CvCell]) -> String {
    let mut out = String::from(
        "delete_overlap,length,left,right,count,mode,scope,reg_c,seed,mean_accuracy,fold_accuracies\n",
    );
    for cell in table {
        let folds: Vec<String> = cell.fold_accuracies.iter().map(|a| format!("{a}")).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            cell.hp.delete_overlap,
            cell.hp.shapelet_len,
            cell.hp.left_relax,
            cell.hp.right_relax,
            cell.hp.shapelet_count,
            cell.hp.relax_mode,
            cell.hp.overlap_scope,
            cell.hp.reg_c,
            cell.hp.seed,
            cell.mean_accuracy,
            folds.join("|"),
        ));
    }
    out
}

const MODEL_SCHEMA: &str = "sist-model v1";

/// Serializes a model to the versioned human-readable text schema. Every
/// float is written in shortest round-trip form, so loading reproduces the
/// exact bits and re-saving reproduces the exact bytes.
pub fn save_model(model: &SistModel) -> String {
    let hp = &model.hyperparams;
    let mut out = String::new();
    out.push_str(MODEL_SCHEMA);
    out.push('\n');
    out.push_str(&format!("dataset {}\n", model.provenance.dataset_name));
    out.push_str(&format!("train_size {}\n", model.provenance.train_size));
    out.push_str(&format!("series_len {}\n", model.train_series_len));
    out.push_str(&format!("builder {}\n", model.provenance.builder));
    out.push_str(&format!("train_wall_s {}\n", model.provenance.train_wall_s));
    out.push_str(&format!(
        "hyperparams delete_overlap={} length={} left={} right={} count={} mode={} scope={} \
         reg_c={} tol={} max_iter={} seed={}\n",
        hp.delete_overlap,
        hp.shapelet_len,
        hp.left_relax,
        hp.right_relax,
        hp.shapelet_count,
        hp.relax_mode,
        hp.overlap_scope,
        hp.reg_c,
        hp.tol,
        hp.max_iter,
        hp.seed
    ));
    out.push_str(&format!(
        "label_map neg={} pos={}\n",
        model.linear.label_map.negative(),
        model.linear.label_map.positive()
    ));
    out.push_str(&format!("train_accuracy {}\n", model.training_accuracy));
    out.push_str(&format!("candidates_examined {}\n", model.candidates_examined));
    out.push_str(&format!("shapelets {} {}\n", model.basis.len(), model.basis.shapelet_len));
    for member in model.basis.members() {
        let c = &member.candidate;
        out.push_str(&format!("s {} {} {} {}", c.source_index, c.start_position, c.class_label, member.grq));
        for v in &c.values {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("linear {}\n", model.linear.weights.len()));
    out.push_str("w");
    for v in &model.linear.weights {
        out.push_str(&format!(" {v}"));
    }
    out.push('\n');
    out.push_str(&format!("b {}\n", model.linear.bias));
    out.push_str(&format!(
        "meta iterations={} final_objective={}\n",
        model.linear.train_meta.iterations, model.linear.train_meta.final_objective
    ));
    out.push_str("end sist-model\n");
    out
}

fn corrupt(msg: impl Into<String>) -> SistError {
    SistError::CorruptModel(msg.into())
}

fn parse_kv<'a>(token: &'a str, key: &str) -> Result<&'a str> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| corrupt(format!("expected '{key}=...', found '{token}'")))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| corrupt(format!("bad {what}: '{s}'")))
}

/// Loads a model saved by [`save_model`]. Stage timings and cached distance
/// rows are not part of the schema; predictions are bit-identical to the
/// model that was saved.
pub fn load_model(text: &str) -> Result<SistModel> {
    let mut lines = text.lines();
    let schema = lines.next().ok_or_else(|| corrupt("empty file"))?;
    if schema != MODEL_SCHEMA {
        return Err(SistError::SchemaVersionMismatch {
            got: schema.to_string(),
            expected: MODEL_SCHEMA.to_string(),
        });
    }
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| corrupt(format!("missing '{name}'")))?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| corrupt(format!("expected '{name} ...', found '{line}'")))
    };

    let dataset_name = field("dataset")?;
    let train_size: usize = parse_num(&field("train_size")?, "train_size")?;
    let series_len: usize = parse_num(&field("series_len")?, "series_len")?;
    let builder = field("builder")?;
    let train_wall_s: f64 = parse_num(&field("train_wall_s")?, "train_wall_s")?;

    let hp_line = field("hyperparams")?;
    let mut hp_tokens = hp_line.split(' ');
    let mut next_hp = |key: &str| -> Result<String> {
        let token = hp_tokens.next().ok_or_else(|| corrupt(format!("missing '{key}'")))?;
        Ok(parse_kv(token, key)?.to_string())
    };
    let hyperparams = Hyperparams {
        delete_overlap: parse_num(&next_hp("delete_overlap")?, "delete_overlap")?,
        shapelet_len: parse_num(&next_hp("length")?, "length")?,
        left_relax: parse_num(&next_hp("left")?, "left")?,
        right_relax: parse_num(&next_hp("right")?, "right")?,
        shapelet_count: parse_num(&next_hp("count")?, "count")?,
        relax_mode: match next_hp("mode")?.as_str() {
            "shifted" => RelaxMode::ShiftedWindow,
            "subseq-dp" => RelaxMode::SubsequenceDp,
            other => return Err(corrupt(format!("unknown mode '{other}'"))),
        },
        overlap_scope: match next_hp("scope")?.as_str() {
            "any-series" => OverlapScope::AnySeries,
            "same-series" => OverlapScope::SameSeries,
            other => return Err(corrupt(format!("unknown scope '{other}'"))),
        },
        reg_c: parse_num(&next_hp("reg_c")?, "reg_c")?,
        tol: parse_num(&next_hp("tol")?, "tol")?,
        max_iter: parse_num(&next_hp("max_iter")?, "max_iter")?,
        seed: parse_num(&next_hp("seed")?, "seed")?,
    };

    let map_line = field("label_map")?;
    let (neg_tok, pos_tok) =
        map_line.split_once(' ').ok_or_else(|| corrupt("label_map needs two tags"))?;
    let label_map =
        LabelMap::new(parse_kv(neg_tok, "neg")?.to_string(), parse_kv(pos_tok, "pos")?.to_string());

    let training_accuracy: f64 = parse_num(&field("train_accuracy")?, "train_accuracy")?;
    let candidates_examined: u64 = parse_num(&field("candidates_examined")?, "candidates_examined")?;

    let shapelets_line = field("shapelets")?;
    let (count_s, len_s) =
        shapelets_line.split_once(' ').ok_or_else(|| corrupt("shapelets needs count and length"))?;
    let n_shapelets: usize = parse_num(count_s, "shapelet count")?;
    let shapelet_len: usize = parse_num(len_s, "shapelet length")?;

    let mut members = Vec::with_capacity(n_shapelets);
    for _ in 0..n_shapelets {
        let line = lines.next().ok_or_else(|| corrupt("truncated shapelet list"))?;
        let mut tokens = line.split(' ');
        if tokens.next() != Some("s") {
            return Err(corrupt(format!("expected shapelet line, found '{line}'")));
        }
        let source_index: usize =
            parse_num(tokens.next().ok_or_else(|| corrupt("shapelet source"))?, "source")?;
        let start_position: usize =
            parse_num(tokens.next().ok_or_else(|| corrupt("shapelet start"))?, "start")?;
        let class_label: i8 =
            parse_num(tokens.next().ok_or_else(|| corrupt("shapelet class"))?, "class")?;
        let grq: f64 = parse_num(tokens.next().ok_or_else(|| corrupt("shapelet grq"))?, "grq")?;
        let values: Vec<f64> =
            tokens.map(|t| parse_num(t, "shapelet value")).collect::<Result<_>>()?;
        if values.len() != shapelet_len {
            return Err(corrupt(format!(
                "shapelet has {} values, expected {shapelet_len}",
                values.len()
            )));
        }
        members.push(ScoredCandidate {
            candidate: ShapeletCandidate { values, source_index, start_position, class_label },
            grq,
            dist_row: Vec::new(),
        });
    }

    let dim: usize = parse_num(&field("linear")?, "linear dim")?;
    let w_line = lines.next().ok_or_else(|| corrupt("missing weights"))?;
    let mut w_tokens = w_line.split(' ');
    if w_tokens.next() != Some("w") {
        return Err(corrupt("expected weight line"));
    }
    let weights: Vec<f64> = w_tokens.map(|t| parse_num(t, "weight")).collect::<Result<_>>()?;
    if weights.len() != dim {
        return Err(corrupt(format!("{} weights, expected {dim}", weights.len())));
    }
    let bias: f64 = parse_num(&field("b")?, "bias")?;

    let meta_line = field("meta")?;
    let (it_tok, obj_tok) =
        meta_line.split_once(' ').ok_or_else(|| corrupt("meta needs two fields"))?;
    let iterations: usize = parse_num(parse_kv(it_tok, "iterations")?, "iterations")?;
    let final_objective: f64 = parse_num(parse_kv(obj_tok, "final_objective")?, "final_objective")?;

    match lines.next() {
        Some("end sist-model") => {}
        _ => return Err(corrupt("missing end marker")),
    }

    let basis = ShapeletSet::new(members, hyperparams.relax_config(), shapelet_len, 0);
    let linear = LinearModel {
        weights,
        bias,
        reg_c: hyperparams.reg_c,
        label_map,
        train_meta: TrainMeta {
            iterations,
            final_objective,
            seed: hyperparams.seed,
            objective_curve: Vec::new(),
        },
    };
    Ok(SistModel {
        basis,
        linear,
        hyperparams,
        provenance: Provenance { dataset_name, train_size, builder, train_wall_s },
        train_series_len: series_len,
        training_accuracy,
        candidates_examined,
        timings: StageTimings::default(),
    })
}

/// Stage-timing comparison between this pipeline and the brute-force
/// baseline, split into the feature-construction period and the
/// classifier-training period.
#[derive(Debug, Clone, Serialize)]
pub struct AblationReport {
    pub sist_feature_s: f64,
    pub sist_classifier_s: f64,
    pub sist_total_s: f64,
    pub oracle_feature_s: f64,
    pub oracle_classifier_s: f64,
    pub oracle_total_s: f64,
    /// Fraction of the oracle's total running time saved in each period.
    pub feature_saving: f64,
    pub classifier_saving: f64,
    pub total_saving: f64,
    pub sist_test_accuracy: f64,
    pub oracle_test_accuracy: f64,
}

pub fn ablation_report(
    d_train: &ValidatedDataset,
    d_test: &ValidatedDataset,
    hp: &Hyperparams,
    ocfg: &OracleConfig,
) -> Result<AblationReport> {
    let model = train_sist(d_train, hp)?;
    let sist_eval = evaluate(&model, d_test)?;
    let (oracle_model, _) = oracle::brute_force_st(d_train, ocfg)?;
    let oracle_eval = oracle::evaluate_oracle(&oracle_model, d_test)?;
    let st = model.timings;
    let ot = oracle_model.timings;
    Ok(AblationReport {
        sist_feature_s: st.feature_s(),
        sist_classifier_s: st.classifier_s,
        sist_total_s: st.total_s,
        oracle_feature_s: ot.feature_s(),
        oracle_classifier_s: ot.classifier_s,
        oracle_total_s: ot.total_s,
        feature_saving: (ot.feature_s() - st.feature_s()) / ot.total_s,
        classifier_saving: (ot.classifier_s - st.classifier_s) / ot.total_s,
        total_saving: (ot.total_s - st.attributed_s()) / ot.total_s,
        sist_test_accuracy: sist_eval.accuracy,
        oracle_test_accuracy: oracle_eval.accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::planted_dataset;

    fn quick_hp() -> Hyperparams {
        Hyperparams { shapelet_count: 10, ..Hyperparams::default() }
    }

    #[test]
    fn planted_feature_reaches_perfect_accuracy() {
        let train = planted_dataset(40, 30, 7);
        let test = planted_dataset(40, 30, 8);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let report = evaluate(&model, &test).unwrap();
        assert_eq!(report.accuracy, 1.0, "planted bump should separate perfectly");
        assert_eq!(report.n_test, 40);
        assert_eq!(
            report.true_negative + report.false_positive + report.false_negative
                + report.true_positive,
            report.n_test
        );
    }

    #[test]
    fn oversized_target_keeps_all_survivors() {
        let train = planted_dataset(10, 12, 3);
        let hp = Hyperparams { shapelet_count: 100_000, ..quick_hp() };
        let model = train_sist(&train, &hp).unwrap();
        assert!(model.basis.len() <= 10 * (12 - 3 + 1));
        assert!(model.basis.len() >= 1);
    }

    #[test]
    fn candidates_examined_matches_formula() {
        let train = planted_dataset(10, 50, 1);
        let model = train_sist(&train, &quick_hp()).unwrap();
        assert_eq!(model.candidates_examined, 480);
    }

    #[test]
    fn self_evaluation_reproduces_training_accuracy() {
        let train = planted_dataset(20, 24, 5);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let report = evaluate(&model, &train).unwrap();
        assert_eq!(report.accuracy, model.training_accuracy);
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let train = planted_dataset(20, 24, 5);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let other = planted_dataset(20, 30, 5);
        assert!(matches!(
            evaluate(&model, &other).unwrap_err(),
            SistError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn evaluate_rejects_unknown_class() {
        use crate::dataset::{validate_binary_isometric, LabeledDataset, TimeSeries};
        let train = planted_dataset(20, 24, 5);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let series = (0..4)
            .map(|i| TimeSeries::new(vec![i as f64; 24]).unwrap())
            .collect();
        let labels = vec!["x".into(), "x".into(), "y".into(), "y".into()];
        let strange =
            validate_binary_isometric(LabeledDataset::new(series, labels).unwrap()).unwrap();
        assert!(matches!(evaluate(&model, &strange).unwrap_err(), SistError::UnknownClass(_)));
    }

    #[test]
    fn model_roundtrip_preserves_predictions_exactly() {
        let train = planted_dataset(24, 20, 9);
        let test = planted_dataset(24, 20, 10);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let text = save_model(&model);
        let loaded = load_model(&text).unwrap();
        let a = evaluate(&model, &test).unwrap();
        let b = evaluate(&loaded, &test).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!(
            (a.true_negative, a.false_positive, a.false_negative, a.true_positive),
            (b.true_negative, b.false_positive, b.false_negative, b.true_positive)
        );
        // and the text form is a fixed point
        assert_eq!(save_model(&loaded), text);
    }

    #[test]
    fn truncated_model_is_corrupt() {
        let train = planted_dataset(12, 15, 2);
        let model = train_sist(&train, &quick_hp()).unwrap();
        let text = save_model(&model);
        let cut = &text[..text.len() / 2];
        assert!(matches!(load_model(cut).unwrap_err(), SistError::CorruptModel(_)));
    }

    #[test]
    fn wrong_schema_version_is_detected() {
        let err = load_model("sist-model v99\n").unwrap_err();
        assert!(matches!(err, SistError::SchemaVersionMismatch { .. }));
    }

    #[test]
    fn grid_single_cell_returns_it() {
        let d = planted_dataset(20, 15, 4);
        let grid = vec![quick_hp()];
        let (best, table) = grid_search_cv(&d, &grid, 2, 11).unwrap();
        assert_eq!(best, grid[0]);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn grid_dominant_cell_wins() {
        let d = planted_dataset(24, 18, 6);
        // absurd length 1 is strictly worse on this data than length 3
        let weak = Hyperparams { shapelet_len: 1, shapelet_count: 1, ..quick_hp() };
        let strong = quick_hp();
        let (best, _) = grid_search_cv(&d, &[weak, strong], 3, 2).unwrap();
        assert_eq!(best, strong);
        let (best_rev, _) = grid_search_cv(&d, &[strong, weak], 3, 2).unwrap();
        assert_eq!(best_rev, strong);
    }

    #[test]
    fn full_grid_has_160_cells() {
        let grid = build_grid(&Hyperparams::default(), None, None, None, None);
        assert_eq!(grid.len(), 160);
    }

    #[test]
    fn restricted_grid_dimensions_multiply() {
        let grid =
            build_grid(&Hyperparams::default(), None, None, None, Some(vec![10, 50]));
        assert_eq!(grid.len(), 2 * 2 * 4 * 2);
    }
}
