//! End-to-end pipeline, family sweeps and the declarative input document.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector, TorusWeights};
use crate::error::{Error, Result};
use crate::families::{expected_stable, make_family, FamilyInstance, FamilyKind, FamilyTag};
use crate::futaki::{k_stability_verdict, make_test_configuration, FutakiReport, Verdict};
use crate::gauge::normalize_reeb;
use crate::index_character::build_index_character;
use crate::rational::{rat, to_decimal, Rational};
use crate::volume::{build_slice, minimize_volume, Exactness};

/// Decimal digits printed next to exact volumes.
pub const VOLUME_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Gradient tolerance of the numeric minimizer.
    pub tol: f64,
    /// Treat central fibers of user degenerations as normal.
    pub assume_normal: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { tol: crate::volume::DEFAULT_TOLERANCE, assume_normal: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub name: String,
    pub family: Option<FamilyTag>,
    pub xi_star: ReebVector,
    #[serde(with = "crate::rational::serde_vec")]
    pub xi_star_weights: Vec<Rational>,
    pub exactness: Exactness,
    #[serde(with = "crate::rational::serde_str")]
    pub volume: Rational,
    pub volume_decimal: String,
    pub futaki: Vec<FutakiReport>,
    pub verdict: Verdict,
    /// Degenerations the verdict covers.
    pub scope: Vec<Vec<i64>>,
    pub link_topology: Option<i64>,
    pub expected_stable: Option<bool>,
    pub elapsed_us: u64,
}

/// Slice, minimizer, normalization, Futaki invariants and verdict.
pub fn analyze_variety(v: &ConeVariety, degenerations: &[Vec<i64>], opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let start = Instant::now();
    let slice = build_slice(v)?;
    let min = minimize_volume(v, &slice, opts.tol)?;
    let xi = normalize_reeb(v, &min.xi_star)?;
    let tcs = degenerations
        .iter()
        .map(|w| make_test_configuration(v, w, opts.assume_normal))
        .collect::<Result<Vec<_>>>()?;
    let derivative_tol = match min.exactness {
        Exactness::Exact => Rational::from_integer(0.into()),
        _ => Rational::from_float(opts.tol.max(1e-300)).unwrap_or_else(|| rat(1, 1_000_000_000_000)),
    };
    let report = k_stability_verdict(v, &xi, &tcs, &slice.directions, &derivative_tol)?;
    Ok(AnalysisReport {
        name: v.name.clone(),
        family: v.family().copied(),
        xi_star_weights: v.coordinate_weights(&xi.xi),
        xi_star: xi.xi,
        exactness: min.exactness,
        volume_decimal: to_decimal(&min.volume, VOLUME_DIGITS),
        volume: min.volume,
        futaki: report.reports,
        verdict: report.verdict,
        scope: report.scope,
        link_topology: v.family().map(|t| crate::families::link_topology(t.kind, t.p, t.q)),
        expected_stable: v.family().map(|t| expected_stable(t.kind, t.p, t.q)),
        elapsed_us: start.elapsed().as_micros() as u64,
    })
}

/// Analysis of a built-in family against its two registered degenerations.
pub fn analyze(instance: &FamilyInstance, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    analyze_variety(&instance.variety, &instance.degenerations, opts).map_err(|e| label(e, &instance.tag.to_string()))
}

fn label(e: Error, name: &str) -> Error {
    match e {
        Error::Internal(m) => Error::Internal(format!("{name}: {m}")),
        Error::InvalidInput(m) => Error::InvalidInput(format!("{name}: {m}")),
        other => other,
    }
}

/// One line of a sweep table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: FamilyKind,
    pub p: i64,
    pub q: i64,
    pub verdict: Option<String>,
    pub stable: Option<bool>,
    pub expected_stable: Option<bool>,
    pub volume: Option<String>,
    pub volume_decimal: Option<String>,
    pub fut_1: Option<String>,
    pub fut_2: Option<String>,
    pub link_topology: Option<i64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_result(kind: FamilyKind, p: i64, q: i64, result: Result<AnalysisReport>) -> Self {
        let mut row = SweepRow {
            family: kind,
            p,
            q,
            verdict: None,
            stable: None,
            expected_stable: None,
            volume: None,
            volume_decimal: None,
            fut_1: None,
            fut_2: None,
            link_topology: None,
            error: None,
        };
        match result {
            Ok(r) => {
                row.verdict = Some(r.verdict.to_string());
                row.stable = Some(r.verdict.is_stable());
                row.expected_stable = r.expected_stable;
                row.volume = Some(r.volume.to_string());
                row.volume_decimal = Some(r.volume_decimal);
                row.fut_1 = r.futaki.first().map(|f| f.fut.to_string());
                row.fut_2 = r.futaki.get(1).map(|f| f.fut.to_string());
                row.link_topology = r.link_topology;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }

    /// Verdict agrees with the closed-form condition (false on errors).
    pub fn matches_expectation(&self) -> bool {
        self.stable.is_some() && self.stable == self.expected_stable
    }
}

fn grid(p_range: (i64, i64), q_range: (i64, i64)) -> Vec<(i64, i64)> {
    (p_range.0..=p_range.1)
        .flat_map(|p| (q_range.0..=q_range.1).map(move |q| (p, q)))
        .collect()
}

fn run_one(kind: FamilyKind, p: i64, q: i64, opts: &AnalysisOptions) -> SweepRow {
    let result = make_family(kind, p, q).and_then(|f| analyze(&f, opts));
    SweepRow::from_result(kind, p, q, result)
}

/// Sweep over inclusive parameter ranges, one instance at a time.
pub fn sweep_sequential(kind: FamilyKind, p_range: (i64, i64), q_range: (i64, i64), opts: &AnalysisOptions) -> Vec<SweepRow> {
    grid(p_range, q_range)
        .into_iter()
        .map(|(p, q)| run_one(kind, p, q, opts))
        .collect()
}

/// Sweep with instances distributed over the rayon pool; rows come back
/// sorted by `(p, q)`.
#[cfg(feature = "parallel")]
pub fn sweep_parallel(kind: FamilyKind, p_range: (i64, i64), q_range: (i64, i64), opts: &AnalysisOptions) -> Vec<SweepRow> {
    use rayon::prelude::*;
    grid(p_range, q_range)
        .into_par_iter()
        .map(|(p, q)| run_one(kind, p, q, opts))
        .collect()
}

/// Parallel when the `parallel` feature is enabled.
pub fn sweep(kind: FamilyKind, p_range: (i64, i64), q_range: (i64, i64), opts: &AnalysisOptions) -> Vec<SweepRow> {
    #[cfg(feature = "parallel")]
    {
        sweep_parallel(kind, p_range, q_range, opts)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_sequential(kind, p_range, q_range, opts)
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

/// One CSV line per evaluated degeneration.
pub fn futaki_to_csv(r: &AnalysisReport) -> Result<String> {
    #[derive(Serialize)]
    struct Line<'a> {
        variety: &'a str,
        w: String,
        fut: String,
        sign: String,
        product: bool,
        volume: String,
        verdict: String,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for f in &r.futaki {
        let line = Line {
            variety: &r.name,
            w: format!("{:?}", f.w),
            fut: f.fut.to_string(),
            sign: format!("{:?}", f.sign).to_lowercase(),
            product: f.product,
            volume: r.volume.to_string(),
            verdict: r.verdict.to_string(),
        };
        w.serialize(line).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

/// Graded dimensions from lattice enumeration next to those read off the
/// index character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub name: String,
    pub xi: ReebVector,
    pub cutoff: u64,
    pub brute_force: Vec<u64>,
    pub series: Vec<u64>,
    /// Weights at which the two disagree.
    pub mismatches: Vec<u64>,
}

impl OracleReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn oracle_compare(v: &ConeVariety, xi: &ReebVector, cutoff: u64) -> Result<OracleReport> {
    let brute = v.hilbert_count_bruteforce(xi, cutoff)?;
    let series = build_index_character(v, xi, None)?.weight_expansion(cutoff)?;
    let at = |m: &std::collections::BTreeMap<u64, u64>, k: u64| m.get(&k).copied().unwrap_or(0);
    let brute_force: Vec<u64> = (0..=cutoff).map(|k| at(&brute, k)).collect();
    let series: Vec<u64> = (0..=cutoff).map(|k| at(&series, k)).collect();
    let mismatches = (0..=cutoff).filter(|&k| brute_force[k as usize] != series[k as usize]).collect();
    Ok(OracleReport { name: v.name.clone(), xi: xi.clone(), cutoff, brute_force, series, mismatches })
}

pub fn rows_to_text(rows: &[SweepRow]) -> String {
    let mut out = format!("{:<5} {:>4} {:>4}  {:<40} {:>16}  {:>5}\n", "fam", "p", "q", "verdict", "volume", "m");
    for r in rows {
        let verdict = r.verdict.clone().or_else(|| r.error.clone().map(|e| format!("error: {e}"))).unwrap_or_default();
        out.push_str(&format!(
            "{:<5} {:>4} {:>4}  {:<40} {:>16}  {:>5}\n",
            r.family.to_string(),
            r.p,
            r.q,
            verdict,
            r.volume_decimal.clone().unwrap_or_default(),
            r.link_topology.map(|m| m.to_string()).unwrap_or_default()
        ));
    }
    out
}

pub fn report_to_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("variety        {}\n", r.name));
    out.push_str(&format!("reeb field     {}\n", r.xi_star));
    let weights: Vec<String> = r.xi_star_weights.iter().map(ToString::to_string).collect();
    out.push_str(&format!("weights        ({})\n", weights.join(", ")));
    out.push_str(&format!("volume a0      {} = {}\n", r.volume, r.volume_decimal));
    for f in &r.futaki {
        out.push_str(&format!(
            "futaki {:<16} {} ({:?}{})\n",
            format!("{:?}", f.w),
            f.fut,
            f.sign,
            if f.product { ", product" } else { "" }
        ));
    }
    out.push_str(&format!("verdict        {}\n", r.verdict));
    match r.link_topology {
        Some(0) => out.push_str("link           S^5\n"),
        Some(m) => out.push_str(&format!("link           #{m}(S^2 x S^3)\n")),
        None => {}
    }
    out
}

/// Declarative description of a user variety.
///
/// ```toml
/// name = "A2 cone"
/// variables = ["u", "v", "z", "w"]
/// weights = [[1, -1, 0, 0], [0, 6, 2, 3]]
/// monomials = [[1, 1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 2]]
/// degenerations = [[0, 0, 1, 0], [0, 0, 0, 1]]
/// assume_normal = true
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyDocument {
    pub name: String,
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    pub weights: Vec<Vec<i64>>,
    #[serde(default)]
    pub monomials: Vec<Vec<u32>>,
    #[serde(default)]
    pub degenerations: Vec<Vec<i64>>,
    #[serde(default)]
    pub assume_normal: bool,
}

impl VarietyDocument {
    /// Accepts TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("JSON input: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("TOML input: {e}")))
        }
    }

    pub fn variety(&self) -> Result<ConeVariety> {
        let weights = TorusWeights::new(self.weights.clone())?;
        let v = if self.monomials.is_empty() {
            ConeVariety::affine_space(self.name.clone(), weights)
        } else {
            ConeVariety::hypersurface(self.name.clone(), weights, self.monomials.clone())?
        };
        match &self.variables {
            Some(names) => v.with_variables(names.clone()),
            None => Ok(v),
        }
    }

    pub fn analyze(&self, opts: &AnalysisOptions) -> Result<AnalysisReport> {
        let opts = AnalysisOptions { assume_normal: opts.assume_normal || self.assume_normal, ..*opts };
        analyze_variety(&self.variety()?, &self.degenerations, &opts)
    }
}
