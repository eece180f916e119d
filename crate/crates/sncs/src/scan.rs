//! Parameter-grid scans behind the CLI: uncertainty and geometric-phase
//! sweeps over complex eigenvalues (and the theta family of K matrices),
//! emitted as deterministic CSV or JSON.

use std::io::Write;

use rayon::prelude::*;

use crate::coherent::{closed_form_moments, CoherentLabel, QuadratureOps};
use crate::fock::DeformationKind;
use crate::geomphase::{closed_form_beta, geometric_phase_oracle};
use crate::supercoherent::{
    build_ac_superposition, build_superposition, closed_form_spinor_moments, SuperCoherentSpec,
    SuperpositionParams,
};
use crate::susy::{KFamily, KMatrix};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Inclusive numeric range with a positive step.
#[derive(Debug, Clone, Copy)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
            return Err(Error::Domain(format!(
                "bad range: min {min}, max {max}, step {step}"
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn single(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            step: 1.0,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 0.5).floor() as usize;
        (0..=n).map(|i| self.min + self.step * i as f64).collect()
    }
}

/// Everything one scan needs; built by the CLI from flags or a preset.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub kind: DeformationKind,
    /// None runs the scalar coherent-state scan; Some sweeps the theta
    /// family of SUSY annihilation operators.
    pub theta: Option<Range>,
    pub eta: f64,
    pub lambda: f64,
    pub re: Range,
    pub im: Range,
    pub dim: usize,
    pub tolerance: f64,
    pub omega: f64,
    pub oracle_check: bool,
    /// Evaluate the fixed-free-parameter A/C eigenstate family instead of
    /// the +/- pair superposition (the linear-case figure convention).
    pub ac_basis: bool,
    /// Free-text notes emitted into the output metadata header.
    pub notes: Vec<String>,
}

impl ScanConfig {
    pub fn params(&self) -> SuperpositionParams {
        SuperpositionParams::new(self.eta, self.lambda)
    }
}

/// One output row. `value` is the scan's quantity (product, product^2 or
/// beta); `oracle` is its matrix-path recomputation when requested.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub theta: Option<f64>,
    pub re: f64,
    pub im: f64,
    pub value: Option<f64>,
    pub oracle: Option<f64>,
    pub error: Option<String>,
}

impl ScanRow {
    fn failed(theta: Option<f64>, re: f64, im: f64, err: &Error) -> Self {
        Self {
            theta,
            re,
            im,
            value: None,
            oracle: None,
            error: Some(err.to_string()),
        }
    }
}

/// A finished scan: named value column plus the rows, ready to serialize.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub value_column: &'static str,
    pub with_theta: bool,
    pub with_oracle: bool,
    pub metadata: Vec<String>,
    pub rows: Vec<ScanRow>,
}

fn grid(config: &ScanConfig) -> Vec<(Option<f64>, f64, f64)> {
    let thetas: Vec<Option<f64>> = match &config.theta {
        Some(range) => range.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for theta in &thetas {
        for re in config.re.values() {
            for im in config.im.values() {
                points.push((*theta, re, im));
            }
        }
    }
    points
}

fn spinor_spec(config: &ScanConfig, theta: f64, eigenvalue: C64) -> Result<SuperCoherentSpec> {
    let base = KMatrix::theta_family(theta)?;
    let k = crate::susy::classify(base.k1, base.k2, base.k3, base.k4, config.tolerance)?;
    Ok(SuperCoherentSpec::new(k, config.kind, eigenvalue))
}

/// product^2 of the scan state at one spinor grid point, routed by family.
fn spinor_product_sq(config: &ScanConfig, spec: &SuperCoherentSpec, ops: &QuadratureOps) -> Result<f64> {
    if config.ac_basis {
        // The A/C family mixes branches outside the pair-superposition
        // closed forms; measure the built state.
        let state = build_ac_superposition(spec, &config.params(), config.dim)?;
        let rep = ops.spinor_moments(&state)?;
        return Ok(rep.product * rep.product);
    }
    match spec.k.family {
        KFamily::Generic => {
            let rep = closed_form_spinor_moments(spec, &config.params())?;
            Ok(rep.product * rep.product)
        }
        // No closed form off the generic family: measure the built state.
        KFamily::Degenerate => {
            let state = build_superposition(spec, &config.params(), config.dim)?;
            let rep = ops.spinor_moments(&state)?;
            Ok(rep.product * rep.product)
        }
        KFamily::Singular => Err(Error::WrongFamily {
            expected: "generic or degenerate",
            got: "singular",
        }),
    }
}

fn scan_state(config: &ScanConfig, spec: &SuperCoherentSpec) -> Result<crate::fock::SpinorState> {
    if config.ac_basis {
        build_ac_superposition(spec, &config.params(), config.dim)
    } else {
        build_superposition(spec, &config.params(), config.dim)
    }
}

fn spinor_product_sq_oracle(
    config: &ScanConfig,
    spec: &SuperCoherentSpec,
    ops: &QuadratureOps,
) -> Result<f64> {
    let rep = ops.spinor_moments(&scan_state(config, spec)?)?;
    Ok(rep.product * rep.product)
}

/// The uncertainty scan: sigma_x sigma_p over complex amplitudes for the
/// scalar families, or (sigma_x sigma_p)^2 of the theta-family superposition
/// in spinor mode.
pub fn run_uncertainty_scan(config: &ScanConfig) -> ScanResult {
    let points = grid(config);
    let ops = QuadratureOps::new(config.dim).expect("dim >= 2");
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|&(theta, re, im)| {
            let eigenvalue = C64::new(re, im);
            match theta {
                None => match closed_form_moments(CoherentLabel::new(config.kind, eigenvalue)) {
                    Ok(rep) => {
                        let oracle = if config.oracle_check {
                            match scalar_oracle_product_with(config, eigenvalue, &ops) {
                                Ok(v) => Some(v),
                                Err(e) => return ScanRow::failed(theta, re, im, &e),
                            }
                        } else {
                            None
                        };
                        ScanRow {
                            theta,
                            re,
                            im,
                            value: Some(rep.product),
                            oracle,
                            error: None,
                        }
                    }
                    Err(e) => ScanRow::failed(theta, re, im, &e),
                },
                Some(t) => {
                    let result = spinor_spec(config, t, eigenvalue).and_then(|spec| {
                        let value = spinor_product_sq(config, &spec, &ops)?;
                        let oracle = if config.oracle_check {
                            Some(spinor_product_sq_oracle(config, &spec, &ops)?)
                        } else {
                            None
                        };
                        Ok((value, oracle))
                    });
                    match result {
                        Ok((value, oracle)) => ScanRow {
                            theta,
                            re,
                            im,
                            value: Some(value),
                            oracle,
                            error: None,
                        },
                        Err(e) => ScanRow::failed(theta, re, im, &e),
                    }
                }
            }
        })
        .collect();

    ScanResult {
        value_column: if config.theta.is_some() {
            "product2"
        } else {
            "product"
        },
        with_theta: config.theta.is_some(),
        with_oracle: config.oracle_check,
        metadata: scan_metadata("uncertainty", config),
        rows,
    }
}

fn scalar_oracle_product_with(
    config: &ScanConfig,
    eigenvalue: C64,
    ops: &QuadratureOps,
) -> Result<f64> {
    let state = crate::coherent::build_state(
        CoherentLabel::new(config.kind, eigenvalue),
        config.dim,
    )?;
    Ok(ops.moments(&state)?.product)
}

/// The geometric-phase scan over the theta family.
pub fn run_geomphase_scan(config: &ScanConfig) -> ScanResult {
    let points = grid(config);
    let params = config.params();
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|&(theta, re, im)| {
            let t = theta.unwrap_or(std::f64::consts::FRAC_PI_4);
            let eigenvalue = C64::new(re, im);
            let result = spinor_spec(config, t, eigenvalue).and_then(|spec| {
                let beta = if !config.ac_basis && spec.k.family == KFamily::Generic {
                    closed_form_beta(&spec, &params, config.omega)?.beta
                } else {
                    let state = scan_state(config, &spec)?;
                    geometric_phase_oracle(&state, config.omega)?.beta
                };
                let oracle = if config.oracle_check {
                    let state = scan_state(config, &spec)?;
                    Some(geometric_phase_oracle(&state, config.omega)?.beta)
                } else {
                    None
                };
                Ok((beta, oracle))
            });
            match result {
                Ok((beta, oracle)) => ScanRow {
                    theta: Some(t),
                    re,
                    im,
                    value: Some(beta),
                    oracle,
                    error: None,
                },
                Err(e) => ScanRow::failed(Some(t), re, im, &e),
            }
        })
        .collect();

    ScanResult {
        value_column: "beta",
        with_theta: true,
        with_oracle: config.oracle_check,
        metadata: scan_metadata("geomphase", config),
        rows,
    }
}

fn scan_metadata(name: &str, config: &ScanConfig) -> Vec<String> {
    let mut m = vec![
        format!("sncs {name} scan"),
        format!("kind: {}", config.kind.label()),
        format!("eta: {}", fmt_f64(config.eta)),
        format!("lambda: {}", fmt_f64(config.lambda)),
        format!("dim: {}", config.dim),
        format!("omega: {}", fmt_f64(config.omega)),
    ];
    if let Some(t) = &config.theta {
        m.push(format!(
            "theta: {} .. {} step {}",
            fmt_f64(t.min),
            fmt_f64(t.max),
            fmt_f64(t.step)
        ));
    }
    m.extend(config.notes.iter().cloned());
    m
}

/// 17 significant digits: round-trip exact for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ScanResult {
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = Vec::new();
        if self.with_theta {
            cols.push("theta");
        }
        cols.push("re");
        cols.push("im");
        cols.push(self.value_column);
        if self.with_oracle {
            cols.push("oracle");
        }
        cols.push("error");
        cols
    }

    /// Comment-prefixed metadata, a header row, then one line per grid point.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for line in &self.metadata {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.columns().join(","))?;
        for row in &self.rows {
            let mut fields: Vec<String> = Vec::new();
            if self.with_theta {
                fields.push(row.theta.map(fmt_f64).unwrap_or_default());
            }
            fields.push(fmt_f64(row.re));
            fields.push(fmt_f64(row.im));
            fields.push(row.value.map(fmt_f64).unwrap_or_default());
            if self.with_oracle {
                fields.push(row.oracle.map(fmt_f64).unwrap_or_default());
            }
            fields.push(row.error.as_deref().map(csv_escape).unwrap_or_default());
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Array of row objects carrying the same field names as the CSV columns.
    pub fn write_json<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            if self.with_theta {
                obj.insert("theta".into(), json_f64(row.theta));
            }
            obj.insert("re".into(), json_f64(Some(row.re)));
            obj.insert("im".into(), json_f64(Some(row.im)));
            obj.insert(self.value_column.into(), json_f64(row.value));
            if self.with_oracle {
                obj.insert("oracle".into(), json_f64(row.oracle));
            }
            obj.insert(
                "error".into(),
                match &row.error {
                    Some(e) => serde_json::Value::String(e.clone()),
                    None => serde_json::Value::Null,
                },
            );
            rows.push(serde_json::Value::Object(obj));
        }
        serde_json::to_writer_pretty(&mut *w, &rows)
            .map_err(|e| Error::Domain(format!("json serialization failed: {e}")))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Largest |value - oracle| over rows where both exist.
    pub fn max_oracle_deviation(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| Some((r.value? - r.oracle?).abs()))
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }
}

fn json_f64(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(v) => serde_json::Number::from_f64(v)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
        None => serde_json::Value::Null,
    }
}

/// Figure presets: the published plots print no numeric axis ranges, so
/// these windows are documented approximations.
pub fn preset(name: &str) -> Result<(ScanConfig, &'static str)> {
    use std::f64::consts::PI;
    let quarter = PI / 4.0;
    let theta_sweep = Range::new(PI / 32.0, PI - PI / 32.0, PI / 32.0)?;
    let note =
        "axis ranges approximate the published surfaces; none are printed there".to_string();
    let base = ScanConfig {
        kind: DeformationKind::Linear,
        theta: None,
        eta: quarter,
        lambda: quarter,
        re: Range::new(0.0, 3.0, 0.1)?,
        im: Range::single(0.0),
        dim: crate::fock::DEFAULT_DIM,
        tolerance: crate::susy::CLASSIFY_TOL,
        omega: 1.0,
        oracle_check: false,
        ac_basis: false,
        notes: vec![note],
    };
    let (config, command) = match name {
        "fig1" => (
            ScanConfig {
                kind: DeformationKind::ShiftedNumber,
                re: Range::new(-3.0, 3.0, 0.1)?,
                im: Range::new(-3.0, 3.0, 0.1)?,
                ..base
            },
            "uncertainty",
        ),
        "fig2" => (
            ScanConfig {
                kind: DeformationKind::Number,
                re: Range::new(-3.0, 3.0, 0.1)?,
                im: Range::new(-3.0, 3.0, 0.1)?,
                ..base
            },
            "uncertainty",
        ),
        "fig3" => (
            ScanConfig {
                kind: DeformationKind::Linear,
                theta: Some(theta_sweep),
                dim: 256,
                // The published linear-case comparison plots a fixed member
                // of the eigenspace, not the +/- pair superposition (the
                // pair turns into a growing cat state and has no interior
                // maximum).
                ac_basis: true,
                ..base
            },
            "uncertainty",
        ),
        "fig4" => (
            ScanConfig {
                kind: DeformationKind::ShiftedNumber,
                theta: Some(theta_sweep),
                ..base
            },
            "uncertainty",
        ),
        "fig5" => (
            ScanConfig {
                kind: DeformationKind::Number,
                theta: Some(theta_sweep),
                ..base
            },
            "uncertainty",
        ),
        "fig6" => (
            ScanConfig {
                kind: DeformationKind::ShiftedNumber,
                theta: Some(Range::new(quarter, 3.0 * quarter, 2.0 * quarter)?),
                re: Range::new(0.0, 3.0, 0.1)?,
                ..base
            },
            "geomphase",
        ),
        "fig7" => (
            ScanConfig {
                kind: DeformationKind::Number,
                theta: Some(Range::new(quarter, 3.0 * quarter, 2.0 * quarter)?),
                re: Range::new(0.0, 3.0, 0.1)?,
                ..base
            },
            "geomphase",
        ),
        other => {
            return Err(Error::Domain(format!(
                "unknown preset {other:?} (expected fig1..fig7)"
            )))
        }
    };
    Ok((config, command))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tiny_config(kind: DeformationKind, theta: Option<Range>) -> ScanConfig {
        ScanConfig {
            kind,
            theta,
            eta: PI / 4.0,
            lambda: PI / 4.0,
            re: Range::new(0.0, 1.0, 0.5).unwrap(),
            im: Range::single(0.0),
            dim: 64,
            tolerance: crate::susy::CLASSIFY_TOL,
            omega: 1.0,
            oracle_check: false,
            ac_basis: false,
            notes: vec![],
        }
    }

    #[test]
    fn range_values_hit_both_endpoints() {
        let r = Range::new(0.0, 1.0, 0.25).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 1.0);
    }

    #[test]
    fn scalar_scan_origin_rows_match_family_limits() {
        let scan = run_uncertainty_scan(&tiny_config(DeformationKind::ShiftedNumber, None));
        let origin = &scan.rows[0];
        assert!((origin.value.unwrap() - 0.5).abs() < 1e-10);

        let scan = run_uncertainty_scan(&tiny_config(DeformationKind::Number, None));
        assert!((scan.rows[0].value.unwrap() - 1.5).abs() < 1e-10);
    }

    #[test]
    fn spinor_scan_origin_row_product_sq() {
        let theta = Some(Range::single(PI / 4.0));
        let scan = run_uncertainty_scan(&tiny_config(DeformationKind::Number, theta));
        assert!((scan.rows[0].value.unwrap() - 2.25).abs() < 1e-8);
    }

    #[test]
    fn geomphase_scan_origin_rows() {
        let theta = Some(Range::single(PI / 4.0));
        let scan = run_geomphase_scan(&tiny_config(DeformationKind::ShiftedNumber, theta));
        assert!(scan.rows[0].value.unwrap().abs() < 1e-8);
        let scan = run_geomphase_scan(&tiny_config(DeformationKind::Number, theta));
        assert!((scan.rows[0].value.unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn csv_output_is_deterministic_and_carries_17_digits() {
        let config = tiny_config(DeformationKind::ShiftedNumber, None);
        let scan_a = run_uncertainty_scan(&config);
        let scan_b = run_uncertainty_scan(&config);
        let mut a = Vec::new();
        let mut b = Vec::new();
        scan_a.write_csv(&mut a).unwrap();
        scan_b.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let data_line = text
            .lines()
            .find(|l| !l.starts_with('#') && !l.starts_with("re,"))
            .unwrap();
        // One mantissa digit before the point, sixteen after.
        assert!(data_line.contains("e0") || data_line.contains("e-"));
        let field = data_line.split(',').nth(2).unwrap();
        let mantissa = field.split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
        // Round trip.
        let parsed: f64 = field.parse().unwrap();
        assert_eq!(fmt_f64(parsed), field);
    }

    #[test]
    fn singular_rows_carry_error_markers_not_panics() {
        // A scan config cannot reach singular K through the theta family, so
        // exercise the row-level error path with a failing construction:
        // linear kind at dim too small for the amplitude.
        let mut config = tiny_config(DeformationKind::Linear, None);
        config.dim = 8;
        config.oracle_check = true;
        config.re = Range::new(3.0, 3.0, 1.0).unwrap();
        let scan = run_uncertainty_scan(&config);
        assert_eq!(scan.failed_rows(), 1);
        let mut out = Vec::new();
        scan.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("truncation"), "{text}");
    }

    #[test]
    fn json_rows_mirror_csv_fields() {
        let theta = Some(Range::single(PI / 4.0));
        let scan = run_uncertainty_scan(&tiny_config(DeformationKind::ShiftedNumber, theta));
        let mut out = Vec::new();
        scan.write_json(&mut out).unwrap();
        let rows: Vec<serde_json::Value> = serde_json::from_slice(&out).unwrap();
        assert_eq!(rows.len(), scan.rows.len());
        assert!(rows[0].get("theta").is_some());
        assert!(rows[0].get("product2").is_some());
        assert!(rows[0].get("error").unwrap().is_null());
    }

    #[test]
    fn presets_cover_the_published_figures() {
        for name in ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
            let (config, command) = preset(name).unwrap();
            assert!(!config.notes.is_empty());
            assert!(command == "uncertainty" || command == "geomphase");
        }
        assert!(preset("fig8").is_err());
    }

    #[test]
    fn theta_sweep_crossing_the_boundary_emits_no_errors() {
        let mut config = tiny_config(
            DeformationKind::ShiftedNumber,
            Some(Range::new(PI / 2.0 - 0.01, PI / 2.0 + 0.01, 0.005).unwrap()),
        );
        config.re = Range::single(0.8);
        let scan = run_uncertainty_scan(&config);
        assert_eq!(scan.failed_rows(), 0);
        for row in &scan.rows {
            let v = row.value.unwrap();
            assert!((0.25 - 1e-9..1.0).contains(&v), "odd product^2 {v}");
        }
    }
}
