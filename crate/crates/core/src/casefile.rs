//! User-supplied case files: a JSON schema mirroring the built-in corpus
//! cases, with components given as closed-form expressions.
//!
//! ```json
//! {
//!   "id": "my_case",
//!   "coordinates": ["x", "y"],
//!   "signature": [2, 0],
//!   "sample_box": [[-1.0, 1.0], [-1.0, 1.0]],
//!   "domain": "1 - (x*x + y*y)",
//!   "metric": [["1", "0"], ["0", "1"]],
//!   "scalars": { "alpha": "x*x - y*y" },
//!   "vectors": { "rot": ["-y", "x"] },
//!   "tensors": { "T": [["1", "0"], ["0", "1"]] }
//! }
//! ```
//!
//! `domain` is optional and read as "the expression is positive"; when
//! absent the sample box itself is the domain.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::chart::Chart;
use crate::corpus::GeometryCase;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{JetTensor, MetricField, ScalarField, Symmetry, TensorField,
                    VectorFieldOnChart};

#[derive(Deserialize)]
struct RawCase {
    id: String,
    coordinates: Vec<String>,
    signature: (usize, usize),
    sample_box: Vec<(f64, f64)>,
    #[serde(default)]
    domain: Option<String>,
    metric: Vec<Vec<String>>,
    #[serde(default)]
    scalars: BTreeMap<String, String>,
    #[serde(default)]
    vectors: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    tensors: BTreeMap<String, Vec<Vec<String>>>,
}

/// Parse a case from JSON text.
pub fn parse_case(json: &str) -> Result<GeometryCase> {
    let raw: RawCase =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("case file: {e}")))?;
    let n = raw.coordinates.len();
    if n == 0 {
        return Err(Error::Parse("a case needs at least one coordinate".into()));
    }
    if raw.sample_box.len() != n {
        return Err(Error::Parse(format!(
            "sample_box has {} entries for {n} coordinates",
            raw.sample_box.len()
        )));
    }
    if raw.signature.0 + raw.signature.1 != n {
        return Err(Error::Parse(format!(
            "signature {:?} does not sum to the dimension {n}",
            raw.signature
        )));
    }
    if raw.metric.len() != n || raw.metric.iter().any(|row| row.len() != n) {
        return Err(Error::Parse(format!("metric must be an {n}x{n} expression matrix")));
    }

    let domain_expr = raw
        .domain
        .as_deref()
        .map(|src| Expr::parse(src, &raw.coordinates))
        .transpose()?;
    let chart = match domain_expr {
        Some(expr) => Chart::new(raw.id.clone(), raw.sample_box.clone(), move |p| {
            expr.eval_f64(p).map(|v| v > 0.0).unwrap_or(false)
        }),
        None => {
            let bounds = raw.sample_box.clone();
            Chart::new(raw.id.clone(), raw.sample_box.clone(), move |p| {
                p.iter()
                    .zip(bounds.iter())
                    .all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
            })
        }
    };

    let parse_matrix = |rows: &[Vec<String>]| -> Result<Arc<Vec<Vec<Expr>>>> {
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for src in row {
                r.push(Expr::parse(src, &raw.coordinates)?);
            }
            out.push(r);
        }
        Ok(Arc::new(out))
    };

    let metric_exprs = parse_matrix(&raw.metric)?;
    let metric = MetricField::new(chart.clone(), raw.signature, move |seeds| {
        metric_exprs
            .iter()
            .map(|row| row.iter().map(|e| e.eval_jets(seeds)).collect())
            .collect()
    });

    let mut case = GeometryCase {
        id: raw.id,
        chart: chart.clone(),
        metric,
        scalars: BTreeMap::new(),
        vectors: BTreeMap::new(),
        tensors: BTreeMap::new(),
        extra_metrics: BTreeMap::new(),
        expected: Vec::new(),
        notes: vec!["user-supplied case file".to_string()],
    };
    for (name, src) in &raw.scalars {
        let expr = Expr::parse(src, &raw.coordinates)?;
        case.scalars.insert(
            name.clone(),
            ScalarField::new(chart.clone(), move |seeds| expr.eval_jets(seeds)),
        );
    }
    for (name, comps) in &raw.vectors {
        if comps.len() != n {
            return Err(Error::Parse(format!(
                "vector `{name}` has {} components on a {n}-dimensional chart",
                comps.len()
            )));
        }
        let exprs: Vec<Expr> = comps
            .iter()
            .map(|src| Expr::parse(src, &raw.coordinates))
            .collect::<Result<_>>()?;
        let exprs = Arc::new(exprs);
        case.vectors.insert(
            name.clone(),
            VectorFieldOnChart::new(chart.clone(), move |seeds| {
                exprs.iter().map(|e| e.eval_jets(seeds)).collect()
            }),
        );
    }
    for (name, rows) in &raw.tensors {
        if rows.len() != n || rows.iter().any(|row| row.len() != n) {
            return Err(Error::Parse(format!("tensor `{name}` must be {n}x{n}")));
        }
        let exprs = parse_matrix(rows)?;
        case.tensors.insert(
            name.clone(),
            TensorField::new(chart.clone(), 2, Symmetry::None, move |seeds| {
                let jets: Vec<Vec<_>> = exprs
                    .iter()
                    .map(|row| row.iter().map(|e| e.eval_jets(seeds)).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?;
                JetTensor::from_fn(jets.len(), 2, |idx| Ok(jets[idx[0]][idx[1]].clone()))
            }),
        );
    }
    Ok(case)
}

/// Load a case from a JSON file on disk.
pub fn load_case(path: impl AsRef<Path>) -> Result<GeometryCase> {
    let text = std::fs::read_to_string(path)?;
    parse_case(&text)
}
